#include "pqspace/cube.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "pqspace/rng.hpp"

namespace pqspace::cube {

using nlohmann::json;

namespace {

std::string bit_label(std::uint32_t value, int n) {
    std::string s(n, '0');
    for (int i = 0; i < n; ++i)
        if (value & (1u << (n - 1 - i))) s[i] = '1'; // MSB first
    return s;
}

int asym_count(std::uint32_t s, std::uint32_t t, std::uint32_t full) {
    return std::popcount(static_cast<std::uint32_t>(~s & t & full));
}

// Smallest integer k with k >= value.
std::int64_t ceil_rational(const Rational& value) {
    const BigInt num = numerator(value);
    const BigInt den = denominator(value); // positive by normalization
    BigInt q = num / den;
    if (num > q * den) q += 1;
    return q.convert_to<std::int64_t>();
}

template <class T, class Dist>
SpaceT<T> materialize_impl(const CubeSpec& spec, Dist dist) {
    if (spec.n < 1 || spec.n > kMaxMaterializeDim)
        raise(ErrorKind::domain, "materialized cubes are capped at dimension " +
                                     std::to_string(kMaxMaterializeDim) +
                                     "; use the implicit majority-set operations beyond");
    const int n = spec.n;
    const std::uint32_t count = 1u << n;
    const std::uint32_t full = count - 1;
    std::vector<std::string> labels(count);
    for (std::uint32_t v = 0; v < count; ++v) labels[v] = bit_label(v, n);
    std::vector<T> q(static_cast<std::size_t>(count) * count);
    for (std::uint32_t s = 0; s < count; ++s)
        for (std::uint32_t t = 0; t < count; ++t)
            q[static_cast<std::size_t>(s) * count + t] = dist(s, t, full);
    std::vector<T> mu(count, T(1) / T(static_cast<int>(count)));
    return SpaceT<T>(std::move(labels), std::move(q), std::move(mu));
}

} // namespace

Space materialize(const CubeSpec& spec) {
    const double n = spec.n;
    if (spec.variant == Variant::metric)
        return materialize_impl<double>(spec, [n](std::uint32_t s, std::uint32_t t, std::uint32_t) {
            return std::popcount(s ^ t) / n;
        });
    return materialize_impl<double>(spec, [n](std::uint32_t s, std::uint32_t t, std::uint32_t full) {
        return asym_count(s, t, full) / n;
    });
}

RationalSpace materialize_rational(const CubeSpec& spec) {
    const int n = spec.n;
    if (spec.variant == Variant::metric)
        return materialize_impl<Rational>(spec,
                                          [n](std::uint32_t s, std::uint32_t t, std::uint32_t) {
                                              return Rational(std::popcount(s ^ t), n);
                                          });
    return materialize_impl<Rational>(spec,
                                      [n](std::uint32_t s, std::uint32_t t, std::uint32_t full) {
                                          return Rational(asym_count(s, t, full), n);
                                      });
}

GammaLaw gamma_law_exact(int n) {
    if (n < 1) raise(ErrorKind::invalid_argument, "dimension must be positive");
    GammaLaw law;
    law.n = n;
    law.exact = n <= kMaxExactGammaDim;

    if (law.exact) {
        // Integer counts over offsets -n..n (shifted by n); total mass 4^n.
        std::vector<BigInt> counts(2 * n + 1), next(2 * n + 1);
        counts[n] = 1;
        for (int step = 0; step < n; ++step) {
            std::fill(next.begin(), next.end(), BigInt(0));
            for (int k = 0; k <= 2 * n; ++k) {
                if (counts[k] == 0) continue;
                next[k] += 2 * counts[k];
                if (k > 0) next[k - 1] += counts[k];
                if (k < 2 * n) next[k + 1] += counts[k];
            }
            counts.swap(next);
        }
        BigInt denom = 1;
        denom <<= 2 * n; // 4^n
        law.pmf_exact.resize(n + 1);
        law.pmf.resize(n + 1);
        law.pmf_exact[0] = Rational(counts[n], denom);
        for (int k = 1; k <= n; ++k)
            law.pmf_exact[k] = Rational(counts[n + k] + counts[n - k], denom);
        for (int k = 0; k <= n; ++k) law.pmf[k] = to_double(law.pmf_exact[k]);
        return law;
    }

    std::vector<double> counts(2 * n + 1, 0.0), next(2 * n + 1, 0.0);
    counts[n] = 1.0;
    for (int step = 0; step < n; ++step) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int k = 0; k <= 2 * n; ++k) {
            const double c = counts[k];
            if (c == 0.0) continue;
            next[k] += 0.5 * c;
            if (k > 0) next[k - 1] += 0.25 * c;
            if (k < 2 * n) next[k + 1] += 0.25 * c;
        }
        counts.swap(next);
    }
    law.pmf.resize(n + 1);
    law.pmf[0] = counts[n];
    for (int k = 1; k <= n; ++k) law.pmf[k] = counts[n + k] + counts[n - k];
    return law;
}

Rational GammaLaw::tail_exact(const Rational& eps) const {
    if (!exact) raise(ErrorKind::domain, "law was computed in double precision");
    std::int64_t k_min = eps > 0 ? ceil_rational(eps * n) : 0;
    if (k_min < 0) k_min = 0;
    Rational total(0);
    for (std::int64_t k = k_min; k <= n; ++k) total += pmf_exact[k];
    return total;
}

double GammaLaw::tail(const Rational& eps) const {
    if (exact) return to_double(tail_exact(eps));
    std::int64_t k_min = eps > 0 ? ceil_rational(eps * n) : 0;
    if (k_min < 0) k_min = 0;
    // Kahan-compensated: tails reach 1e-12 territory where naive accumulation
    // of many tiny terms loses digits.
    double sum = 0.0, c = 0.0;
    for (std::int64_t k = n; k >= k_min; --k) {
        const double y = pmf[k] - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    return sum;
}

BoundReport check_gamma_bound(const GammaLaw& law, std::span<const Rational> eps_grid) {
    BoundReport report;
    for (const Rational& eps : eps_grid) {
        const double e = to_double(eps);
        const double tail = law.tail(eps);
        const double bound = 2.0 * std::exp(-law.n * e * e / 2.0);
        report.rows.push_back({e, tail, bound, bound - tail});
        if (tail > bound) report.ok = false;
    }
    return report;
}

std::vector<McRow> gamma_monte_carlo(int n, std::uint64_t samples, std::uint64_t seed,
                                     std::span<const Rational> eps_grid) {
    if (samples == 0) raise(ErrorKind::invalid_argument, "samples must be positive");
    if (n < 1) raise(ErrorKind::invalid_argument, "dimension must be positive");
    const GammaLaw law = gamma_law_exact(n);

    const int words = (n + 63) / 64;
    const std::uint64_t last_mask = (n % 64 == 0) ? ~0ull : ((1ull << (n % 64)) - 1);
    Rng rng(seed);
    std::vector<std::uint64_t> histogram(n + 1, 0);
    for (std::uint64_t s = 0; s < samples; ++s) {
        int zero_to_one = 0, one_to_zero = 0;
        for (int w = 0; w < words; ++w) {
            const std::uint64_t mask = (w + 1 == words) ? last_mask : ~0ull;
            const std::uint64_t sigma = rng.next_u64() & mask;
            const std::uint64_t tau = rng.next_u64() & mask;
            zero_to_one += std::popcount(~sigma & tau & mask);
            one_to_zero += std::popcount(sigma & ~tau & mask);
        }
        histogram[std::abs(zero_to_one - one_to_zero)] += 1;
    }

    std::vector<McRow> rows;
    for (const Rational& eps : eps_grid) {
        std::int64_t k_min = eps > 0 ? ceil_rational(eps * n) : 0;
        if (k_min < 0) k_min = 0;
        std::uint64_t hits = 0;
        for (std::int64_t k = k_min; k <= n; ++k) hits += histogram[k];
        const double p_hat = static_cast<double>(hits) / static_cast<double>(samples);
        const double se = std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(samples));
        rows.push_back({to_double(eps), p_hat, se, law.tail(eps)});
    }
    return rows;
}

double binomial_upper_tail(std::int64_t n, std::int64_t k) {
    if (k <= 0) return 1.0;
    if (k > n) return 0.0;
    // log-space terms with the recurrence term(j+1)/term(j) = (n-j)/(j+1);
    // summed relative to the largest term.
    std::vector<double> logs;
    logs.reserve(static_cast<std::size_t>(n - k + 1));
    double lt = std::lgamma(static_cast<double>(n) + 1.0) -
                std::lgamma(static_cast<double>(k) + 1.0) -
                std::lgamma(static_cast<double>(n - k) + 1.0) -
                static_cast<double>(n) * std::log(2.0);
    double max_log = lt;
    logs.push_back(lt);
    for (std::int64_t j = k; j < n; ++j) {
        lt += std::log(static_cast<double>(n - j)) - std::log(static_cast<double>(j + 1));
        logs.push_back(lt);
        max_log = std::max(max_log, lt);
    }
    double sum = 0.0, c = 0.0;
    for (double lg : logs) {
        const double y = std::exp(lg - max_log) - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    const double result = std::exp(max_log) * sum;
    return std::min(result, 1.0);
}

LlnReport lln_check(std::span<const std::int64_t> n_grid, std::span<const double> t_grid) {
    LlnReport report;
    for (std::int64_t N : n_grid) {
        if (N < 1 || N > 1000000)
            raise(ErrorKind::invalid_argument, "N must be in [1, 1e6]");
        for (double t : t_grid) {
            if (t < 0) raise(ErrorKind::invalid_argument, "t must be nonnegative");
            const double half = static_cast<double>(N) / 2.0;
            const auto ku = static_cast<std::int64_t>(std::ceil(half + t));
            const auto kl = static_cast<std::int64_t>(std::floor(half - t));
            double tail;
            if (kl >= ku - 1) {
                tail = 1.0; // the two half-lines cover every outcome
            } else {
                tail = binomial_upper_tail(N, ku) + binomial_upper_tail(N, N - kl);
                tail = std::min(tail, 1.0);
            }
            const double bound = 2.0 * std::exp(-2.0 * t * t / static_cast<double>(N));
            report.rows.push_back({N, t, tail, bound, bound - tail});
            if (tail > bound) report.ok = false;
        }
    }
    return report;
}

MajorityTail majority_deficiency(const CubeSpec& spec, const Rational& eps, Side side) {
    if (!(eps > 0)) raise(ErrorKind::invalid_argument, "eps must be positive");
    const int n = spec.n;
    if (n < 1) raise(ErrorKind::invalid_argument, "dimension must be positive");
    const std::int64_t threshold = n / 2; // floor

    MajorityTail result;
    // mu(A) = P(B_n <= floor(n/2)) = P(B_n >= ceil(n/2)) by symmetry.
    result.mass = binomial_upper_tail(n, (n + 1) / 2);

    const bool right_asym = spec.variant == Variant::asymmetric && side == Side::right;
    if (right_asym) {
        // The all-zeros string is in A, and q(x, all-zeros) counts 0->1 flips
        // from x, of which there are none: every point is at right distance 0.
        result.deficiency = 0.0;
        return result;
    }
    // metric/associated and asymmetric-left all reduce to
    // dist(A, x) = max(0, weight(x) - floor(n/2)) / n.
    std::int64_t k = ceil_rational(eps * n); // dist >= eps  <=>  weight >= threshold + k
    if (k < 1) k = 1;
    result.deficiency = binomial_upper_tail(n, threshold + k);
    return result;
}

SamplerResult majority_neighborhood_sampler(const CubeSpec& spec, const Rational& eps, Side side,
                                            std::uint64_t samples, std::uint64_t seed) {
    if (samples == 0) raise(ErrorKind::invalid_argument, "samples must be positive");
    const MajorityTail closed = majority_deficiency(spec, eps, side);
    const int n = spec.n;
    const std::int64_t threshold = n / 2;
    std::int64_t k = ceil_rational(eps * Rational(n));
    if (k < 1) k = 1;
    const bool right_asym = spec.variant == Variant::asymmetric && side == Side::right;

    const int words = (n + 63) / 64;
    const std::uint64_t last_mask = (n % 64 == 0) ? ~0ull : ((1ull << (n % 64)) - 1);
    Rng rng(seed);
    std::uint64_t hits = 0;
    for (std::uint64_t s = 0; s < samples; ++s) {
        int weight = 0;
        for (int w = 0; w < words; ++w) {
            const std::uint64_t mask = (w + 1 == words) ? last_mask : ~0ull;
            weight += std::popcount(rng.next_u64() & mask);
        }
        if (!right_asym && weight >= threshold + k) ++hits;
    }
    const double p_hat = static_cast<double>(hits) / static_cast<double>(samples);
    const double se = std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(samples));
    return {p_hat, se, samples, closed.deficiency};
}

CubeAlphaResult cube_alpha_exact(const CubeSpec& spec, const std::vector<Rational>* eps_grid) {
    if (spec.n > kMaxExactAlphaDim)
        raise(ErrorKind::domain, "exact cube concentration is capped at dimension " +
                                     std::to_string(kMaxExactAlphaDim));
    const RationalSpace space = materialize_rational(spec);
    CubeAlphaResult result;
    result.curve = alpha_curve(space, eps_grid);
    for (std::size_t i = 1; i < result.curve.epsilons.size(); ++i) {
        const double e = to_double(result.curve.epsilons[i]);
        const double value = to_double(result.curve.alpha_assoc[i]);
        const double bound = std::exp(-2.0 * e * e * spec.n);
        result.bound.rows.push_back({e, value, bound, bound - value});
        if (value > bound) result.bound.ok = false;
    }
    return result;
}

std::string gamma_csv(const GammaLaw& law) {
    std::ostringstream out;
    out << "gamma,probability\n";
    for (int k = 0; k <= law.n; ++k)
        out << format_double(static_cast<double>(k) / law.n) << ',' << format_double(law.pmf[k])
            << '\n';
    return out.str();
}

std::string bound_report_json(const BoundReport& report, int n) {
    json rows = json::array();
    for (const auto& r : report.rows)
        rows.push_back({{"eps", r.eps}, {"value", r.value}, {"bound", r.bound}, {"margin", r.margin}});
    return json{{"schema_version", 1}, {"n", n}, {"ok", report.ok}, {"rows", rows}}.dump(2) + "\n";
}

std::string lln_report_json(const LlnReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows)
        rows.push_back({{"N", r.trials},
                        {"t", r.t},
                        {"tail", r.tail},
                        {"bound", r.bound},
                        {"margin", r.margin}});
    return json{{"schema_version", 1}, {"ok", report.ok}, {"rows", rows}}.dump(2) + "\n";
}

std::string mc_csv(std::span<const McRow> rows) {
    std::ostringstream out;
    out << "eps,empirical,stderr,exact\n";
    for (const auto& r : rows)
        out << format_double(r.eps) << ',' << format_double(r.empirical) << ','
            << format_double(r.stderr_) << ',' << format_double(r.exact) << '\n';
    return out.str();
}

} // namespace pqspace::cube
