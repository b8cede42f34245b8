#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pqspace/error.hpp"
#include "pqspace/parallel.hpp"
#include "pqspace/rational.hpp"
#include "pqspace/rng.hpp"
#include "pqspace/space.hpp"

namespace pqspace {

// Exhaustive subset enumeration is 2^n; beyond this cap callers must use the
// sampled lower-bound estimator or the closed-form cube machinery.
inline constexpr int kMaxExactPoints = 22;

enum class CurveMethod { exact, lipschitz_family, monte_carlo };

inline const char* curve_method_name(CurveMethod m) {
    switch (m) {
        case CurveMethod::exact: return "exact";
        case CurveMethod::lipschitz_family: return "lipschitz_family";
        default: return "monte_carlo";
    }
}

template <class T>
struct AlphaResult {
    T value{};
    std::uint32_t witness = 0; // maximizing subset, lowest bitmask on ties
};

namespace detail {

// Subset kernel for one space: per-subset measures are tabulated once, then
// each (eps, side) query enumerates subsets in Gray-code order, maintaining
// the neighborhood union incrementally through per-point reach masks
// R_x = { y : q(x,y) < eps } (left), so every step costs one mask update.
//
// Measure sums are always taken in increasing point order (the table
// recurrence peels the highest set bit), which keeps double-mode results
// bit-deterministic and monotone under set inclusion.
template <class T>
class AlphaEngine {
public:
    explicit AlphaEngine(const SpaceT<T>& space) : space_(space), n_(space.size()) {
        if (n_ > kMaxExactPoints)
            raise(ErrorKind::domain,
                  "exact concentration enumeration is capped at " +
                      std::to_string(kMaxExactPoints) +
                      " points; use the sampled estimator for larger spaces");
        const std::uint32_t count = 1u << n_;
        measure_.resize(count);
        measure_[0] = T(0);
        for (std::uint32_t m = 1; m < count; ++m) {
            const std::uint32_t high = std::bit_floor(m);
            measure_[m] = measure_[m ^ high] + space.mu(std::countr_zero(high));
        }
        const T half = T(1) / T(2);
        qualifies_.resize(count);
        for (std::uint32_t m = 0; m < count; ++m) qualifies_[m] = measure_[m] >= half;
    }

    int size() const { return n_; }
    const T& subset_measure(std::uint32_t mask) const { return measure_[mask]; }

    AlphaResult<T> alpha(const T& eps, Side side, int threads = 1) const {
        if (!(eps > T(0)))
            raise(ErrorKind::invalid_argument, "alpha requires eps > 0");

        std::vector<std::uint32_t> reach(n_, 0);
        for (int i = 0; i < n_; ++i) {
            std::uint32_t mask = 0;
            for (int y = 0; y < n_; ++y) {
                bool in;
                switch (side) {
                    case Side::left: in = space_.q(i, y) < eps; break;
                    case Side::right: in = space_.q(y, i) < eps; break;
                    default:
                        in = std::max(space_.q(i, y), space_.q(y, i)) < eps;
                        break;
                }
                if (in) mask |= 1u << y;
            }
            reach[i] = mask;
        }

        const std::uint64_t count = 1ull << n_;
        if (threads <= 0) threads = hardware_threads();
        const int blocks = static_cast<int>(
            std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), count));

        struct Best {
            bool found = false;
            T covered{};
            std::uint32_t mask = 0;
        };
        std::vector<Best> best(blocks);

        run_parallel(blocks, blocks, [&](std::size_t b) {
            const std::uint64_t lo = count * b / blocks;
            const std::uint64_t hi = count * (b + 1) / blocks;
            Best local;
            std::vector<int> cnt(n_, 0);
            std::uint32_t mask = static_cast<std::uint32_t>(lo ^ (lo >> 1));
            std::uint32_t uni = 0;
            for (std::uint32_t m = mask; m != 0; m &= m - 1) {
                const int i = std::countr_zero(m);
                for (std::uint32_t r = reach[i]; r != 0; r &= r - 1) {
                    const int y = std::countr_zero(r);
                    if (cnt[y]++ == 0) uni |= 1u << y;
                }
            }
            for (std::uint64_t idx = lo;;) {
                if (qualifies_[mask]) {
                    const T& covered = measure_[uni];
                    if (!local.found || covered < local.covered ||
                        (covered == local.covered && mask < local.mask)) {
                        local.found = true;
                        local.covered = covered;
                        local.mask = mask;
                    }
                }
                if (++idx >= hi) break;
                const int i = std::countr_zero(idx);
                const std::uint32_t bit = 1u << i;
                if (mask & bit) {
                    for (std::uint32_t r = reach[i]; r != 0; r &= r - 1) {
                        const int y = std::countr_zero(r);
                        if (--cnt[y] == 0) uni &= ~(1u << y);
                    }
                } else {
                    for (std::uint32_t r = reach[i]; r != 0; r &= r - 1) {
                        const int y = std::countr_zero(r);
                        if (cnt[y]++ == 0) uni |= 1u << y;
                    }
                }
                mask ^= bit;
            }
            best[b] = std::move(local);
        });

        Best merged;
        for (const Best& cand : best) {
            if (!cand.found) continue;
            if (!merged.found || cand.covered < merged.covered ||
                (cand.covered == merged.covered && cand.mask < merged.mask))
                merged = cand;
        }
        // The full point set always qualifies, so a witness exists.
        return {T(1) - merged.covered, merged.mask};
    }

private:
    const SpaceT<T>& space_;
    int n_;
    std::vector<T> measure_;
    std::vector<std::uint8_t> qualifies_;
};

// Sorted distinct positive entries of q (assoc values are maxima of entries,
// hence already included). Every set distance lands on one of these, so all
// three concentration functions are constant on the gaps between them.
template <class T>
std::vector<T> distance_steps(const SpaceT<T>& space) {
    std::vector<T> steps;
    for (const T& v : space.matrix())
        if (v > T(0)) steps.push_back(v);
    std::sort(steps.begin(), steps.end());
    steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
    return steps;
}

} // namespace detail

// Exact concentration value at one eps: sup over all subsets A with
// mu(A) >= 1/2 of 1 - mu(N(A, eps, side)). Ties resolve to the lowest
// witness bitmask.
template <class T>
AlphaResult<T> alpha_exact(const SpaceT<T>& space, const T& eps, Side side, int threads = 1) {
    return detail::AlphaEngine<T>(space).alpha(eps, side, threads);
}

// Default evaluation grid: every distinct positive distance, the midpoints
// between consecutive ones, and diameter + 1. With strict-"<" neighborhoods
// this observes every step of the (left-continuous) step functions.
template <class T>
std::vector<T> auto_grid(const SpaceT<T>& space) {
    std::vector<T> steps = detail::distance_steps(space);
    std::vector<T> grid;
    if (steps.empty()) {
        grid.push_back(T(1)); // one-point space: any positive probe
        return grid;
    }
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (i > 0) grid.push_back((steps[i - 1] + steps[i]) / T(2));
        grid.push_back(steps[i]);
    }
    grid.push_back(steps.back() + T(1));
    return grid;
}

template <class T>
struct ConcentrationCurveT {
    std::vector<T> epsilons; // first entry is 0 with alpha = 1/2 by definition
    std::vector<T> alpha_left, alpha_right, alpha_assoc;
    std::vector<std::uint32_t> witness_left, witness_right, witness_assoc;
    std::vector<T> steps; // distance values backing exact step lookup
    T diameter{};
    CurveMethod method = CurveMethod::exact;
    std::uint64_t sample_count = 0;

    const std::vector<T>& values(Side side) const {
        switch (side) {
            case Side::left: return alpha_left;
            case Side::right: return alpha_right;
            default: return alpha_assoc;
        }
    }

    // Evaluates the step function at an arbitrary eps >= 0. Exact for curves
    // built on the auto grid: alpha is constant on (s_i, s_{i+1}], so the
    // value at the smallest step >= eps applies.
    T alpha_at(const T& eps, Side side) const {
        if (eps < T(0)) raise(ErrorKind::invalid_argument, "alpha_at requires eps >= 0");
        if (eps == T(0)) return T(1) / T(2);
        if (eps > diameter) return T(0);
        if (steps.empty() || method != CurveMethod::exact)
            raise(ErrorKind::domain, "curve lacks exact step structure for interpolation");
        auto it = std::lower_bound(steps.begin(), steps.end(), eps);
        if (it == steps.end()) return T(0);
        auto pos = std::lower_bound(epsilons.begin(), epsilons.end(), *it);
        if (pos == epsilons.end() || !(*pos == *it))
            raise(ErrorKind::domain, "curve grid does not contain required step value");
        return values(side)[static_cast<std::size_t>(pos - epsilons.begin())];
    }
};

using ConcentrationCurve = ConcentrationCurveT<double>;

// Exact curves on a grid (auto grid when none is given). The eps = 0 row
// holds 1/2 by definition. Grid points evaluate independently, so the work
// parallelizes per eps; results are identical for any thread count.
template <class T>
ConcentrationCurveT<T> alpha_curve(const SpaceT<T>& space,
                                   const std::vector<T>* grid_in = nullptr, int threads = 1) {
    detail::AlphaEngine<T> engine(space);
    const SpaceT<T> assoc = associated_metric(space);
    detail::AlphaEngine<T> assoc_engine(assoc);

    std::vector<T> grid;
    bool exact_steps = false;
    if (grid_in == nullptr) {
        grid = auto_grid(space);
        exact_steps = true;
    } else {
        grid = *grid_in;
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        for (const T& e : grid)
            if (!(e > T(0)))
                raise(ErrorKind::invalid_argument, "curve grid values must be positive");
        // Custom grids still allow exact interpolation when they cover every
        // distance step.
        std::vector<T> steps = detail::distance_steps(space);
        exact_steps = std::includes(grid.begin(), grid.end(), steps.begin(), steps.end());
    }

    ConcentrationCurveT<T> curve;
    curve.method = CurveMethod::exact;
    curve.diameter = space.diameter();
    curve.steps = detail::distance_steps(space);
    const std::size_t m = grid.size();
    curve.epsilons.resize(m + 1);
    curve.alpha_left.resize(m + 1);
    curve.alpha_right.resize(m + 1);
    curve.alpha_assoc.resize(m + 1);
    curve.witness_left.assign(m + 1, 0);
    curve.witness_right.assign(m + 1, 0);
    curve.witness_assoc.assign(m + 1, 0);

    curve.epsilons[0] = T(0);
    curve.alpha_left[0] = curve.alpha_right[0] = curve.alpha_assoc[0] = T(1) / T(2);

    run_parallel(m, threads, [&](std::size_t i) {
        const T& eps = grid[i];
        AlphaResult<T> l = engine.alpha(eps, Side::left);
        AlphaResult<T> r = engine.alpha(eps, Side::right);
        AlphaResult<T> a = assoc_engine.alpha(eps, Side::left);
        curve.epsilons[i + 1] = eps;
        curve.alpha_left[i + 1] = std::move(l.value);
        curve.witness_left[i + 1] = l.witness;
        curve.alpha_right[i + 1] = std::move(r.value);
        curve.witness_right[i + 1] = r.witness;
        curve.alpha_assoc[i + 1] = std::move(a.value);
        curve.witness_assoc[i + 1] = a.witness;
    });

    if (!exact_steps) curve.steps.clear();
    return curve;
}

// --- sandwich inequality -----------------------------------------------

template <class T>
struct SandwichReport {
    bool ok = true;
    // margin_lower[i] = alpha_assoc - max(aL, aR); margin_upper[i] =
    // (aL + aR) - alpha_assoc. Violations are negative margins.
    std::vector<T> margin_lower, margin_upper;
    std::vector<std::size_t> violations; // indices into the curve grid
};

template <class T>
SandwichReport<T> check_sandwich(const ConcentrationCurveT<T>& curve) {
    SandwichReport<T> report;
    const std::size_t m = curve.epsilons.size();
    report.margin_lower.resize(m);
    report.margin_upper.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const T& l = curve.alpha_left[i];
        const T& r = curve.alpha_right[i];
        const T& a = curve.alpha_assoc[i];
        report.margin_lower[i] = a - std::max(l, r);
        report.margin_upper[i] = l + r - a;
        if (report.margin_lower[i] < T(0) || report.margin_upper[i] < T(0)) {
            report.ok = false;
            report.violations.push_back(i);
        }
    }
    return report;
}

// --- Lipschitz machinery ------------------------------------------------

template <class T>
struct LipschitzReport {
    bool ok = true;
    T worst_margin{}; // max over ordered pairs of f-difference minus K*q
    std::pair<int, int> worst_pair{-1, -1};
};

// Exhaustive pair check of the one-sided Lipschitz property.
// left: f(x) - f(y) <= K q(x,y); right: f(y) - f(x) <= K q(x,y);
// associated checks both.
template <class T>
LipschitzReport<T> verify_lipschitz(const SpaceT<T>& space, std::span<const T> values, const T& k,
                                    Side side) {
    const int n = space.size();
    if (static_cast<int>(values.size()) != n)
        raise(ErrorKind::invalid_argument, "function length does not match space");
    LipschitzReport<T> report;
    bool first = true;
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            if (x == y) continue;
            T diff = side == Side::right ? values[y] - values[x] : values[x] - values[y];
            T margin = diff - k * space.q(x, y);
            if (side == Side::associated) {
                T other = (values[y] - values[x]) - k * space.q(x, y);
                if (other > margin) margin = std::move(other);
            }
            if (first || margin > report.worst_margin) {
                report.worst_margin = std::move(margin);
                report.worst_pair = {x, y};
                first = false;
            }
        }
    }
    report.ok = !(report.worst_margin > T(0));
    return report;
}

namespace detail {

// mu{ f <= t } summed in point order.
template <class T>
T mass_below(std::span<const T> values, std::span<const T> mu, const T& t) {
    T total{};
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] <= t) total += mu[i];
    return total;
}

template <class T>
T mass_above(std::span<const T> values, std::span<const T> mu, const T& t) {
    T total{};
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] >= t) total += mu[i];
    return total;
}

} // namespace detail

// Medians form the interval [first, second]; both endpoints are attained
// function values. first is the canonical median returned by median().
template <class T>
std::pair<T, T> median_bounds(std::span<const T> values, std::span<const T> mu) {
    if (values.empty() || values.size() != mu.size())
        raise(ErrorKind::invalid_argument, "median needs matching nonempty inputs");
    std::vector<T> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    const T half = T(1) / T(2);
    std::optional<T> lo, hi;
    for (const T& v : sorted) {
        if (!lo && detail::mass_below(values, mu, v) >= half) lo = v;
        if (detail::mass_above(values, mu, v) >= half) hi = v;
    }
    // lo exists (mass_below at the max value is 1) and hi exists (mass_above
    // at the min value is 1); lo <= hi by the half-mass conditions.
    return {*lo, *hi};
}

// Smallest attained value m with mu{f <= m} >= 1/2; the postcondition
// mu{f >= m} >= 1/2 then holds automatically by minimality.
template <class T>
T median(std::span<const T> values, std::span<const T> mu) {
    return median_bounds(values, mu).first;
}

// --- deviation inequalities ---------------------------------------------

template <class T>
struct DeviationRow {
    T eps;
    T lhs;    // measured deviation mass (worst over all medians)
    T bound;  // concentration bound
    T margin; // bound - lhs; negative = violation
};

template <class T>
struct DeviationReport {
    bool ok = true;
    std::vector<DeviationRow<T>> rows_left, rows_right;
};

namespace detail {

template <class T>
void require_left_lipschitz(const SpaceT<T>& space, std::span<const T> f) {
    auto check = verify_lipschitz(space, f, T(1), Side::left);
    if (!check.ok)
        raise(ErrorKind::invalid_argument,
              "function is not left 1-Lipschitz; worst pair (" +
                  std::to_string(check.worst_pair.first) + "," +
                  std::to_string(check.worst_pair.second) + ") exceeds by " +
                  format_scalar(check.worst_margin));
}

} // namespace detail

// Median deviation bounds for a left 1-Lipschitz f:
//   mu{ f <= m - eps } <= alpha_L(eps)   and   mu{ f >= m + eps } <= alpha_R(eps).
// The inequalities must hold for every median; since the left mass grows
// with m and the right mass shrinks, checking the extreme medians covers the
// whole interval.
template <class T>
DeviationReport<T> check_median_deviation(const SpaceT<T>& space,
                                          const ConcentrationCurveT<T>& curve,
                                          std::span<const T> f, std::span<const T> eps_grid) {
    detail::require_left_lipschitz(space, f);
    auto [m_lo, m_hi] = median_bounds(f, std::span<const T>(space.measure()));
    DeviationReport<T> report;
    for (const T& eps : eps_grid) {
        if (!(eps > T(0))) raise(ErrorKind::invalid_argument, "deviation grid must be positive");
        T lhs_l = detail::mass_below(f, std::span<const T>(space.measure()), T(m_hi - eps));
        T bound_l = curve.alpha_at(eps, Side::left);
        report.rows_left.push_back({eps, lhs_l, bound_l, bound_l - lhs_l});
        T lhs_r = detail::mass_above(f, std::span<const T>(space.measure()), T(m_lo + eps));
        T bound_r = curve.alpha_at(eps, Side::right);
        report.rows_right.push_back({eps, lhs_r, bound_r, bound_r - lhs_r});
        if (report.rows_left.back().margin < T(0) || report.rows_right.back().margin < T(0))
            report.ok = false;
    }
    return report;
}

// Absolute deviation: mu{ |f - m| >= eps } <= alpha_L(eps) + alpha_R(eps),
// again for every median. The mass as a function of m jumps only where
// m -eps or m + eps crosses an attained value, so the worst median is found
// among those breakpoints plus the interval ends.
template <class T>
DeviationReport<T> check_abs_deviation(const SpaceT<T>& space,
                                       const ConcentrationCurveT<T>& curve, std::span<const T> f,
                                       std::span<const T> eps_grid) {
    detail::require_left_lipschitz(space, f);
    auto [m_lo, m_hi] = median_bounds(f, std::span<const T>(space.measure()));
    const auto mu = std::span<const T>(space.measure());
    DeviationReport<T> report;
    for (const T& eps : eps_grid) {
        if (!(eps > T(0))) raise(ErrorKind::invalid_argument, "deviation grid must be positive");
        std::vector<T> candidates{m_lo, m_hi};
        for (const T& v : f) {
            T below = T(v - eps), above = T(v + eps);
            if (below > m_lo && below < m_hi) candidates.push_back(std::move(below));
            if (above > m_lo && above < m_hi) candidates.push_back(std::move(above));
        }
        T worst{};
        bool first = true;
        for (const T& m : candidates) {
            T mass = T(detail::mass_below(f, mu, T(m - eps)) +
                       detail::mass_above(f, mu, T(m + eps)));
            if (first || mass > worst) {
                worst = std::move(mass);
                first = false;
            }
        }
        T bound = curve.alpha_at(eps, Side::left) + curve.alpha_at(eps, Side::right);
        report.rows_left.push_back({eps, worst, bound, bound - worst});
        if (report.rows_left.back().margin < T(0)) report.ok = false;
    }
    return report;
}

// Pair deviation: (mu x mu){ f(x) - f(y) >= eps } <= aL(eps/2) + aR(eps/2)
// for f left or right 1-Lipschitz. The product mass is an exact double loop.
template <class T>
DeviationReport<T> check_pair_deviation(const SpaceT<T>& space,
                                        const ConcentrationCurveT<T>& curve, std::span<const T> f,
                                        std::span<const T> eps_grid) {
    auto left = verify_lipschitz(space, f, T(1), Side::left);
    if (!left.ok) {
        auto right = verify_lipschitz(space, f, T(1), Side::right);
        if (!right.ok)
            raise(ErrorKind::invalid_argument,
                  "function is neither left nor right 1-Lipschitz; worst left pair (" +
                      std::to_string(left.worst_pair.first) + "," +
                      std::to_string(left.worst_pair.second) + ")");
    }
    const int n = space.size();
    DeviationReport<T> report;
    for (const T& eps : eps_grid) {
        if (!(eps > T(0))) raise(ErrorKind::invalid_argument, "deviation grid must be positive");
        T mass{};
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                if (f[x] - f[y] >= eps) mass += space.mu(x) * space.mu(y);
        const T half_eps = eps / T(2);
        T bound = curve.alpha_at(half_eps, Side::left) + curve.alpha_at(half_eps, Side::right);
        report.rows_left.push_back({eps, mass, bound, bound - mass});
        if (report.rows_left.back().margin < T(0)) report.ok = false;
    }
    return report;
}

// Concentration through the witness family of the median-deviation lemma:
// for each half-mass A the function f = -q(A, .) (left) or g = q(., A)
// (right) has median 0 and its eps-deviation mass equals 1 - mu(N(A, eps)).
// The sup over the family therefore equals alpha_exact; this route goes
// through explicit set-distance scans and shares nothing with the bitmask
// kernel.
template <class T>
T alpha_via_lipschitz(const SpaceT<T>& space, const T& eps, Side side) {
    if (!(eps > T(0))) raise(ErrorKind::invalid_argument, "alpha requires eps > 0");
    const int n = space.size();
    if (n > kMaxExactPoints)
        raise(ErrorKind::domain, "witness-family enumeration capped at 22 points");
    const T half = T(1) / T(2);
    T best{};
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        T mass{};
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) mass += space.mu(i);
        if (!(mass >= half)) continue;
        T deviation{};
        for (int y = 0; y < n; ++y) {
            bool first = true;
            T dist{};
            for (int a = 0; a < n; ++a) {
                if (!(mask & (1u << a))) continue;
                T d;
                switch (side) {
                    case Side::left: d = space.q(a, y); break;
                    case Side::right: d = space.q(y, a); break;
                    default: d = std::max(space.q(a, y), space.q(y, a)); break;
                }
                if (first || d < dist) {
                    dist = std::move(d);
                    first = false;
                }
            }
            if (dist >= eps) deviation += space.mu(y);
        }
        if (deviation > best) best = std::move(deviation);
    }
    return best;
}

// --- asymmetry ------------------------------------------------------------

template <class T>
struct AsymmetryDistributionT {
    std::vector<T> support; // sorted distinct Gamma values
    std::vector<T> pmf;     // matching probabilities under mu (x) mu
    bool sampled = false;
    std::uint64_t sample_count = 0;

    T tail(const T& eps) const { // P(Gamma >= eps)
        T total{};
        for (std::size_t i = 0; i < support.size(); ++i)
            if (support[i] >= eps) total += pmf[i];
        return total;
    }
};

using AsymmetryDistribution = AsymmetryDistributionT<double>;

// Exact law of Gamma(x,y) = |q(x,y) - q(y,x)| under mu (x) mu, via the n^2
// ordered pairs (diagonal included, contributing Gamma = 0).
template <class T>
AsymmetryDistributionT<T> asymmetry_distribution(const SpaceT<T>& space) {
    const int n = space.size();
    std::map<T, T> law;
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            T gamma = space.q(x, y) - space.q(y, x);
            if (gamma < T(0)) gamma = -gamma;
            law[gamma] += space.mu(x) * space.mu(y);
        }
    }
    AsymmetryDistributionT<T> out;
    for (auto& [value, prob] : law) {
        out.support.push_back(value);
        out.pmf.push_back(prob);
    }
    return out;
}

template <class T>
struct AsymmetryReport {
    bool ok = true;
    AsymmetryDistributionT<T> distribution;
    std::vector<DeviationRow<T>> rows; // per eps: tail vs aL(eps/2)+aR(eps/2)
};

// Theorem check: P(Gamma >= eps) <= alpha_L(eps/2) + alpha_R(eps/2) on every
// grid eps. Default grid: the positive support values, midpoints between
// them, and one probe past the maximum, which observes every jump of the
// tail function. Equality cases count as passes.
template <class T>
AsymmetryReport<T> check_asymmetry_bound(const SpaceT<T>& space,
                                         const ConcentrationCurveT<T>& curve,
                                         const std::vector<T>* eps_grid = nullptr) {
    AsymmetryReport<T> report;
    report.distribution = asymmetry_distribution(space);
    std::vector<T> grid;
    if (eps_grid) {
        grid = *eps_grid;
    } else {
        std::vector<T> positive;
        for (const T& v : report.distribution.support)
            if (v > T(0)) positive.push_back(v);
        if (positive.empty()) {
            grid.push_back(T(1));
        } else {
            for (std::size_t i = 0; i < positive.size(); ++i) {
                grid.push_back(i == 0 ? positive[0] / T(2)
                                      : (positive[i - 1] + positive[i]) / T(2));
                grid.push_back(positive[i]);
            }
            grid.push_back(positive.back() + T(1));
        }
    }
    for (const T& eps : grid) {
        if (!(eps > T(0))) raise(ErrorKind::invalid_argument, "asymmetry grid must be positive");
        T tail = report.distribution.tail(eps);
        const T half_eps = eps / T(2);
        T bound = curve.alpha_at(half_eps, Side::left) + curve.alpha_at(half_eps, Side::right);
        report.rows.push_back({eps, tail, bound, bound - tail});
        if (report.rows.back().margin < T(0)) report.ok = false;
    }
    return report;
}

// --- Levy family diagnostics ----------------------------------------------

struct LevyFit {
    bool valid = false;
    double c1 = 0.0, c2 = 0.0;
    double rms = 0.0;           // least-squares residual before covering
    std::size_t violations = 0; // of alpha_n <= c1 exp(-c2 eps^2 n) after covering
};

struct LevySideDiagnostics {
    std::vector<std::vector<double>> values; // [eps index][family index]
    std::vector<bool> converging_per_eps;
    bool converging = false;
    LevyFit fit;
};

struct LevyReport {
    std::vector<double> epsilons;
    int family_size = 0;
    LevySideDiagnostics left, right, assoc;
};

namespace detail {

inline bool sequence_converging(const std::vector<double>& vals) {
    // "Decreasing to small": either the tail has essentially vanished, or the
    // sequence is nonincreasing and has lost a definite fraction of its head.
    const double first = vals.front();
    const double last = vals.back();
    if (last <= 0.05) return true;
    bool nonincreasing = true;
    for (std::size_t i = 1; i < vals.size(); ++i)
        if (vals[i] > vals[i - 1]) nonincreasing = false;
    return nonincreasing && first > 0.0 && last <= 0.6 * first;
}

inline LevyFit fit_levy(const std::vector<double>& eps, //
                        const std::vector<std::vector<double>>& values) {
    // Log-linear least squares of ln(alpha_n(eps)) against z = eps^2 * n,
    // then C1 is inflated to cover every sample so the reported pair
    // certifies alpha_n(eps) <= C1 exp(-C2 eps^2 n) on the data.
    std::vector<double> zs, ys;
    for (std::size_t e = 0; e < eps.size(); ++e)
        for (std::size_t i = 0; i < values[e].size(); ++i)
            if (values[e][i] > 0.0) {
                zs.push_back(eps[e] * eps[e] * static_cast<double>(i + 1));
                ys.push_back(std::log(values[e][i]));
            }
    LevyFit fit;
    if (zs.size() < 2) return fit;
    double sz = 0, sy = 0, szz = 0, szy = 0;
    const double count = static_cast<double>(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) {
        sz += zs[i];
        sy += ys[i];
        szz += zs[i] * zs[i];
        szy += zs[i] * ys[i];
    }
    const double denom = count * szz - sz * sz;
    if (denom == 0.0) return fit;
    const double slope = (count * szy - sz * sy) / denom;
    const double intercept = (sy - slope * sz) / count;
    double max_resid = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        const double resid = ys[i] - (intercept + slope * zs[i]);
        ss += resid * resid;
        max_resid = std::max(max_resid, resid);
    }
    fit.valid = true;
    fit.c2 = -slope;
    fit.c1 = std::exp(intercept + max_resid);
    fit.rms = std::sqrt(ss / count);
    for (std::size_t i = 0; i < zs.size(); ++i)
        if (ys[i] > std::log(fit.c1) - fit.c2 * zs[i] + 1e-12) ++fit.violations;
    return fit;
}

} // namespace detail

// Pointwise convergence diagnostics for an ordered family of pq-spaces.
// Family index (1-based) plays the role of the dimension n in the
// normal-Levy fit alpha_n(eps) <= C1 exp(-C2 eps^2 n). The paper displays
// the exponent with a positive sign; the decaying form is the one its
// Hamming example satisfies, so that is what the fit targets.
template <class T>
LevyReport levy_diagnostics(std::span<const SpaceT<T>> spaces, const std::vector<T>& eps_grid) {
    if (spaces.size() < 3)
        raise(ErrorKind::invalid_argument, "a family needs at least 3 spaces");
    if (eps_grid.empty()) raise(ErrorKind::invalid_argument, "empty eps grid");

    LevyReport report;
    report.family_size = static_cast<int>(spaces.size());
    for (const T& e : eps_grid) report.epsilons.push_back(to_double(e));

    std::vector<ConcentrationCurveT<T>> curves;
    curves.reserve(spaces.size());
    for (const auto& s : spaces) curves.push_back(alpha_curve(s, &eps_grid));

    auto collect = [&](Side side) {
        LevySideDiagnostics diag;
        diag.values.resize(eps_grid.size());
        std::size_t hits = 0;
        for (std::size_t e = 0; e < eps_grid.size(); ++e) {
            for (const auto& curve : curves)
                diag.values[e].push_back(to_double(curve.values(side)[e + 1]));
            diag.converging_per_eps.push_back(detail::sequence_converging(diag.values[e]));
            if (diag.converging_per_eps.back()) ++hits;
        }
        diag.converging = 2 * hits >= eps_grid.size();
        diag.fit = detail::fit_levy(report.epsilons, diag.values);
        return diag;
    };
    report.left = collect(Side::left);
    report.right = collect(Side::right);
    report.assoc = collect(Side::associated);
    return report;
}

// --- sampled lower bound ----------------------------------------------------

// Monte Carlo estimator for spaces beyond the exact cap. Candidate half-mass
// sets come from the Lipschitz witness family (balls around sampled centers
// and sublevel sets of set-distances from small sampled seed sets); each
// candidate's deficiency 1 - mu(N(A,eps)) is computed exactly, so the curve
// is a certified lower bound on alpha.
inline ConcentrationCurve alpha_sampled(const Space& space, const std::vector<double>& eps_grid,
                                        std::uint64_t samples, std::uint64_t seed) {
    if (samples == 0) raise(ErrorKind::invalid_argument, "samples must be positive");
    if (eps_grid.empty()) raise(ErrorKind::invalid_argument, "empty eps grid");
    const int n = space.size();
    Rng rng(seed);

    ConcentrationCurve curve;
    curve.method = CurveMethod::monte_carlo;
    curve.sample_count = samples;
    curve.diameter = space.diameter();
    std::vector<double> grid = eps_grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    curve.epsilons.push_back(0.0);
    curve.alpha_left.push_back(0.5);
    curve.alpha_right.push_back(0.5);
    curve.alpha_assoc.push_back(0.5);
    for (double e : grid) {
        if (!(e > 0.0)) raise(ErrorKind::invalid_argument, "grid values must be positive");
        curve.epsilons.push_back(e);
        curve.alpha_left.push_back(0.0);
        curve.alpha_right.push_back(0.0);
        curve.alpha_assoc.push_back(0.0);
    }
    curve.witness_left.assign(grid.size() + 1, 0);
    curve.witness_right.assign(grid.size() + 1, 0);
    curve.witness_assoc.assign(grid.size() + 1, 0);

    std::vector<int> members;
    std::vector<char> in_set(n);
    std::vector<double> dist(n);
    for (std::uint64_t s = 0; s < samples; ++s) {
        // Seed set of 1..3 centers; the candidate is the sublevel set of the
        // associated set-distance grown until it holds half the mass. Size-1
        // seeds make these exactly the metric balls.
        const int seeds = 1 + static_cast<int>(rng.below(3));
        members.clear();
        std::fill(in_set.begin(), in_set.end(), 0);
        for (int k = 0; k < seeds; ++k) {
            int c = static_cast<int>(rng.below(n));
            if (!in_set[c]) {
                in_set[c] = 1;
                members.push_back(c);
            }
        }
        for (int y = 0; y < n; ++y) {
            double best = 0.0;
            bool first = true;
            for (int a : members) {
                double d = std::max(space.q(a, y), space.q(y, a));
                if (first || d < best) {
                    best = d;
                    first = false;
                }
            }
            dist[y] = best;
        }
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
        });
        double mass = 0.0;
        members.clear();
        std::fill(in_set.begin(), in_set.end(), 0);
        for (int idx : order) {
            members.push_back(idx);
            in_set[idx] = 1;
            mass += space.mu(idx);
            if (mass >= 0.5) break;
        }
        if (mass < 0.5) continue;

        for (int pass = 0; pass < 3; ++pass) {
            const Side side = pass == 0 ? Side::left : (pass == 1 ? Side::right : Side::associated);
            for (int y = 0; y < n; ++y) {
                double best = 0.0;
                bool first = true;
                for (int a : members) {
                    double d;
                    switch (side) {
                        case Side::left: d = space.q(a, y); break;
                        case Side::right: d = space.q(y, a); break;
                        default: d = std::max(space.q(a, y), space.q(y, a)); break;
                    }
                    if (first || d < best) {
                        best = d;
                        first = false;
                    }
                }
                dist[y] = best;
            }
            for (std::size_t e = 0; e < grid.size(); ++e) {
                double deficiency = 0.0;
                for (int y = 0; y < n; ++y)
                    if (dist[y] >= grid[e]) deficiency += space.mu(y);
                auto& slot = pass == 0   ? curve.alpha_left[e + 1]
                             : pass == 1 ? curve.alpha_right[e + 1]
                                         : curve.alpha_assoc[e + 1];
                slot = std::max(slot, deficiency);
            }
        }
    }
    return curve;
}

} // namespace pqspace
