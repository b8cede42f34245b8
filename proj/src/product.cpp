#include "pqspace/product.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "pqspace/rng.hpp"

namespace pqspace::product {

using nlohmann::json;

BasePenalty penalty_from_space(const Space& space) {
    BasePenalty base;
    base.size = space.size();
    base.h = space.matrix();
    base.mu = space.measure();
    return base;
}

void check_base(const BasePenalty& base) {
    if (base.size < 1) raise(ErrorKind::invalid_argument, "base needs at least one point");
    if (base.h.size() != static_cast<std::size_t>(base.size) * base.size)
        raise(ErrorKind::invalid_argument, "penalty matrix is not n x n");
    if (base.mu.size() != static_cast<std::size_t>(base.size))
        raise(ErrorKind::invalid_argument, "base measure length mismatch");
    for (int i = 0; i < base.size; ++i) {
        if (base.at(i, i) != 0.0)
            raise(ErrorKind::invalid_argument, "penalty diagonal must be zero");
        for (int j = 0; j < base.size; ++j)
            if (!(base.at(i, j) >= 0.0))
                raise(ErrorKind::invalid_argument, "penalty entries must be nonnegative");
    }
    double mass = 0.0;
    for (double m : base.mu) {
        if (!(m >= 0.0)) raise(ErrorKind::invalid_argument, "base measure must be nonnegative");
        mass += m;
    }
    if (std::abs(mass - 1.0) > 1e-9)
        raise(ErrorKind::invalid_argument, "base measure must sum to 1");
}

PenaltyNorms penalty_norms(const BasePenalty& base) {
    check_base(base);
    PenaltyNorms norms;
    double sq = 0.0;
    for (int i = 0; i < base.size; ++i) {
        for (int j = 0; j < base.size; ++j) {
            const double v = base.at(i, j);
            norms.sup = std::max(norms.sup, v);
            sq += base.mu[i] * base.mu[j] * v * v;
        }
    }
    norms.l2 = std::sqrt(sq);
    return norms;
}

double talagrand_bound(double p_a, double u, std::int64_t n_factors, const PenaltyNorms& norms) {
    if (!(p_a > 0.0) || p_a > 1.0)
        raise(ErrorKind::invalid_argument, "set mass must lie in (0, 1]");
    if (u < 0.0) raise(ErrorKind::invalid_argument, "u must be nonnegative");
    if (n_factors < 1) raise(ErrorKind::invalid_argument, "N must be positive");
    double exponent = 0.0;
    bool have_term = false;
    if (norms.l2 > 0.0) {
        exponent = u * u / (8.0 * static_cast<double>(n_factors) * norms.l2 * norms.l2);
        have_term = true;
    }
    if (norms.sup > 0.0) {
        const double second = u / (2.0 * norms.sup);
        exponent = have_term ? std::min(exponent, second) : second;
        have_term = true;
    }
    return std::exp(-exponent) / p_a;
}

double corollary_alpha_bound(const Space& base, std::int64_t n_factors, double eps) {
    if (eps < 0.0) raise(ErrorKind::invalid_argument, "eps must be nonnegative");
    auto report = validate(base);
    if (!report.is_quasimetric)
        raise(ErrorKind::invalid_argument,
              "corollary bound needs a valid quasi-metric base (" +
                  std::to_string(report.violations.size()) + " axiom violations)");
    return talagrand_bound(0.5, eps, n_factors, penalty_norms(penalty_from_space(base)));
}

Space product_space(const Space& base, int n_factors) {
    if (n_factors < 1) raise(ErrorKind::invalid_argument, "N must be positive");
    const int b = base.size();
    double points_d = 1.0;
    for (int i = 0; i < n_factors; ++i) points_d *= b;
    if (points_d > kMaxDensePoints)
        raise(ErrorKind::domain, "product space exceeds the dense point cap");
    const int count = static_cast<int>(points_d);

    auto digits = [&](int v) {
        std::vector<int> d(n_factors);
        for (int i = n_factors - 1; i >= 0; --i) {
            d[i] = v % b;
            v /= b;
        }
        return d;
    };

    std::vector<std::string> labels(count);
    std::vector<double> mu(count);
    std::vector<double> q(static_cast<std::size_t>(count) * count);
    std::vector<std::vector<int>> coords(count);
    for (int v = 0; v < count; ++v) {
        coords[v] = digits(v);
        std::string label;
        double m = 1.0;
        for (int i = 0; i < n_factors; ++i) {
            if (i) label += '.';
            label += base.labels()[coords[v][i]];
            m *= base.mu(coords[v][i]);
        }
        labels[v] = std::move(label);
        mu[v] = m;
    }
    for (int x = 0; x < count; ++x)
        for (int y = 0; y < count; ++y) {
            double total = 0.0;
            for (int i = 0; i < n_factors; ++i) total += base.q(coords[x][i], coords[y][i]);
            q[static_cast<std::size_t>(x) * count + y] = total;
        }
    return Space(std::move(labels), std::move(q), std::move(mu));
}

namespace {

// Inverse-CDF sampling over the base measure; the CDF is fixed once so draws
// are reproducible for a given seed.
struct BaseSampler {
    std::vector<double> cdf;

    explicit BaseSampler(const BasePenalty& base) {
        double acc = 0.0;
        for (double m : base.mu) {
            acc += m;
            cdf.push_back(acc);
        }
        cdf.back() = 1.0;
    }

    int draw(Rng& rng) const {
        const double u = rng.next_unit();
        return static_cast<int>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    }
};

} // namespace

ProductTailResult product_tail_monte_carlo(const ProductTailConfig& config) {
    check_base(config.base);
    if (config.n_factors < 1) raise(ErrorKind::invalid_argument, "N must be positive");
    if (config.samples == 0) raise(ErrorKind::invalid_argument, "samples must be positive");
    const int n = config.n_factors;
    const int b = config.base.size;

    // Freeze A. Points are byte tuples; the exact product mass accumulates as
    // points (not draws) enter the set.
    std::map<std::vector<int>, bool> set_points;
    double set_mass = 0.0;
    auto point_mass = [&](const std::vector<int>& p) {
        double m = 1.0;
        for (int c : p) m *= config.base.mu[c];
        return m;
    };

    ProductTailResult result;
    if (config.set_points) {
        for (const auto& p : *config.set_points) {
            if (static_cast<int>(p.size()) != n)
                raise(ErrorKind::invalid_argument, "explicit set point has wrong arity");
            for (int c : p)
                if (c < 0 || c >= b)
                    raise(ErrorKind::invalid_argument, "explicit set point coordinate out of range");
            if (set_points.emplace(p, true).second) set_mass += point_mass(p);
        }
        if (set_points.empty()) raise(ErrorKind::invalid_argument, "explicit set is empty");
    } else {
        BaseSampler sampler(config.base);
        Rng build_rng(config.seed, 0);
        std::vector<int> point(n);
        std::uint64_t draws = 0;
        while (set_mass < config.target_mass && draws < config.build_draw_cap &&
               set_points.size() < config.max_set_points) {
            for (int i = 0; i < n; ++i) point[i] = sampler.draw(build_rng);
            ++draws;
            if (set_points.emplace(point, true).second) set_mass += point_mass(point);
        }
        if (set_points.empty()) raise(ErrorKind::invalid_argument, "sampling produced no set points");
        result.target_reached = set_mass >= config.target_mass;
    }
    result.set_mass = set_mass;
    result.set_size = set_points.size();

    // Flatten A for the per-sample min scans.
    std::vector<int> flat;
    flat.reserve(set_points.size() * n);
    for (const auto& [p, _] : set_points)
        flat.insert(flat.end(), p.begin(), p.end());
    const std::size_t set_size = set_points.size();

    const PenaltyNorms norms = penalty_norms(config.base);
    std::vector<double> u_grid = config.u_grid;
    std::sort(u_grid.begin(), u_grid.end());

    BaseSampler sampler(config.base);
    Rng rng(config.seed, 1);
    std::vector<int> x(n);
    std::vector<std::uint64_t> hits(u_grid.size(), 0);
    for (std::uint64_t s = 0; s < config.samples; ++s) {
        for (int i = 0; i < n; ++i) x[i] = sampler.draw(rng);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < set_size; ++p) {
            double total = 0.0;
            const int* y = flat.data() + p * n;
            for (int i = 0; i < n; ++i) {
                total += config.base.at(x[i], y[i]);
                if (total >= best) break;
            }
            best = std::min(best, total);
            if (best == 0.0) break;
        }
        // f(A,x) >= u for every u <= best: bump the prefix of the sorted grid.
        const std::size_t count =
            std::upper_bound(u_grid.begin(), u_grid.end(), best) - u_grid.begin();
        for (std::size_t i = 0; i < count; ++i) ++hits[i];
    }

    for (std::size_t i = 0; i < u_grid.size(); ++i) {
        const double p_hat = static_cast<double>(hits[i]) / static_cast<double>(config.samples);
        const double se = std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(config.samples));
        const double bound = talagrand_bound(set_mass, u_grid[i], n, norms);
        result.rows.push_back({u_grid[i], p_hat, se, bound});
    }
    return result;
}

ProductTailConfig config_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        raise(ErrorKind::parse, std::string("config is not valid JSON: ") + e.what());
    }
    ProductTailConfig config;
    if (!doc.contains("base") || !doc["base"].is_object())
        raise(ErrorKind::parse, "config needs a 'base' object with 'h' and 'mu'");
    const json& base = doc["base"];
    if (!base.contains("h") || !base.contains("mu"))
        raise(ErrorKind::parse, "config base needs 'h' and 'mu'");
    const auto& h = base["h"];
    config.base.size = static_cast<int>(h.size());
    for (const auto& row : h) {
        if (static_cast<int>(row.size()) != config.base.size)
            raise(ErrorKind::parse, "base 'h' must be square");
        for (const auto& v : row) config.base.h.push_back(v.get<double>());
    }
    for (const auto& v : base["mu"]) config.base.mu.push_back(v.get<double>());

    config.n_factors = doc.value("N", 1);
    config.target_mass = doc.value("target_mass", 0.5);
    config.samples = doc.value("samples", std::uint64_t{10000});
    config.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("max_set_points"))
        config.max_set_points = doc["max_set_points"].get<std::size_t>();
    if (!doc.contains("u_grid")) raise(ErrorKind::parse, "config needs 'u_grid'");
    for (const auto& v : doc["u_grid"]) config.u_grid.push_back(v.get<double>());
    if (doc.contains("set_points")) {
        std::vector<std::vector<int>> pts;
        for (const auto& p : doc["set_points"]) pts.push_back(p.get<std::vector<int>>());
        config.set_points = std::move(pts);
    }
    return config;
}

std::string tails_csv(const ProductTailResult& result) {
    std::ostringstream out;
    out << "u,empirical,stderr,bound\n";
    for (const auto& r : result.rows)
        out << format_double(r.u) << ',' << format_double(r.empirical) << ','
            << format_double(r.stderr_) << ',' << format_double(r.bound) << '\n';
    return out.str();
}

} // namespace pqspace::product
