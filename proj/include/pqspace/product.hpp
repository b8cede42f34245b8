#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pqspace/space.hpp"

namespace pqspace::product {

// Penalty function on a base probability space: nonnegative h with zero
// diagonal, generalizing per-coordinate distance in products.
struct BasePenalty {
    int size = 0;
    std::vector<double> h;  // row-major, h[i*size + j] >= 0, zero diagonal
    std::vector<double> mu; // base probability vector

    double at(int i, int j) const { return h[static_cast<std::size_t>(i) * size + j]; }
};

BasePenalty penalty_from_space(const Space& space);
void check_base(const BasePenalty& base);

struct PenaltyNorms {
    double sup = 0.0; // ||h||_inf
    double l2 = 0.0;  // ||h||_2 under mu (x) mu
};

PenaltyNorms penalty_norms(const BasePenalty& base);

// (1/pA) exp(-min(u^2 / (8 N ||h||_2^2), u / (2 ||h||_inf))). Zero norms drop
// their term from the min (the stated limit), leaving the vacuous bound.
double talagrand_bound(double p_a, double u, std::int64_t n_factors, const PenaltyNorms& norms);

// Corollary bound 2 exp(-min(eps^2/(8N||q||_2^2), eps/(2||q||_inf))) for the
// product space with the l1-type quasi-metric; upper-bounds alpha and hence
// both alpha_L and alpha_R. The base must validate as a quasi-metric.
double corollary_alpha_bound(const Space& base, std::int64_t n_factors, double eps);

// Materialized l1-product of a small base (point count size^N capped at the
// dense limit); labels are concatenated base labels separated by '.'.
Space product_space(const Space& base, int n_factors);

struct ProductTailConfig {
    BasePenalty base;
    int n_factors = 1;
    double target_mass = 0.5;          // stop growing A at this exact mass
    std::size_t max_set_points = 100000;
    std::uint64_t build_draw_cap = 2000000;
    std::vector<double> u_grid;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    // Explicit A as coordinate tuples; skips the sampling build when set.
    std::optional<std::vector<std::vector<int>>> set_points;
};

struct ProductTailRow {
    double u = 0.0;
    double empirical = 0.0;
    double stderr_ = 0.0;
    double bound = 0.0;
};

struct ProductTailResult {
    std::vector<ProductTailRow> rows;
    double set_mass = 0.0; // exact product mass of the frozen A
    std::size_t set_size = 0;
    bool target_reached = true;
};

// Freezes A from i.i.d. draws of the product measure (or uses the explicit
// list), then estimates P(f(A, .) >= u) over fresh draws, where f(A, x) =
// min over y in A of sum_i h(x_i, y_i), computed exactly per sample.
ProductTailResult product_tail_monte_carlo(const ProductTailConfig& config);

ProductTailConfig config_from_json(const std::string& json_text);
std::string tails_csv(const ProductTailResult& result);

} // namespace pqspace::product
