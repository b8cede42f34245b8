#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pqspace/concentration.hpp"
#include "pqspace/rational.hpp"
#include "pqspace/space.hpp"

namespace pqspace::cube {

enum class Variant { metric, asymmetric };

// metric: normalized Hamming distance rho_n. asymmetric: q_n(s,t) =
// |{ i : s_i = 0 and t_i = 1 }| / n, the product lift of q_1(0,1) = 1 with
// every other q_1 value 0. Measure is always the normalized counting measure.
struct CubeSpec {
    int n = 1;
    Variant variant = Variant::metric;
};

inline constexpr int kMaxMaterializeDim = 12; // 2^n points, 4^n dense entries
inline constexpr int kMaxExactAlphaDim = 4;   // 2^(2^n) subsets underneath
inline constexpr int kMaxExactGammaDim = 64;  // rational convolution cap

// Dense space with binary-string labels (most-significant bit first).
Space materialize(const CubeSpec& spec);
RationalSpace materialize_rational(const CubeSpec& spec);

// Law of Gamma_n = |sum delta_i| / n where delta_i is the per-coordinate
// asymmetry, i.e. the trinomial (1/4, 1/2, 1/4) step. Exact rational pmf up
// to kMaxExactGammaDim; double precision beyond, with compensated tail sums.
struct GammaLaw {
    int n = 0;
    bool exact = false;
    std::vector<Rational> pmf_exact; // index k -> P(Gamma = k/n); empty unless exact
    std::vector<double> pmf;         // always populated, size n+1

    Rational tail_exact(const Rational& eps) const; // P(Gamma >= eps)
    double tail(const Rational& eps) const;
};

// Iterative convolution of the trinomial step: O(n^2) time, O(n) memory.
GammaLaw gamma_law_exact(int n);

struct BoundRow {
    double eps = 0.0;
    double value = 0.0; // measured quantity (tail or alpha)
    double bound = 0.0;
    double margin = 0.0; // bound - value
};

struct BoundReport {
    bool ok = true;
    std::vector<BoundRow> rows;
};

// P(Gamma_n >= eps) <= 2 exp(-n eps^2 / 2) per grid eps. Thresholds k >= n*eps
// are decided in exact rational arithmetic.
BoundReport check_gamma_bound(const GammaLaw& law, std::span<const Rational> eps_grid);

struct McRow {
    double eps = 0.0;
    double empirical = 0.0;
    double stderr_ = 0.0; // binomial standard error of the estimate
    double exact = 0.0;   // reference tail from the convolution law
};

// Samples pairs of uniform strings and computes Gamma directly from the pair
// (word-parallel 0->1 / 1->0 counts), not through the delta shortcut.
std::vector<McRow> gamma_monte_carlo(int n, std::uint64_t samples, std::uint64_t seed,
                                     std::span<const Rational> eps_grid);

// P(B_n >= k) for B_n ~ Binomial(n, 1/2), via stable log-space summation.
double binomial_upper_tail(std::int64_t n, std::int64_t k);

struct LlnRow {
    std::int64_t trials = 0;
    double t = 0.0;
    double tail = 0.0;   // P(|B_N - N/2| >= t)
    double bound = 0.0;  // 2 exp(-2 t^2 / N)
    double margin = 0.0;
};

struct LlnReport {
    bool ok = true;
    std::vector<LlnRow> rows;
};

LlnReport lln_check(std::span<const std::int64_t> n_grid, std::span<const double> t_grid);

// Majority set A = { s : weight(s) <= floor(n/2) }: its set distances have
// closed forms (deficiency counts over the threshold), so neighborhoods reduce
// to binomial tails and the large-n regime needs no enumeration.
struct MajorityTail {
    double mass = 0.0;       // mu(A) >= 1/2
    double deficiency = 0.0; // 1 - mu(N(A, eps, side))
};

MajorityTail majority_deficiency(const CubeSpec& spec, const Rational& eps, Side side);

struct SamplerResult {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::uint64_t samples = 0;
    double closed_form = 0.0;
};

// Unbiased Monte Carlo estimate of the majority-set deficiency; each sampled
// string is classified through the closed-form set distance.
SamplerResult majority_neighborhood_sampler(const CubeSpec& spec, const Rational& eps, Side side,
                                            std::uint64_t samples, std::uint64_t seed);

struct CubeAlphaResult {
    ConcentrationCurveT<Rational> curve;
    BoundReport bound; // alpha_assoc(eps) vs exp(-2 eps^2 n)
};

// Exact concentration curves of the materialized cube (n <= 4), with the
// Hamming bound margin per grid eps.
CubeAlphaResult cube_alpha_exact(const CubeSpec& spec,
                                 const std::vector<Rational>* eps_grid = nullptr);

std::string gamma_csv(const GammaLaw& law);
std::string bound_report_json(const BoundReport& report, int n);
std::string lln_report_json(const LlnReport& report);
std::string mc_csv(std::span<const McRow> rows);

} // namespace pqspace::cube
