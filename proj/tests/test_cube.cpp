#include <doctest.h>

#include <bit>
#include <cmath>

#include "helpers.hpp"
#include "pqspace/cube.hpp"

using namespace pqspace;
using namespace pqspace::cube;

namespace {

// Exhaustive oracle: the law of Gamma over all 4^n string pairs, exact.
std::vector<Rational> gamma_by_enumeration(int n) {
    std::vector<BigInt> counts(n + 1, BigInt(0));
    const std::uint32_t size = 1u << n;
    const std::uint32_t full = size - 1;
    for (std::uint32_t s = 0; s < size; ++s)
        for (std::uint32_t t = 0; t < size; ++t) {
            const int zero_to_one = std::popcount(~s & t & full);
            const int one_to_zero = std::popcount(s & ~t & full);
            counts[std::abs(zero_to_one - one_to_zero)] += 1;
        }
    BigInt denom = BigInt(size) * size;
    std::vector<Rational> pmf(n + 1);
    for (int k = 0; k <= n; ++k) pmf[k] = Rational(counts[k], denom);
    return pmf;
}

// Second independent route: P(sum delta = k) = C(2n, n+k) / 4^n.
Rational gamma_closed_form(int n, int k) {
    auto binom = [](int top, int bottom) {
        BigInt r = 1;
        for (int i = 0; i < bottom; ++i) {
            r *= top - i;
            r /= i + 1;
        }
        return r;
    };
    BigInt denom = 1;
    denom <<= 2 * n;
    BigInt num = binom(2 * n, n + k);
    if (k > 0) num *= 2;
    return Rational(num, denom);
}

} // namespace

TEST_CASE("materialize the one-dimensional asymmetric cube") {
    auto space = materialize_rational({1, Variant::asymmetric});
    REQUIRE(space.size() == 2);
    CHECK(space.labels() == std::vector<std::string>{"0", "1"});
    CHECK(space.q(0, 1) == Rational(1));
    CHECK(space.q(1, 0) == Rational(0));
    CHECK(validate(space).is_quasimetric); // axiom (i) holds: q(0,1) != 0
}

TEST_CASE("materialize the metric cube distances") {
    auto space = materialize({2, Variant::metric});
    REQUIRE(space.size() == 4);
    // labels are MSB-first
    CHECK(space.labels() == std::vector<std::string>{"00", "01", "10", "11"});
    auto at = [&](const std::string& a, const std::string& b) {
        auto idx = [&](const std::string& s) {
            return std::find(space.labels().begin(), space.labels().end(), s) -
                   space.labels().begin();
        };
        return space.q(static_cast<int>(idx(a)), static_cast<int>(idx(b)));
    };
    CHECK(at("00", "11") == 1.0);
    CHECK(at("00", "01") == 0.5);
    CHECK(space.mu(0) == 0.25);
}

TEST_CASE("asymmetric cube: one-way distances and the associated metric") {
    auto space = materialize_rational({3, Variant::asymmetric});
    const int zeros = 0, ones = 7; // labels 000 and 111
    CHECK(space.q(zeros, ones) == Rational(1));
    CHECK(space.q(ones, zeros) == Rational(0));
    CHECK(validate(space).is_quasimetric);
    // On comparable strings (all flips one way) the associated metric agrees
    // with normalized Hamming; in general it is max(#0->1, #1->0)/n, which is
    // (rho + Gamma)/2 and can be half of rho (e.g. 01 vs 10).
    auto assoc = associated_metric(space);
    CHECK(assoc.q(zeros, ones) == Rational(1));
    auto hamming = materialize_rational({3, Variant::metric});
    const int s01 = 1, s10 = 2;
    CHECK(hamming.q(s01, s10) == Rational(2, 3));
    CHECK(assoc.q(s01, s10) == Rational(1, 3));
}

TEST_CASE("associated metric of the asymmetric cube is (rho + Gamma)/2, streamed") {
    for (int n : {6, 12}) {
        auto space = materialize({n, Variant::asymmetric});
        const std::uint32_t size = 1u << n;
        const std::uint32_t full = size - 1;
        bool identity = true, envelope = true;
        for (std::uint32_t s = 0; s < size && identity && envelope; ++s)
            for (std::uint32_t t = 0; t < size; ++t) {
                const int up = std::popcount(~s & t & full);
                const int down = std::popcount(s & ~t & full);
                if (space.q(s, t) != up / static_cast<double>(n) ||
                    space.q(t, s) != down / static_cast<double>(n)) {
                    identity = false;
                    break;
                }
                // max(up, down) = (rho + Gamma)/2 at the integer-count level
                const double assoc = std::max(space.q(s, t), space.q(t, s));
                if (assoc != std::max(up, down) / static_cast<double>(n)) {
                    identity = false;
                    break;
                }
                // bi-Lipschitz envelope rho/2 <= assoc <= rho in integers
                const int rho_count = up + down;
                if (std::max(up, down) > rho_count || 2 * std::max(up, down) < rho_count) {
                    envelope = false;
                    break;
                }
            }
        CHECK(identity);
        CHECK(envelope);
    }
    CHECK_THROWS_AS(materialize({13, Variant::metric}), Error);
}

TEST_CASE("gamma law matches the spec values for n = 1 and n = 2") {
    auto law1 = gamma_law_exact(1);
    REQUIRE(law1.exact);
    CHECK(law1.pmf_exact[0] == Rational(1, 2));
    CHECK(law1.pmf_exact[1] == Rational(1, 2));

    auto law2 = gamma_law_exact(2);
    CHECK(law2.pmf_exact[0] == Rational(3, 8));
    CHECK(law2.pmf_exact[1] == Rational(1, 2));
    CHECK(law2.pmf_exact[2] == Rational(1, 8));
}

TEST_CASE("gamma law equals exhaustive pair enumeration up to n = 6") {
    for (int n = 1; n <= 6; ++n) {
        auto law = gamma_law_exact(n);
        auto oracle = gamma_by_enumeration(n);
        REQUIRE(law.exact);
        for (int k = 0; k <= n; ++k) CHECK(law.pmf_exact[k] == oracle[k]);
    }
}

TEST_CASE("gamma law equals the closed-form binomial identity") {
    for (int n : {1, 4, 9, 16, 33, 64}) {
        auto law = gamma_law_exact(n);
        REQUIRE(law.exact);
        Rational total(0);
        for (int k = 0; k <= n; ++k) {
            CHECK(law.pmf_exact[k] == gamma_closed_form(n, k));
            total += law.pmf_exact[k];
        }
        CHECK(total == Rational(1));
    }
    // double branch agrees with the closed form within rounding
    auto law = gamma_law_exact(80);
    CHECK_FALSE(law.exact);
    for (int k = 0; k <= 80; k += 16)
        CHECK(law.pmf[k] ==
              doctest::Approx(to_double(gamma_closed_form(80, k))).epsilon(1e-12));
}

TEST_CASE("gamma tails use exact thresholds") {
    auto law = gamma_law_exact(2);
    // P(Gamma >= 1/2) = 1/2 + 1/8
    CHECK(law.tail_exact(Rational(1, 2)) == Rational(5, 8));
    CHECK(law.tail_exact(Rational(0)) == Rational(1));
    CHECK(law.tail_exact(Rational(2, 3)) == Rational(1, 8));
    CHECK(law.tail_exact(Rational(2)) == Rational(0));
}

TEST_CASE("gamma tail bound holds on the documented grids") {
    std::vector<Rational> grid;
    for (int i = 1; i <= 20; ++i) grid.emplace_back(i, 20);
    for (int n : {2, 16, 128, 1024}) {
        auto law = gamma_law_exact(n);
        auto report = check_gamma_bound(law, grid);
        CHECK(report.ok);
        for (const auto& row : report.rows) CHECK(row.margin >= 0.0);
    }
    // spot value: n = 2, eps = 1/2: 5/8 <= 2 exp(-1/4)
    auto law2 = gamma_law_exact(2);
    std::vector<Rational> half{Rational(1, 2)};
    auto report = check_gamma_bound(law2, half);
    CHECK(report.rows[0].value == doctest::Approx(0.625));
    CHECK(report.rows[0].bound == doctest::Approx(2.0 * std::exp(-0.25)));
    // n = 1024, eps = 0.1: tail below 2 exp(-5.12)
    auto law1024 = gamma_law_exact(1024);
    CHECK(law1024.tail(Rational(1, 10)) <= 2.0 * std::exp(-5.12));
}

TEST_CASE("gamma Monte Carlo agrees with the exact law within four sigma") {
    std::vector<Rational> grid;
    for (int i = 0; i <= 10; ++i) grid.emplace_back(i, 10);
    for (int n : {2, 64}) {
        auto rows = gamma_monte_carlo(n, 200000, 42, grid);
        for (const auto& row : rows) {
            const double sigma =
                std::sqrt(row.exact * (1.0 - row.exact) / 200000.0);
            CHECK(std::abs(row.empirical - row.exact) <= 4.0 * sigma + 1e-12);
        }
    }
    CHECK_THROWS_AS(gamma_monte_carlo(2, 0, 1, grid), Error);
    // seed-determinism
    auto a = gamma_monte_carlo(8, 1000, 7, grid);
    auto b = gamma_monte_carlo(8, 1000, 7, grid);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].empirical == b[i].empirical);
}

TEST_CASE("binomial upper tail matches small-case enumeration") {
    // B_4: P(B >= 3) = (4 + 1) / 16
    CHECK(binomial_upper_tail(4, 3) == doctest::Approx(5.0 / 16.0));
    CHECK(binomial_upper_tail(4, 0) == 1.0);
    CHECK(binomial_upper_tail(4, 5) == 0.0);
    CHECK(binomial_upper_tail(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("LLN check: exact tails against the Hoeffding bound") {
    std::vector<std::int64_t> ns{4, 100, 10000};
    std::vector<double> ts{0.0, 1.0, 2.0, 10.0, 200.0};
    auto report = lln_check(ns, ts);
    CHECK(report.ok);
    for (const auto& row : report.rows) {
        CHECK(row.tail <= row.bound + 1e-15);
        if (row.t == 0.0) CHECK(row.tail == 1.0);
    }
    // N=4, t=2: P(|B-2| >= 2) = 2/16
    for (const auto& row : report.rows)
        if (row.trials == 4 && row.t == 2.0) CHECK(row.tail == doctest::Approx(0.125));
    // N=10^4, t=200: tail below 2 exp(-8)
    for (const auto& row : report.rows)
        if (row.trials == 10000 && row.t == 200.0) {
            CHECK(row.tail <= 2.0 * std::exp(-8.0));
            CHECK(row.bound == doctest::Approx(2.0 * std::exp(-8.0)));
        }
}

TEST_CASE("majority-set deficiency: closed form equals cube enumeration") {
    // n = 4 majority set A = {weight <= 2}; compare against the materialized
    // space and the generic neighborhood machinery.
    auto space = materialize_rational({4, Variant::metric});
    std::vector<int> members;
    for (std::uint32_t v = 0; v < 16; ++v)
        if (std::popcount(v) <= 2) members.push_back(static_cast<int>(v));
    for (int k = 1; k <= 4; ++k) {
        const Rational eps(2 * k - 1, 8); // strictly between steps
        auto nbhd = neighborhood(space, std::span<const int>(members), eps, Side::associated);
        Rational covered(0);
        for (int v : nbhd) covered += space.mu(v);
        const double expect = to_double(Rational(1) - covered);
        auto closed = majority_deficiency({4, Variant::metric}, eps, Side::associated);
        CHECK(closed.deficiency == doctest::Approx(expect).epsilon(1e-12));
    }
    // asymmetric left side shares the closed form; right side is fully covered
    auto asym_space = materialize_rational({4, Variant::asymmetric});
    const Rational eps(3, 8);
    auto left = neighborhood(asym_space, std::span<const int>(members), eps, Side::left);
    Rational covered(0);
    for (int v : left) covered += asym_space.mu(v);
    auto closed_left = majority_deficiency({4, Variant::asymmetric}, eps, Side::left);
    CHECK(closed_left.deficiency == doctest::Approx(to_double(Rational(1) - covered)));
    auto closed_right = majority_deficiency({4, Variant::asymmetric}, eps, Side::right);
    CHECK(closed_right.deficiency == 0.0);
}

TEST_CASE("majority sampler tracks the closed form and the Hamming bound") {
    // n = 100, eps = 0.1: estimate below exp(-2 eps^2 n) = exp(-2)
    auto result = majority_neighborhood_sampler({100, Variant::metric}, Rational(1, 10),
                                                Side::associated, 200000, 99);
    CHECK(result.closed_form <= std::exp(-2.0));
    CHECK(std::abs(result.estimate - result.closed_form) <=
          4.0 * std::sqrt(result.closed_form * (1 - result.closed_form) / 200000.0) + 1e-9);
    // eps > 1: nothing is that far
    auto far = majority_neighborhood_sampler({100, Variant::metric}, Rational(11, 10),
                                             Side::associated, 1000, 99);
    CHECK(far.estimate == 0.0);
    CHECK(far.closed_form == 0.0);
}

TEST_CASE("cube_alpha_exact verifies the documented safe points") {
    // n = 1 at eps = 0.4: alpha = 1/2 <= exp(-0.32)
    auto res1 = cube_alpha_exact({1, Variant::metric});
    CHECK(res1.curve.alpha_at(Rational(2, 5), Side::associated) == Rational(1, 2));
    CHECK(to_double(res1.curve.alpha_at(Rational(2, 5), Side::associated)) <=
          std::exp(-2.0 * 0.16));
    // n = 4 at eps = 1/2: exact alpha vs exp(-2) ~ 0.135
    auto res4 = cube_alpha_exact({4, Variant::metric});
    auto a4 = res4.curve.alpha_at(Rational(1, 2), Side::associated);
    CHECK(a4 == Rational(1, 8));
    CHECK(to_double(a4) <= std::exp(-2.0));
    CHECK(res4.bound.ok); // the n = 4 grid satisfies the bound everywhere
    // eps beyond the diameter
    CHECK(res4.curve.alpha_at(Rational(3, 2), Side::associated) == Rational(0));
    CHECK_THROWS_AS(cube_alpha_exact({5, Variant::metric}), Error);
}

TEST_CASE("the small-n boundary windows exceed the Gaussian bound") {
    // Exact enumeration disproves the clean bound near the top step for
    // n <= 3; the reports carry the negative margins rather than asserting.
    auto res1 = cube_alpha_exact({1, Variant::metric});
    CHECK_FALSE(res1.bound.ok);
    CHECK(res1.curve.alpha_at(Rational(1), Side::associated) == Rational(1, 2));
    CHECK(0.5 > std::exp(-2.0)); // at eps = 1

    auto res2 = cube_alpha_exact({2, Variant::metric});
    CHECK_FALSE(res2.bound.ok);
    CHECK(res2.curve.alpha_at(Rational(1, 2), Side::associated) == Rational(1, 2));
    CHECK(0.5 > std::exp(-4.0 * 0.25));

    auto res3 = cube_alpha_exact({3, Variant::metric});
    CHECK_FALSE(res3.bound.ok);
    CHECK(res3.curve.alpha_at(Rational(2, 3), Side::associated) == Rational(1, 8));
    CHECK(1.0 / 8.0 > std::exp(-6.0 * 4.0 / 9.0));
}

TEST_CASE("asymmetry theorem consistency on the small asymmetric cubes") {
    for (int n = 1; n <= 4; ++n) {
        auto space = materialize_rational({n, Variant::asymmetric});
        auto curve = alpha_curve(space);
        auto report = check_asymmetry_bound(space, curve);
        CHECK(report.ok);
        // the exact cube law and the space's pair enumeration agree
        auto law = gamma_law_exact(n);
        auto dist = asymmetry_distribution(space);
        for (std::size_t i = 0; i < dist.support.size(); ++i) {
            const auto k = static_cast<std::int64_t>(
                to_double(dist.support[i] * n) + 0.5);
            CHECK(dist.pmf[i] == law.pmf_exact[k]);
        }
    }
}

TEST_CASE("gamma pmf CSV is stable") {
    auto law = gamma_law_exact(2);
    auto csv = gamma_csv(law);
    CHECK(csv == "gamma,probability\n0,0.375\n0.5,0.5\n1,0.125\n");
}
