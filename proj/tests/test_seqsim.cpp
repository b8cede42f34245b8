#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "helpers.hpp"
#include "pqspace/seqsim.hpp"

using namespace pqspace;
using namespace pqspace::seqsim;

namespace {

std::string fixture(const std::string& name) {
    return std::string(PQSPACE_DATA_DIR) + "/" + name;
}

ScoreMatrix match_mismatch() {
    return ScoreMatrix{Alphabet("01"), {1.0, -1.0, -1.0, 1.0}};
}

// Random integer matrix satisfying the three conversion conditions, found by
// rejection; diag entries positive.
ScoreMatrix random_condition_matrix(Rng& rng, int size, bool symmetric) {
    std::string symbols;
    for (int i = 0; i < size; ++i) symbols.push_back(static_cast<char>('0' + i));
    for (;;) {
        std::vector<double> s(static_cast<std::size_t>(size) * size);
        for (int i = 0; i < size; ++i)
            s[static_cast<std::size_t>(i) * size + i] = 2.0 + 2.0 * rng.below(3);
        for (int i = 0; i < size; ++i)
            for (int j = 0; j < size; ++j) {
                if (i == j) continue;
                if (symmetric && j < i) {
                    s[static_cast<std::size_t>(i) * size + j] =
                        s[static_cast<std::size_t>(j) * size + i];
                    continue;
                }
                s[static_cast<std::size_t>(i) * size + j] =
                    static_cast<double>(rng.below(4)) - 2.0;
            }
        ScoreMatrix matrix{Alphabet(symbols), std::move(s)};
        auto report = check_score_conditions(matrix);
        if (report.cond1_ok && report.cond2_ok && report.cond3_ok) return matrix;
    }
}

} // namespace

TEST_CASE("parse_score_matrix reads the published 24x24 matrix") {
    auto matrix = load_score_matrix(fixture("blosum62.txt"));
    CHECK(matrix.alphabet.size() == 24);
    CHECK(matrix.at_chars('W', 'W') == 11.0);
    CHECK(matrix.at_chars('A', 'A') == 4.0);
    CHECK(matrix.at_chars('A', 'R') == -1.0);
    CHECK(matrix.at_chars('R', 'A') == -1.0);
    CHECK(matrix.at_chars('*', '*') == 1.0);
    // published layout is symmetric
    for (int a = 0; a < 24; ++a)
        for (int b = 0; b < 24; ++b) CHECK(matrix.at(a, b) == matrix.at(b, a));
}

TEST_CASE("parse_score_matrix handles the one-letter matrix") {
    auto matrix = parse_score_matrix("A\nA 1\n");
    CHECK(matrix.alphabet.size() == 1);
    CHECK(matrix.at(0, 0) == 1.0);
}

TEST_CASE("parse_score_matrix reports ragged and malformed rows by line") {
    CHECK_THROWS_WITH_AS(parse_score_matrix("   A  B\nA  1\nB  1  2\n"),
                         doctest::Contains("row 'A'"), Error);
    CHECK_THROWS_WITH_AS(parse_score_matrix("   A\nA  x\n"), doctest::Contains("non-numeric"),
                         Error);
    CHECK_THROWS_WITH_AS(parse_score_matrix("   A  B\nB 1 2\nA 1 2\n"),
                         doctest::Contains("header order"), Error);
}

TEST_CASE("check_score_conditions on the match/mismatch matrix") {
    auto report = check_score_conditions(match_mismatch());
    CHECK(report.cond1_ok);
    CHECK(report.cond2_ok);
    CHECK(report.cond3_ok);

    // exhaustive oracle over the 8 triples
    auto m = match_mismatch();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                CHECK(m.at(a, b) + m.at(b, c) <= m.at(a, c) + m.at(b, b));
}

TEST_CASE("check_score_conditions finds a constructed cond2 degeneracy") {
    // S(a,b) = S(a,a) and S(b,a) = S(b,b) with a != b
    ScoreMatrix matrix{Alphabet("ab"), {3.0, 3.0, 3.0, 3.0}};
    auto report = check_score_conditions(matrix);
    CHECK_FALSE(report.cond2_ok);
    REQUIRE(!report.cond2_violations.empty());
    CHECK(report.cond2_violations[0].symbols[0] == 0);
    CHECK(report.cond2_violations[0].symbols[1] == 1);
}

TEST_CASE("check_score_conditions is deterministic on the published matrix") {
    auto matrix = load_score_matrix(fixture("blosum62.txt"));
    auto first = check_score_conditions(matrix);
    auto second = check_score_conditions(matrix);
    CHECK(first.cond3_violations.size() == second.cond3_violations.size());
    for (std::size_t i = 0; i < first.cond3_violations.size(); ++i) {
        CHECK(first.cond3_violations[i].symbols == second.cond3_violations[i].symbols);
        CHECK(first.cond3_violations[i].margin == second.cond3_violations[i].margin);
    }
    auto json1 = conditions_to_json(matrix, first);
    auto json2 = conditions_to_json(matrix, second);
    CHECK(json1 == json2);
    MESSAGE("cond3 violations in the published matrix: ", first.cond3_violations.size());
}

TEST_CASE("check_phi_triangle accepts diagonal dominance and flags violations") {
    // phi_ii = 4, phi_ij = 1: 1*1 <= 1*4 over all 27 triples
    std::vector<double> phi{4, 1, 1, 1, 4, 1, 1, 1, 4};
    auto report = check_phi_triangle(3, phi);
    CHECK(report.ok);

    // all-equal: boundary case, no strict violations
    std::vector<double> flat(9, 2.0);
    CHECK(check_phi_triangle(3, flat).ok);

    // phi_ab = phi_bc = 3, phi_ac = 1, phi_bb = 2 -> 9 > 2
    std::vector<double> bad{4, 3, 1, 3, 2, 3, 1, 3, 4};
    auto violated = check_phi_triangle(3, bad);
    CHECK_FALSE(violated.ok);
    bool found = false;
    for (const auto& v : violated.violations)
        if (v.symbols == std::array<int, 3>{0, 1, 2}) {
            found = true;
            CHECK(v.margin == doctest::Approx(7.0));
        }
    CHECK(found);

    CHECK_THROWS_AS(check_phi_triangle(3, std::vector<double>{1, 1, 1, 1, 0, 1, 1, 1, 1}), Error);
}

TEST_CASE("check_phi_triangle equivalence with the derived log-odds conditions") {
    std::vector<double> phi{0.5, 0.125, 0.25, 0.125, 1.0, 0.1, 0.25, 0.1, 2.0};
    std::vector<double> psi{0.3, 0.5, 0.2};
    auto report = check_phi_triangle(3, phi, &psi);
    CHECK(report.equivalence_checked);
    CHECK(report.equivalence_ok);
}

TEST_CASE("check_gap_monotone: linear penalties are monotone") {
    auto report = check_gap_monotone(GapPenalty::linear(0.5), 10);
    CHECK(report.monotone);
    CHECK(report.pairs_checked == 59049); // 3^10
}

TEST_CASE("check_gap_monotone finds the canonical affine violation") {
    auto gap = GapPenalty::affine(2.0, 0.5);
    auto report = check_gap_monotone(gap, 4);
    CHECK_FALSE(report.monotone);
    // A = {1,3} (mask 0b101), B = {1,2,3} (mask 0b111): g(A)=5, g(B)=3.5
    bool found = false;
    for (const auto& v : report.violations)
        if (v.subset_mask == 0b101 && v.superset_mask == 0b111) {
            found = true;
            CHECK(v.subset_cost == doctest::Approx(5.0));
            CHECK(v.superset_cost == doctest::Approx(3.5));
        }
    CHECK(found);
}

TEST_CASE("check_gap_monotone: affine with open <= gamma is monotone") {
    CHECK(check_gap_monotone(GapPenalty::affine(0.0, 0.5), 6).monotone);
    CHECK(check_gap_monotone(GapPenalty::affine(0.25, 0.5), 8).monotone);
}

TEST_CASE("gap cost evaluates runs and counts") {
    auto affine = GapPenalty::affine(2.0, 0.5);
    CHECK(affine.cost_mask(0) == 0.0);
    CHECK(affine.cost_mask(0b101) == doctest::Approx(5.0));   // two runs
    CHECK(affine.cost_mask(0b111) == doctest::Approx(3.5));   // one run
    std::vector<int> positions{1, 3};
    CHECK(affine.cost(positions) == doctest::Approx(5.0));
    auto linear = GapPenalty::linear(0.5);
    CHECK(linear.cost_mask(0b1011) == doctest::Approx(1.5));
}

TEST_CASE("brute-force local similarity matches the worked example") {
    auto matrix = match_mismatch();
    auto gap = GapPenalty::linear(0.5);
    CHECK(local_similarity_bruteforce("11", "101", matrix, gap) == doctest::Approx(1.5));
    // self-alignment equals the sum of diagonal scores when they are positive
    CHECK(local_similarity_bruteforce("1101", "1101", matrix, gap) == doctest::Approx(4.0));
    // no common letters and negative mismatches: the empty alignment wins
    ScoreMatrix ab{Alphabet("ab"), {1.0, -1.0, -1.0, 1.0}};
    CHECK(local_similarity_bruteforce("aaa", "bbb", ab, gap) == 0.0);
    CHECK_THROWS_AS(local_similarity_bruteforce("11111111111", "1", matrix, gap), Error);
}

TEST_CASE("linear DP equals brute force on every short binary pair") {
    Rng rng(501);
    std::vector<std::string> strings{""};
    for (int len = 1; len <= 4; ++len)
        for (std::uint32_t v = 0; v < (1u << len); ++v) {
            std::string s;
            for (int i = 0; i < len; ++i) s.push_back((v >> i) & 1 ? '1' : '0');
            strings.push_back(s);
        }
    for (double gamma : {0.25, 0.5, 1.0}) {
        auto gap = GapPenalty::linear(gamma);
        auto matrix = random_condition_matrix(rng, 2, false);
        for (const auto& x : strings)
            for (const auto& y : strings) {
                const double dp = local_similarity_dp(x, y, matrix, gap);
                const double brute = local_similarity_bruteforce(x, y, matrix, gap);
                CHECK(dp == brute); // dyadic inputs: exact equality
            }
    }
}

TEST_CASE("DP examples") {
    auto matrix = match_mismatch();
    CHECK(local_similarity_dp("11", "101", matrix, GapPenalty::linear(0.5)) ==
          doctest::Approx(1.5));
    ScoreMatrix dna{Alphabet("ACGT"),
                    {1, -1, -1, -1, -1, 1, -1, -1, -1, -1, 1, -1, -1, -1, -1, 1}};
    CHECK(local_similarity_dp("ACGT", "ACGT", dna, GapPenalty::linear(0.5)) == doctest::Approx(4.0));
    CHECK_THROWS_AS(local_similarity_dp("11", "101", matrix, GapPenalty::affine(1.0, 0.5)), Error);
}

TEST_CASE("affine DP equals brute force on monotone parameters") {
    Rng rng(502);
    auto matrix = random_condition_matrix(rng, 2, false);
    for (auto [open, gamma] : {std::pair{0.25, 0.5}, {0.5, 0.5}, {0.0, 0.75}}) {
        auto gap = GapPenalty::affine(open, gamma);
        REQUIRE(check_gap_monotone(gap, 6).monotone);
        for (int trial = 0; trial < 200; ++trial) {
            std::string x, y;
            for (std::uint64_t i = rng.below(6); i > 0; --i)
                x.push_back(rng.below(2) ? '1' : '0');
            for (std::uint64_t i = rng.below(6); i > 0; --i)
                y.push_back(rng.below(2) ? '1' : '0');
            CHECK(local_similarity_dp_affine(x, y, matrix, gap) ==
                  local_similarity_bruteforce(x, y, matrix, gap));
        }
    }
}

TEST_CASE("score_to_pqspace reproduces the worked two-sequence example") {
    Scorer scorer{match_mismatch(), GapPenalty::linear(0.5)};
    auto result = score_to_pqspace({"11", "101"}, scorer);
    CHECK(result.space.q(0, 1) == doctest::Approx(0.5));
    CHECK(result.space.q(1, 0) == doctest::Approx(1.5));
    CHECK(result.space.q(0, 0) == 0.0);
    CHECK(result.report.is_quasimetric);
    CHECK(result.space.mu(0) == doctest::Approx(0.5));
    CHECK(result.self_scores[0] == doctest::Approx(2.0));
    CHECK(result.self_scores[1] == doctest::Approx(3.0));
}

TEST_CASE("score_to_pqspace handles the degenerate and error cases") {
    Scorer scorer{match_mismatch(), GapPenalty::linear(0.5)};
    auto single = score_to_pqspace({"101"}, scorer);
    CHECK(single.space.size() == 1);
    CHECK(single.space.q(0, 0) == 0.0);
    CHECK(single.report.is_quasimetric);

    CHECK_THROWS_WITH_AS(score_to_pqspace({"11", "101", "11"}, scorer),
                         doctest::Contains("duplicate sequences"), Error);
}

TEST_CASE("symmetric scorers yield weighted quasi-metrics") {
    Rng rng(503);
    for (int trial = 0; trial < 20; ++trial) {
        auto matrix = random_condition_matrix(rng, 3, /*symmetric=*/true);
        Scorer scorer{matrix, GapPenalty::linear(0.5)};
        std::vector<std::string> seqs{"0", "01", "120", "21"};
        auto result = score_to_pqspace(seqs, scorer);
        REQUIRE(result.report.is_quasimetric);
        // pairwise symmetry of the sequence-level score
        for (std::size_t i = 0; i < seqs.size(); ++i)
            for (std::size_t j = 0; j < seqs.size(); ++j)
                CHECK(scorer(seqs[i], seqs[j]) == scorer(seqs[j], seqs[i]));
        auto weight = recover_weight(result.space);
        REQUIRE(weight.weight.has_value());
        // Def 1.1 weights satisfy w(x) = s(0,0) - s(x,x) after the w[0] = 0 anchor.
        for (std::size_t i = 0; i < seqs.size(); ++i)
            CHECK((*weight.weight)[i] ==
                  doctest::Approx(result.self_scores[0] - result.self_scores[i]));
    }
}

TEST_CASE("sequence-level condition 3 holds exhaustively for short binaries") {
    Rng rng(504);
    auto matrix = random_condition_matrix(rng, 2, false);
    auto gap = GapPenalty::linear(0.5);
    std::vector<std::string> strings;
    for (int len = 1; len <= 5; ++len)
        for (std::uint32_t v = 0; v < (1u << len); ++v) {
            std::string s;
            for (int i = 0; i < len; ++i) s.push_back((v >> i) & 1 ? '1' : '0');
            strings.push_back(s);
        }
    std::vector<std::vector<double>> s(strings.size(), std::vector<double>(strings.size()));
    for (std::size_t i = 0; i < strings.size(); ++i)
        for (std::size_t j = 0; j < strings.size(); ++j)
            s[i][j] = local_similarity_dp(strings[i], strings[j], matrix, gap);
    for (std::size_t x = 0; x < strings.size(); ++x)
        for (std::size_t y = 0; y < strings.size(); ++y)
            for (std::size_t z = 0; z < strings.size(); ++z)
                CHECK(s[x][y] + s[y][z] <= s[x][z] + s[y][y]);
}

TEST_CASE("FASTA parsing uppercases, strips whitespace and checks the alphabet") {
    Alphabet dna("ACGT");
    auto records = parse_fasta(">first\nac gt\nACGT\n>second\nTT\n", dna);
    REQUIRE(records.size() == 2);
    CHECK(records[0].header == "first");
    CHECK(records[0].sequence == "ACGTACGT");
    CHECK(records[1].sequence == "TT");

    CHECK_THROWS_WITH_AS(parse_fasta(">x\nACGZ\n", dna), doctest::Contains("'Z'"), Error);
    CHECK_THROWS_WITH_AS(parse_fasta("ACGT\n", dna), doctest::Contains("before first"), Error);
    auto fixture_records = load_fasta(fixture("toy.fasta"), Alphabet("01"));
    CHECK(fixture_records.size() == 2);
    CHECK(fixture_records[0].sequence == "11");
    CHECK(fixture_records[1].sequence == "101");
}

TEST_CASE("gap configuration round-trips through JSON") {
    auto gap = gap_from_json(R"({"gap":{"kind":"linear","gamma":0.5}})");
    CHECK(gap.kind == GapKind::linear);
    CHECK(gap.gamma == 0.5);
    auto affine = gap_from_json(gap_to_json(GapPenalty::affine(2.0, 0.25)));
    CHECK(affine.kind == GapKind::affine);
    CHECK(affine.open == 2.0);
    CHECK(affine.gamma == 0.25);
    CHECK_THROWS_AS(gap_from_json(R"({"gap":{"kind":"banded"}})"), Error);
}
