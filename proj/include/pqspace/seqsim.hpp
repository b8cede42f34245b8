#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pqspace/error.hpp"
#include "pqspace/space.hpp"

namespace pqspace::seqsim {

class Alphabet {
public:
    explicit Alphabet(std::string_view symbols);

    int size() const { return static_cast<int>(symbols_.size()); }
    char symbol(int i) const { return symbols_[i]; }
    const std::string& symbols() const { return symbols_; }

    // -1 when the character is not in the alphabet.
    int index(char c) const { return index_[static_cast<unsigned char>(c)]; }

    void check_sequence(std::string_view seq, const std::string& context) const;

private:
    std::string symbols_;
    std::array<int, 256> index_;
};

// Letterwise similarity scores S: Sigma x Sigma -> R (log-odds units, may be
// negative). Parsed entries are kept verbatim; published matrices are
// integral, so equality tests on them are exact.
struct ScoreMatrix {
    Alphabet alphabet;
    std::vector<double> s; // row-major, |Sigma| x |Sigma|

    double at(int a, int b) const {
        return s[static_cast<std::size_t>(a) * alphabet.size() + b];
    }
    double at_chars(char a, char b) const { return at(alphabet.index(a), alphabet.index(b)); }
};

// Standard whitespace-separated substitution-matrix layout: '#' comment
// lines, a header row of symbols, then one labeled row per symbol.
ScoreMatrix parse_score_matrix(const std::string& text);
ScoreMatrix load_score_matrix(const std::string& path);

enum class GapKind { linear, affine };

// Gap penalty on sets of skipped positions. Linear: g(A) = gamma |A|.
// Affine: g(A) = open * (#maximal runs of consecutive positions) + gamma |A|.
// g(empty) = 0. Subset-monotonicity is an axiom of the paper's definition but
// NOT guaranteed by affine parameters (open > gamma breaks it); it is checked,
// never assumed -- see check_gap_monotone.
struct GapPenalty {
    GapKind kind = GapKind::linear;
    double gamma = 0.0; // per skipped position
    double open = 0.0;  // per run, affine only

    static GapPenalty linear(double gamma);
    static GapPenalty affine(double open, double gamma);

    // Positions encoded as bits (bit k = position k+1).
    double cost_mask(std::uint64_t positions) const;
    double cost(std::span<const int> positions) const;
};

GapPenalty gap_from_json(const std::string& json_text);
std::string gap_to_json(const GapPenalty& gap);

struct ConditionWitness {
    std::array<int, 3> symbols{-1, -1, -1}; // alphabet indices; third unused for pairs
    double margin = 0.0;                    // amount by which the condition fails
};

struct ScoreConditionReport {
    bool cond1_ok = true; // S(a,a) >= S(a,b)
    bool cond2_ok = true; // S(a,b)=S(a,a) and S(b,a)=S(b,b) only when a=b
    bool cond3_ok = true; // S(a,b)+S(b,c) <= S(a,c)+S(b,b)
    std::vector<ConditionWitness> cond1_violations, cond2_violations, cond3_violations;
};

ScoreConditionReport check_score_conditions(const ScoreMatrix& matrix);

struct PhiTriangleReport {
    bool ok = true;
    std::vector<ConditionWitness> violations; // phi_ij phi_jk > phi_ik phi_jj
    // Filled when psi frequencies are supplied: the phi-condition must list
    // the same triples as cond3 of the back-derived log-odds scores.
    bool equivalence_checked = false;
    bool equivalence_ok = true;
    std::vector<std::array<int, 3>> equivalence_mismatches;
};

// phi: |Sigma|^2 positive observed-frequency ratios, row-major.
PhiTriangleReport check_phi_triangle(int n, std::span<const double> phi,
                                     const std::vector<double>* psi = nullptr);

struct GapMonotoneViolation {
    std::uint64_t subset_mask = 0, superset_mask = 0;
    double subset_cost = 0.0, superset_cost = 0.0;
};

struct GapMonotoneReport {
    bool monotone = true;
    std::uint64_t pairs_checked = 0;
    std::uint64_t violation_count = 0;
    std::vector<GapMonotoneViolation> violations; // capped at kGapWitnessCap
};

inline constexpr std::size_t kGapWitnessCap = 4096;

// Exhaustively tests g(A) <= g(B) over all A subset of B subset of
// {1..max_span} (3^max_span pairs; max_span <= 20).
GapMonotoneReport check_gap_monotone(const GapPenalty& gap, int max_span);

inline constexpr int kBruteForceLengthCap = 10;

// Definitional local similarity score: max over equal-size position subsets
// A, B (the empty alignment included, scored 0) of T(x_A, y_B) minus the gap
// penalties of the in-span complements. Exponential; this is the oracle the
// aligners are tested against, not a production path.
double local_similarity_bruteforce(std::string_view x, std::string_view y,
                                   const ScoreMatrix& matrix, const GapPenalty& gap);

// Quadratic Smith-Waterman recurrence with a zero floor; linear gaps only.
double local_similarity_dp(std::string_view x, std::string_view y, const ScoreMatrix& matrix,
                           const GapPenalty& gap);

// Affine-gap aligner (Gotoh three-state recurrence). Quarantined from the
// linear path: quasi-metricity claims require gap monotonicity, which affine
// parameters satisfy only when open <= gamma.
double local_similarity_dp_affine(std::string_view x, std::string_view y,
                                  const ScoreMatrix& matrix, const GapPenalty& gap);

// Scorer used by the conversion pipeline: linear gaps take the quadratic
// Smith-Waterman recurrence, affine gaps the Gotoh recurrence.
struct Scorer {
    ScoreMatrix matrix;
    GapPenalty gap;

    double operator()(std::string_view x, std::string_view y) const;
};

struct ConversionResult {
    Space space;
    ValidationReport report;
    std::vector<double> self_scores;
};

// Lemma transform q(x,y) = s(x,x) - s(x,y) over a set of distinct sequences.
// The attached report states whether the result is a quasi-metric; failures
// are reported, not thrown, since real matrices may break condition 3.
// Measure defaults to the normalized counting measure.
ConversionResult score_to_pqspace(const std::vector<std::string>& seqs, const Scorer& scorer,
                                  const std::vector<double>* mu = nullptr, int threads = 1);

struct FastaRecord {
    std::string header;
    std::string sequence; // uppercased, alphabet-checked
};

std::vector<FastaRecord> parse_fasta(const std::string& text, const Alphabet& alphabet);
std::vector<FastaRecord> load_fasta(const std::string& path, const Alphabet& alphabet);

// Report serialization (schema_version-stamped JSON).
std::string conditions_to_json(const ScoreMatrix& matrix, const ScoreConditionReport& report,
                               const PhiTriangleReport* phi = nullptr);

} // namespace pqspace::seqsim
