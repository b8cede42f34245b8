#include "pqspace/seqsim.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "pqspace/io.hpp"
#include "pqspace/parallel.hpp"

namespace pqspace::seqsim {

using nlohmann::json;

Alphabet::Alphabet(std::string_view symbols) : symbols_(symbols) {
    if (symbols_.empty()) raise(ErrorKind::invalid_argument, "alphabet must be nonempty");
    index_.fill(-1);
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        const auto c = static_cast<unsigned char>(symbols_[i]);
        if (index_[c] != -1)
            raise(ErrorKind::invalid_argument,
                  std::string("duplicate alphabet symbol '") + symbols_[i] + "'");
        index_[c] = static_cast<int>(i);
    }
}

void Alphabet::check_sequence(std::string_view seq, const std::string& context) const {
    for (char c : seq)
        if (index(c) < 0)
            raise(ErrorKind::invalid_argument,
                  context + ": symbol '" + std::string(1, c) + "' is not in the alphabet");
}

ScoreMatrix parse_score_matrix(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::string header_symbols;
    std::vector<std::vector<double>> rows;
    std::string row_symbols;

    while (std::getline(in, line)) {
        ++line_no;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (line[start] == '#') continue;

        std::istringstream fields(line);
        if (header_symbols.empty()) {
            std::string tok;
            while (fields >> tok) {
                if (tok.size() != 1)
                    raise(ErrorKind::parse, "line " + std::to_string(line_no) +
                                                ": header symbols must be single characters");
                header_symbols.push_back(tok[0]);
            }
            if (header_symbols.empty())
                raise(ErrorKind::parse, "line " + std::to_string(line_no) + ": empty header row");
            continue;
        }

        std::string label;
        fields >> label;
        if (label.size() != 1)
            raise(ErrorKind::parse,
                  "line " + std::to_string(line_no) + ": row label must be a single character");
        std::vector<double> values;
        std::string tok;
        while (fields >> tok) {
            try {
                std::size_t used = 0;
                values.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                raise(ErrorKind::parse, "line " + std::to_string(line_no) + ": row '" + label +
                                            "' has non-numeric cell '" + tok + "'");
            }
        }
        if (values.size() != header_symbols.size())
            raise(ErrorKind::parse, "line " + std::to_string(line_no) + ": row '" + label +
                                        "' has " + std::to_string(values.size()) +
                                        " cells, expected " +
                                        std::to_string(header_symbols.size()));
        row_symbols.push_back(label[0]);
        rows.push_back(std::move(values));
    }

    if (header_symbols.empty()) raise(ErrorKind::parse, "no header row found");
    if (rows.size() != header_symbols.size())
        raise(ErrorKind::parse, "matrix has " + std::to_string(rows.size()) + " rows, expected " +
                                    std::to_string(header_symbols.size()));
    if (row_symbols != header_symbols)
        raise(ErrorKind::parse, "row labels do not match header order");

    Alphabet alphabet(header_symbols);
    std::vector<double> flat;
    flat.reserve(rows.size() * rows.size());
    for (const auto& row : rows)
        for (double v : row) flat.push_back(v);
    return ScoreMatrix{std::move(alphabet), std::move(flat)};
}

ScoreMatrix load_score_matrix(const std::string& path) {
    return parse_score_matrix(io::read_file(path));
}

GapPenalty GapPenalty::linear(double gamma) {
    if (gamma < 0) raise(ErrorKind::invalid_argument, "gap penalty must be nonnegative");
    return {GapKind::linear, gamma, 0.0};
}

GapPenalty GapPenalty::affine(double open, double gamma) {
    if (gamma < 0 || open < 0) raise(ErrorKind::invalid_argument, "gap penalty must be nonnegative");
    return {GapKind::affine, gamma, open};
}

double GapPenalty::cost_mask(std::uint64_t positions) const {
    if (positions == 0) return 0.0;
    const int count = std::popcount(positions);
    if (kind == GapKind::linear) return gamma * count;
    const int runs = std::popcount(positions & ~(positions << 1));
    return open * runs + gamma * count;
}

double GapPenalty::cost(std::span<const int> positions) const {
    if (positions.empty()) return 0.0;
    const int count = static_cast<int>(positions.size());
    if (kind == GapKind::linear) return gamma * count;
    std::vector<int> sorted(positions.begin(), positions.end());
    std::sort(sorted.begin(), sorted.end());
    int runs = 1;
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] != sorted[i - 1] + 1) ++runs;
    return open * runs + gamma * count;
}

GapPenalty gap_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        raise(ErrorKind::parse, std::string("gap config is not valid JSON: ") + e.what());
    }
    if (doc.contains("gap")) doc = doc["gap"];
    const std::string kind = doc.value("kind", "linear");
    const double gamma = doc.value("gamma", 0.0);
    if (kind == "linear") return GapPenalty::linear(gamma);
    if (kind == "affine") return GapPenalty::affine(doc.value("open", 0.0), gamma);
    raise(ErrorKind::parse, "gap kind must be 'linear' or 'affine'");
}

std::string gap_to_json(const GapPenalty& gap) {
    json out{{"kind", gap.kind == GapKind::linear ? "linear" : "affine"}, {"gamma", gap.gamma}};
    if (gap.kind == GapKind::affine) out["open"] = gap.open;
    return json{{"gap", out}}.dump();
}

ScoreConditionReport check_score_conditions(const ScoreMatrix& matrix) {
    const int n = matrix.alphabet.size();
    ScoreConditionReport report;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (matrix.at(a, a) < matrix.at(a, b))
                report.cond1_violations.push_back(
                    {{a, b, -1}, matrix.at(a, b) - matrix.at(a, a)});

    // Published matrices are integral, so these equality tests are exact.
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a != b && matrix.at(a, b) == matrix.at(a, a) && matrix.at(b, a) == matrix.at(b, b))
                report.cond2_violations.push_back({{a, b, -1}, 0.0});

    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                const double excess =
                    matrix.at(a, b) + matrix.at(b, c) - matrix.at(a, c) - matrix.at(b, b);
                if (excess > 0) report.cond3_violations.push_back({{a, b, c}, excess});
            }

    report.cond1_ok = report.cond1_violations.empty();
    report.cond2_ok = report.cond2_violations.empty();
    report.cond3_ok = report.cond3_violations.empty();
    return report;
}

PhiTriangleReport check_phi_triangle(int n, std::span<const double> phi,
                                     const std::vector<double>* psi) {
    if (static_cast<int>(phi.size()) != n * n)
        raise(ErrorKind::invalid_argument, "phi matrix size mismatch");
    for (double v : phi)
        if (!(v > 0)) raise(ErrorKind::invalid_argument, "phi entries must be positive");

    PhiTriangleReport report;
    auto at = [&](int i, int j) { return phi[static_cast<std::size_t>(i) * n + j]; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const double lhs = at(i, j) * at(j, k);
                const double rhs = at(i, k) * at(j, j);
                if (lhs > rhs) report.violations.push_back({{i, j, k}, lhs - rhs});
            }
    report.ok = report.violations.empty();

    if (psi) {
        if (static_cast<int>(psi->size()) != n)
            raise(ErrorKind::invalid_argument, "psi length mismatch");
        // S(i,j) = 2 log2(phi_ij / (2 psi_i psi_j)); its condition 3 is the
        // phi-triangle condition with the psi factors cancelled.
        std::string symbols;
        for (int i = 0; i < n && i < 26; ++i) symbols.push_back(static_cast<char>('A' + i));
        if (n > 26) raise(ErrorKind::invalid_argument, "psi equivalence check capped at 26 symbols");
        std::vector<double> s(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                s[static_cast<std::size_t>(i) * n + j] =
                    2.0 * std::log2(at(i, j) / (2.0 * (*psi)[i] * (*psi)[j]));
        ScoreMatrix derived{Alphabet(symbols), std::move(s)};
        auto conditions = check_score_conditions(derived);
        std::vector<std::array<int, 3>> phi_trips, cond_trips;
        for (const auto& v : report.violations) phi_trips.push_back(v.symbols);
        for (const auto& v : conditions.cond3_violations) cond_trips.push_back(v.symbols);
        report.equivalence_checked = true;
        std::vector<std::array<int, 3>> mism;
        std::set_symmetric_difference(phi_trips.begin(), phi_trips.end(), cond_trips.begin(),
                                      cond_trips.end(), std::back_inserter(mism));
        report.equivalence_mismatches = std::move(mism);
        report.equivalence_ok = report.equivalence_mismatches.empty();
    }
    return report;
}

GapMonotoneReport check_gap_monotone(const GapPenalty& gap, int max_span) {
    if (max_span < 1 || max_span > 20)
        raise(ErrorKind::invalid_argument, "max_span must be in [1, 20]");
    GapMonotoneReport report;
    const std::uint64_t full = (1ull << max_span) - 1;
    std::vector<double> cost(full + 1);
    for (std::uint64_t m = 0; m <= full; ++m) cost[m] = gap.cost_mask(m);
    for (std::uint64_t b = 0; b <= full; ++b) {
        if (b != 0) {
            // Proper submasks of b, empty set included.
            for (std::uint64_t a = (b - 1) & b;; a = (a - 1) & b) {
                ++report.pairs_checked;
                if (cost[a] > cost[b]) {
                    ++report.violation_count;
                    if (report.violations.size() < kGapWitnessCap)
                        report.violations.push_back({a, b, cost[a], cost[b]});
                }
                if (a == 0) break;
            }
        }
        ++report.pairs_checked; // a == b
    }
    report.monotone = report.violation_count == 0;
    return report;
}

double local_similarity_bruteforce(std::string_view x, std::string_view y,
                                   const ScoreMatrix& matrix, const GapPenalty& gap) {
    const int m = static_cast<int>(x.size());
    const int n = static_cast<int>(y.size());
    if (m > kBruteForceLengthCap || n > kBruteForceLengthCap)
        raise(ErrorKind::domain, "brute-force aligner is capped at length " +
                                     std::to_string(kBruteForceLengthCap));
    matrix.alphabet.check_sequence(x, "x");
    matrix.alphabet.check_sequence(y, "y");

    // Subsets bucketed by size so only |A| = |B| pairs are paired up.
    auto buckets = [](int len) {
        std::vector<std::vector<std::uint32_t>> by_size(len + 1);
        for (std::uint32_t mask = 0; mask < (1u << len); ++mask)
            by_size[std::popcount(mask)].push_back(mask);
        return by_size;
    };
    const auto xs = buckets(m);
    const auto ys = buckets(n);

    auto gap_set = [](std::uint32_t mask) -> std::uint32_t {
        if (mask == 0) return 0;
        const int lo = std::countr_zero(mask);
        const int hi = 31 - std::countl_zero(mask);
        const std::uint32_t span = (hi >= 31 ? ~0u : (1u << (hi + 1)) - 1u) ^ ((1u << lo) - 1u);
        return span & ~mask;
    };

    double best = 0.0; // empty alignment
    const int kmax = std::min(m, n);
    std::vector<int> xa, yb;
    for (int k = 1; k <= kmax; ++k) {
        for (std::uint32_t a : xs[k]) {
            xa.clear();
            for (std::uint32_t t = a; t; t &= t - 1) xa.push_back(std::countr_zero(t));
            const double ga = gap.cost_mask(gap_set(a));
            for (std::uint32_t b : ys[k]) {
                yb.clear();
                for (std::uint32_t t = b; t; t &= t - 1) yb.push_back(std::countr_zero(t));
                double total = 0.0;
                for (int i = 0; i < k; ++i) total += matrix.at_chars(x[xa[i]], y[yb[i]]);
                total -= ga + gap.cost_mask(gap_set(b));
                if (total > best) best = total;
            }
        }
    }
    return best;
}

double local_similarity_dp(std::string_view x, std::string_view y, const ScoreMatrix& matrix,
                           const GapPenalty& gap) {
    if (gap.kind != GapKind::linear)
        raise(ErrorKind::invalid_argument,
              "local_similarity_dp handles linear gaps; use local_similarity_dp_affine");
    matrix.alphabet.check_sequence(x, "x");
    matrix.alphabet.check_sequence(y, "y");
    const int m = static_cast<int>(x.size());
    const int n = static_cast<int>(y.size());
    std::vector<double> prev(n + 1, 0.0), cur(n + 1, 0.0);
    double best = 0.0;
    for (int i = 1; i <= m; ++i) {
        cur[0] = 0.0;
        const int xi = matrix.alphabet.index(x[i - 1]);
        for (int j = 1; j <= n; ++j) {
            const double diag = prev[j - 1] + matrix.at(xi, matrix.alphabet.index(y[j - 1]));
            const double up = prev[j] - gap.gamma;
            const double left = cur[j - 1] - gap.gamma;
            double h = std::max({0.0, diag, up, left});
            cur[j] = h;
            if (h > best) best = h;
        }
        std::swap(prev, cur);
    }
    return best;
}

double local_similarity_dp_affine(std::string_view x, std::string_view y,
                                  const ScoreMatrix& matrix, const GapPenalty& gap) {
    if (gap.kind != GapKind::affine)
        raise(ErrorKind::invalid_argument, "affine aligner needs an affine gap penalty");
    matrix.alphabet.check_sequence(x, "x");
    matrix.alphabet.check_sequence(y, "y");
    const int m = static_cast<int>(x.size());
    const int n = static_cast<int>(y.size());
    const double inf = std::numeric_limits<double>::infinity();
    // Gotoh: E = gap run consuming y, F = gap run consuming x. A run of
    // length L costs open + gamma * L.
    std::vector<double> h_prev(n + 1, 0.0), h_cur(n + 1, 0.0);
    std::vector<double> f(n + 1, -inf);
    double best = 0.0;
    for (int i = 1; i <= m; ++i) {
        h_cur[0] = 0.0;
        double e = -inf;
        const int xi = matrix.alphabet.index(x[i - 1]);
        for (int j = 1; j <= n; ++j) {
            e = std::max(h_cur[j - 1] - gap.open - gap.gamma, e - gap.gamma);
            f[j] = std::max(h_prev[j] - gap.open - gap.gamma, f[j] - gap.gamma);
            const double diag = h_prev[j - 1] + matrix.at(xi, matrix.alphabet.index(y[j - 1]));
            const double h = std::max({0.0, diag, e, f[j]});
            h_cur[j] = h;
            if (h > best) best = h;
        }
        std::swap(h_prev, h_cur);
    }
    return best;
}

double Scorer::operator()(std::string_view x, std::string_view y) const {
    return gap.kind == GapKind::linear ? local_similarity_dp(x, y, matrix, gap)
                                       : local_similarity_dp_affine(x, y, matrix, gap);
}

ConversionResult score_to_pqspace(const std::vector<std::string>& seqs, const Scorer& scorer,
                                  const std::vector<double>* mu, int threads) {
    if (seqs.empty()) raise(ErrorKind::invalid_argument, "need at least one sequence");
    std::map<std::string, int> seen;
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        auto [it, fresh] = seen.emplace(seqs[i], static_cast<int>(i));
        if (!fresh)
            raise(ErrorKind::domain,
                  "duplicate sequences at positions " + std::to_string(it->second) + " and " +
                      std::to_string(i) + ": '" + seqs[i] + "' (separation would fail)");
    }
    const int n = static_cast<int>(seqs.size());

    std::vector<double> scores(static_cast<std::size_t>(n) * n);
    run_parallel(static_cast<std::size_t>(n) * n, threads, [&](std::size_t t) {
        const int i = static_cast<int>(t) / n;
        const int j = static_cast<int>(t) % n;
        scores[t] = scorer(seqs[i], seqs[j]);
    });

    std::vector<double> q(static_cast<std::size_t>(n) * n);
    std::vector<double> self(n);
    for (int i = 0; i < n; ++i) self[i] = scores[static_cast<std::size_t>(i) * n + i];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            q[static_cast<std::size_t>(i) * n + j] =
                self[i] - scores[static_cast<std::size_t>(i) * n + j];

    std::vector<double> measure;
    if (mu) {
        if (static_cast<int>(mu->size()) != n)
            raise(ErrorKind::invalid_argument, "measure length does not match sequence count");
        measure = *mu;
    } else {
        measure.assign(n, 1.0 / n);
    }

    Space space(std::vector<std::string>(seqs.begin(), seqs.end()), std::move(q),
                std::move(measure));
    ValidationReport report = validate(space);
    return {std::move(space), std::move(report), std::move(self)};
}

std::vector<FastaRecord> parse_fasta(const std::string& text, const Alphabet& alphabet) {
    std::vector<FastaRecord> records;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool have_record = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '>') {
            records.push_back({line.substr(1), ""});
            have_record = true;
            continue;
        }
        if (!have_record)
            raise(ErrorKind::parse,
                  "line " + std::to_string(line_no) + ": sequence data before first '>' header");
        for (char c : line) {
            if (std::isspace(static_cast<unsigned char>(c))) continue;
            const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            if (alphabet.index(up) < 0)
                raise(ErrorKind::parse, "line " + std::to_string(line_no) + ": symbol '" +
                                            std::string(1, c) + "' is not in the alphabet");
            records.back().sequence.push_back(up);
        }
    }
    if (records.empty()) raise(ErrorKind::parse, "no FASTA records found");
    return records;
}

std::vector<FastaRecord> load_fasta(const std::string& path, const Alphabet& alphabet) {
    return parse_fasta(io::read_file(path), alphabet);
}

std::string conditions_to_json(const ScoreMatrix& matrix, const ScoreConditionReport& report,
                               const PhiTriangleReport* phi) {
    auto witness_array = [&](const std::vector<ConditionWitness>& list, bool triple) {
        json arr = json::array();
        for (const auto& w : list) {
            json syms = json::array();
            const int count = triple ? 3 : 2;
            for (int k = 0; k < count; ++k)
                syms.push_back(std::string(1, matrix.alphabet.symbol(w.symbols[k])));
            arr.push_back({{"symbols", syms}, {"margin", w.margin}});
        }
        return arr;
    };
    json out{{"schema_version", 1},
             {"alphabet", matrix.alphabet.symbols()},
             {"cond1_ok", report.cond1_ok},
             {"cond2_ok", report.cond2_ok},
             {"cond3_ok", report.cond3_ok},
             {"cond1_violations", witness_array(report.cond1_violations, false)},
             {"cond2_violations", witness_array(report.cond2_violations, false)},
             {"cond3_violations", witness_array(report.cond3_violations, true)},
             {"cond3_violation_count", report.cond3_violations.size()}};
    if (phi) {
        json parr = json::array();
        for (const auto& w : phi->violations) {
            json syms = json::array();
            for (int k = 0; k < 3; ++k)
                syms.push_back(std::string(1, matrix.alphabet.symbol(w.symbols[k])));
            parr.push_back({{"symbols", syms}, {"margin", w.margin}});
        }
        out["phi_triangle"] = {{"ok", phi->ok},
                               {"violation_count", phi->violations.size()},
                               {"violations", parr},
                               {"equivalence_checked", phi->equivalence_checked},
                               {"equivalence_ok", phi->equivalence_ok},
                               {"equivalence_mismatch_count", phi->equivalence_mismatches.size()}};
    }
    return out.dump(2) + "\n";
}

} // namespace pqspace::seqsim
