// Command-line front end over the pqspace C API. Every subcommand reads
// file-based inputs, writes CSV/JSON outputs and exits 0 on success, 1 on a
// domain failure (axiom violations, size caps, duplicate sequences), 2 on
// usage or I/O problems. Randomized paths require a seed (--seed, or the
// PQSPACE_SEED environment variable, or 0) so reruns are byte-identical.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pqspace.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct OwnedString {
    char* ptr = nullptr;
    ~OwnedString() { pqs_string_free(ptr); }
    std::string str() const { return ptr ? std::string(ptr) : std::string(); }
};

struct OwnedSpace {
    pqs_space* ptr = nullptr;
    ~OwnedSpace() { pqs_space_free(ptr); }
};

int exit_code_for(pqs_status status) {
    switch (status) {
        case PQS_OK: return kExitOk;
        case PQS_ERR_DOMAIN: return kExitDomain;
        default: return kExitUsage;
    }
}

int fail(pqs_status status) {
    std::cerr << "error: " << pqs_last_error() << "\n";
    return exit_code_for(status);
}

int write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return kExitOk;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write '" << path << "'\n";
        return kExitUsage;
    }
    out << content;
    return kExitOk;
}

std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t value) {
    if (opt->count() > 0) return value;
    if (const char* env = std::getenv("PQSPACE_SEED")) return std::strtoull(env, nullptr, 10);
    return 0;
}

// Minimal '*' glob over the filename part, with a numeric-aware ordering so
// family members like space_2 < space_10 line up by index.
bool glob_match(const std::string& pattern, const std::string& name) {
    std::size_t p = 0, s = 0, star = std::string::npos, mark = 0;
    while (s < name.size()) {
        if (p < pattern.size() && (pattern[p] == name[s])) {
            ++p;
            ++s;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = s;
        } else if (star != std::string::npos) {
            p = star + 1;
            s = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

bool natural_less(const std::string& a, const std::string& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (std::isdigit(static_cast<unsigned char>(a[i])) &&
            std::isdigit(static_cast<unsigned char>(b[j]))) {
            std::size_t ie = i, je = j;
            while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
            while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
            const long long va = std::stoll(a.substr(i, ie - i));
            const long long vb = std::stoll(b.substr(j, je - j));
            if (va != vb) return va < vb;
            i = ie;
            j = je;
        } else {
            if (a[i] != b[j]) return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    return a.size() < b.size();
}

std::vector<std::string> expand_family(const std::vector<std::string>& args) {
    namespace fs = std::filesystem;
    std::vector<std::string> paths;
    for (const auto& arg : args) {
        if (arg.find('*') == std::string::npos) {
            paths.push_back(arg);
            continue;
        }
        const fs::path pattern(arg);
        const fs::path dir = pattern.parent_path().empty() ? "." : pattern.parent_path();
        const std::string name_pattern = pattern.filename().string();
        std::vector<std::string> matched;
        std::error_code ec;
        for (const auto& entry : fs::directory_iterator(dir, ec))
            if (glob_match(name_pattern, entry.path().filename().string()))
                matched.push_back(entry.path().string());
        std::sort(matched.begin(), matched.end(), natural_less);
        paths.insert(paths.end(), matched.begin(), matched.end());
    }
    return paths;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite quasi-metric spaces with measure: validation, "
                 "concentration functions, similarity-score conversion, and "
                 "the bound checks that go with them"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();

    // validate ---------------------------------------------------------
    auto* validate_cmd = app.add_subcommand("validate", "Check quasi-metric axioms of a space file");
    std::string v_space, v_out, v_matrix_csv;
    bool v_rational = false;
    validate_cmd->add_option("space", v_space, "space JSON file")->required();
    validate_cmd->add_flag("--rational", v_rational, "exact rational arithmetic");
    validate_cmd->add_option("--out", v_out, "report JSON path (default stdout)");
    validate_cmd->add_option("--matrix-csv", v_matrix_csv, "also export the distance matrix CSV");

    // convert ----------------------------------------------------------
    auto* convert_cmd =
        app.add_subcommand("convert", "Build a pq-space from similarity scores over sequences");
    std::string c_matrix, c_fasta, c_out, c_report, c_gap_kind = "linear";
    double c_gamma = 0.5, c_open = 0.0;
    convert_cmd->add_option("--matrix", c_matrix, "substitution matrix file")->required();
    convert_cmd->add_option("--fasta", c_fasta, "FASTA sequence file")->required();
    convert_cmd->add_option("--gap-kind", c_gap_kind, "linear|affine")->capture_default_str();
    convert_cmd->add_option("--gamma", c_gamma, "per-position gap cost")->capture_default_str();
    convert_cmd->add_option("--open", c_open, "gap-open cost (affine)")->capture_default_str();
    convert_cmd->add_option("--out", c_out, "output space JSON")->required();
    convert_cmd->add_option("--report", c_report, "validation report JSON path");

    // score-check --------------------------------------------------------
    auto* score_cmd = app.add_subcommand("score-check",
                                         "Lemma conditions and phi-triangle check on a matrix");
    std::string s_matrix, s_out;
    score_cmd->add_option("--matrix", s_matrix, "substitution matrix file")->required();
    score_cmd->add_option("--out", s_out, "report JSON path (default stdout)");

    // concentration ------------------------------------------------------
    auto* conc_cmd = app.add_subcommand("concentration", "Concentration curves of a space");
    std::string cc_space, cc_out, cc_sandwich, cc_eps;
    bool cc_rational = false, cc_sample = false;
    long long cc_samples = 10000;
    std::uint64_t cc_seed = 0;
    conc_cmd->add_option("space", cc_space, "space JSON file")->required();
    conc_cmd->add_option("--eps", cc_eps, "comma-separated grid (default: auto)");
    conc_cmd->add_flag("--rational", cc_rational, "exact rational arithmetic");
    conc_cmd->add_flag("--sample", cc_sample, "Monte Carlo lower bound (spaces beyond 22 points)");
    conc_cmd->add_option("--samples", cc_samples, "candidate sets to sample")
        ->capture_default_str();
    auto* cc_seed_opt = conc_cmd->add_option("--seed", cc_seed, "RNG seed");
    conc_cmd->add_option("--out", cc_out, "curve CSV path")->required();
    conc_cmd->add_option("--sandwich", cc_sandwich, "sandwich report JSON path");

    // cube ---------------------------------------------------------------
    auto* cube_cmd = app.add_subcommand("cube", "Hamming cube laws and bound checks");
    int q_n = 2;
    std::string q_variant = "asymmetric", q_eps;
    std::string q_gamma_out, q_bounds_out, q_mc_out, q_alpha_out, q_alpha_bounds_out;
    std::string q_majority_out, q_lln_n, q_lln_t, q_lln_out;
    long long q_mc_samples = 0, q_majority_samples = 0;
    std::uint64_t q_seed = 0;
    cube_cmd->add_option("--n", q_n, "dimension")->required();
    cube_cmd->add_option("--variant", q_variant, "metric|asymmetric")->capture_default_str();
    cube_cmd->add_option("--eps", q_eps, "comma-separated grid (default: k/20)");
    cube_cmd->add_option("--gamma-out", q_gamma_out, "asymmetry pmf CSV path");
    cube_cmd->add_option("--bounds-out", q_bounds_out, "Gamma tail bound JSON path");
    cube_cmd->add_option("--mc-samples", q_mc_samples, "Monte Carlo sample count");
    cube_cmd->add_option("--mc-out", q_mc_out, "Monte Carlo tail CSV path");
    cube_cmd->add_option("--alpha-out", q_alpha_out, "exact curve CSV path (n <= 4)");
    cube_cmd->add_option("--alpha-bounds-out", q_alpha_bounds_out, "Hamming bound JSON path");
    cube_cmd->add_option("--majority-samples", q_majority_samples,
                         "majority-set sampler count (large n)");
    cube_cmd->add_option("--majority-out", q_majority_out, "majority sampler CSV path");
    cube_cmd->add_option("--lln-n", q_lln_n, "comma-separated N values");
    cube_cmd->add_option("--lln-t", q_lln_t, "comma-separated t values");
    cube_cmd->add_option("--lln-out", q_lln_out, "LLN report JSON path");
    auto* q_seed_opt = cube_cmd->add_option("--seed", q_seed, "RNG seed");

    // talagrand ------------------------------------------------------------
    auto* tal_cmd = app.add_subcommand("talagrand", "Product-space tail dominance experiment");
    std::string t_config, t_out;
    tal_cmd->add_option("config", t_config, "experiment config JSON")->required();
    tal_cmd->add_option("--out", t_out, "tail CSV path")->required();

    // levy -------------------------------------------------------------------
    auto* levy_cmd = app.add_subcommand("levy", "Pointwise convergence diagnostics for a family");
    std::vector<std::string> l_paths;
    std::string l_eps, l_out;
    levy_cmd->add_option("spaces", l_paths, "space files or globs, in family order")->required();
    levy_cmd->add_option("--eps", l_eps, "comma-separated grid (default: k/20)");
    levy_cmd->add_option("--out", l_out, "report JSON path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    if (validate_cmd->parsed()) {
        OwnedSpace space;
        if (auto rc = pqs_space_load(v_space.c_str(), v_rational ? 1 : 0, &space.ptr))
            return fail(rc);
        int ok = 0;
        OwnedString report;
        if (auto rc = pqs_space_validate(space.ptr, &ok, &report.ptr)) return fail(rc);
        if (!v_matrix_csv.empty()) {
            OwnedString csv;
            if (auto rc = pqs_space_matrix_csv(space.ptr, &csv.ptr)) return fail(rc);
            if (int rc = write_output(v_matrix_csv, csv.str())) return rc;
        }
        if (int rc = write_output(v_out, report.str())) return rc;
        if (!ok) {
            std::cerr << "space is not a quasi-metric\n";
            return kExitDomain;
        }
        return kExitOk;
    }

    if (convert_cmd->parsed()) {
        std::string gap_json = "{\"gap\":{\"kind\":\"" + c_gap_kind +
                               "\",\"gamma\":" + std::to_string(c_gamma) +
                               ",\"open\":" + std::to_string(c_open) + "}}";
        OwnedSpace space;
        OwnedString report;
        if (auto rc = pqs_convert(c_matrix.c_str(), c_fasta.c_str(), gap_json.c_str(), &space.ptr,
                                  &report.ptr))
            return fail(rc);
        if (auto rc = pqs_space_save(space.ptr, c_out.c_str())) return fail(rc);
        if (!c_report.empty()) {
            if (int rc = write_output(c_report, report.str())) return rc;
        } else {
            std::cout << report.str();
        }
        return kExitOk;
    }

    if (score_cmd->parsed()) {
        OwnedString report;
        if (auto rc = pqs_score_check(s_matrix.c_str(), &report.ptr)) return fail(rc);
        return write_output(s_out, report.str());
    }

    if (conc_cmd->parsed()) {
        OwnedSpace space;
        if (auto rc = pqs_space_load(cc_space.c_str(), cc_rational ? 1 : 0, &space.ptr))
            return fail(rc);
        OwnedString curve;
        if (cc_sample) {
            const std::uint64_t seed = resolve_seed(cc_seed_opt, cc_seed);
            if (auto rc = pqs_concentration_sampled(space.ptr, cc_eps.c_str(), cc_samples, seed,
                                                    &curve.ptr))
                return fail(rc);
            return write_output(cc_out, curve.str());
        }
        OwnedString sandwich;
        if (auto rc = pqs_concentration_curve(space.ptr, cc_eps.c_str(), threads, &curve.ptr,
                                              cc_sandwich.empty() ? nullptr : &sandwich.ptr)) {
            if (rc == PQS_ERR_DOMAIN)
                std::cerr << "hint: rerun with --sample --samples <k> --seed <s> for a "
                             "Monte Carlo lower bound\n";
            return fail(rc);
        }
        if (int rc = write_output(cc_out, curve.str())) return rc;
        if (!cc_sandwich.empty())
            if (int rc = write_output(cc_sandwich, sandwich.str())) return rc;
        return kExitOk;
    }

    if (cube_cmd->parsed()) {
        const bool asym = q_variant == "asymmetric";
        if (!asym && q_variant != "metric") {
            std::cerr << "error: --variant must be metric or asymmetric\n";
            return kExitUsage;
        }
        const std::uint64_t seed = resolve_seed(q_seed_opt, q_seed);
        bool did_anything = false;
        if (!q_gamma_out.empty() || !q_bounds_out.empty() || !q_mc_out.empty()) {
            if (!asym) {
                std::cerr << "error: Gamma is identically 0 on the metric cube; asymmetry "
                             "outputs need --variant asymmetric\n";
                return kExitDomain;
            }
        }
        if (!q_gamma_out.empty()) {
            OwnedString pmf;
            if (auto rc = pqs_cube_gamma_csv(q_n, &pmf.ptr)) return fail(rc);
            if (int rc = write_output(q_gamma_out, pmf.str())) return rc;
            did_anything = true;
        }
        if (!q_bounds_out.empty()) {
            OwnedString report;
            if (auto rc = pqs_cube_gamma_bounds(q_n, q_eps.c_str(), &report.ptr)) return fail(rc);
            if (int rc = write_output(q_bounds_out, report.str())) return rc;
            did_anything = true;
        }
        if (!q_mc_out.empty()) {
            if (q_mc_samples <= 0) {
                std::cerr << "error: --mc-out needs --mc-samples > 0\n";
                return kExitUsage;
            }
            OwnedString csv;
            if (auto rc = pqs_cube_gamma_mc(q_n, q_mc_samples, seed, q_eps.c_str(), &csv.ptr))
                return fail(rc);
            if (int rc = write_output(q_mc_out, csv.str())) return rc;
            did_anything = true;
        }
        if (!q_alpha_out.empty()) {
            OwnedString curve, bounds;
            if (auto rc = pqs_cube_alpha(q_n, asym ? 1 : 0, q_eps.c_str(), &curve.ptr, &bounds.ptr))
                return fail(rc);
            if (int rc = write_output(q_alpha_out, curve.str())) return rc;
            if (!q_alpha_bounds_out.empty())
                if (int rc = write_output(q_alpha_bounds_out, bounds.str())) return rc;
            did_anything = true;
        }
        if (!q_majority_out.empty()) {
            if (q_majority_samples <= 0) {
                std::cerr << "error: --majority-out needs --majority-samples > 0\n";
                return kExitUsage;
            }
            if (q_eps.empty()) {
                std::cerr << "error: --majority-out needs --eps\n";
                return kExitUsage;
            }
            OwnedString csv;
            if (auto rc = pqs_cube_majority(q_n, asym ? 1 : 0, q_eps.c_str(), q_majority_samples,
                                            seed, &csv.ptr))
                return fail(rc);
            if (int rc = write_output(q_majority_out, csv.str())) return rc;
            did_anything = true;
        }
        if (!q_lln_out.empty()) {
            if (q_lln_n.empty() || q_lln_t.empty()) {
                std::cerr << "error: --lln-out needs --lln-n and --lln-t\n";
                return kExitUsage;
            }
            OwnedString report;
            if (auto rc = pqs_cube_lln(q_lln_n.c_str(), q_lln_t.c_str(), &report.ptr))
                return fail(rc);
            if (int rc = write_output(q_lln_out, report.str())) return rc;
            did_anything = true;
        }
        if (!did_anything) {
            std::cerr << "error: no cube outputs requested (see --help)\n";
            return kExitUsage;
        }
        return kExitOk;
    }

    if (tal_cmd->parsed()) {
        std::ifstream in(t_config, std::ios::binary);
        if (!in) {
            std::cerr << "error: cannot open '" << t_config << "'\n";
            return kExitUsage;
        }
        std::string config((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        OwnedString csv;
        if (auto rc = pqs_talagrand_run(config.c_str(), &csv.ptr)) return fail(rc);
        return write_output(t_out, csv.str());
    }

    if (levy_cmd->parsed()) {
        const auto paths = expand_family(l_paths);
        if (paths.size() < 3) {
            std::cerr << "error: a family needs at least 3 spaces (got " << paths.size() << ")\n";
            return kExitDomain;
        }
        std::vector<const char*> raw;
        raw.reserve(paths.size());
        for (const auto& p : paths) raw.push_back(p.c_str());
        OwnedString report;
        if (auto rc = pqs_levy_report(raw.data(), static_cast<int>(raw.size()), l_eps.c_str(),
                                      &report.ptr))
            return fail(rc);
        return write_output(l_out, report.str());
    }

    return kExitUsage;
}
