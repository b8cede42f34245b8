#include "pqspace.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <sstream>
#include <string>
#include <variant>

#include "pqspace/cube.hpp"
#include "pqspace/io.hpp"
#include "pqspace/product.hpp"
#include "pqspace/seqsim.hpp"

struct pqs_space {
    std::variant<pqspace::Space, pqspace::RationalSpace> value;

    template <class S>
    explicit pqs_space(S&& space) : value(std::forward<S>(space)) {}

    bool rational() const { return value.index() == 1; }
};

namespace {

thread_local std::string g_last_error;

pqs_status status_from(const pqspace::Error& e) {
    g_last_error = e.what();
    switch (e.kind()) {
        case pqspace::ErrorKind::domain: return PQS_ERR_DOMAIN;
        case pqspace::ErrorKind::invalid_argument: return PQS_ERR_INVALID;
        case pqspace::ErrorKind::parse: return PQS_ERR_PARSE;
        case pqspace::ErrorKind::io: return PQS_ERR_IO;
    }
    return PQS_ERR_INTERNAL;
}

template <class Fn>
pqs_status guarded(Fn&& fn) {
    try {
        fn();
        return PQS_OK;
    } catch (const pqspace::Error& e) {
        return status_from(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return PQS_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return PQS_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void set_out(char** slot, const std::string& s) {
    if (slot) *slot = dup_string(s);
}

pqs_status require(bool ok, const char* message) {
    if (ok) return PQS_OK;
    g_last_error = message;
    return PQS_ERR_INVALID;
}

std::vector<pqspace::Rational> grid_or(const char* eps_csv,
                                       std::vector<pqspace::Rational> fallback) {
    if (eps_csv == nullptr || *eps_csv == '\0') return fallback;
    return pqspace::io::parse_eps_list(eps_csv);
}

} // namespace

extern "C" {

const char* pqs_version(void) { return "1.0.0"; }

const char* pqs_last_error(void) { return g_last_error.c_str(); }

void pqs_string_free(char* s) { std::free(s); }

pqs_status pqs_space_load(const char* path, int rational, pqs_space** out) {
    if (auto bad = require(path && out, "null argument")) return bad;
    return guarded([&] {
        if (rational)
            *out = new pqs_space(pqspace::io::load_space_rational(path));
        else
            *out = new pqs_space(pqspace::io::load_space(path));
    });
}

pqs_status pqs_space_parse(const char* json_text, int rational, pqs_space** out) {
    if (auto bad = require(json_text && out, "null argument")) return bad;
    return guarded([&] {
        if (rational)
            *out = new pqs_space(pqspace::io::parse_space_rational(json_text));
        else
            *out = new pqs_space(pqspace::io::parse_space(json_text));
    });
}

pqs_status pqs_space_save(const pqs_space* space, const char* path) {
    if (auto bad = require(space && path, "null argument")) return bad;
    return guarded([&] {
        std::visit([&](const auto& s) { pqspace::io::save_space(s, path); }, space->value);
    });
}

pqs_status pqs_space_to_json(const pqs_space* space, char** out) {
    if (auto bad = require(space && out, "null argument")) return bad;
    return guarded([&] {
        std::visit([&](const auto& s) { set_out(out, pqspace::io::space_to_json(s)); },
                   space->value);
    });
}

pqs_status pqs_space_matrix_csv(const pqs_space* space, char** out) {
    if (auto bad = require(space && out, "null argument")) return bad;
    return guarded([&] {
        std::visit([&](const auto& s) { set_out(out, pqspace::io::matrix_csv(s)); }, space->value);
    });
}

void pqs_space_free(pqs_space* space) { delete space; }

int pqs_space_size(const pqs_space* space) {
    if (!space) return 0;
    return std::visit([](const auto& s) { return s.size(); }, space->value);
}

int pqs_space_is_rational(const pqs_space* space) {
    return space && space->rational() ? 1 : 0;
}

pqs_status pqs_space_validate(const pqs_space* space, int* is_quasimetric, char** report_json) {
    if (auto bad = require(space != nullptr, "null space")) return bad;
    return guarded([&] {
        std::visit(
            [&](const auto& s) {
                auto report = pqspace::validate(s);
                if (is_quasimetric) *is_quasimetric = report.is_quasimetric ? 1 : 0;
                if (report_json)
                    set_out(report_json, pqspace::io::validation_to_json(report, s.labels()));
            },
            space->value);
    });
}

pqs_status pqs_space_conjugate(const pqs_space* space, pqs_space** out) {
    if (auto bad = require(space && out, "null argument")) return bad;
    return guarded([&] {
        std::visit([&](const auto& s) { *out = new pqs_space(pqspace::conjugate(s)); },
                   space->value);
    });
}

pqs_status pqs_space_associated(const pqs_space* space, pqs_space** out) {
    if (auto bad = require(space && out, "null argument")) return bad;
    return guarded([&] {
        std::visit([&](const auto& s) { *out = new pqs_space(pqspace::associated_metric(s)); },
                   space->value);
    });
}

pqs_status pqs_space_weight(const pqs_space* space, char** report_json) {
    if (auto bad = require(space && report_json, "null argument")) return bad;
    return guarded([&] {
        std::visit(
            [&](const auto& s) {
                auto result = pqspace::recover_weight(s);
                set_out(report_json, pqspace::io::weight_to_json(result));
            },
            space->value);
    });
}

pqs_status pqs_concentration_curve(const pqs_space* space, const char* eps_csv, int threads,
                                   char** curve_csv, char** sandwich_json) {
    if (auto bad = require(space && curve_csv, "null argument")) return bad;
    return guarded([&] {
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s.q(0, 0))>;
                std::vector<T> grid;
                const std::vector<T>* grid_ptr = nullptr;
                if (eps_csv && *eps_csv) {
                    for (const auto& r : pqspace::io::parse_eps_list(eps_csv)) {
                        if constexpr (std::is_same_v<T, double>)
                            grid.push_back(pqspace::to_double(r));
                        else
                            grid.push_back(r);
                    }
                    grid_ptr = &grid;
                }
                auto curve = pqspace::alpha_curve(s, grid_ptr, threads);
                set_out(curve_csv, pqspace::io::curve_csv(curve));
                if (sandwich_json) {
                    auto sandwich = pqspace::check_sandwich(curve);
                    set_out(sandwich_json, pqspace::io::sandwich_to_json(curve, sandwich));
                }
            },
            space->value);
    });
}

pqs_status pqs_concentration_sampled(const pqs_space* space, const char* eps_csv,
                                     long long samples, unsigned long long seed,
                                     char** curve_csv) {
    if (auto bad = require(space && curve_csv, "null argument")) return bad;
    if (auto bad = require(samples > 0, "samples must be positive")) return bad;
    return guarded([&] {
        if (space->rational())
            pqspace::raise(pqspace::ErrorKind::invalid_argument,
                           "sampled curves operate on double-precision spaces");
        const auto& s = std::get<pqspace::Space>(space->value);
        std::vector<double> grid;
        if (eps_csv && *eps_csv) {
            grid = pqspace::io::parse_eps_list_double(eps_csv);
        } else {
            for (const auto& v : pqspace::detail::distance_steps(s)) grid.push_back(v);
            if (grid.empty()) grid.push_back(1.0);
        }
        auto curve = pqspace::alpha_sampled(s, grid, static_cast<std::uint64_t>(samples), seed);
        set_out(curve_csv, pqspace::io::curve_csv(curve));
    });
}

pqs_status pqs_asymmetry_report(const pqs_space* space, char** report_json) {
    if (auto bad = require(space && report_json, "null argument")) return bad;
    return guarded([&] {
        std::visit(
            [&](const auto& s) {
                auto curve = pqspace::alpha_curve(s);
                auto report = pqspace::check_asymmetry_bound(s, curve);
                set_out(report_json, pqspace::io::asymmetry_to_json(report));
            },
            space->value);
    });
}

pqs_status pqs_levy_report(const char* const* paths, int count, const char* eps_csv,
                           char** report_json) {
    if (auto bad = require(paths && report_json, "null argument")) return bad;
    return guarded([&] {
        if (count < 3)
            pqspace::raise(pqspace::ErrorKind::invalid_argument,
                           "a family needs at least 3 spaces");
        std::vector<pqspace::Space> spaces;
        std::vector<std::string> names;
        for (int i = 0; i < count; ++i) {
            spaces.push_back(pqspace::io::load_space(paths[i]));
            // basenames keep reports independent of the invocation directory
            names.push_back(std::filesystem::path(paths[i]).filename().string());
        }
        std::vector<double> grid;
        if (eps_csv && *eps_csv) {
            grid = pqspace::io::parse_eps_list_double(eps_csv);
        } else {
            for (int i = 1; i <= 20; ++i) grid.push_back(0.05 * i);
        }
        auto report = pqspace::levy_diagnostics(std::span<const pqspace::Space>(spaces), grid);
        set_out(report_json, pqspace::io::levy_to_json(report, names));
    });
}

pqs_status pqs_convert(const char* matrix_path, const char* fasta_path, const char* gap_json,
                       pqs_space** out, char** validation_json) {
    if (auto bad = require(matrix_path && fasta_path && gap_json && out, "null argument"))
        return bad;
    return guarded([&] {
        auto matrix = pqspace::seqsim::load_score_matrix(matrix_path);
        auto gap = pqspace::seqsim::gap_from_json(gap_json);
        auto records = pqspace::seqsim::load_fasta(fasta_path, matrix.alphabet);
        std::vector<std::string> seqs;
        for (auto& r : records) seqs.push_back(std::move(r.sequence));
        pqspace::seqsim::Scorer scorer{std::move(matrix), gap};
        auto result = pqspace::seqsim::score_to_pqspace(seqs, scorer);
        if (validation_json)
            set_out(validation_json,
                    pqspace::io::validation_to_json(result.report, result.space.labels()));
        *out = new pqs_space(std::move(result.space));
    });
}

pqs_status pqs_score_check(const char* matrix_path, char** report_json) {
    if (auto bad = require(matrix_path && report_json, "null argument")) return bad;
    return guarded([&] {
        auto matrix = pqspace::seqsim::load_score_matrix(matrix_path);
        auto conditions = pqspace::seqsim::check_score_conditions(matrix);
        // Back-derived ratios phi_ij = 2^(S_ij / 2): the psi factors cancel
        // from the triangle condition, so any positive psi works.
        const int n = matrix.alphabet.size();
        std::vector<double> phi(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                phi[static_cast<std::size_t>(i) * n + j] = std::exp2(matrix.at(i, j) / 2.0);
        auto phi_report = pqspace::seqsim::check_phi_triangle(n, phi);
        set_out(report_json, pqspace::seqsim::conditions_to_json(matrix, conditions, &phi_report));
    });
}

pqs_status pqs_cube_space(int n, int asymmetric, pqs_space** out) {
    if (auto bad = require(out != nullptr, "null argument")) return bad;
    return guarded([&] {
        pqspace::cube::CubeSpec spec{
            n, asymmetric ? pqspace::cube::Variant::asymmetric : pqspace::cube::Variant::metric};
        *out = new pqs_space(pqspace::cube::materialize(spec));
    });
}

pqs_status pqs_cube_gamma_csv(int n, char** pmf_csv) {
    if (auto bad = require(pmf_csv != nullptr, "null argument")) return bad;
    return guarded([&] { set_out(pmf_csv, pqspace::cube::gamma_csv(pqspace::cube::gamma_law_exact(n))); });
}

pqs_status pqs_cube_gamma_bounds(int n, const char* eps_csv, char** report_json) {
    if (auto bad = require(report_json != nullptr, "null argument")) return bad;
    return guarded([&] {
        std::vector<pqspace::Rational> fallback;
        for (int i = 1; i <= 20; ++i) fallback.emplace_back(i, 20);
        auto grid = grid_or(eps_csv, std::move(fallback));
        auto law = pqspace::cube::gamma_law_exact(n);
        auto report = pqspace::cube::check_gamma_bound(law, grid);
        set_out(report_json, pqspace::cube::bound_report_json(report, n));
    });
}

pqs_status pqs_cube_gamma_mc(int n, long long samples, unsigned long long seed,
                             const char* eps_csv, char** csv) {
    if (auto bad = require(csv != nullptr, "null argument")) return bad;
    return guarded([&] {
        std::vector<pqspace::Rational> fallback;
        for (int i = 1; i <= 20; ++i) fallback.emplace_back(i, 20);
        auto grid = grid_or(eps_csv, std::move(fallback));
        auto rows = pqspace::cube::gamma_monte_carlo(n, static_cast<std::uint64_t>(samples), seed,
                                                     grid);
        set_out(csv, pqspace::cube::mc_csv(rows));
    });
}

pqs_status pqs_cube_alpha(int n, int asymmetric, const char* eps_csv, char** curve_csv,
                          char** bound_json) {
    if (auto bad = require(curve_csv != nullptr, "null argument")) return bad;
    return guarded([&] {
        pqspace::cube::CubeSpec spec{
            n, asymmetric ? pqspace::cube::Variant::asymmetric : pqspace::cube::Variant::metric};
        const std::vector<pqspace::Rational>* grid_ptr = nullptr;
        std::vector<pqspace::Rational> grid;
        if (eps_csv && *eps_csv) {
            grid = pqspace::io::parse_eps_list(eps_csv);
            grid_ptr = &grid;
        }
        auto result = pqspace::cube::cube_alpha_exact(spec, grid_ptr);
        set_out(curve_csv, pqspace::io::curve_csv(result.curve));
        if (bound_json) set_out(bound_json, pqspace::cube::bound_report_json(result.bound, n));
    });
}

pqs_status pqs_cube_majority(int n, int asymmetric, const char* eps_csv, long long samples,
                             unsigned long long seed, char** csv) {
    if (auto bad = require(csv && eps_csv, "null argument")) return bad;
    return guarded([&] {
        pqspace::cube::CubeSpec spec{
            n, asymmetric ? pqspace::cube::Variant::asymmetric : pqspace::cube::Variant::metric};
        auto grid = pqspace::io::parse_eps_list(eps_csv);
        std::ostringstream out;
        out << "eps,estimate,stderr,closed_form\n";
        for (const auto& eps : grid) {
            auto r = pqspace::cube::majority_neighborhood_sampler(
                spec, eps, pqspace::Side::associated, static_cast<std::uint64_t>(samples), seed);
            out << pqspace::format_double(pqspace::to_double(eps)) << ','
                << pqspace::format_double(r.estimate) << ',' << pqspace::format_double(r.stderr_)
                << ',' << pqspace::format_double(r.closed_form) << '\n';
        }
        set_out(csv, out.str());
    });
}

pqs_status pqs_cube_lln(const char* n_csv, const char* t_csv, char** report_json) {
    if (auto bad = require(n_csv && t_csv && report_json, "null argument")) return bad;
    return guarded([&] {
        std::vector<std::int64_t> ns;
        for (const auto& r : pqspace::io::parse_eps_list(n_csv))
            ns.push_back(r.convert_to<std::int64_t>());
        auto ts = pqspace::io::parse_eps_list_double(t_csv);
        auto report = pqspace::cube::lln_check(ns, ts);
        set_out(report_json, pqspace::cube::lln_report_json(report));
    });
}

pqs_status pqs_talagrand_run(const char* config_json, char** csv) {
    if (auto bad = require(config_json && csv, "null argument")) return bad;
    return guarded([&] {
        auto config = pqspace::product::config_from_json(config_json);
        auto result = pqspace::product::product_tail_monte_carlo(config);
        set_out(csv, pqspace::product::tails_csv(result));
    });
}

} // extern "C"
