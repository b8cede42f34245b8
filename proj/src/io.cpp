#include "pqspace/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace pqspace::io {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

double entry_to_double(const json& v, const char* what) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return to_double(parse_rational(v.get<std::string>()));
    raise(ErrorKind::parse, std::string(what) + " entries must be numbers or ratio strings");
}

Rational entry_to_rational(const json& v, const char* what) {
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_number()) {
        // Binary floats convert exactly; decimal-exact fixtures should use
        // string entries instead.
        return Rational(v.get<double>());
    }
    if (v.is_string()) return parse_rational(v.get<std::string>());
    raise(ErrorKind::parse, std::string(what) + " entries must be numbers or ratio strings");
}

template <class T, class Conv>
SpaceT<T> parse_space_impl(const std::string& text, Conv conv) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        raise(ErrorKind::parse, std::string("space file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("q") || !doc.contains("mu"))
        raise(ErrorKind::parse, "space file needs 'q' and 'mu' fields");

    const json& q = doc["q"];
    if (!q.is_array() || q.empty()) raise(ErrorKind::parse, "'q' must be a nonempty array of rows");
    const std::size_t n = q.size();

    std::vector<std::string> labels;
    if (doc.contains("labels")) {
        for (const auto& l : doc["labels"]) labels.push_back(l.get<std::string>());
        if (labels.size() != n) raise(ErrorKind::parse, "label count does not match matrix size");
    } else {
        for (std::size_t i = 0; i < n; ++i) labels.push_back("p" + std::to_string(i));
    }

    std::vector<T> flat;
    flat.reserve(n * n);
    for (const auto& row : q) {
        if (!row.is_array() || row.size() != n)
            raise(ErrorKind::parse, "'q' rows must all have length n");
        for (const auto& v : row) flat.push_back(conv(v, "q"));
    }

    const json& mu = doc["mu"];
    if (!mu.is_array() || mu.size() != n)
        raise(ErrorKind::parse, "'mu' must have one entry per point");
    std::vector<T> measure;
    measure.reserve(n);
    for (const auto& v : mu) measure.push_back(conv(v, "mu"));

    return SpaceT<T>(std::move(labels), std::move(flat), std::move(measure));
}

std::string json_escape(const std::string& s) {
    return json(s).dump();
}

template <class T>
std::string space_to_json_impl(const SpaceT<T>& space, bool as_string) {
    std::ostringstream out;
    out << "{\n  \"labels\": [";
    for (int i = 0; i < space.size(); ++i)
        out << (i ? ", " : "") << json_escape(space.labels()[i]);
    out << "],\n  \"q\": [\n";
    for (int i = 0; i < space.size(); ++i) {
        out << "    [";
        for (int j = 0; j < space.size(); ++j) {
            out << (j ? ", " : "");
            if (as_string)
                out << '"' << format_scalar(space.q(i, j)) << '"';
            else
                out << format_scalar(space.q(i, j));
        }
        out << (i + 1 < space.size() ? "],\n" : "]\n");
    }
    out << "  ],\n  \"mu\": [";
    for (int i = 0; i < space.size(); ++i) {
        out << (i ? ", " : "");
        if (as_string)
            out << '"' << format_scalar(space.mu(i)) << '"';
        else
            out << format_scalar(space.mu(i));
    }
    out << "]\n}\n";
    return out.str();
}

template <class T>
std::string matrix_csv_impl(const SpaceT<T>& space) {
    std::ostringstream out;
    out << "label";
    for (const auto& l : space.labels()) out << ',' << l;
    out << '\n';
    for (int i = 0; i < space.size(); ++i) {
        out << space.labels()[i];
        for (int j = 0; j < space.size(); ++j)
            out << ',' << format_double(to_double(space.q(i, j)));
        out << '\n';
    }
    return out.str();
}

template <class T>
std::string curve_csv_impl(const ConcentrationCurveT<T>& curve) {
    std::ostringstream out;
    out << "eps,alpha_left,alpha_right,alpha_assoc,witness_left,witness_right\n";
    char hex[16];
    for (std::size_t i = 0; i < curve.epsilons.size(); ++i) {
        out << format_double(to_double(curve.epsilons[i])) << ','
            << format_double(to_double(curve.alpha_left[i])) << ','
            << format_double(to_double(curve.alpha_right[i])) << ','
            << format_double(to_double(curve.alpha_assoc[i]));
        std::snprintf(hex, sizeof(hex), "0x%x", curve.witness_left[i]);
        out << ',' << hex;
        std::snprintf(hex, sizeof(hex), "0x%x", curve.witness_right[i]);
        out << ',' << hex << '\n';
    }
    return out.str();
}

template <class T>
json validation_json_impl(const ValidationReportT<T>& report,
                          const std::vector<std::string>& labels) {
    json violations = json::array();
    for (const auto& v : report.violations) {
        json witness = json::array();
        json names = json::array();
        for (int k = 0; k < v.witness_count; ++k) {
            witness.push_back(v.witness[k]);
            if (v.witness[k] >= 0 && v.witness[k] < static_cast<int>(labels.size()))
                names.push_back(labels[v.witness[k]]);
        }
        violations.push_back({{"kind", violation_kind_name(v.kind)},
                              {"witness", witness},
                              {"labels", names},
                              {"magnitude", to_double(v.magnitude)}});
    }
    return json{{"schema_version", kSchemaVersion},
                {"is_quasimetric", report.is_quasimetric},
                {"violation_count", report.violations.size()},
                {"violations", violations}};
}

template <class T>
json weight_json_impl(const WeightResult<T>& result) {
    json out{{"schema_version", kSchemaVersion},
             {"exists", result.weight.has_value()},
             {"max_residual", to_double(result.max_residual)}};
    if (result.weight) {
        json w = json::array();
        for (const auto& v : *result.weight) w.push_back(to_double(v));
        out["w"] = w;
    } else {
        out["witness"] = {result.witness.first, result.witness.second};
    }
    return out;
}

template <class T>
json sandwich_json_impl(const ConcentrationCurveT<T>& curve, const SandwichReport<T>& report) {
    json rows = json::array();
    for (std::size_t i = 0; i < curve.epsilons.size(); ++i) {
        rows.push_back({{"eps", to_double(curve.epsilons[i])},
                        {"alpha_left", to_double(curve.alpha_left[i])},
                        {"alpha_right", to_double(curve.alpha_right[i])},
                        {"alpha_assoc", to_double(curve.alpha_assoc[i])},
                        {"margin_lower", to_double(report.margin_lower[i])},
                        {"margin_upper", to_double(report.margin_upper[i])}});
    }
    return json{{"schema_version", kSchemaVersion},
                {"ok", report.ok},
                {"method", curve_method_name(curve.method)},
                {"violation_count", report.violations.size()},
                {"rows", rows}};
}

template <class T>
json asymmetry_json_impl(const AsymmetryReport<T>& report) {
    json support = json::array(), pmf = json::array();
    for (std::size_t i = 0; i < report.distribution.support.size(); ++i) {
        support.push_back(to_double(report.distribution.support[i]));
        pmf.push_back(to_double(report.distribution.pmf[i]));
    }
    json rows = json::array();
    for (const auto& r : report.rows)
        rows.push_back({{"eps", to_double(r.eps)},
                        {"tail", to_double(r.lhs)},
                        {"bound", to_double(r.bound)},
                        {"margin", to_double(r.margin)}});
    return json{{"schema_version", kSchemaVersion},
                {"ok", report.ok},
                {"method", report.distribution.sampled ? "sampled" : "exact"},
                {"support", support},
                {"pmf", pmf},
                {"rows", rows}};
}

} // namespace

Space parse_space(const std::string& text) {
    return parse_space_impl<double>(text, entry_to_double);
}

RationalSpace parse_space_rational(const std::string& text) {
    return parse_space_impl<Rational>(text, entry_to_rational);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::io, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::io, "cannot write '" + path + "'");
    out << content;
    if (!out) raise(ErrorKind::io, "write failed for '" + path + "'");
}

Space load_space(const std::string& path) { return parse_space(read_file(path)); }

RationalSpace load_space_rational(const std::string& path) {
    return parse_space_rational(read_file(path));
}

std::string space_to_json(const Space& space) { return space_to_json_impl(space, false); }
std::string space_to_json(const RationalSpace& space) { return space_to_json_impl(space, true); }

void save_space(const Space& space, const std::string& path) {
    write_file(path, space_to_json(space));
}
void save_space(const RationalSpace& space, const std::string& path) {
    write_file(path, space_to_json(space));
}

std::string matrix_csv(const Space& space) { return matrix_csv_impl(space); }
std::string matrix_csv(const RationalSpace& space) { return matrix_csv_impl(space); }

std::string curve_csv(const ConcentrationCurve& curve) { return curve_csv_impl(curve); }
std::string curve_csv(const ConcentrationCurveT<Rational>& curve) { return curve_csv_impl(curve); }

std::string validation_to_json(const ValidationReport& report,
                               const std::vector<std::string>& labels) {
    return validation_json_impl(report, labels).dump(2) + "\n";
}
std::string validation_to_json(const ValidationReportT<Rational>& report,
                               const std::vector<std::string>& labels) {
    return validation_json_impl(report, labels).dump(2) + "\n";
}

std::string weight_to_json(const WeightResult<double>& result) {
    return weight_json_impl(result).dump(2) + "\n";
}
std::string weight_to_json(const WeightResult<Rational>& result) {
    return weight_json_impl(result).dump(2) + "\n";
}

std::string sandwich_to_json(const ConcentrationCurve& curve,
                             const SandwichReport<double>& report) {
    return sandwich_json_impl(curve, report).dump(2) + "\n";
}
std::string sandwich_to_json(const ConcentrationCurveT<Rational>& curve,
                             const SandwichReport<Rational>& report) {
    return sandwich_json_impl(curve, report).dump(2) + "\n";
}

std::string asymmetry_to_json(const AsymmetryReport<double>& report) {
    return asymmetry_json_impl(report).dump(2) + "\n";
}
std::string asymmetry_to_json(const AsymmetryReport<Rational>& report) {
    return asymmetry_json_impl(report).dump(2) + "\n";
}

std::string levy_to_json(const LevyReport& report, const std::vector<std::string>& names) {
    auto side_json = [](const LevySideDiagnostics& diag) {
        json values = json::array();
        for (const auto& row : diag.values) values.push_back(row);
        json flags = json::array();
        for (bool b : diag.converging_per_eps) flags.push_back(b);
        json fit{{"valid", diag.fit.valid}};
        if (diag.fit.valid) {
            fit["c1"] = diag.fit.c1;
            fit["c2"] = diag.fit.c2;
            fit["rms"] = diag.fit.rms;
            fit["violations"] = diag.fit.violations;
        }
        return json{{"values", values},
                    {"converging_per_eps", flags},
                    {"converging", diag.converging},
                    {"fit", fit}};
    };
    json out{{"schema_version", kSchemaVersion},
             {"family_size", report.family_size},
             {"members", names},
             {"eps", report.epsilons},
             {"left", side_json(report.left)},
             {"right", side_json(report.right)},
             {"assoc", side_json(report.assoc)}};
    return out.dump(2) + "\n";
}

std::vector<Rational> parse_eps_list(const std::string& text) {
    std::vector<Rational> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(parse_rational(item));
    }
    if (out.empty()) raise(ErrorKind::parse, "empty eps list");
    return out;
}

std::vector<double> parse_eps_list_double(const std::string& text) {
    std::vector<double> out;
    for (const auto& r : parse_eps_list(text)) out.push_back(to_double(r));
    return out;
}

} // namespace pqspace::io
