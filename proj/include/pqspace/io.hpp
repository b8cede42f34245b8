#pragma once

#include <string>
#include <vector>

#include "pqspace/concentration.hpp"
#include "pqspace/space.hpp"

namespace pqspace::io {

// Space files are JSON objects {"labels":[...], "q":[[...]], "mu":[...]},
// row i of q holding distances from point i. Entries may be JSON numbers or
// strings; strings ("2/3", "0.05") parse as exact rationals, which is how
// paper fixtures stay exact in rational mode. Doubles are written with 17
// significant digits; rational spaces are written as ratio strings.

Space load_space(const std::string& path);
RationalSpace load_space_rational(const std::string& path);
Space parse_space(const std::string& json_text);
RationalSpace parse_space_rational(const std::string& json_text);

std::string space_to_json(const Space& space);
std::string space_to_json(const RationalSpace& space);
void save_space(const Space& space, const std::string& path);
void save_space(const RationalSpace& space, const std::string& path);

// Distance matrix as CSV with a label header row.
std::string matrix_csv(const Space& space);
std::string matrix_csv(const RationalSpace& space);

// Curve CSV: eps,alpha_left,alpha_right,alpha_assoc,witness_left,witness_right
// with witnesses as hex bitmasks.
std::string curve_csv(const ConcentrationCurve& curve);
std::string curve_csv(const ConcentrationCurveT<Rational>& curve);

std::string validation_to_json(const ValidationReport& report,
                               const std::vector<std::string>& labels);
std::string validation_to_json(const ValidationReportT<Rational>& report,
                               const std::vector<std::string>& labels);

std::string weight_to_json(const WeightResult<double>& result);
std::string weight_to_json(const WeightResult<Rational>& result);

std::string sandwich_to_json(const ConcentrationCurve& curve, const SandwichReport<double>& report);
std::string sandwich_to_json(const ConcentrationCurveT<Rational>& curve,
                             const SandwichReport<Rational>& report);

std::string asymmetry_to_json(const AsymmetryReport<double>& report);
std::string asymmetry_to_json(const AsymmetryReport<Rational>& report);

std::string levy_to_json(const LevyReport& report, const std::vector<std::string>& names);

// Comma-separated decimal list ("0.05,0.1,1") parsed exactly.
std::vector<Rational> parse_eps_list(const std::string& text);
std::vector<double> parse_eps_list_double(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace pqspace::io
