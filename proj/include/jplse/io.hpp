#pragma once

#include "jplse/scale_space.hpp"
#include "jplse/segmentation.hpp"
#include "jplse/skorokhod.hpp"
#include "jplse/step_function.hpp"

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace jplse {

// %.17g rendering: shortest fixed format that round-trips doubles, used for
// every CSV field so equal configs produce byte-identical files.
std::string format_double(double x);

// ---- JSON ------------------------------------------------------------
// StepFunction:  {"breakpoints": [...], "values": [...]}
// Segmentation:  {"n": N, "changepoints": [...], "means": [...], "objective": X}
// Path:          {"critical_gammas": [...], "residual_offset": X,
//                 "pieces": [{"k": K, "gamma_interval": [lo, hi|null],
//                             "function": StepFunction}]}
// TimeChange:    {"knots": [[t, lambda_t], ...]}
// gamma_interval hi is null on the coarsest piece (gamma unbounded above).

std::string to_json(const StepFunction& f);
std::string to_json(const FitResult& fit);
std::string to_json(const ScaleSpacePath& path);
std::string to_json(const TimeChange& tc);
std::string to_json(const PathDistanceReport& report);

StepFunction step_function_from_json(const std::string& text);
ScaleSpacePath path_from_json(const std::string& text);

StepFunction read_step_function(const std::string& path);
ScaleSpacePath read_path(const std::string& path);
void write_text(const std::string& path, const std::string& text);

// ---- CSV -------------------------------------------------------------
// Series files hold either one value per line or a header row with a `y`
// column; '#' lines are comments.
Eigen::VectorXd read_series_csv(const std::string& path);
void write_series_csv(const std::string& path, const Eigen::VectorXd& y);

// ---- TOML subset -----------------------------------------------------
// Flat `key = value` files: strings, numbers, booleans and one-level arrays;
// '#' comments. Section headers are rejected, the config schema is flat.
struct TomlValue {
    std::variant<bool, double, std::string, std::vector<double>, std::vector<std::string>> v;

    bool as_bool() const;
    double as_double() const;
    std::string as_string() const;
    std::vector<double> as_double_array() const;
    std::vector<std::string> as_string_array() const;
};
std::map<std::string, TomlValue> parse_toml(const std::string& text);
std::map<std::string, TomlValue> read_toml(const std::string& path);

} // namespace jplse
