#include "jplse/io.hpp"
#include "jplse/errors.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace jplse {

using nlohmann::json;

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    Eigen::Index i = 0;
    for (const auto& x : arr) v[i++] = x.get<double>();
    return v;
}

json step_to_json(const StepFunction& f) {
    return json{{"breakpoints", vector_to_json(f.breakpoints())},
                {"values", vector_to_json(f.values())}};
}

StepFunction step_from_json(const json& j) {
    return StepFunction(vector_from_json(j.at("breakpoints")), vector_from_json(j.at("values")));
}

json path_to_json_obj(const ScaleSpacePath& path) {
    json pieces = json::array();
    for (const auto& piece : path.pieces) {
        json interval = json::array();
        interval.push_back(piece.gamma_lo);
        if (std::isfinite(piece.gamma_hi)) interval.push_back(piece.gamma_hi);
        else interval.push_back(nullptr);
        pieces.push_back(json{{"k", piece.jumps},
                              {"gamma_interval", interval},
                              {"function", step_to_json(piece.minimizer)}});
    }
    json criticals = json::array();
    for (double g : path.critical_gammas) criticals.push_back(g);
    return json{{"critical_gammas", criticals},
                {"residual_offset", path.residual_offset},
                {"pieces", pieces}};
}

json parse_json(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw InvalidInput(std::string("malformed JSON for ") + what);
    return j;
}

} // namespace

std::string to_json(const StepFunction& f) { return step_to_json(f).dump(); }

std::string to_json(const FitResult& fit) {
    json cps = json::array();
    for (Eigen::Index c : fit.segmentation.changepoints) cps.push_back(c);
    return json{{"n", fit.segmentation.n},
                {"changepoints", cps},
                {"means", vector_to_json(fit.segmentation.means)},
                {"objective", fit.objective}}
        .dump();
}

std::string to_json(const ScaleSpacePath& path) { return path_to_json_obj(path).dump(); }

std::string to_json(const TimeChange& tc) {
    json knots = json::array();
    for (const auto& k : tc.knots) knots.push_back(json::array({k[0], k[1]}));
    return json{{"knots", knots}}.dump();
}

std::string to_json(const PathDistanceReport& report) {
    json knots = json::array();
    for (const auto& k : report.witness.knots) knots.push_back(json::array({k[0], k[1]}));
    json inner = json::array();
    for (const auto& [m, l, d] : report.matched_inner)
        inner.push_back(json{{"piece_a", m}, {"piece_b", l}, {"inner_distance", d}});
    return json{{"distance", report.distance},
                {"horizon", report.horizon},
                {"inner_metric", report.inner == PathMetric::L2 ? "l2" : "skorokhod"},
                {"witness", json{{"knots", knots}}},
                {"matched_inner", inner}}
        .dump();
}

StepFunction step_function_from_json(const std::string& text) {
    return step_from_json(parse_json(text, "step function"));
}

ScaleSpacePath path_from_json(const std::string& text) {
    const json j = parse_json(text, "path");
    ScaleSpacePath path;
    path.residual_offset = j.value("residual_offset", 0.0);
    for (const auto& g : j.at("critical_gammas")) path.critical_gammas.push_back(g.get<double>());
    for (const auto& pj : j.at("pieces")) {
        ScaleSpacePiece piece;
        piece.jumps = pj.at("k").get<int>();
        const auto& interval = pj.at("gamma_interval");
        piece.gamma_lo = interval.at(0).get<double>();
        piece.gamma_hi = interval.at(1).is_null() ? std::numeric_limits<double>::infinity()
                                                  : interval.at(1).get<double>();
        piece.minimizer = step_from_json(pj.at("function"));
        path.pieces.push_back(std::move(piece));
    }
    if (path.pieces.size() != path.critical_gammas.size() + 1)
        throw InvalidInput("path JSON needs one more piece than critical gammas");
    return path;
}

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

StepFunction read_step_function(const std::string& path) {
    return step_function_from_json(slurp(path));
}

ScaleSpacePath read_path(const std::string& path) { return path_from_json(slurp(path)); }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

Eigen::VectorXd read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open series file " + path);
    std::vector<double> values;
    std::string line;
    int y_column = -1;
    bool first_content = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::istringstream row(line);
        std::string field;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (fields.empty()) continue;
        if (first_content) {
            first_content = false;
            // A non-numeric first row is a header; find the y column.
            try {
                std::size_t used = 0;
                std::stod(fields[0], &used);
            } catch (const std::logic_error&) {
                for (std::size_t i = 0; i < fields.size(); ++i)
                    if (fields[i] == "y") y_column = static_cast<int>(i);
                if (y_column < 0)
                    throw InvalidInput("series file " + path + " has a header without a y column");
                continue;
            }
        }
        const std::size_t col = y_column >= 0 ? static_cast<std::size_t>(y_column) : 0;
        if (col >= fields.size()) throw InvalidInput("short row in series file " + path);
        try {
            values.push_back(std::stod(fields[col]));
        } catch (const std::logic_error&) {
            throw InvalidInput("non-numeric entry in series file " + path + ": " + fields[col]);
        }
    }
    if (values.empty()) throw InvalidInput("series file " + path + " holds no data");
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void write_series_csv(const std::string& path, const Eigen::VectorXd& y) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path);
    out << "y\n";
    for (Eigen::Index i = 0; i < y.size(); ++i) out << format_double(y[i]) << "\n";
}

bool TomlValue::as_bool() const {
    if (const bool* b = std::get_if<bool>(&v)) return *b;
    throw InvalidInput("config value is not a boolean");
}

double TomlValue::as_double() const {
    if (const double* d = std::get_if<double>(&v)) return *d;
    throw InvalidInput("config value is not a number");
}

std::string TomlValue::as_string() const {
    if (const std::string* s = std::get_if<std::string>(&v)) return *s;
    throw InvalidInput("config value is not a string");
}

std::vector<double> TomlValue::as_double_array() const {
    if (const auto* a = std::get_if<std::vector<double>>(&v)) return *a;
    if (const double* d = std::get_if<double>(&v)) return {*d};
    throw InvalidInput("config value is not a numeric array");
}

std::vector<std::string> TomlValue::as_string_array() const {
    if (const auto* a = std::get_if<std::vector<std::string>>(&v)) return *a;
    if (const std::string* s = std::get_if<std::string>(&v)) return {*s};
    throw InvalidInput("config value is not a string array");
}

namespace {

std::string strip(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// Removes a trailing comment that starts outside any string literal.
std::string strip_comment(const std::string& s) {
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_string = !in_string;
        else if (s[i] == '#' && !in_string) return s.substr(0, i);
    }
    return s;
}

TomlValue parse_scalar(const std::string& raw, int line_no) {
    const std::string t = strip(raw);
    if (t.empty()) throw InvalidInput("config line " + std::to_string(line_no) + ": empty value");
    if (t == "true") return {true};
    if (t == "false") return {false};
    if (t.front() == '"') {
        if (t.size() < 2 || t.back() != '"')
            throw InvalidInput("config line " + std::to_string(line_no) + ": unterminated string");
        return {t.substr(1, t.size() - 2)};
    }
    try {
        std::size_t used = 0;
        const double d = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return {d};
    } catch (const std::logic_error&) {
        throw InvalidInput("config line " + std::to_string(line_no) + ": cannot parse value '" + t + "'");
    }
}

} // namespace

std::map<std::string, TomlValue> parse_toml(const std::string& text) {
    std::map<std::string, TomlValue> out;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = strip(strip_comment(line));
        if (t.empty()) continue;
        if (t.front() == '[')
            throw InvalidInput("config line " + std::to_string(line_no) +
                               ": sections are not supported, the schema is flat");
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw InvalidInput("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = strip(t.substr(0, eq));
        const std::string value = strip(t.substr(eq + 1));
        if (key.empty()) throw InvalidInput("config line " + std::to_string(line_no) + ": empty key");
        if (!value.empty() && value.front() == '[') {
            if (value.back() != ']')
                throw InvalidInput("config line " + std::to_string(line_no) + ": unterminated array");
            std::vector<TomlValue> items;
            std::string inner = value.substr(1, value.size() - 2);
            std::istringstream parts(inner);
            std::string item;
            while (std::getline(parts, item, ',')) {
                if (strip(item).empty()) continue;
                items.push_back(parse_scalar(item, line_no));
            }
            if (items.empty()) {
                out[key] = TomlValue{std::vector<double>{}};
            } else if (std::holds_alternative<std::string>(items.front().v)) {
                std::vector<std::string> arr;
                for (auto& it : items) arr.push_back(it.as_string());
                out[key] = TomlValue{arr};
            } else {
                std::vector<double> arr;
                for (auto& it : items) arr.push_back(it.as_double());
                out[key] = TomlValue{arr};
            }
        } else {
            out[key] = parse_scalar(value, line_no);
        }
    }
    return out;
}

std::map<std::string, TomlValue> read_toml(const std::string& path) {
    return parse_toml(slurp(path));
}

} // namespace jplse
