#include "jplse/signals.hpp"
#include "jplse/errors.hpp"
#include "jplse/io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

namespace jplse {

namespace {

std::string data_dir() {
    if (const char* env = std::getenv("JPLSE_DATA_DIR")) return env;
#ifdef JPLSE_DATA_DIR
    return JPLSE_DATA_DIR;
#else
    return "data";
#endif
}

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double smooth_value(const std::string& name, double t) {
    if (name == "sin") return std::sin(kTwoPi * t);
    if (name == "ramp") return t;
    throw InvalidInput("unknown smooth signal '" + name + "' (expected sin or ramp)");
}

double smooth_antiderivative(const std::string& name, double t) {
    if (name == "sin") return -std::cos(kTwoPi * t) / kTwoPi;
    if (name == "ramp") return 0.5 * t * t;
    throw InvalidInput("unknown smooth signal '" + name + "'");
}

double smooth_squared_norm(const std::string& name) {
    if (name == "sin") return 0.5;
    if (name == "ramp") return 1.0 / 3.0;
    throw InvalidInput("unknown smooth signal '" + name + "'");
}

double smooth_mean(const std::string& name) {
    if (name == "sin") return 0.0;
    if (name == "ramp") return 0.5;
    throw InvalidInput("unknown smooth signal '" + name + "'");
}

} // namespace

StepFunction blocks_signal(double scale) {
    const std::string path = data_dir() + "/blocks.csv";
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open blocks constants at " + path);
    std::vector<double> pos, height;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        double t, h;
        char comma;
        if (!(row >> t >> comma >> h)) throw InvalidInput("malformed row in " + path + ": " + line);
        pos.push_back(t);
        height.push_back(h);
    }
    Eigen::VectorXd bp(static_cast<Eigen::Index>(pos.size()));
    Eigen::VectorXd val(static_cast<Eigen::Index>(pos.size()) + 1);
    val[0] = 0.0;
    for (std::size_t j = 0; j < pos.size(); ++j) {
        bp[static_cast<Eigen::Index>(j)] = pos[j];
        val[static_cast<Eigen::Index>(j) + 1] = val[static_cast<Eigen::Index>(j)] + height[j];
    }
    return StepFunction(bp, val * scale);
}

SignalSpec SignalSpec::parse(const std::string& text) {
    SignalSpec spec;
    std::string body = text;
    const auto spos = body.rfind(":scale=");
    if (spos != std::string::npos) {
        spec.scale = std::stod(body.substr(spos + 7));
        body = body.substr(0, spos);
    }
    if (body == "blocks") {
        spec.kind = Kind::Blocks;
    } else if (body == "sin" || body == "ramp") {
        spec.kind = Kind::Smooth;
        spec.name = body;
    } else if (body.rfind("step:", 0) == 0) {
        spec.kind = Kind::CustomStep;
        spec.custom = read_step_function(body.substr(5));
    } else if (body.rfind("sampled:", 0) == 0) {
        spec.kind = Kind::Sampled;
        spec.file = body.substr(8);
    } else {
        throw InvalidInput("cannot parse signal '" + text +
                           "'; expected blocks, sin, ramp, step:<json> or sampled:<csv>");
    }
    return spec;
}

std::string SignalSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Blocks: os << "blocks"; break;
        case Kind::CustomStep: os << "step"; break;
        case Kind::Smooth: os << name; break;
        case Kind::Sampled: os << "sampled:" << file; break;
    }
    if (scale != 1.0) os << ":scale=" << scale;
    return os.str();
}

bool signal_is_step(const SignalSpec& spec) {
    return spec.kind == SignalSpec::Kind::Blocks || spec.kind == SignalSpec::Kind::CustomStep;
}

StepFunction signal_step(const SignalSpec& spec) {
    switch (spec.kind) {
        case SignalSpec::Kind::Blocks:
            return blocks_signal(spec.scale);
        case SignalSpec::Kind::CustomStep: {
            Eigen::VectorXd scaled = spec.custom.values() * spec.scale;
            return StepFunction(spec.custom.breakpoints(), scaled);
        }
        default:
            throw InvalidInput("signal '" + spec.describe() + "' is not a step function");
    }
}

SampledSignal signal_cell_means(const SignalSpec& spec, Eigen::Index n) {
    switch (spec.kind) {
        case SignalSpec::Kind::Blocks:
        case SignalSpec::Kind::CustomStep:
            return cell_means(signal_step(spec), n);
        case SignalSpec::Kind::Smooth: {
            const std::string name = spec.name;
            SampledSignal s = cell_means_from_antiderivative(
                [name](double t) { return smooth_antiderivative(name, t); }, n);
            return s * spec.scale;
        }
        case SignalSpec::Kind::Sampled: {
            Eigen::VectorXd y = read_series_csv(spec.file);
            if (y.size() != n)
                throw InvalidInput("sampled signal has " + std::to_string(y.size()) +
                                   " cells; requested n = " + std::to_string(n));
            return y * spec.scale;
        }
    }
    throw std::logic_error("unreachable");
}

double signal_squared_norm(const SignalSpec& spec) {
    switch (spec.kind) {
        case SignalSpec::Kind::Blocks:
        case SignalSpec::Kind::CustomStep:
            return signal_step(spec).squared_norm();
        case SignalSpec::Kind::Smooth:
            return spec.scale * spec.scale * smooth_squared_norm(spec.name);
        case SignalSpec::Kind::Sampled: {
            Eigen::VectorXd y = read_series_csv(spec.file);
            return spec.scale * spec.scale * y.squaredNorm() / static_cast<double>(y.size());
        }
    }
    throw std::logic_error("unreachable");
}

double signal_mean(const SignalSpec& spec) {
    switch (spec.kind) {
        case SignalSpec::Kind::Blocks:
        case SignalSpec::Kind::CustomStep:
            return signal_step(spec).integral();
        case SignalSpec::Kind::Smooth:
            return spec.scale * smooth_mean(spec.name);
        case SignalSpec::Kind::Sampled: {
            Eigen::VectorXd y = read_series_csv(spec.file);
            return spec.scale * y.mean();
        }
    }
    throw std::logic_error("unreachable");
}

double signal_sd(const SignalSpec& spec) {
    const double mu = signal_mean(spec);
    const double var = signal_squared_norm(spec) - mu * mu;
    return std::sqrt(var > 0.0 ? var : 0.0);
}

double signal_inner(const SignalSpec& spec, const StepFunction& g) {
    if (signal_is_step(spec)) {
        const StepFunction f = signal_step(spec);
        // <f, g> over the merged partition.
        double acc = 0.0, lo = 0.0;
        Eigen::Index fi = 0, gi = 0;
        const auto& fb = f.breakpoints();
        const auto& gb = g.breakpoints();
        while (true) {
            const double fnext = fi < fb.size() ? fb[fi] : 1.0;
            const double gnext = gi < gb.size() ? gb[gi] : 1.0;
            const double hi = std::min(fnext, gnext);
            acc += f.values()[fi] * g.values()[gi] * (hi - lo);
            if (fnext <= hi && fi < fb.size()) ++fi;
            if (gnext <= hi && gi < gb.size()) ++gi;
            if (hi >= 1.0) break;
            lo = hi;
        }
        return acc;
    }
    if (spec.kind == SignalSpec::Kind::Smooth) {
        const std::string name = spec.name;
        double acc = 0.0, lo = 0.0;
        for (Eigen::Index i = 0; i <= g.breakpoints().size(); ++i) {
            const double hi = (i < g.breakpoints().size()) ? g.breakpoints()[i] : 1.0;
            acc += g.values()[i] * (smooth_antiderivative(name, hi) - smooth_antiderivative(name, lo));
            lo = hi;
        }
        return spec.scale * acc;
    }
    throw InvalidInput("inner product against sampled signals is not defined");
}

double signal_value(const SignalSpec& spec, double t) {
    if (signal_is_step(spec)) return signal_step(spec)(t);
    if (spec.kind == SignalSpec::Kind::Smooth) return spec.scale * smooth_value(spec.name, t);
    throw InvalidInput("pointwise values of sampled signals are not defined");
}

} // namespace jplse
