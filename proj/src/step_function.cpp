#include "jplse/step_function.hpp"
#include "jplse/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jplse {

namespace {

void require_finite(const Eigen::VectorXd& v, const char* what) {
    if (!v.allFinite()) throw InvalidInput(std::string(what) + " must be finite");
}

} // namespace

StepFunction::StepFunction() : breakpoints_(0), values_(Eigen::VectorXd::Zero(1)) {}

StepFunction::StepFunction(Eigen::VectorXd breakpoints, Eigen::VectorXd values) {
    if (values.size() != breakpoints.size() + 1)
        throw InvalidInput("step function needs one more value than breakpoints");
    require_finite(breakpoints, "breakpoints");
    require_finite(values, "values");
    for (Eigen::Index i = 0; i < breakpoints.size(); ++i) {
        if (breakpoints[i] <= 0.0 || breakpoints[i] >= 1.0)
            throw InvalidInput("breakpoints must lie in the open interval (0,1)");
        if (i > 0 && breakpoints[i] <= breakpoints[i - 1])
            throw InvalidInput("breakpoints must be strictly increasing");
    }
    // Canonicalize: merge runs of equal adjacent values.
    std::vector<double> bp, val;
    val.push_back(values[0]);
    for (Eigen::Index i = 0; i < breakpoints.size(); ++i) {
        if (values[i + 1] != val.back()) {
            bp.push_back(breakpoints[i]);
            val.push_back(values[i + 1]);
        }
    }
    breakpoints_ = Eigen::Map<const Eigen::VectorXd>(bp.data(), static_cast<Eigen::Index>(bp.size()));
    values_ = Eigen::Map<const Eigen::VectorXd>(val.data(), static_cast<Eigen::Index>(val.size()));
}

StepFunction StepFunction::constant(double c) {
    return StepFunction(Eigen::VectorXd(0), Eigen::VectorXd::Constant(1, c));
}

StepFunction StepFunction::indicator(double a, double b, double height) {
    if (!(0.0 <= a && a < b && b <= 1.0)) throw InvalidInput("indicator needs 0 <= a < b <= 1");
    std::vector<double> bp, val;
    if (a > 0.0) { bp.push_back(a); val.push_back(0.0); }
    val.push_back(height);
    if (b < 1.0) { bp.push_back(b); val.push_back(0.0); }
    return StepFunction(Eigen::Map<const Eigen::VectorXd>(bp.data(), static_cast<Eigen::Index>(bp.size())),
                        Eigen::Map<const Eigen::VectorXd>(val.data(), static_cast<Eigen::Index>(val.size())));
}

double StepFunction::operator()(double t) const {
    if (t < 0.0 || t > 1.0) throw InvalidInput("step function argument outside [0,1]");
    // Right-continuous: value on [b_i, b_{i+1}); t = 1 carries the last value.
    const double* begin = breakpoints_.data();
    const double* end = begin + breakpoints_.size();
    return values_[std::upper_bound(begin, end, t) - begin];
}

double StepFunction::integral(double a, double b) const {
    if (!(0.0 <= a && a <= b && b <= 1.0)) throw InvalidInput("integral needs 0 <= a <= b <= 1");
    double acc = 0.0;
    double lo = a;
    for (Eigen::Index i = 0; i <= breakpoints_.size(); ++i) {
        const double hi = (i < breakpoints_.size()) ? breakpoints_[i] : 1.0;
        if (hi <= lo) continue;
        const double cell_hi = std::min(hi, b);
        if (cell_hi > lo) acc += values_[i] * (cell_hi - lo);
        if (hi >= b) break;
        lo = hi;
    }
    return acc;
}

double StepFunction::mean(double a, double b) const {
    if (b <= a) throw InvalidInput("mean needs a < b");
    return integral(a, b) / (b - a);
}

double StepFunction::squared_norm() const {
    double acc = 0.0, lo = 0.0;
    for (Eigen::Index i = 0; i <= breakpoints_.size(); ++i) {
        const double hi = (i < breakpoints_.size()) ? breakpoints_[i] : 1.0;
        acc += values_[i] * values_[i] * (hi - lo);
        lo = hi;
    }
    return acc;
}

std::vector<double> StepFunction::jump_locations() const {
    return {breakpoints_.data(), breakpoints_.data() + breakpoints_.size()};
}

StepFunction embed(const Eigen::VectorXd& u) {
    const Eigen::Index n = u.size();
    if (n == 0) throw InvalidInput("embed: empty vector");
    require_finite(u, "embed input");
    std::vector<double> bp, val;
    val.push_back(u[0]);
    for (Eigen::Index i = 1; i < n; ++i) {
        if (u[i] != val.back()) {
            bp.push_back(static_cast<double>(i) / static_cast<double>(n));
            val.push_back(u[i]);
        }
    }
    return StepFunction(Eigen::Map<const Eigen::VectorXd>(bp.data(), static_cast<Eigen::Index>(bp.size())),
                        Eigen::Map<const Eigen::VectorXd>(val.data(), static_cast<Eigen::Index>(val.size())));
}

StepFunction project_mean(const StepFunction& f, std::vector<double> jumps) {
    for (double t : jumps)
        if (!(t > 0.0 && t < 1.0)) throw InvalidInput("projection jump set must lie in (0,1)");
    std::sort(jumps.begin(), jumps.end());
    jumps.erase(std::unique(jumps.begin(), jumps.end()), jumps.end());

    std::vector<double> vals;
    double lo = 0.0;
    for (std::size_t i = 0; i <= jumps.size(); ++i) {
        const double hi = (i < jumps.size()) ? jumps[i] : 1.0;
        vals.push_back(f.mean(lo, hi));
        lo = hi;
    }
    return StepFunction(Eigen::Map<const Eigen::VectorXd>(jumps.data(), static_cast<Eigen::Index>(jumps.size())),
                        Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size())));
}

double distance(const StepFunction& f, const StepFunction& g, Norm norm) {
    // Sweep the merged partition; f and g are constant on each merged cell.
    const auto& fb = f.breakpoints();
    const auto& gb = g.breakpoints();
    Eigen::Index fi = 0, gi = 0;
    double lo = 0.0, l2 = 0.0, sup = 0.0;
    while (true) {
        const double fnext = fi < fb.size() ? fb[fi] : 1.0;
        const double gnext = gi < gb.size() ? gb[gi] : 1.0;
        const double hi = std::min(fnext, gnext);
        const double d = f.values()[fi] - g.values()[gi];
        l2 += d * d * (hi - lo);
        sup = std::max(sup, std::abs(d));
        if (fnext <= hi && fi < fb.size()) ++fi;
        if (gnext <= hi && gi < gb.size()) ++gi;
        if (hi >= 1.0) break;
        lo = hi;
    }
    return norm == Norm::L2 ? std::sqrt(l2) : sup;
}

double hausdorff_jumps(std::vector<double> a, std::vector<double> b) {
    if (a.empty() && b.empty()) return 0.0;
    if (a.empty() || b.empty()) return 1.0;
    auto directed = [](const std::vector<double>& from, const std::vector<double>& to) {
        double worst = 0.0;
        for (double x : from) {
            double best = std::numeric_limits<double>::infinity();
            for (double y : to) best = std::min(best, std::abs(x - y));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

double mpl(std::vector<double> jumps, double horizon) {
    if (horizon <= 0.0) throw InvalidInput("mpl: horizon must be positive");
    for (double t : jumps)
        if (!(t > 0.0 && t < horizon)) throw InvalidInput("mpl: jumps must lie in (0, horizon)");
    std::sort(jumps.begin(), jumps.end());
    jumps.insert(jumps.begin(), 0.0);
    jumps.push_back(horizon);
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < jumps.size(); ++i) gap = std::min(gap, jumps[i] - jumps[i - 1]);
    return gap;
}

double mpl(const StepFunction& f, double horizon) {
    return mpl(f.jump_locations(), horizon);
}

SampledSignal cell_means(const StepFunction& f, Eigen::Index n) {
    if (n < 1) throw InvalidInput("cell_means: n must be >= 1");
    SampledSignal out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double a = static_cast<double>(i) / static_cast<double>(n);
        const double b = static_cast<double>(i + 1) / static_cast<double>(n);
        out[i] = f.integral(a, b) * static_cast<double>(n);
    }
    return out;
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, m, fa, flm, fm);
    const double right = simpson(f, m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

SampledSignal cell_means(const std::function<double(double)>& f, Eigen::Index n, double tol) {
    if (n < 1) throw InvalidInput("cell_means: n must be >= 1");
    if (tol <= 0.0) throw InvalidInput("cell_means: tol must be positive");
    SampledSignal out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double a = static_cast<double>(i) / static_cast<double>(n);
        const double b = static_cast<double>(i + 1) / static_cast<double>(n);
        const double fa = f(a), fm = f(0.5 * (a + b)), fb = f(b);
        const double whole = simpson(f, a, b, fa, fm, fb);
        out[i] = adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40) * static_cast<double>(n);
    }
    return out;
}

SampledSignal cell_means_from_antiderivative(const std::function<double(double)>& antiderivative,
                                             Eigen::Index n) {
    if (n < 1) throw InvalidInput("cell_means: n must be >= 1");
    SampledSignal out(n);
    double prev = antiderivative(0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double next = antiderivative(static_cast<double>(i + 1) / static_cast<double>(n));
        out[i] = (next - prev) * static_cast<double>(n);
        prev = next;
    }
    return out;
}

} // namespace jplse
