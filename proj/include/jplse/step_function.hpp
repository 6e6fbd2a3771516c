#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace jplse {

// A vector of observations y_1..y_n on the implicit grid [(i-1)/n, i/n).
using Series = Eigen::VectorXd;

// Exact cell means of an underlying signal, one entry per grid cell.
using SampledSignal = Eigen::VectorXd;

// Right-continuous piecewise constant function on [0,1], left continuous at 1.
// Canonical form: breakpoints strictly increasing in (0,1), adjacent values
// distinct (exact comparison), so the jump set equals the breakpoint set.
class StepFunction {
public:
    StepFunction(); // constant zero
    StepFunction(Eigen::VectorXd breakpoints, Eigen::VectorXd values);

    static StepFunction constant(double c);
    // Indicator of [a,b] scaled by `height` (a < b within [0,1]).
    static StepFunction indicator(double a, double b, double height = 1.0);

    const Eigen::VectorXd& breakpoints() const { return breakpoints_; }
    const Eigen::VectorXd& values() const { return values_; }
    Eigen::Index jump_count() const { return breakpoints_.size(); }

    double operator()(double t) const;
    // \int_a^b f, exact (0 <= a <= b <= 1).
    double integral(double a, double b) const;
    double mean(double a, double b) const; // integral / (b-a)
    double integral() const { return integral(0.0, 1.0); }
    double squared_norm() const; // \int f^2

    std::vector<double> jump_locations() const;

    friend bool operator==(const StepFunction& a, const StepFunction& b) {
        // Guard the size first: Eigen's element-wise compare requires it.
        return a.breakpoints_.size() == b.breakpoints_.size() &&
               a.breakpoints_ == b.breakpoints_ && a.values_ == b.values_;
    }

private:
    Eigen::VectorXd breakpoints_;
    Eigen::VectorXd values_;
};

enum class Norm { L2, Sup };

// iota^n: embed a vector as the step function constant u_i on [(i-1)/n, i/n),
// merging equal adjacent cells.
StepFunction embed(const Eigen::VectorXd& u);

// Partition-mean projection: mean of f on each interval of the partition of
// [0,1] induced by the finite jump set J (entries must lie in (0,1)).
StepFunction project_mean(const StepFunction& f, std::vector<double> jumps);

// Exact L2 / sup distance over the merged partition of f and g.
double distance(const StepFunction& f, const StepFunction& g, Norm norm);

// Hausdorff distance between finite sets in [0,1].
// Conventions: d(A, {}) = 1 for A != {}, d({}, {}) = 0.
double hausdorff_jumps(std::vector<double> a, std::vector<double> b);

// Minimum plateau length: smallest gap between consecutive elements of
// J union {0, horizon}. Jump locations must lie in (0, horizon).
double mpl(std::vector<double> jumps, double horizon);
double mpl(const StepFunction& f, double horizon = 1.0);

// Cell means over n grid cells: exact for step functions, exact via an
// antiderivative when one is supplied, adaptive-Simpson (abs tol 1e-10)
// for a raw callable.
SampledSignal cell_means(const StepFunction& f, Eigen::Index n);
SampledSignal cell_means(const std::function<double(double)>& f, Eigen::Index n,
                         double tol = 1e-10);
SampledSignal cell_means_from_antiderivative(const std::function<double(double)>& antiderivative,
                                             Eigen::Index n);

} // namespace jplse
