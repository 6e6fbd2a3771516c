#pragma once

#include "jplse/step_function.hpp"

#include <Eigen/Core>

#include <vector>

namespace jplse {

// Changepoint set over a length-n series plus segment means.
// changepoints are 1-based: i means a jump between y_i and y_{i+1}.
struct Segmentation {
    Eigen::Index n = 0;
    std::vector<Eigen::Index> changepoints;
    Eigen::VectorXd means;

    Eigen::Index jump_count() const { return static_cast<Eigen::Index>(changepoints.size()); }
};

bool same_changepoints(const Segmentation& a, const Segmentation& b);

// Step function constant at the segment means on [(i-1)/n, i/n) cells.
StepFunction embed(const Segmentation& seg);

// Prefix-sum kernel for segment costs. Data are centered by the global mean
// before accumulating, which keeps sse() from cancelling catastrophically on
// near-constant segments; tiny negative results are clamped to zero.
class CostKernel {
public:
    explicit CostKernel(const Eigen::VectorXd& y);

    Eigen::Index size() const { return n_; }
    // Sum of squared deviations from the segment mean, 0-based inclusive range.
    double sse(Eigen::Index first, Eigen::Index last) const;
    double segment_mean(Eigen::Index first, Eigen::Index last) const;
    double total_squared() const { return total_squared_; }

private:
    Eigen::Index n_ = 0;
    double center_ = 0.0;
    double total_squared_ = 0.0;
    Eigen::VectorXd s1_, s2_; // prefix sums of centered data and its square
};

struct FitResult {
    Segmentation segmentation;
    double objective = 0.0; // gamma * #jumps + total SSE / n
};

// Global minimizer of  gamma * #J(u) + (1/n) sum (u_i - y_i)^2  by dynamic
// programming over segment ends, O(n^2) time, O(n) memory.
// Canonical tie-break: fewest jumps, then lexicographically smallest
// changepoint sequence; near-ties are detected with absolute tolerance
// 1e-12 * (1 + |objective|).
FitResult fit_fixed_gamma(const Eigen::VectorXd& y, double gamma);

// Exhaustive minimizer over all 2^(n-1) jump subsets; n <= 20. Same canonical
// tie-break as the dynamic programs. gamma = 0 is allowed here.
FitResult brute_force(const Eigen::VectorXd& y, double gamma);

// Best achievable normalized squared error for each jump budget k = 0..K,
// with one canonical minimizer per k.
struct DeltaTable {
    Eigen::Index n = 0;
    Eigen::VectorXd delta;            // delta[k] = min total SSE / n over <= k jumps
    std::vector<Segmentation> argmin; // canonical minimizer per k

    int max_jumps() const { return static_cast<int>(delta.size()) - 1; }
};

// All-k dynamic program, O(K n^2) time, O(K n) memory.
DeltaTable fit_all_k(const Eigen::VectorXd& y, int max_jumps);

namespace detail {
// Tolerance for treating two objective values as tied.
inline double tie_tol(double objective) { return 1e-12 * (1.0 + std::abs(objective)); }
} // namespace detail

} // namespace jplse
