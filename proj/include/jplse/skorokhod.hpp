#pragma once

#include "jplse/scale_space.hpp"
#include "jplse/step_function.hpp"

#include <array>
#include <tuple>
#include <vector>

namespace jplse {

// Piecewise linear time change: strictly increasing knots mapping [0,T] onto
// [0,T], endpoints pinned. knots[i] = (t, lambda(t)).
struct TimeChange {
    std::vector<std::array<double, 2>> knots;

    // max |log slope| over the linear pieces; for a monotone piecewise
    // linear map this equals the sup over all chords.
    double max_log_slope() const;
    static TimeChange identity(double horizon = 1.0);
};

struct SkorokhodResult {
    double distance = 0.0;
    TimeChange witness;
};

// J1 distance between canonical step functions on [0,1]:
//   inf over lambda of max( L(lambda), sup_t |f(lambda(t)) - g(t)| )
// computed by bisection on the level eps. Feasibility of a level is decided
// by a dynamic program over monotone matchings of J(g) u {0,1} onto
// J(f) u {0,1}; between matched knots lambda is linear, so unmatched jumps
// are absorbed as long as the value discrepancy they create stays <= eps.
// The returned level is within tol of the infimum over that family.
SkorokhodResult skorokhod_distance(const StepFunction& f, const StepFunction& g,
                                   double tol = 1e-6);

enum class PathMetric { L2, Skorokhod };

struct PathDistanceReport {
    double distance = 0.0;
    TimeChange witness;                                  // over [0, horizon] in zeta
    std::vector<std::tuple<int, int, double>> matched_inner; // (piece of p, piece of q, inner distance)
    double horizon = 0.0;
    PathMetric inner = PathMetric::L2;
};

// Finite-horizon J1 distance between scale-space paths viewed as step
// functions of zeta = 1/gamma on [0, horizon], with the value-space metric
// given by `inner`. Both paths must have all zeta-jumps below the horizon
// (truncate_path first).
PathDistanceReport path_distance(const ScaleSpacePath& p, const ScaleSpacePath& q,
                                 double horizon, PathMetric inner, double tol = 1e-6);

} // namespace jplse
