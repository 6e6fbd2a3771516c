#pragma once

#include "jplse/segmentation.hpp"
#include "jplse/step_function.hpp"

#include <vector>

namespace jplse {

// One piece of the solution path: the canonical minimizer shared by every
// gamma in (gamma_lo, gamma_hi].
struct ScaleSpacePiece {
    int jumps = 0;
    double gamma_lo = 0.0;
    double gamma_hi = 0.0; // +inf for the coarsest piece
    StepFunction minimizer;
};

// Complete solution path over the smoothing parameter. pieces[0] is the
// gamma = inf piece (the constant function at the global mean); jump counts
// strictly increase as gamma decreases. The path is evaluated over
// zeta = 1/gamma, right-continuously.
struct ScaleSpacePath {
    std::vector<double> critical_gammas;  // strictly decreasing, positive
    std::vector<ScaleSpacePiece> pieces;  // size = critical_gammas.size() + 1
    // For paths of a sampled signal: the constant ||f - iota^N(cell means)||^2
    // separating the grid-restricted objective from the continuous one.
    double residual_offset = 0.0;

    double min_critical_gamma() const {
        return critical_gammas.empty() ? 0.0 : critical_gammas.back();
    }
};

// Lower convex hull of {(k, delta_k)}: hull vertices are the jump counts
// realized by some gamma > 0, consecutive hull slopes give the critical
// gamma values, and each vertex carries its canonical minimizer embedded as
// a step function. The table must be complete (max_jumps = n-1) for the path
// to be the full solution path.
ScaleSpacePath build_path(const DeltaTable& delta);

// Minimizer at zeta = 1/gamma; right-continuous in zeta (at a critical value
// the higher-jump-count piece wins); zeta = 0 yields the global-mean piece.
const StepFunction& eval_path(const ScaleSpacePath& path, double zeta);
const ScaleSpacePiece& piece_at_zeta(const ScaleSpacePath& path, double zeta);

enum class GridPolicy {
    Strict,      // refuse step functions with off-grid breakpoints
    Approximate, // accept; the path is the grid-restricted approximation
};

// Solution path of the continuous-domain objective restricted to jump
// locations on the grid {i/N}: cell-sample f, run the all-k program, build
// the hull. Exact for step functions whose breakpoints lie on the grid;
// otherwise an approximation whose quality should be checked by refining N.
ScaleSpacePath deterministic_path(const StepFunction& f, Eigen::Index grid,
                                  GridPolicy policy = GridPolicy::Strict);

// Same construction from precomputed cell means (for analytic signals);
// residual_offset = ||f - iota^N(samples)||^2 if known.
ScaleSpacePath path_from_samples(const Eigen::VectorXd& samples, double residual_offset = 0.0);

// Smallest grid >= from with all breakpoints of f within 1e-9 of grid
// nodes, or 0 if none exists up to `limit`.
Eigen::Index suggest_grid(const StepFunction& f, Eigen::Index from, Eigen::Index limit = 1 << 14);

// Drop all pieces entered at zeta >= horizon (i.e. critical gammas
// <= 1/horizon); the last remaining piece extends to zeta = inf.
ScaleSpacePath truncate_path(const ScaleSpacePath& path, double horizon);

} // namespace jplse
