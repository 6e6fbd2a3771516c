#include "jplse/scale_space.hpp"
#include "jplse/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jplse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

ScaleSpacePath build_path(const DeltaTable& table) {
    const int K = table.max_jumps();
    if (K < 0 || table.argmin.size() != static_cast<std::size_t>(K) + 1)
        throw InvalidInput("delta table is incomplete");
    const double scale = 1.0 + std::abs(table.delta[0]);
    for (int k = 1; k <= K; ++k) {
        if (table.delta[k] > table.delta[k - 1] + 1e-9 * scale)
            throw InvalidInput("delta values must be nonincreasing in k");
    }

    // Lower convex hull of (k, delta_k). Slopes within 1e-12*scale of each
    // other are merged so that numerically identical alternatives do not
    // produce spurious pieces of vanishing width.
    const double slope_tol = 1e-12 * scale;
    std::vector<int> hull;
    for (int k = 0; k <= K; ++k) {
        while (hull.size() >= 2) {
            const int a = hull[hull.size() - 2];
            const int b = hull.back();
            const double s_ab = (table.delta[b] - table.delta[a]) / (b - a);
            const double s_bk = (table.delta[k] - table.delta[b]) / (k - b);
            // b stays only where the slopes strictly increase through it.
            if (s_bk - s_ab <= slope_tol) hull.pop_back();
            else break;
        }
        hull.push_back(k);
    }
    // Keep only vertices reached by a strictly decreasing delta (positive
    // critical gamma); exhausted budgets beyond that are never realized.
    std::vector<int> vertices{hull.front()};
    for (std::size_t i = 1; i < hull.size(); ++i) {
        const int a = vertices.back();
        const int b = hull[i];
        const double gamma = (table.delta[a] - table.delta[b]) / (b - a);
        if (gamma > slope_tol) vertices.push_back(b);
        else break;
    }

    ScaleSpacePath path;
    for (std::size_t i = 1; i < vertices.size(); ++i) {
        const int a = vertices[i - 1];
        const int b = vertices[i];
        path.critical_gammas.push_back((table.delta[a] - table.delta[b]) / (b - a));
    }
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        ScaleSpacePiece piece;
        piece.jumps = vertices[i];
        piece.gamma_hi = (i == 0) ? kInf : path.critical_gammas[i - 1];
        piece.gamma_lo = (i + 1 < vertices.size()) ? path.critical_gammas[i] : 0.0;
        piece.minimizer = embed(table.argmin[vertices[i]]);
        path.pieces.push_back(std::move(piece));
    }
    return path;
}

const ScaleSpacePiece& piece_at_zeta(const ScaleSpacePath& path, double zeta) {
    if (zeta < 0.0) throw InvalidInput("zeta must be >= 0");
    if (path.pieces.empty()) throw InvalidInput("empty path");
    if (zeta == 0.0) return path.pieces.front();
    const double gamma = 1.0 / zeta;
    // Piece i is optimal on gamma in (gamma_{i+1}, gamma_i]; ties at a
    // critical value resolve to the larger jump count (right-continuity
    // in zeta).
    std::size_t i = 0;
    while (i < path.critical_gammas.size() && gamma <= path.critical_gammas[i]) ++i;
    return path.pieces[i];
}

const StepFunction& eval_path(const ScaleSpacePath& path, double zeta) {
    return piece_at_zeta(path, zeta).minimizer;
}

Eigen::Index suggest_grid(const StepFunction& f, Eigen::Index from, Eigen::Index limit) {
    for (Eigen::Index N = std::max<Eigen::Index>(from, 2); N <= limit; ++N) {
        bool ok = true;
        for (double b : f.jump_locations()) {
            const double idx = b * static_cast<double>(N);
            if (std::abs(idx - std::round(idx)) > 1e-9) { ok = false; break; }
        }
        if (ok) return N;
    }
    return 0;
}

ScaleSpacePath path_from_samples(const Eigen::VectorXd& samples, double residual_offset) {
    const Eigen::Index n = samples.size();
    if (n < 1) throw InvalidInput("samples must not be empty");
    ScaleSpacePath path = build_path(fit_all_k(samples, static_cast<int>(n) - 1));
    path.residual_offset = residual_offset;
    return path;
}

ScaleSpacePath deterministic_path(const StepFunction& f, Eigen::Index grid, GridPolicy policy) {
    if (grid < 2) throw InvalidInput("grid must be >= 2");
    bool on_grid = true;
    for (double b : f.jump_locations()) {
        const double idx = b * static_cast<double>(grid);
        if (std::abs(idx - std::round(idx)) > 1e-9) { on_grid = false; break; }
    }
    if (!on_grid && policy == GridPolicy::Strict) {
        const Eigen::Index n = suggest_grid(f, grid);
        if (n > 0)
            throw InvalidInput("breakpoints are off the grid; the smallest exact grid >= " +
                               std::to_string(grid) + " is " + std::to_string(n));
        throw InvalidInput("breakpoints admit no exact grid up to 16384; "
                           "use GridPolicy::Approximate and refine");
    }

    const Eigen::VectorXd samples = cell_means(f, grid);
    // Pythagoras: the embedded cell means are the L2 projection of f onto
    // grid step functions, so the residual is ||f||^2 - ||projection||^2.
    double residual = f.squared_norm() - samples.squaredNorm() / static_cast<double>(grid);
    if (residual < 0.0) residual = 0.0;
    return path_from_samples(samples, residual);
}

ScaleSpacePath truncate_path(const ScaleSpacePath& path, double horizon) {
    if (!(horizon > 0.0)) throw InvalidInput("horizon must be positive");
    ScaleSpacePath out;
    out.residual_offset = path.residual_offset;
    std::size_t keep = 0;
    while (keep < path.critical_gammas.size() && 1.0 / path.critical_gammas[keep] < horizon) ++keep;
    out.critical_gammas.assign(path.critical_gammas.begin(), path.critical_gammas.begin() + keep);
    out.pieces.assign(path.pieces.begin(), path.pieces.begin() + keep + 1);
    out.pieces.back().gamma_lo = 0.0;
    return out;
}

} // namespace jplse
