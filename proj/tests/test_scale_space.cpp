#include <doctest.h>

#include "jplse/errors.hpp"
#include "jplse/noise.hpp"
#include "jplse/scale_space.hpp"
#include "jplse/signals.hpp"

#include <cmath>
#include <limits>

using namespace jplse;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

} // namespace

TEST_CASE("path of a two-point series") {
    const Eigen::VectorXd y = vec({0, 1});
    const ScaleSpacePath path = build_path(fit_all_k(y, 1));
    REQUIRE(path.critical_gammas.size() == 1);
    CHECK(path.critical_gammas[0] == doctest::Approx(0.25).epsilon(1e-15));
    REQUIRE(path.pieces.size() == 2);
    CHECK(path.pieces[0].jumps == 0);
    CHECK(path.pieces[0].minimizer.values()[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(path.pieces[1].jumps == 1);
    CHECK(path.pieces[1].minimizer == embed(y));
    CHECK(path.pieces[0].gamma_hi == std::numeric_limits<double>::infinity());
    CHECK(path.pieces[1].gamma_lo == 0.0);
}

TEST_CASE("path of a constant series has a single piece") {
    const ScaleSpacePath path = build_path(fit_all_k(vec({3, 3, 3, 3}), 3));
    CHECK(path.critical_gammas.empty());
    REQUIRE(path.pieces.size() == 1);
    CHECK(path.pieces[0].jumps == 0);
    CHECK(path.pieces[0].minimizer.values()[0] == 3.0);
}

TEST_CASE("exhausted jump budgets collapse onto the hull") {
    // delta = (4, 0, 0, 0): only k = 0 and k = 1 are ever optimal.
    const ScaleSpacePath path = build_path(fit_all_k(vec({1, 1, 5, 5}), 3));
    REQUIRE(path.critical_gammas.size() == 1);
    CHECK(path.critical_gammas[0] == doctest::Approx(4.0).epsilon(1e-15));
    REQUIRE(path.pieces.size() == 2);
    CHECK(path.pieces[0].jumps == 0);
    CHECK(path.pieces[1].jumps == 1);
}

TEST_CASE("path evaluation is right-continuous in zeta") {
    const Eigen::VectorXd y = vec({0, 1});
    const ScaleSpacePath path = build_path(fit_all_k(y, 1));
    // zeta = 0 is the global-mean piece.
    CHECK(eval_path(path, 0.0).jump_count() == 0);
    CHECK(eval_path(path, 0.0).values()[0] == doctest::Approx(0.5).epsilon(1e-15));
    // gamma = 1 sits above the critical value 0.25.
    CHECK(eval_path(path, 1.0).jump_count() == 0);
    // At the boundary zeta = 1/0.25 the higher-jump piece wins.
    CHECK(eval_path(path, 4.0) == embed(y));
    CHECK(eval_path(path, 1e9) == embed(y));
    CHECK_THROWS_AS(eval_path(path, -1.0), InvalidInput);
}

TEST_CASE("every interior gamma reproduces its piece") {
    CounterRng rng(31, 0);
    for (int trial = 0; trial < 12; ++trial) {
        const Eigen::Index n = 24;
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) y[i] = rng.gaussian();
        const DeltaTable table = fit_all_k(y, static_cast<int>(n) - 1);
        const ScaleSpacePath path = build_path(table);
        REQUIRE(path.pieces.size() <= static_cast<std::size_t>(n));

        for (std::size_t p = 0; p < path.pieces.size(); ++p) {
            const double lo = path.pieces[p].gamma_lo;
            const double hi = path.pieces[p].gamma_hi;
            for (int rep = 0; rep < 20; ++rep) {
                const double u = 0.02 + 0.96 * rng.uniform();
                const double gamma = std::isinf(hi) ? lo * (1.0 + u) + (lo == 0.0 ? 1.0 : 0.0)
                                                    : lo + u * (hi - lo);
                const FitResult fit = fit_fixed_gamma(y, gamma);
                CHECK(embed(fit.segmentation) == path.pieces[p].minimizer);
            }
        }

        // Neighboring pieces achieve the same objective at a critical gamma.
        for (std::size_t i = 0; i < path.critical_gammas.size(); ++i) {
            const double gamma = path.critical_gammas[i];
            const int k_hi = path.pieces[i].jumps;
            const int k_lo = path.pieces[i + 1].jumps;
            const double obj_hi = gamma * k_hi + table.delta[k_hi];
            const double obj_lo = gamma * k_lo + table.delta[k_lo];
            CHECK(std::abs(obj_hi - obj_lo) <= 1e-9);
        }

        // Non-vertex budgets are never strictly optimal at any gamma.
        std::vector<bool> on_hull(static_cast<std::size_t>(n), false);
        for (const auto& piece : path.pieces) on_hull[static_cast<std::size_t>(piece.jumps)] = true;
        std::vector<double> gammas = path.critical_gammas;
        gammas.push_back(path.critical_gammas.empty() ? 1.0 : path.critical_gammas.front() * 2.0);
        for (int k = 0; k < n; ++k) {
            if (on_hull[static_cast<std::size_t>(k)]) continue;
            for (double gamma : gammas) {
                double envelope = std::numeric_limits<double>::infinity();
                for (int kk = 0; kk < n; ++kk)
                    envelope = std::min(envelope, gamma * kk + table.delta[kk]);
                CHECK(gamma * k + table.delta[k] >= envelope - 1e-9);
            }
        }
    }
}

TEST_CASE("non-monotone delta tables are refused") {
    DeltaTable broken = fit_all_k(vec({0, 1, 0, 1}), 3);
    broken.delta[2] = broken.delta[1] + 1.0;
    CHECK_THROWS_AS(build_path(broken), InvalidInput);
}

TEST_CASE("deterministic path of an indicator at grid two") {
    const StepFunction f = StepFunction::indicator(0.5, 1.0);
    const ScaleSpacePath path = deterministic_path(f, 2);
    REQUIRE(path.critical_gammas.size() == 1);
    CHECK(path.critical_gammas[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(path.pieces[0].minimizer.values()[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(path.pieces[1].minimizer == f);
    CHECK(path.residual_offset == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("deterministic path of a constant has no critical values") {
    const ScaleSpacePath path = deterministic_path(StepFunction::constant(2.0), 8);
    CHECK(path.critical_gammas.empty());
}

TEST_CASE("off-grid breakpoints are refused under the strict policy") {
    const StepFunction f = blocks_signal();
    CHECK_THROWS_WITH_AS(deterministic_path(f, 64, GridPolicy::Strict),
                         doctest::Contains("100"), InvalidInput);
    CHECK(suggest_grid(f, 2) == 100);
    CHECK(suggest_grid(f, 101) == 200);

    const ScaleSpacePath approx = deterministic_path(f, 64, GridPolicy::Approximate);
    CHECK(approx.pieces.size() >= 2);
    CHECK(approx.residual_offset > 0.0); // off-grid sampling leaves a residual
}

TEST_CASE("doubling an exact grid preserves the critical values") {
    CounterRng rng(32, 0);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd cells(8);
        for (Eigen::Index i = 0; i < 8; ++i)
            cells[i] = static_cast<double>(rng.next_u64() % 5);
        const StepFunction f = embed(cells);
        const ScaleSpacePath coarse = deterministic_path(f, 8);
        const ScaleSpacePath fine = deterministic_path(f, 16);
        REQUIRE(coarse.critical_gammas.size() == fine.critical_gammas.size());
        for (std::size_t i = 0; i < coarse.critical_gammas.size(); ++i)
            CHECK(std::abs(coarse.critical_gammas[i] - fine.critical_gammas[i]) <= 1e-9);
    }
}

TEST_CASE("truncating a path at a zeta horizon") {
    const ScaleSpacePath path = build_path(fit_all_k(vec({0, 4, 0, 4, 2, 2}), 5));
    REQUIRE(path.critical_gammas.size() >= 2);
    // Keep only pieces entered before zeta = 1/gamma_2.
    const double horizon = 1.0 / path.critical_gammas[1];
    const ScaleSpacePath cut = truncate_path(path, horizon * 1.0000001);
    CHECK(cut.critical_gammas.size() == 2);
    CHECK(cut.pieces.size() == 3);
    CHECK(cut.pieces.back().gamma_lo == 0.0);
    CHECK_THROWS_AS(truncate_path(path, 0.0), InvalidInput);
}

TEST_CASE("blocks at its exact grid uses all eleven jumps") {
    const StepFunction f = blocks_signal();
    const ScaleSpacePath path = deterministic_path(f, 100);
    CHECK(path.residual_offset <= 1e-12);
    CHECK(path.pieces.back().jumps == 11);
    // The full budget recovers the signal (up to mean-accumulation rounding).
    CHECK(distance(path.pieces.back().minimizer, f, Norm::Sup) <= 1e-12);
    // Jump counts strictly increase along the path.
    for (std::size_t i = 1; i < path.pieces.size(); ++i)
        CHECK(path.pieces[i].jumps > path.pieces[i - 1].jumps);
}
