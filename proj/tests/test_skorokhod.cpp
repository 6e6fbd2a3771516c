#include <doctest.h>

#include "jplse/errors.hpp"
#include "jplse/noise.hpp"
#include "jplse/skorokhod.hpp"

#include <cmath>

using namespace jplse;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

StepFunction random_step(CounterRng& rng, int max_jumps = 6) {
    const int j = static_cast<int>(rng.next_u64() % (max_jumps + 1));
    std::vector<double> bps;
    while (static_cast<int>(bps.size()) < j) {
        const double t = 0.05 + 0.9 * rng.uniform();
        bool distinct = true;
        for (double b : bps) distinct &= std::abs(b - t) > 5e-3;
        if (distinct) bps.push_back(t);
    }
    std::sort(bps.begin(), bps.end());
    Eigen::VectorXd bp(j), val(j + 1);
    for (int i = 0; i < j; ++i) bp[i] = bps[static_cast<std::size_t>(i)];
    for (int i = 0; i <= j; ++i) val[i] = 2.0 * (2.0 * rng.uniform() - 1.0);
    return StepFunction(bp, val);
}

// A path with the given zeta jump locations; consecutive pieces are constants
// stepping through `levels`.
ScaleSpacePath toy_path(const std::vector<double>& zeta_jumps, const std::vector<double>& levels) {
    ScaleSpacePath path;
    for (double z : zeta_jumps) path.critical_gammas.push_back(1.0 / z);
    std::sort(path.critical_gammas.rbegin(), path.critical_gammas.rend());
    for (std::size_t i = 0; i < levels.size(); ++i) {
        ScaleSpacePiece piece;
        piece.jumps = static_cast<int>(i);
        piece.gamma_hi = i == 0 ? std::numeric_limits<double>::infinity() : path.critical_gammas[i - 1];
        piece.gamma_lo = i < path.critical_gammas.size() ? path.critical_gammas[i] : 0.0;
        piece.minimizer = StepFunction::constant(levels[i]);
        path.pieces.push_back(std::move(piece));
    }
    return path;
}

} // namespace

TEST_CASE("identical functions are at distance zero with the identity witness") {
    CounterRng rng(41, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const StepFunction f = random_step(rng);
        const SkorokhodResult res = skorokhod_distance(f, f);
        CHECK(res.distance == 0.0);
        CHECK(res.witness.max_log_slope() == 0.0);
    }
    CHECK_THROWS_AS(skorokhod_distance(StepFunction::constant(0), StepFunction::constant(0), 0.0),
                    InvalidInput);
}

TEST_CASE("two shifted indicators match by sliding the jump") {
    // The only useful time change sends 0.6 to 0.5: piece slopes 0.5/0.6 and
    // 0.5/0.4, so the level is log 1.25, well below the sup distance of 1.
    const StepFunction f = StepFunction::indicator(0.5, 1.0);
    const StepFunction g = StepFunction::indicator(0.6, 1.0);
    const double expected = std::log(1.25);
    const SkorokhodResult res = skorokhod_distance(f, g, 1e-6);
    CHECK(std::abs(res.distance - expected) <= 1e-6);
    REQUIRE(res.witness.knots.size() == 3);
    CHECK(res.witness.knots[1][0] == 0.6);
    CHECK(res.witness.knots[1][1] == 0.5);
    CHECK(res.witness.max_log_slope() <= res.distance + 1e-12);
}

TEST_CASE("value mismatches cannot be repaired by time changes") {
    const StepFunction f = StepFunction::indicator(0.5, 1.0, 3.0);
    const StepFunction g = StepFunction::constant(0.0);
    const SkorokhodResult res = skorokhod_distance(f, g, 1e-6);
    CHECK(res.distance == doctest::Approx(3.0).epsilon(1e-9)); // onto lambda always sweeps the plateau
}

TEST_CASE("skorokhod distance never exceeds the sup distance") {
    CounterRng rng(42, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const StepFunction f = random_step(rng);
        const StepFunction g = random_step(rng);
        const SkorokhodResult res = skorokhod_distance(f, g, 1e-6);
        CHECK(res.distance <= distance(f, g, Norm::Sup) + 1e-6);
        // The witness certifies its level.
        CHECK(res.witness.max_log_slope() <= res.distance + 1e-9);
    }
}

TEST_CASE("symmetry within twice the tolerance") {
    CounterRng rng(43, 0);
    for (int trial = 0; trial < 60; ++trial) {
        const StepFunction f = random_step(rng);
        const StepFunction g = random_step(rng);
        const double dfg = skorokhod_distance(f, g, 1e-6).distance;
        const double dgf = skorokhod_distance(g, f, 1e-6).distance;
        CHECK(std::abs(dfg - dgf) <= 2e-6);
    }
}

TEST_CASE("triangle inequality within three tolerances") {
    CounterRng rng(44, 0);
    for (int trial = 0; trial < 40; ++trial) {
        const StepFunction f = random_step(rng);
        const StepFunction g = random_step(rng);
        const StepFunction h = random_step(rng);
        const double dfh = skorokhod_distance(f, h, 1e-6).distance;
        const double dfg = skorokhod_distance(f, g, 1e-6).distance;
        const double dgh = skorokhod_distance(g, h, 1e-6).distance;
        CHECK(dfh <= dfg + dgh + 3e-6);
    }
}

TEST_CASE("path distance of identical paths is zero") {
    const ScaleSpacePath p = toy_path({2.0, 5.0}, {0.0, 1.0, -1.0});
    const PathDistanceReport report = path_distance(p, p, 10.0, PathMetric::L2, 1e-6);
    CHECK(report.distance == 0.0);
    CHECK(report.matched_inner.size() == 3);
}

TEST_CASE("a nudged zeta jump costs the log slope ratio") {
    // Jump moved from 2.0 to 2.2 over horizon 10: matching them gives piece
    // slopes 2.0/2.2 and 8.0/7.8, so the level is log 1.1; skipping the match
    // would cost the piece mismatch instead.
    const ScaleSpacePath p = toy_path({2.0}, {0.0, 5.0});
    const ScaleSpacePath q = toy_path({2.2}, {0.0, 5.0});
    const PathDistanceReport report = path_distance(p, q, 10.0, PathMetric::L2, 1e-7);
    CHECK(std::abs(report.distance - std::log(1.1)) <= 1e-6);
    REQUIRE(report.witness.knots.size() == 3);
    CHECK(report.witness.knots[1][0] == 2.2);
    CHECK(report.witness.knots[1][1] == 2.0);
}

TEST_CASE("an unmatched piece costs its inner distance") {
    // p has an extra plateau at level D between two pieces identical to q.
    const double D = 0.75;
    const ScaleSpacePath p = toy_path({3.0, 4.0}, {0.0, D, 0.0});
    const ScaleSpacePath q = toy_path({}, {0.0});
    const PathDistanceReport report = path_distance(p, q, 10.0, PathMetric::L2, 1e-6);
    CHECK(report.distance == doctest::Approx(D).epsilon(1e-6));
}

TEST_CASE("skorokhod inner metric forgives small time shifts of the pieces") {
    const ScaleSpacePath p = toy_path({2.0}, {0.0, 1.0});
    ScaleSpacePath q = toy_path({2.0}, {0.0, 1.0});
    // Same path except the second piece's value function has a nudged jump.
    ScaleSpacePath p2 = p;
    p2.pieces[1].minimizer = StepFunction::indicator(0.50, 1.0);
    q.pieces[1].minimizer = StepFunction::indicator(0.52, 1.0);
    const PathDistanceReport l2 = path_distance(p2, q, 10.0, PathMetric::L2, 1e-6);
    const PathDistanceReport sk = path_distance(p2, q, 10.0, PathMetric::Skorokhod, 1e-6);
    CHECK(sk.distance < l2.distance); // sliding the jump beats the L2 bump
    // Matching 0.52 onto 0.50 leaves slopes 0.50/0.52 and 0.50/0.48; the
    // second one binds.
    CHECK(sk.distance == doctest::Approx(std::log(0.50 / 0.48)).epsilon(1e-4));
}

TEST_CASE("horizon validation") {
    const ScaleSpacePath p = toy_path({2.0}, {0.0, 1.0});
    CHECK_THROWS_AS(path_distance(p, p, 1.5, PathMetric::L2, 1e-6), InvalidInput);
    CHECK_THROWS_AS(path_distance(p, p, 10.0, PathMetric::L2, 0.0), InvalidInput);
    const ScaleSpacePath cut = truncate_path(p, 1.5);
    CHECK(path_distance(cut, cut, 1.5, PathMetric::L2, 1e-6).distance == 0.0);
}
