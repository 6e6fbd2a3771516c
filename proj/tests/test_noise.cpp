#include <doctest.h>

#include "jplse/errors.hpp"
#include "jplse/noise.hpp"

#include <cmath>

using namespace jplse;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

// Test-only O(n^3) enumeration of the maximal normalized partial sum,
// independent of the prefix-sum implementation.
double oracle_exact_stat(const Eigen::VectorXd& x) {
    double best = -1.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        for (Eigen::Index j = i; j < x.size(); ++j) {
            double s = 0.0;
            for (Eigen::Index t = i; t <= j; ++t) s += x[t];
            best = std::max(best, s * s / static_cast<double>(j - i + 1));
        }
    }
    return best;
}

Eigen::VectorXd fuzz_vector(CounterRng& rng, Eigen::Index n, int flavor) {
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        switch (flavor % 3) {
            case 0: x[i] = rng.gaussian(); break;
            case 1: x[i] = 2.0 * rng.uniform() - 1.0; break;
            default: {
                const double u = rng.uniform();
                x[i] = (rng.next_u64() & 1 ? 1.0 : -1.0) * std::pow(u, -0.3); // heavy tail
                break;
            }
        }
    }
    return x;
}

} // namespace

TEST_CASE("noise streams are reproducible and parameter-checked") {
    NoiseModel model;
    model.kind = NoiseModel::Kind::Gaussian;
    model.sigma = 1.0;
    model.seed = 7;
    const Eigen::VectorXd a = sample_noise(model, 64, 3);
    const Eigen::VectorXd b = sample_noise(model, 64, 3);
    CHECK(a == b);
    const Eigen::VectorXd c = sample_noise(model, 64, 4);
    CHECK_FALSE(a == c); // one stream per replicate

    NoiseModel bad = model;
    bad.sigma = 0.0;
    CHECK_THROWS_AS(sample_noise(bad, 8), InvalidInput);

    NoiseModel moment;
    moment.kind = NoiseModel::Kind::MomentBounded;
    moment.m = 3.0;
    moment.tail = NoiseModel::Tail::StudentT;
    moment.tail_param = 8.0; // df = 8 > 2m = 6 keeps E|xi|^6 finite
    CHECK_NOTHROW(sample_noise(moment, 16));
    moment.tail_param = 5.0;
    CHECK_THROWS_AS(sample_noise(moment, 16), InvalidInput);
    moment.tail = NoiseModel::Tail::Pareto;
    moment.tail_param = 7.0;
    CHECK_NOTHROW(sample_noise(moment, 16));
}

TEST_CASE("large-sample means concentrate near zero") {
    NoiseModel model;
    model.kind = NoiseModel::Kind::Gaussian;
    model.sigma = 1.0;
    model.seed = 123;
    const Eigen::Index n = 1000000;
    const Eigen::VectorXd xi = sample_noise(model, n);
    CHECK(std::abs(xi.mean()) <= 4.0 / std::sqrt(static_cast<double>(n)));

    NoiseModel pareto;
    pareto.kind = NoiseModel::Kind::MomentBounded;
    pareto.m = 2.5;
    pareto.tail = NoiseModel::Tail::Pareto;
    pareto.tail_param = 6.0;
    pareto.seed = 9;
    const Eigen::VectorXd xp = sample_noise(pareto, n);
    CHECK(std::abs(xp.mean()) <= 0.02); // centered draws
}

TEST_CASE("envelope rates") {
    NoiseModel gauss;
    gauss.kind = NoiseModel::Kind::Gaussian;
    gauss.sigma = 1.0;
    CHECK(beta_n(gauss, 1000) == doctest::Approx(2.0 * std::log(1000.0)).epsilon(1e-15));
    CHECK(beta_n(gauss, 1000) == doctest::Approx(13.815510557964274).epsilon(1e-12));
    gauss.sigma = 2.0;
    CHECK(beta_n(gauss, 1000) == doctest::Approx(8.0 * std::log(1000.0)).epsilon(1e-15));
    CHECK_THROWS_AS(beta_n(gauss, 1), InvalidInput);

    NoiseModel sub;
    sub.kind = NoiseModel::Kind::SubgaussianGeneral;
    sub.alpha = 1.0;
    sub.zeta = 0.0;
    CHECK(beta_n(sub, 1000) == doctest::Approx(13.0 * std::log(1000.0)).epsilon(1e-15));
    sub.alpha = 0.5;
    sub.zeta = 0.5;
    CHECK(beta_n(sub, 256) ==
          doctest::Approx(6.5 * 16.0 * std::log(256.0)).epsilon(1e-15));
    sub.beta_c = 2.0; // override the default 13 alpha
    CHECK(beta_n(sub, 256) == doctest::Approx(2.0 * 16.0 * std::log(256.0)).epsilon(1e-15));

    NoiseModel moment;
    moment.kind = NoiseModel::Kind::MomentBounded;
    moment.m = 4.0;
    moment.tail_param = 9.0;
    CHECK(beta_n(moment, 512) ==
          doctest::Approx(std::pow(512.0 * std::log(512.0), 0.5)).epsilon(1e-15));
}

TEST_CASE("noise model parsing round-trips") {
    const NoiseModel g = NoiseModel::parse("gaussian:0.3");
    CHECK(g.kind == NoiseModel::Kind::Gaussian);
    CHECK(g.sigma == 0.3);
    const NoiseModel s = NoiseModel::parse("subgauss:2.0,0.25");
    CHECK(s.alpha == 2.0);
    CHECK(s.zeta == 0.25);
    const NoiseModel t = NoiseModel::parse("moment:3,student_t:8,c=2.5");
    CHECK(t.m == 3.0);
    CHECK(t.tail_param == 8.0);
    CHECK(t.beta_c == 2.5);
    CHECK(NoiseModel::parse(t.describe()).describe() == t.describe());
    CHECK_THROWS_AS(NoiseModel::parse("cauchy:1"), InvalidInput);
    CHECK_THROWS_AS(NoiseModel::parse("gaussian:-1"), InvalidInput);
}

TEST_CASE("maximal partial-sum statistic on known vectors") {
    {
        const PartialSumStat s = max_partial_stat(vec({1, 1, 1, 1}), StatMode::Exact);
        CHECK(s.value == 4.0); // 16/4 beats every sub-interval
        CHECK(s.lo == 1);
        CHECK(s.hi == 4);
    }
    {
        const PartialSumStat s = max_partial_stat(vec({1, -1}), StatMode::Exact);
        CHECK(s.value == 1.0);
        CHECK(s.lo == 1);
        CHECK(s.hi == 1);
    }
    {
        // Dyadic blocks over three points: (1,1), (2,2), (3,3), (1,2).
        const PartialSumStat d = max_partial_stat(vec({0, 1, 0}), StatMode::Dyadic);
        CHECK(d.value == 1.0);
        CHECK(d.lo == 2);
        CHECK(d.hi == 2);
        const PartialSumStat e = max_partial_stat(vec({0, 1, 0}), StatMode::Exact);
        CHECK(e.value == 1.0);
    }
    CHECK_THROWS_AS(max_partial_stat(Eigen::VectorXd(0), StatMode::Exact), InvalidInput);
}

TEST_CASE("exact statistic matches the enumeration oracle") {
    CounterRng rng(51, 0);
    for (int trial = 0; trial < 60; ++trial) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.next_u64() % 40);
        const Eigen::VectorXd x = fuzz_vector(rng, n, trial);
        const double got = max_partial_stat(x, StatMode::Exact).value;
        CHECK(got == doctest::Approx(oracle_exact_stat(x)).epsilon(1e-12));
    }
}

TEST_CASE("statistic invariances") {
    CounterRng rng(52, 0);
    for (int trial = 0; trial < 60; ++trial) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.next_u64() % 64);
        const Eigen::VectorXd x = fuzz_vector(rng, n, trial);
        const double exact = max_partial_stat(x, StatMode::Exact).value;
        CHECK(max_partial_stat(x, StatMode::Dyadic).value <= exact);
        CHECK(max_partial_stat(-x, StatMode::Exact).value == exact);
        CHECK(max_partial_stat(x.reverse().eval(), StatMode::Exact).value ==
              doctest::Approx(exact).epsilon(1e-12));
    }
    Eigen::VectorXd single = Eigen::VectorXd::Zero(9);
    single[4] = -2.5;
    CHECK(max_partial_stat(single, StatMode::Exact).value == 6.25);
}

TEST_CASE("dyadic statistic dominates up to the fixed factor") {
    CHECK(dyadic_bound_check(vec({5, 5, 5})).ok);
    CHECK(dyadic_bound_check(vec({0, 1, 0})).ok);
    CounterRng rng(53, 0);
    for (int trial = 0; trial < 500; ++trial) {
        const Eigen::Index n = 3 + static_cast<Eigen::Index>(rng.next_u64() % 254);
        const DyadicBoundCheck check = dyadic_bound_check(fuzz_vector(rng, n, trial));
        REQUIRE(check.ok); // deterministic inequality, any failure is a bug
    }
}

TEST_CASE("noise bound diagnostics") {
    {
        const NoiseDiagnostics diag = check_noise_bound(Eigen::VectorXd::Zero(16), 3.0);
        CHECK(diag.pass);
        CHECK(diag.max_stat == 0.0);
        CHECK(diag.interval_mean_consistent);
    }
    {
        const NoiseDiagnostics diag = check_noise_bound(vec({10}), 1.0);
        CHECK_FALSE(diag.pass);
        CHECK(diag.max_stat == 100.0);
        CHECK(diag.arg_lo == 1);
        CHECK(diag.arg_hi == 1);
        CHECK(diag.interval_mean_consistent);
    }
    CounterRng rng(54, 0);
    for (int trial = 0; trial < 25; ++trial) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.next_u64() % 60);
        const Eigen::VectorXd x = fuzz_vector(rng, n, trial);
        const NoiseDiagnostics diag = check_noise_bound(x, 0.5 + 4.0 * rng.uniform());
        CHECK(diag.interval_mean_consistent);
        CHECK(diag.max_stat_dyadic <= diag.max_stat);
    }
}
