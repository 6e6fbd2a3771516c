#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>

namespace jplse {

// Counter-based SplitMix64 generator. Stream k of seed s starts from
// state = mix(mix(s) xor (k + 0x9E3779B97F4A7C15)), after which draws are
// the standard SplitMix64 sequence; distributions are produced by explicit
// transforms (Box-Muller, chi-square sums, inverse CDF) so that draws are
// reproducible bit-for-bit for a given (seed, stream).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();
    double uniform();  // (0, 1]
    double gaussian(); // standard normal, Box-Muller pair cached

    static std::uint64_t mix(std::uint64_t z);

private:
    std::uint64_t state_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct NoiseModel {
    enum class Kind { Gaussian, SubgaussianGeneral, MomentBounded };
    enum class Tail { StudentT, Pareto };

    Kind kind = Kind::Gaussian;
    double sigma = 1.0;            // Gaussian
    double alpha = 1.0;            // SubgaussianGeneral mgf scale
    double zeta = 0.0;             // SubgaussianGeneral exponent, in [0, 1)
    double m = 3.0;                // MomentBounded: E|xi|^{2m} finite
    Tail tail = Tail::StudentT;    // MomentBounded preset
    double tail_param = 8.0;       // StudentT: degrees of freedom; Pareto: tail index
    double beta_c = 0.0;           // override for the beta_n constant; 0 = default
    std::uint64_t seed = 0;

    void validate() const;
    std::string describe() const;
    // "gaussian:SIGMA", "subgauss:ALPHA,ZETA", "moment:M,student_t:DF",
    // "moment:M,pareto:A", each optionally followed by ",c=C".
    static NoiseModel parse(const std::string& text);
};

// n independent zero-mean draws from the model, on stream
// replicate * 2^32 + n of the model seed. SubgaussianGeneral draws are
// N(0, 2 alpha n^zeta), the distribution saturating the mgf bound.
Eigen::VectorXd sample_noise(const NoiseModel& model, Eigen::Index n,
                             std::uint64_t replicate = 0);

// Envelope rate for the maximal normalized partial-sum statistic:
// Gaussian 2 sigma^2 log n; generalized subgaussian C n^zeta log n with
// C = 13 alpha by default; 2m-moment C (n log n)^{2/m} with C = 1 by default.
double beta_n(const NoiseModel& model, Eigen::Index n);

enum class StatMode { Exact, Dyadic };

struct PartialSumStat {
    double value = 0.0;           // max (x_i+...+x_j)^2 / (j-i+1)
    Eigen::Index lo = 0, hi = 0;  // 1-based inclusive argmax interval
};

// Exact mode scans all O(n^2) intervals via prefix sums; Dyadic restricts to
// the <= 2n blocks [k 2^l + 1, (k+1) 2^l]. Both report the squared-normalized
// statistic. Argmax ties resolve to the first interval in (i, j) scan order.
PartialSumStat max_partial_stat(const Eigen::VectorXd& xi, StatMode mode);

struct DyadicBoundCheck {
    double exact = 0.0;
    double dyadic = 0.0;
    bool ok = false; // sqrt(exact) <= (2 + sqrt(2)) sqrt(dyadic) + 1e-12
};

// Deterministic domination of the full statistic by its dyadic restriction;
// must hold for every input vector.
DyadicBoundCheck dyadic_bound_check(const Eigen::VectorXd& xi);

struct NoiseDiagnostics {
    double max_stat = 0.0;
    double max_stat_dyadic = 0.0;
    Eigen::Index arg_lo = 0, arg_hi = 0;
    double beta = 0.0;
    bool pass = false;                    // max_stat <= beta
    bool interval_mean_consistent = false; // interval-mean route agrees with pass
};

// Full diagnostics against a candidate envelope beta, including a second
// route through the embedded step function: mu_I(xi)^2 <= beta / (n len(I))
// for every grid interval I exactly when max_stat <= beta.
NoiseDiagnostics check_noise_bound(const Eigen::VectorXd& xi, double beta);

} // namespace jplse
