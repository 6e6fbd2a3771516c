#include "jplse/noise.hpp"
#include "jplse/errors.hpp"
#include "jplse/step_function.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace jplse {

std::uint64_t CounterRng::mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) {
    state_ = mix(mix(seed) ^ (stream + 0x9E3779B97F4A7C15ull));
}

std::uint64_t CounterRng::next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
}

double CounterRng::uniform() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double CounterRng::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

void NoiseModel::validate() const {
    switch (kind) {
        case Kind::Gaussian:
            if (!(sigma > 0.0)) throw InvalidInput("gaussian noise needs sigma > 0");
            break;
        case Kind::SubgaussianGeneral:
            if (!(alpha > 0.0)) throw InvalidInput("subgaussian noise needs alpha > 0");
            if (!(zeta >= 0.0 && zeta < 1.0)) throw InvalidInput("subgaussian noise needs 0 <= zeta < 1");
            break;
        case Kind::MomentBounded:
            if (!(m > 2.0)) throw InvalidInput("moment-bounded noise needs m > 2");
            if (tail == Tail::StudentT && !(tail_param > 2.0 * m))
                throw InvalidInput("student-t preset needs df > 2m for finite 2m-th moments");
            if (tail == Tail::Pareto && !(tail_param > 2.0 * m))
                throw InvalidInput("pareto preset needs tail index > 2m for finite 2m-th moments");
            break;
    }
    if (beta_c < 0.0) throw InvalidInput("beta_n constant must be nonnegative");
}

std::string NoiseModel::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Gaussian: os << "gaussian:" << sigma; break;
        case Kind::SubgaussianGeneral: os << "subgauss:" << alpha << "," << zeta; break;
        case Kind::MomentBounded:
            os << "moment:" << m << "," << (tail == Tail::StudentT ? "student_t:" : "pareto:") << tail_param;
            break;
    }
    if (beta_c > 0.0) os << ",c=" << beta_c;
    return os.str();
}

NoiseModel NoiseModel::parse(const std::string& text) {
    NoiseModel model;
    std::string body = text;
    const auto cpos = body.rfind(",c=");
    if (cpos != std::string::npos) {
        model.beta_c = std::stod(body.substr(cpos + 3));
        body = body.substr(0, cpos);
    }
    auto bad = [&]() -> NoiseModel {
        throw InvalidInput("cannot parse noise model '" + text +
                           "'; expected gaussian:S, subgauss:A,Z or moment:M,student_t:DF|pareto:A");
    };
    const auto colon = body.find(':');
    if (colon == std::string::npos) return bad();
    const std::string head = body.substr(0, colon);
    const std::string rest = body.substr(colon + 1);
    try {
        if (head == "gaussian") {
            model.kind = Kind::Gaussian;
            model.sigma = std::stod(rest);
        } else if (head == "subgauss") {
            model.kind = Kind::SubgaussianGeneral;
            const auto comma = rest.find(',');
            if (comma == std::string::npos) return bad();
            model.alpha = std::stod(rest.substr(0, comma));
            model.zeta = std::stod(rest.substr(comma + 1));
        } else if (head == "moment") {
            model.kind = Kind::MomentBounded;
            const auto comma = rest.find(',');
            if (comma == std::string::npos) return bad();
            model.m = std::stod(rest.substr(0, comma));
            const std::string tail = rest.substr(comma + 1);
            const auto tcolon = tail.find(':');
            if (tcolon == std::string::npos) return bad();
            const std::string tname = tail.substr(0, tcolon);
            model.tail_param = std::stod(tail.substr(tcolon + 1));
            if (tname == "student_t") model.tail = Tail::StudentT;
            else if (tname == "pareto") model.tail = Tail::Pareto;
            else return bad();
        } else {
            return bad();
        }
    } catch (const std::logic_error&) {
        return bad();
    }
    model.validate();
    return model;
}

Eigen::VectorXd sample_noise(const NoiseModel& model, Eigen::Index n, std::uint64_t replicate) {
    model.validate();
    if (n < 1) throw InvalidInput("sample_noise: n must be >= 1");
    CounterRng rng(model.seed, replicate * 0x100000000ull + static_cast<std::uint64_t>(n));
    Eigen::VectorXd xi(n);
    switch (model.kind) {
        case NoiseModel::Kind::Gaussian:
            for (Eigen::Index i = 0; i < n; ++i) xi[i] = model.sigma * rng.gaussian();
            break;
        case NoiseModel::Kind::SubgaussianGeneral: {
            const double sd = std::sqrt(2.0 * model.alpha * std::pow(static_cast<double>(n), model.zeta));
            for (Eigen::Index i = 0; i < n; ++i) xi[i] = sd * rng.gaussian();
            break;
        }
        case NoiseModel::Kind::MomentBounded:
            if (model.tail == NoiseModel::Tail::StudentT) {
                const int df = static_cast<int>(std::lround(model.tail_param));
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double z = rng.gaussian();
                    double chi2 = 0.0;
                    for (int d = 0; d < df; ++d) {
                        const double g = rng.gaussian();
                        chi2 += g * g;
                    }
                    xi[i] = z / std::sqrt(chi2 / df);
                }
            } else {
                const double a = model.tail_param;
                const double mean = a / (a - 1.0);
                for (Eigen::Index i = 0; i < n; ++i)
                    xi[i] = std::pow(rng.uniform(), -1.0 / a) - mean;
            }
            break;
    }
    return xi;
}

double beta_n(const NoiseModel& model, Eigen::Index n) {
    model.validate();
    if (n < 2) throw InvalidInput("beta_n needs n >= 2");
    const double dn = static_cast<double>(n);
    switch (model.kind) {
        case NoiseModel::Kind::Gaussian:
            return 2.0 * model.sigma * model.sigma * std::log(dn);
        case NoiseModel::Kind::SubgaussianGeneral: {
            const double c = model.beta_c > 0.0 ? model.beta_c : 13.0 * model.alpha;
            return c * std::pow(dn, model.zeta) * std::log(dn);
        }
        case NoiseModel::Kind::MomentBounded: {
            const double c = model.beta_c > 0.0 ? model.beta_c : 1.0;
            return c * std::pow(dn * std::log(dn), 2.0 / model.m);
        }
    }
    throw std::logic_error("unreachable");
}

PartialSumStat max_partial_stat(const Eigen::VectorXd& xi, StatMode mode) {
    const Eigen::Index n = xi.size();
    if (n < 1) throw InvalidInput("max_partial_stat: empty vector");
    if (!xi.allFinite()) throw InvalidInput("max_partial_stat: entries must be finite");
    Eigen::VectorXd prefix(n + 1);
    prefix[0] = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + xi[i];

    PartialSumStat best;
    best.value = -1.0;
    auto consider = [&](Eigen::Index i, Eigen::Index j) {
        const double s = prefix[j] - prefix[i - 1];
        const double v = s * s / static_cast<double>(j - i + 1);
        if (v > best.value) best = {v, i, j};
    };
    if (mode == StatMode::Exact) {
        for (Eigen::Index i = 1; i <= n; ++i)
            for (Eigen::Index j = i; j <= n; ++j) consider(i, j);
    } else {
        for (Eigen::Index len = 1; len <= n; len *= 2)
            for (Eigen::Index i = 1; i + len - 1 <= n; i += len) consider(i, i + len - 1);
    }
    return best;
}

DyadicBoundCheck dyadic_bound_check(const Eigen::VectorXd& xi) {
    DyadicBoundCheck out;
    out.exact = max_partial_stat(xi, StatMode::Exact).value;
    out.dyadic = max_partial_stat(xi, StatMode::Dyadic).value;
    out.ok = std::sqrt(out.exact) <= (2.0 + std::sqrt(2.0)) * std::sqrt(out.dyadic) + 1e-12;
    return out;
}

NoiseDiagnostics check_noise_bound(const Eigen::VectorXd& xi, double beta) {
    if (!(beta > 0.0)) throw InvalidInput("beta must be positive");
    const Eigen::Index n = xi.size();
    NoiseDiagnostics diag;
    const PartialSumStat exact = max_partial_stat(xi, StatMode::Exact);
    diag.max_stat = exact.value;
    diag.arg_lo = exact.lo;
    diag.arg_hi = exact.hi;
    diag.max_stat_dyadic = max_partial_stat(xi, StatMode::Dyadic).value;
    diag.beta = beta;
    diag.pass = diag.max_stat <= beta;

    // Second route: interval means of the embedded step function. For the
    // grid interval I = [(i-1)/n, j/n), mu_I(xi)^2 <= beta/(n len(I)) is the
    // same inequality as (sum xi)^2/(j-i+1) <= beta, so the two routes must
    // agree except within rounding of the statistic at the threshold.
    const StepFunction fn = embed(xi);
    Eigen::VectorXd cum(n + 1);
    cum[0] = 0.0;
    for (Eigen::Index i = 1; i <= n; ++i)
        cum[i] = fn.integral(0.0, static_cast<double>(i) / static_cast<double>(n));
    bool all_ok = true;
    const double dn = static_cast<double>(n);
    for (Eigen::Index i = 1; i <= n && all_ok; ++i) {
        for (Eigen::Index j = i; j <= n; ++j) {
            const double len = static_cast<double>(j - i + 1) / dn;
            const double mu = (cum[j] - cum[i - 1]) / len;
            if (mu * mu > beta / (dn * len)) { all_ok = false; break; }
        }
    }
    diag.interval_mean_consistent =
        (all_ok == diag.pass) || std::abs(diag.max_stat - beta) <= 1e-9 * (1.0 + beta);
    return diag;
}

} // namespace jplse
