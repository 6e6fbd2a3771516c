#include "jplse/segmentation.hpp"
#include "jplse/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jplse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_series(const Eigen::VectorXd& y) {
    if (y.size() == 0) throw InvalidInput("series must not be empty");
    if (!y.allFinite()) throw InvalidInput("series entries must be finite");
}

// Lexicographic order on changepoint sequences; shorter prefix-equal wins.
bool lex_less(const std::vector<Eigen::Index>& a, const std::vector<Eigen::Index>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

} // namespace

bool same_changepoints(const Segmentation& a, const Segmentation& b) {
    return a.n == b.n && a.changepoints == b.changepoints;
}

StepFunction embed(const Segmentation& seg) {
    if (seg.n < 1) throw InvalidInput("segmentation is empty");
    Eigen::VectorXd u(seg.n);
    Eigen::Index lo = 0;
    for (std::size_t s = 0; s <= seg.changepoints.size(); ++s) {
        const Eigen::Index hi = (s < seg.changepoints.size()) ? seg.changepoints[s] : seg.n;
        for (Eigen::Index i = lo; i < hi; ++i) u[i] = seg.means[static_cast<Eigen::Index>(s)];
        lo = hi;
    }
    return embed(u);
}

CostKernel::CostKernel(const Eigen::VectorXd& y) : n_(y.size()) {
    require_series(y);
    center_ = y.mean();
    total_squared_ = y.squaredNorm();
    s1_.resize(n_ + 1);
    s2_.resize(n_ + 1);
    s1_[0] = 0.0;
    s2_[0] = 0.0;
    for (Eigen::Index i = 0; i < n_; ++i) {
        const double c = y[i] - center_;
        s1_[i + 1] = s1_[i] + c;
        s2_[i + 1] = s2_[i] + c * c;
    }
}

double CostKernel::sse(Eigen::Index first, Eigen::Index last) const {
    const double sum = s1_[last + 1] - s1_[first];
    const double sumsq = s2_[last + 1] - s2_[first];
    const double len = static_cast<double>(last - first + 1);
    const double v = sumsq - sum * sum / len;
    return v > 0.0 ? v : 0.0;
}

double CostKernel::segment_mean(Eigen::Index first, Eigen::Index last) const {
    const double sum = s1_[last + 1] - s1_[first];
    return center_ + sum / static_cast<double>(last - first + 1);
}

namespace {

Eigen::VectorXd segment_means(const CostKernel& kernel, Eigen::Index n,
                              const std::vector<Eigen::Index>& cps) {
    Eigen::VectorXd means(static_cast<Eigen::Index>(cps.size()) + 1);
    Eigen::Index lo = 0;
    for (std::size_t s = 0; s <= cps.size(); ++s) {
        const Eigen::Index hi = (s < cps.size()) ? cps[s] : n;
        means[static_cast<Eigen::Index>(s)] = kernel.segment_mean(lo, hi - 1);
        lo = hi;
    }
    return means;
}

double exact_objective(const CostKernel& kernel, Eigen::Index n, double gamma,
                       const std::vector<Eigen::Index>& cps) {
    double sse_total = 0.0;
    Eigen::Index lo = 0;
    for (std::size_t s = 0; s <= cps.size(); ++s) {
        const Eigen::Index hi = (s < cps.size()) ? cps[s] : n;
        sse_total += kernel.sse(lo, hi - 1);
        lo = hi;
    }
    return gamma * static_cast<double>(cps.size()) + sse_total / static_cast<double>(n);
}

} // namespace

FitResult fit_fixed_gamma(const Eigen::VectorXd& y, double gamma) {
    require_series(y);
    if (!(gamma > 0.0)) throw InvalidInput("gamma must be > 0 (use fit_all_k for the unpenalized fit)");
    const Eigen::Index n = y.size();
    CostKernel kernel(y);
    const double inv_n = 1.0 / static_cast<double>(n);

    // Backward Bellman pass over suffixes: G[l] = cheapest cover of y[l..n-1]
    // where each segment costs sse/n + gamma; S[l] = fewest segments among
    // covers tied with G[l].
    std::vector<double> G(n + 1);
    std::vector<Eigen::Index> S(n + 1);
    G[n] = 0.0;
    S[n] = 0;
    for (Eigen::Index l = n - 1; l >= 0; --l) {
        double best = kInf;
        for (Eigen::Index c = l; c < n; ++c) {
            const double cand = kernel.sse(l, c) * inv_n + gamma + G[c + 1];
            if (cand < best) best = cand;
        }
        const double tol = detail::tie_tol(best);
        Eigen::Index segs = std::numeric_limits<Eigen::Index>::max();
        for (Eigen::Index c = l; c < n; ++c) {
            const double cand = kernel.sse(l, c) * inv_n + gamma + G[c + 1];
            if (cand <= best + tol) segs = std::min(segs, 1 + S[c + 1]);
        }
        G[l] = best;
        S[l] = segs;
    }

    // Front-to-back reconstruction: shortest feasible first segment at every
    // step yields the lexicographically smallest changepoint sequence among
    // the fewest-jump optimal covers.
    std::vector<Eigen::Index> cps;
    Eigen::Index p = 0;
    Eigen::Index segs_left = S[0];
    while (p < n) {
        const double tol = detail::tie_tol(G[p]);
        for (Eigen::Index c = p; c < n; ++c) {
            const double cand = kernel.sse(p, c) * inv_n + gamma + G[c + 1];
            if (cand <= G[p] + tol && 1 + S[c + 1] == segs_left) {
                if (c + 1 < n) cps.push_back(c + 1);
                p = c + 1;
                --segs_left;
                break;
            }
        }
    }

    FitResult out;
    out.segmentation.n = n;
    out.segmentation.changepoints = cps;
    out.segmentation.means = segment_means(kernel, n, cps);
    out.objective = exact_objective(kernel, n, gamma, cps);
    return out;
}

FitResult brute_force(const Eigen::VectorXd& y, double gamma) {
    require_series(y);
    if (gamma < 0.0) throw InvalidInput("gamma must be >= 0");
    const Eigen::Index n = y.size();
    if (n > 20) throw InvalidInput("brute_force is limited to n <= 20");
    CostKernel kernel(y);

    std::vector<Eigen::Index> best_cps;
    double best_obj = kInf;
    std::vector<Eigen::Index> cps;
    const std::uint64_t masks = 1ull << (n - 1);
    for (std::uint64_t mask = 0; mask < masks; ++mask) {
        cps.clear();
        for (Eigen::Index i = 1; i < n; ++i)
            if (mask & (1ull << (i - 1))) cps.push_back(i);
        const double obj = exact_objective(kernel, n, gamma, cps);
        const double tol = detail::tie_tol(std::min(obj, best_obj));
        if (obj < best_obj - tol) {
            best_obj = obj;
            best_cps = cps;
        } else if (obj <= best_obj + tol) {
            if (cps.size() < best_cps.size() ||
                (cps.size() == best_cps.size() && lex_less(cps, best_cps))) {
                best_obj = std::min(best_obj, obj);
                best_cps = cps;
            }
        }
    }

    FitResult out;
    out.segmentation.n = n;
    out.segmentation.changepoints = best_cps;
    out.segmentation.means = segment_means(kernel, n, best_cps);
    out.objective = exact_objective(kernel, n, gamma, best_cps);
    return out;
}

DeltaTable fit_all_k(const Eigen::VectorXd& y, int max_jumps) {
    require_series(y);
    const Eigen::Index n = y.size();
    if (max_jumps < 0) throw InvalidInput("max_jumps must be >= 0");
    if (max_jumps >= n) throw InvalidInput("max_jumps must be <= n-1");
    CostKernel kernel(y);
    const Eigen::Index segs_max = static_cast<Eigen::Index>(max_jumps) + 1;

    // Suffix table: G(j, l) = min total SSE covering y[l..n-1] with exactly j
    // segments. Row-major (segs_max+1) x (n+1).
    const Eigen::Index stride = n + 1;
    std::vector<double> G(static_cast<std::size_t>(segs_max + 1) * stride, kInf);
    auto at = [&](Eigen::Index j, Eigen::Index l) -> double& {
        return G[static_cast<std::size_t>(j) * stride + l];
    };
    at(0, n) = 0.0;
    for (Eigen::Index j = 1; j <= segs_max; ++j) {
        for (Eigen::Index l = n - j; l >= 0; --l) {
            double best = kInf;
            const double* next = &G[static_cast<std::size_t>(j - 1) * stride];
            for (Eigen::Index c = l; c <= n - j; ++c) {
                const double tail = next[c + 1];
                if (tail == kInf) continue;
                const double cand = kernel.sse(l, c) + tail;
                if (cand < best) best = cand;
            }
            at(j, l) = best;
        }
    }

    DeltaTable table;
    table.n = n;
    table.delta.resize(max_jumps + 1);
    table.argmin.resize(max_jumps + 1);
    const double inv_n = 1.0 / static_cast<double>(n);

    double running = kInf;
    for (int k = 0; k <= max_jumps; ++k) {
        running = std::min(running, at(k + 1, 0));
        table.delta[k] = running * inv_n;

        // Fewest segments achieving the budget-k optimum, then the
        // lexicographically smallest cover with that many segments.
        Eigen::Index segs = 0;
        const double tol = detail::tie_tol(running);
        for (Eigen::Index j = 1; j <= k + 1; ++j) {
            if (at(j, 0) <= running + tol) { segs = j; break; }
        }
        std::vector<Eigen::Index> cps;
        Eigen::Index p = 0;
        for (Eigen::Index s = segs; s > 1; --s) {
            const double target = at(s, p);
            const double t_tol = detail::tie_tol(target);
            for (Eigen::Index c = p; c <= n - s; ++c) {
                if (kernel.sse(p, c) + at(s - 1, c + 1) <= target + t_tol) {
                    cps.push_back(c + 1);
                    p = c + 1;
                    break;
                }
            }
        }
        table.argmin[k].n = n;
        table.argmin[k].changepoints = cps;
        table.argmin[k].means = segment_means(kernel, n, cps);
    }
    return table;
}

} // namespace jplse
