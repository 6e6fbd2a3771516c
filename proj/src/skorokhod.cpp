#include "jplse/skorokhod.hpp"
#include "jplse/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <unordered_map>

namespace jplse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Matching problem between two step profiles. Events are the jump locations
// augmented with both endpoints; piece m of the first profile lives on
// (a[m], a[m+1]). cell(m, l) is the value-space distance between piece m of
// the first profile and piece l of the second.
struct MatchProblem {
    std::vector<double> a; // size P+2
    std::vector<double> b; // size Q+2
    std::function<double(int, int)> cell;
};

// Largest cell distance swept by the linear segment of lambda that maps
// (b[j], b[j2]) onto (a[i], a[i2]). Optionally records the visited cells.
double transition_sup(const MatchProblem& mp, int i, int j, int i2, int j2,
                      std::vector<std::tuple<int, int, double>>* cells = nullptr) {
    const double slope = (mp.a[i2] - mp.a[i]) / (mp.b[j2] - mp.b[j]);
    // Crossing times of the unmatched jumps of the first profile, merged with
    // the unmatched jumps of the second. Simultaneous events advance both
    // indices at once, so a jump crossed exactly at a jump of the other
    // profile creates no intermediate cell.
    std::vector<std::pair<double, int>> events;
    events.reserve(static_cast<std::size_t>(i2 - i) + static_cast<std::size_t>(j2 - j));
    for (int m = i + 1; m < i2; ++m) {
        double t = mp.b[j] + (mp.a[m] - mp.a[i]) / slope;
        t = std::min(std::max(t, mp.b[j]), mp.b[j2]);
        events.emplace_back(t, 0);
    }
    for (int l = j + 1; l < j2; ++l) events.emplace_back(mp.b[l], 1);
    std::sort(events.begin(), events.end());

    double worst = 0.0;
    int m = i, l = j;
    double cur = mp.b[j];
    std::size_t idx = 0;
    while (true) {
        const double nxt = idx < events.size() ? events[idx].first : mp.b[j2];
        if (nxt > cur) {
            const double d = mp.cell(m, l);
            if (cells) cells->emplace_back(m, l, d);
            worst = std::max(worst, d);
        }
        if (idx >= events.size()) break;
        cur = nxt;
        while (idx < events.size() && events[idx].first == nxt) {
            if (events[idx].second == 0) ++m; else ++l;
            ++idx;
        }
    }
    return worst;
}

// Reachability over matched pairs (i, j) for level eps. Interior nodes pair
// actual jumps; (0,0) and (P+1, Q+1) pin the endpoints.
bool feasible(const MatchProblem& mp, double eps,
              std::vector<std::pair<int, int>>* witness = nullptr) {
    const int ia = static_cast<int>(mp.a.size()) - 1;
    const int jb = static_cast<int>(mp.b.size()) - 1;
    const double smin = std::exp(-eps) * (1.0 - 1e-13);
    const double smax = std::exp(eps) * (1.0 + 1e-13);

    const int cols = jb + 1;
    std::vector<char> reach(static_cast<std::size_t>(ia + 1) * cols, 0);
    std::vector<int> pred(static_cast<std::size_t>(ia + 1) * cols, -1);
    auto id = [cols](int i, int j) { return i * cols + j; };
    reach[id(0, 0)] = 1;

    for (int i = 0; i < ia; ++i) {
        for (int j = 0; j < jb; ++j) {
            if (!reach[id(i, j)]) continue;
            for (int i2 = i + 1; i2 <= ia; ++i2) {
                for (int j2 = j + 1; j2 <= jb; ++j2) {
                    if ((i2 == ia) != (j2 == jb)) continue; // endpoints pair only with each other
                    if (reach[id(i2, j2)]) continue;
                    const double slope = (mp.a[i2] - mp.a[i]) / (mp.b[j2] - mp.b[j]);
                    if (slope < smin || slope > smax) continue;
                    if (transition_sup(mp, i, j, i2, j2) > eps) continue;
                    reach[id(i2, j2)] = 1;
                    pred[id(i2, j2)] = id(i, j);
                }
            }
        }
    }
    if (!reach[id(ia, jb)]) return false;
    if (witness) {
        witness->clear();
        for (int node = id(ia, jb); node != -1; node = pred[node])
            witness->emplace_back(node / cols, node % cols);
        std::reverse(witness->begin(), witness->end());
    }
    return true;
}

struct SolveOutcome {
    double level = 0.0;
    std::vector<std::pair<int, int>> pairs;
};

// Bisection on the level; `upper` must be feasible (the identity time change).
SolveOutcome solve(const MatchProblem& mp, double upper, double tol) {
    SolveOutcome out;
    if (!feasible(mp, upper, &out.pairs)) {
        // The sup bound is feasible by construction; absorb boundary rounding.
        upper = upper * (1.0 + 1e-12) + 1e-300;
        if (!feasible(mp, upper, &out.pairs))
            throw std::logic_error("matching solver: sup bound not feasible");
    }
    double lo = 0.0, hi = upper;
    std::vector<std::pair<int, int>> pairs;
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mp, mid, &pairs)) {
            hi = mid;
            out.pairs = pairs;
        } else {
            lo = mid;
        }
    }
    out.level = hi;
    return out;
}

MatchProblem step_problem(const StepFunction& f, const StepFunction& g) {
    MatchProblem mp;
    mp.a.push_back(0.0);
    for (double t : f.jump_locations()) mp.a.push_back(t);
    mp.a.push_back(1.0);
    mp.b.push_back(0.0);
    for (double t : g.jump_locations()) mp.b.push_back(t);
    mp.b.push_back(1.0);
    mp.cell = [&f, &g](int m, int l) { return std::abs(f.values()[m] - g.values()[l]); };
    return mp;
}

TimeChange witness_from_pairs(const MatchProblem& mp, const std::vector<std::pair<int, int>>& pairs) {
    TimeChange tc;
    for (const auto& [i, j] : pairs) tc.knots.push_back({mp.b[j], mp.a[i]});
    return tc;
}

} // namespace

double TimeChange::max_log_slope() const {
    double worst = 0.0;
    for (std::size_t i = 1; i < knots.size(); ++i) {
        const double slope = (knots[i][1] - knots[i - 1][1]) / (knots[i][0] - knots[i - 1][0]);
        worst = std::max(worst, std::abs(std::log(slope)));
    }
    return worst;
}

TimeChange TimeChange::identity(double horizon) {
    return TimeChange{{{0.0, 0.0}, {horizon, horizon}}};
}

SkorokhodResult skorokhod_distance(const StepFunction& f, const StepFunction& g, double tol) {
    if (!(tol > 0.0)) throw InvalidInput("tol must be positive");
    if (f == g) return {0.0, TimeChange::identity()};
    const double sup = distance(f, g, Norm::Sup);
    if (sup == 0.0) return {0.0, TimeChange::identity()};

    MatchProblem mp = step_problem(f, g);
    SolveOutcome sol = solve(mp, sup, tol);
    return {sol.level, witness_from_pairs(mp, sol.pairs)};
}

namespace {

std::vector<double> zeta_events(const ScaleSpacePath& path, double horizon) {
    // Critical gammas are stored in decreasing order, so zeta = 1/gamma comes
    // out increasing, aligned with pieces[].
    std::vector<double> ev{0.0};
    for (double gamma : path.critical_gammas) {
        const double z = 1.0 / gamma;
        if (z >= horizon)
            throw InvalidInput("path has a zeta-jump at or beyond the horizon; truncate first");
        ev.push_back(z);
    }
    ev.push_back(horizon);
    return ev;
}

} // namespace

PathDistanceReport path_distance(const ScaleSpacePath& p, const ScaleSpacePath& q,
                                 double horizon, PathMetric inner, double tol) {
    if (!(horizon > 0.0)) throw InvalidInput("horizon must be positive");
    if (!(tol > 0.0)) throw InvalidInput("tol must be positive");
    if (p.pieces.empty() || q.pieces.empty()) throw InvalidInput("empty path");

    MatchProblem mp;
    mp.a = zeta_events(p, horizon);
    mp.b = zeta_events(q, horizon);

    // Piece i of a path sits between its zeta events i and i+1, in the order
    // of increasing zeta, which is the order of pieces[].
    const int qn = static_cast<int>(q.pieces.size());
    std::unordered_map<int, double> memo;
    auto cell = [&](int m, int l) {
        const int key = m * qn + l;
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        double d;
        if (inner == PathMetric::L2)
            d = distance(p.pieces[m].minimizer, q.pieces[l].minimizer, Norm::L2);
        else
            d = skorokhod_distance(p.pieces[m].minimizer, q.pieces[l].minimizer, tol).distance;
        memo.emplace(key, d);
        return d;
    };
    mp.cell = cell;

    // Sup bound from the identity time change: sweep the merged zeta events.
    double sup = 0.0;
    {
        std::size_t i = 1, j = 1;
        double cur = 0.0;
        while (cur < horizon) {
            const double nxt = std::min(mp.a[i], mp.b[j]);
            if (nxt > cur) sup = std::max(sup, cell(static_cast<int>(i) - 1, static_cast<int>(j) - 1));
            if (mp.a[i] <= nxt && i + 1 < mp.a.size()) ++i;
            if (mp.b[j] <= nxt && j + 1 < mp.b.size()) ++j;
            cur = nxt;
        }
    }

    PathDistanceReport report;
    report.horizon = horizon;
    report.inner = inner;
    if (mp.a == mp.b) {
        // Identical jump structure: the identity is optimal whenever every
        // aligned piece coincides.
        bool same = true;
        for (std::size_t m = 0; m + 1 < mp.a.size() && same; ++m)
            same = cell(static_cast<int>(m), static_cast<int>(m)) == 0.0;
        if (same) {
            report.distance = 0.0;
            report.witness = TimeChange::identity(horizon);
            for (std::size_t m = 0; m + 1 < mp.a.size(); ++m)
                report.matched_inner.emplace_back(static_cast<int>(m), static_cast<int>(m), 0.0);
            return report;
        }
    }

    SolveOutcome sol = solve(mp, sup, tol);
    report.distance = sol.level;
    report.witness = witness_from_pairs(mp, sol.pairs);
    for (std::size_t s = 1; s < sol.pairs.size(); ++s)
        transition_sup(mp, sol.pairs[s - 1].first, sol.pairs[s - 1].second,
                       sol.pairs[s].first, sol.pairs[s].second, &report.matched_inner);
    return report;
}

} // namespace jplse
