#include "jplse/experiment.hpp"
#include "jplse/errors.hpp"
#include "jplse/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace jplse {

using nlohmann::json;

Metric metric_from_name(const std::string& name) {
    if (name == "l2") return Metric::L2;
    if (name == "sup") return Metric::Sup;
    if (name == "skorokhod") return Metric::Skorokhod;
    if (name == "hausdorff") return Metric::HausdorffJumps;
    if (name == "path") return Metric::Path;
    throw InvalidInput("unknown metric '" + name + "'");
}

std::string metric_name(Metric metric) {
    switch (metric) {
        case Metric::L2: return "l2";
        case Metric::Sup: return "sup";
        case Metric::Skorokhod: return "skorokhod";
        case Metric::HausdorffJumps: return "hausdorff";
        case Metric::Path: return "path";
    }
    throw std::logic_error("unreachable");
}

GammaRule GammaRule::parse(const std::string& text) {
    GammaRule rule;
    if (text.rfind("fixed:", 0) == 0) {
        rule.kind = Kind::Fixed;
        rule.value = std::stod(text.substr(6));
        return rule;
    }
    if (text.rfind("schedule:", 0) == 0) {
        rule.kind = Kind::Schedule;
        std::istringstream parts(text.substr(9));
        std::string item;
        while (std::getline(parts, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos)
                throw InvalidInput("cannot parse gamma rule '" + text + "'");
            const std::string key = item.substr(0, eq);
            const double v = std::stod(item.substr(eq + 1));
            if (key == "c") rule.c = v;
            else if (key == "a") rule.log_exponent = v;
            else if (key == "b") rule.n_exponent = v;
            else throw InvalidInput("unknown gamma rule key '" + key + "'");
        }
        return rule;
    }
    throw InvalidInput("cannot parse gamma rule '" + text + "'; expected fixed:G or schedule:c=C[,a=A][,b=B]");
}

std::string GammaRule::describe() const {
    std::ostringstream os;
    if (kind == Kind::Fixed) os << "fixed:" << value;
    else os << "schedule:c=" << c << ",a=" << log_exponent << ",b=" << n_exponent;
    return os.str();
}

namespace {

struct Growth {
    double n_pow = 0.0;
    double log_pow = 0.0;
};

Growth beta_growth(const NoiseModel& model) {
    switch (model.kind) {
        case NoiseModel::Kind::Gaussian: return {0.0, 1.0};
        case NoiseModel::Kind::SubgaussianGeneral: return {model.zeta, 1.0};
        case NoiseModel::Kind::MomentBounded: return {2.0 / model.m, 2.0 / model.m};
    }
    throw std::logic_error("unreachable");
}

bool diverges(const Growth& g) { return g.n_pow > 0.0 || (g.n_pow == 0.0 && g.log_pow > 0.0); }
bool vanishes(const Growth& g) { return g.n_pow < 0.0 || (g.n_pow == 0.0 && g.log_pow < 0.0); }

std::string growth_text(const Growth& g) {
    std::ostringstream os;
    os << "(n-power " << g.n_pow << ", log-power " << g.log_pow << ")";
    return os.str();
}

} // namespace

double gamma_schedule(const GammaRule& rule, Eigen::Index n, const NoiseModel& model) {
    if (rule.kind == GammaRule::Kind::Fixed) {
        if (!(rule.value > 0.0)) throw InvalidInput("fixed gamma must be positive");
        return rule.value;
    }
    if (!(rule.c > 0.0)) throw InvalidInput("schedule constant c must be positive");
    if (n < 2) throw InvalidInput("schedules need n >= 2");

    const Growth gamma{-rule.n_exponent, rule.log_exponent};
    if (!vanishes(gamma))
        throw InvalidInput("schedule refused: gamma_n does not converge to 0 " + growth_text(gamma));
    const Growth beta = beta_growth(model);
    const Growth ratio{1.0 + gamma.n_pow - beta.n_pow, gamma.log_pow - beta.log_pow};
    if (!diverges(ratio))
        throw InvalidInput("schedule refused: gamma_n * n / beta_n does not diverge " + growth_text(ratio));

    const double dn = static_cast<double>(n);
    return rule.c * std::pow(std::log(dn), rule.log_exponent) / std::pow(dn, rule.n_exponent);
}

void ExperimentConfig::validate() const {
    noise.validate();
    if (n_list.empty()) throw InvalidInput("n_list must not be empty");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < 2) throw InvalidInput("n_list entries must be >= 2");
        if (i > 0 && n_list[i] <= n_list[i - 1])
            throw InvalidInput("n_list must be strictly increasing");
    }
    if (replicates < 1) throw InvalidInput("replicates must be >= 1");
    if (table_width < 1) throw InvalidInput("table_width must be >= 1");
    if (!(skorokhod_tol > 0.0)) throw InvalidInput("skorokhod_tol must be positive");
    if (snr > 0.0 && noise.kind != NoiseModel::Kind::Gaussian)
        throw InvalidInput("snr scaling needs gaussian noise (sigma defines the ratio)");
    if (kind == Kind::Consistency) {
        if (metrics.empty()) throw InvalidInput("consistency runs need at least one metric");
        const bool step_target = signal_is_step(signal) || gamma_rule.kind == GammaRule::Kind::Fixed;
        for (Metric m : metrics) {
            if (m == Metric::Path)
                throw InvalidInput("the path metric belongs to scale-compare runs");
            if (m == Metric::Skorokhod && !step_target)
                throw InvalidInput("the skorokhod metric needs a step-function target");
        }
        if (!signal_is_step(signal) && signal.kind != SignalSpec::Kind::Smooth &&
            gamma_rule.kind == GammaRule::Kind::Schedule)
            throw InvalidInput("schedule targets need a step or smooth signal");
    }
    if (horizon < 0.0) throw InvalidInput("horizon must be >= 0");
}

ExperimentConfig parse_experiment_config(const std::string& path) {
    const auto toml = read_toml(path);
    ExperimentConfig config;
    for (const auto& [key, value] : toml) {
        if (key == "experiment") {
            const std::string kind = value.as_string();
            if (kind == "consistency") config.kind = ExperimentConfig::Kind::Consistency;
            else if (kind == "scale_compare") config.kind = ExperimentConfig::Kind::ScaleCompare;
            else throw InvalidInput("unknown experiment kind '" + kind + "'");
        } else if (key == "signal") {
            config.signal = SignalSpec::parse(value.as_string());
        } else if (key == "snr") {
            config.snr = value.as_double();
        } else if (key == "noise") {
            config.noise = NoiseModel::parse(value.as_string());
        } else if (key == "n_list") {
            config.n_list.clear();
            for (double d : value.as_double_array())
                config.n_list.push_back(static_cast<Eigen::Index>(std::llround(d)));
        } else if (key == "gamma") {
            config.gamma_rule = GammaRule::parse(value.as_string());
        } else if (key == "replicates") {
            config.replicates = static_cast<int>(std::llround(value.as_double()));
        } else if (key == "metrics") {
            config.metrics.clear();
            for (const auto& name : value.as_string_array())
                config.metrics.push_back(metric_from_name(name));
        } else if (key == "seed") {
            config.seed = static_cast<std::uint64_t>(std::llround(value.as_double()));
        } else if (key == "horizon") {
            config.horizon = value.as_double();
        } else if (key == "target_grid") {
            config.target_grid = static_cast<Eigen::Index>(std::llround(value.as_double()));
        } else if (key == "table_width") {
            config.table_width = static_cast<int>(std::llround(value.as_double()));
        } else if (key == "path_inner") {
            const std::string inner = value.as_string();
            if (inner == "l2") config.path_inner = PathMetric::L2;
            else if (inner == "skorokhod") config.path_inner = PathMetric::Skorokhod;
            else throw InvalidInput("unknown path_inner '" + inner + "'");
        } else if (key == "skorokhod_tol") {
            config.skorokhod_tol = value.as_double();
        } else if (key == "threads") {
            config.threads = static_cast<int>(std::llround(value.as_double()));
        } else {
            throw InvalidInput("unknown config key '" + key + "'");
        }
    }
    config.noise.seed = config.seed;
    config.validate();
    return config;
}

namespace {

void parallel_tasks(int count, int threads, const std::function<void(int)>& fn) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

double resolve_scale(const ExperimentConfig& config) {
    if (config.snr <= 0.0) return config.signal.scale;
    SignalSpec base = config.signal;
    base.scale = 1.0;
    const double sd = signal_sd(base);
    if (!(sd > 0.0)) throw InvalidInput("snr scaling needs a non-constant signal");
    return config.snr * config.noise.sigma / sd;
}

// Deterministic target path for fixed-gamma runs, at the configured or
// suggested grid.
ScaleSpacePath fixed_target_path(const ExperimentConfig& config, const SignalSpec& sig) {
    Eigen::Index grid = config.target_grid;
    if (signal_is_step(sig)) {
        const StepFunction f = signal_step(sig);
        if (grid == 0) {
            grid = suggest_grid(f, 2);
            if (grid == 0)
                throw InvalidInput("no exact grid for the signal breakpoints; set target_grid");
        }
        return deterministic_path(f, grid, GridPolicy::Strict);
    }
    if (grid == 0) grid = 512; // documented default for smooth targets
    const SampledSignal samples = signal_cell_means(sig, grid);
    double residual = signal_squared_norm(sig) - samples.squaredNorm() / static_cast<double>(grid);
    return path_from_samples(samples, std::max(residual, 0.0));
}

StepFunction fixed_target_function(const ScaleSpacePath& path, double gamma) {
    for (double crit : path.critical_gammas) {
        if (std::abs(gamma - crit) <= 1e-9 * (1.0 + gamma))
            throw InvalidInput("fixed gamma sits on a critical value of the target path; "
                               "the target is not unique there");
    }
    return eval_path(path, 1.0 / gamma);
}

struct TargetContext {
    bool step = false;
    StepFunction step_target;
    SignalSpec smooth; // valid when !step
};

double metric_error(Metric metric, const StepFunction& estimate, const TargetContext& target,
                    double skorokhod_tol) {
    if (target.step) {
        switch (metric) {
            case Metric::L2: return distance(estimate, target.step_target, Norm::L2);
            case Metric::Sup: return distance(estimate, target.step_target, Norm::Sup);
            case Metric::Skorokhod:
                return skorokhod_distance(estimate, target.step_target, skorokhod_tol).distance;
            case Metric::HausdorffJumps:
                return hausdorff_jumps(estimate.jump_locations(), target.step_target.jump_locations());
            default: break;
        }
        throw std::logic_error("unsupported metric");
    }
    switch (metric) {
        case Metric::L2: {
            const double sq = estimate.squared_norm() - 2.0 * signal_inner(target.smooth, estimate) +
                              signal_squared_norm(target.smooth);
            return std::sqrt(std::max(sq, 0.0));
        }
        case Metric::Sup: {
            // Dense-grid approximation; exact sup against smooth targets is
            // out of scope.
            double worst = 0.0;
            const int grid = 4096;
            for (int i = 0; i <= grid; ++i) {
                const double t = static_cast<double>(i) / grid;
                worst = std::max(worst, std::abs(estimate(t) - signal_value(target.smooth, t)));
            }
            return worst;
        }
        case Metric::HausdorffJumps:
            return hausdorff_jumps(estimate.jump_locations(), {});
        default: break;
    }
    throw std::logic_error("unsupported metric");
}

std::vector<double> top_criticals(const ScaleSpacePath& path, int width) {
    std::vector<double> row(static_cast<std::size_t>(width), 0.0);
    for (std::size_t i = 0; i < path.critical_gammas.size() && i < row.size(); ++i)
        row[i] = path.critical_gammas[i];
    return row;
}

} // namespace

ExperimentReport run_consistency(const ExperimentConfig& config) {
    config.validate();
    ExperimentReport report;
    report.config = config;
    report.resolved_scale = resolve_scale(config);

    SignalSpec sig = config.signal;
    sig.scale = report.resolved_scale;
    const double signal_sq = signal_squared_norm(sig);

    TargetContext target;
    if (config.gamma_rule.kind == GammaRule::Kind::Fixed) {
        const ScaleSpacePath path = fixed_target_path(config, sig);
        target.step = true;
        target.step_target = fixed_target_function(path, config.gamma_rule.value);
    } else if (signal_is_step(sig)) {
        target.step = true;
        target.step_target = signal_step(sig);
    } else {
        target.smooth = sig;
    }

    const int tasks = static_cast<int>(config.n_list.size()) * config.replicates;
    report.rows.resize(tasks);
    parallel_tasks(tasks, config.threads, [&](int task) {
        const auto t0 = std::chrono::steady_clock::now();
        const Eigen::Index n = config.n_list[static_cast<std::size_t>(task) / config.replicates];
        const int replicate = task % config.replicates;

        const SampledSignal fbar = signal_cell_means(sig, n);
        const Eigen::VectorXd xi = sample_noise(config.noise, n, static_cast<std::uint64_t>(replicate));
        const Eigen::VectorXd y = fbar + xi;
        const double gamma = gamma_schedule(config.gamma_rule, n, config.noise);
        const FitResult fit = fit_fixed_gamma(y, gamma);
        const StepFunction estimate = embed(fit.segmentation);

        ExperimentRow row;
        row.n = n;
        row.replicate = replicate;
        row.gamma = gamma;
        row.jumps = fit.segmentation.jump_count();
        for (Metric m : config.metrics)
            row.errors[m] = metric_error(m, estimate, target, config.skorokhod_tol);

        row.beta = beta_n(config.noise, n);
        row.max_stat = max_partial_stat(xi, StatMode::Exact).value;
        const double bn_over_n = row.beta / static_cast<double>(n);
        if (gamma > 4.0 * bn_over_n) {
            const double bound = 2.0 * (signal_sq + bn_over_n) / (gamma - 2.0 * bn_over_n) + 1.0;
            row.jump_bound_ok = static_cast<double>(row.jumps) <= bound;
            // With the noise statistic below its envelope the bound is a
            // deterministic consequence of optimality; a violation there is
            // a solver bug, not randomness.
            if (!row.jump_bound_ok && row.max_stat <= row.beta)
                throw std::logic_error("a priori jump bound violated under a valid envelope");
        }
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report.rows[task] = std::move(row);
    });
    return report;
}

ExperimentReport run_scale_compare(const ExperimentConfig& config) {
    config.validate();
    ExperimentReport report;
    report.config = config;
    report.resolved_scale = resolve_scale(config);

    SignalSpec sig = config.signal;
    sig.scale = report.resolved_scale;
    const double signal_sq = signal_squared_norm(sig);

    const std::size_t n_count = config.n_list.size();
    std::vector<ScaleSpacePath> det_paths(n_count);
    for (std::size_t i = 0; i < n_count; ++i) {
        const Eigen::Index n = config.n_list[i];
        const SampledSignal fbar = signal_cell_means(sig, n);
        const double residual = std::max(signal_sq - fbar.squaredNorm() / static_cast<double>(n), 0.0);
        det_paths[i] = path_from_samples(fbar, residual);
    }

    double horizon = config.horizon;
    if (horizon <= 0.0) {
        // Cover the top table_width critical values of every deterministic
        // path with headroom; structure below that is sampling residue.
        for (const auto& path : det_paths) {
            const std::size_t m = std::min<std::size_t>(path.critical_gammas.size(),
                                                        static_cast<std::size_t>(config.table_width));
            if (m > 0) horizon = std::max(horizon, 2.0 / path.critical_gammas[m - 1]);
        }
        if (horizon <= 0.0) horizon = 1.0;
    }
    report.horizon = horizon;

    report.tables.resize(n_count);
    for (std::size_t i = 0; i < n_count; ++i) {
        report.tables[i].n = config.n_list[i];
        report.tables[i].deterministic = top_criticals(det_paths[i], config.table_width);
        report.tables[i].empirical.resize(config.replicates);
    }

    const int tasks = static_cast<int>(n_count) * config.replicates;
    report.path_rows.resize(tasks);
    std::vector<ScaleSpacePath> first_replicate_paths(n_count);
    parallel_tasks(tasks, config.threads, [&](int task) {
        const std::size_t n_index = static_cast<std::size_t>(task) / config.replicates;
        const Eigen::Index n = config.n_list[n_index];
        const int replicate = task % config.replicates;

        const SampledSignal fbar = signal_cell_means(sig, n);
        const Eigen::VectorXd xi = sample_noise(config.noise, n, static_cast<std::uint64_t>(replicate));
        const ScaleSpacePath empirical = path_from_samples(fbar + xi);

        report.tables[n_index].empirical[replicate] = top_criticals(empirical, config.table_width);
        const ScaleSpacePath emp_cut = truncate_path(empirical, horizon);
        const ScaleSpacePath det_cut = truncate_path(det_paths[n_index], horizon);
        const PathDistanceReport pd =
            path_distance(emp_cut, det_cut, horizon, config.path_inner, config.skorokhod_tol);
        report.path_rows[task] = {n, replicate, pd.distance};
        if (replicate == 0) first_replicate_paths[n_index] = emp_cut;
    });

    for (std::size_t i = 0; i < n_count; ++i) {
        const Eigen::Index n = config.n_list[i];
        const ScaleSpacePath det_cut = truncate_path(det_paths[i], horizon);
        for (std::size_t p = 0; p < det_cut.pieces.size(); ++p)
            report.snapshots.push_back({n, 0, static_cast<int>(p), det_cut.pieces[p].gamma_lo,
                                        det_cut.pieces[p].gamma_hi, det_cut.pieces[p].minimizer});
        for (std::size_t p = 0; p < first_replicate_paths[i].pieces.size(); ++p)
            report.snapshots.push_back({n, 1, static_cast<int>(p),
                                        first_replicate_paths[i].pieces[p].gamma_lo,
                                        first_replicate_paths[i].pieces[p].gamma_hi,
                                        first_replicate_paths[i].pieces[p].minimizer});
    }
    return report;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw InvalidInput("quantile of empty set");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

namespace {

json config_json(const ExperimentReport& report) {
    const ExperimentConfig& c = report.config;
    json n_list = json::array();
    for (Eigen::Index n : c.n_list) n_list.push_back(n);
    json metrics = json::array();
    for (Metric m : c.metrics) metrics.push_back(metric_name(m));
    return json{
        {"experiment", c.kind == ExperimentConfig::Kind::Consistency ? "consistency" : "scale_compare"},
        {"signal", c.signal.describe()},
        {"snr", c.snr},
        {"resolved_scale", report.resolved_scale},
        {"noise", c.noise.describe()},
        {"n_list", n_list},
        {"gamma", c.gamma_rule.describe()},
        {"replicates", c.replicates},
        {"metrics", metrics},
        {"seed", c.seed},
        {"horizon", report.horizon},
        {"target_grid", c.target_grid},
        {"table_width", c.table_width},
        {"path_inner", c.path_inner == PathMetric::L2 ? "l2" : "skorokhod"},
        {"skorokhod_tol", c.skorokhod_tol},
    };
}

} // namespace

void write_report(const ExperimentReport& report, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

    write_text(path("config.json"), config_json(report).dump(2));

    {
        std::ofstream rows(path("rows.csv"));
        rows << "n,replicate,gamma,jumps,jump_bound_ok,max_stat,beta_n";
        for (Metric m : report.config.metrics) rows << "," << metric_name(m);
        rows << "\n";
        for (const auto& r : report.rows) {
            rows << r.n << "," << r.replicate << "," << format_double(r.gamma) << "," << r.jumps
                 << "," << (r.jump_bound_ok ? 1 : 0) << "," << format_double(r.max_stat) << ","
                 << format_double(r.beta);
            for (Metric m : report.config.metrics) rows << "," << format_double(r.errors.at(m));
            rows << "\n";
        }
    }
    {
        std::ofstream agg(path("aggregates.csv"));
        agg << "n,metric,median,q25,q75\n";
        for (Eigen::Index n : report.config.n_list) {
            for (Metric m : report.config.metrics) {
                std::vector<double> v;
                for (const auto& r : report.rows)
                    if (r.n == n && r.errors.count(m)) v.push_back(r.errors.at(m));
                if (v.empty()) continue;
                agg << n << "," << metric_name(m) << "," << format_double(median(v)) << ","
                    << format_double(quantile(v, 0.25)) << "," << format_double(quantile(v, 0.75))
                    << "\n";
            }
        }
    }
    {
        std::ofstream timings(path("timings.csv"));
        timings << "n,replicate,seconds\n";
        for (const auto& r : report.rows)
            timings << r.n << "," << r.replicate << "," << format_double(r.seconds) << "\n";
    }
    if (!report.tables.empty()) {
        std::ofstream tables(path("tables.csv"));
        tables << "n,source,replicate";
        for (int i = 1; i <= report.config.table_width; ++i) tables << ",gamma" << i;
        tables << "\n";
        for (const auto& table : report.tables) {
            tables << table.n << ",deterministic,-1";
            for (double g : table.deterministic) tables << "," << format_double(g);
            tables << "\n";
            for (std::size_t r = 0; r < table.empirical.size(); ++r) {
                tables << table.n << ",empirical," << r;
                for (double g : table.empirical[r]) tables << "," << format_double(g);
                tables << "\n";
            }
        }
    }
    if (!report.path_rows.empty()) {
        std::ofstream pd(path("path_distances.csv"));
        pd << "n,replicate,distance\n";
        for (const auto& r : report.path_rows)
            pd << r.n << "," << r.replicate << "," << format_double(r.distance) << "\n";
    }
    if (!report.snapshots.empty()) {
        std::ofstream snap(path("snapshots.csv"));
        snap << "n,source,piece,gamma_lo,gamma_hi,t_lo,t_hi,value\n";
        for (const auto& s : report.snapshots) {
            const auto& f = s.function;
            double lo = 0.0;
            for (Eigen::Index seg = 0; seg <= f.breakpoints().size(); ++seg) {
                const double hi = seg < f.breakpoints().size() ? f.breakpoints()[seg] : 1.0;
                snap << s.n << "," << (s.source == 0 ? "deterministic" : "empirical") << ","
                     << s.piece << "," << format_double(s.gamma_lo) << ","
                     << format_double(s.gamma_hi) << "," << format_double(lo) << ","
                     << format_double(hi) << "," << format_double(f.values()[seg]) << "\n";
                lo = hi;
            }
        }
    }
}

} // namespace jplse
