#pragma once

#include "jplse/noise.hpp"
#include "jplse/scale_space.hpp"
#include "jplse/signals.hpp"
#include "jplse/skorokhod.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace jplse {

enum class Metric { L2, Sup, Skorokhod, HausdorffJumps, Path };

Metric metric_from_name(const std::string& name);
std::string metric_name(Metric metric);

// Smoothing parameter rule. Schedule form: c * (log n)^log_exponent /
// n^n_exponent; the default c (log n)^2 / n satisfies the required growth
// against every supported noise envelope.
struct GammaRule {
    enum class Kind { Fixed, Schedule };
    Kind kind = Kind::Schedule;
    double value = 0.05; // Fixed
    double c = 1.0;
    double log_exponent = 2.0;
    double n_exponent = 1.0;

    // "fixed:G" or "schedule:c=C[,a=LOG_EXP][,b=N_EXP]"
    static GammaRule parse(const std::string& text);
    std::string describe() const;
};

// Evaluates the rule at n and refuses schedules whose closed form violates
// gamma_n -> 0 or gamma_n * n / beta_n -> inf for the model's envelope
// (compared by (n-power, log-power) growth exponents).
double gamma_schedule(const GammaRule& rule, Eigen::Index n, const NoiseModel& model);

struct ExperimentConfig {
    enum class Kind { Consistency, ScaleCompare };

    Kind kind = Kind::Consistency;
    SignalSpec signal;
    // Overrides signal.scale when > 0: scale = snr * sigma / sd(signal).
    double snr = 0.0;
    NoiseModel noise;
    std::vector<Eigen::Index> n_list;
    GammaRule gamma_rule;
    int replicates = 1;
    std::vector<Metric> metrics{Metric::L2};
    std::uint64_t seed = 0;
    double horizon = 0.0;        // scale-compare; 0 = auto from the deterministic paths
    Eigen::Index target_grid = 0; // fixed-gamma target resolution; 0 = auto
    int table_width = 11;        // columns of the critical-gamma tables
    PathMetric path_inner = PathMetric::L2;
    double skorokhod_tol = 1e-6;
    int threads = 0;             // 0 = hardware concurrency

    void validate() const;
};

ExperimentConfig parse_experiment_config(const std::string& path);

struct ExperimentRow {
    Eigen::Index n = 0;
    int replicate = 0;
    double gamma = 0.0;
    Eigen::Index jumps = 0;
    std::map<Metric, double> errors;
    bool jump_bound_ok = true;
    double max_stat = 0.0; // realized partial-sum statistic of the noise
    double beta = 0.0;
    double seconds = 0.0;  // wall time; excluded from the reproducible files
};

struct ScaleTable {
    Eigen::Index n = 0;
    std::vector<double> deterministic;          // top-M critical gammas, zero-padded
    std::vector<std::vector<double>> empirical; // one row per replicate
};

struct PathDistanceRow {
    Eigen::Index n = 0;
    int replicate = 0;
    double distance = 0.0;
};

struct ExperimentReport {
    ExperimentConfig config;
    double resolved_scale = 1.0;
    double horizon = 0.0;
    std::vector<ExperimentRow> rows;
    std::vector<ScaleTable> tables;            // scale-compare
    std::vector<PathDistanceRow> path_rows;    // scale-compare
    // Snapshot pieces of replicate 0 for plotting: (n, source, piece, gamma_lo,
    // gamma_hi, function); source 0 = deterministic, 1 = empirical.
    struct Snapshot { Eigen::Index n; int source; int piece; double gamma_lo, gamma_hi; StepFunction function; };
    std::vector<Snapshot> snapshots;
};

ExperimentReport run_consistency(const ExperimentConfig& config);
ExperimentReport run_scale_compare(const ExperimentConfig& config);

// Writes config.json, rows.csv, aggregates.csv, timings.csv and, for
// scale-compare runs, tables.csv, path_distances.csv, snapshots.csv.
// All files except timings.csv are byte-identical across runs of the same
// (config, seed).
void write_report(const ExperimentReport& report, const std::string& out_dir);

double median(std::vector<double> values);
double quantile(std::vector<double> values, double q);

} // namespace jplse
