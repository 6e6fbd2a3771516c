// Command-line front end: fit, deltas, path, target-path, metrics, diag,
// experiment. Exit codes: 0 success, 2 input validation refusal, 1 internal
// error.
#include "jplse/experiment.hpp"
#include "jplse/errors.hpp"
#include "jplse/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace jplse;

void cmd_fit(const std::string& input, double gamma, const std::string& out) {
    const Eigen::VectorXd y = read_series_csv(input);
    const FitResult fit = fit_fixed_gamma(y, gamma);
    write_text(out, to_json(fit));
    std::cout << "n=" << y.size() << " jumps=" << fit.segmentation.jump_count()
              << " objective=" << format_double(fit.objective) << "\n";
}

void cmd_deltas(const std::string& input, int kmax, const std::string& out) {
    const Eigen::VectorXd y = read_series_csv(input);
    if (kmax < 0) kmax = static_cast<int>(y.size()) - 1;
    const DeltaTable table = fit_all_k(y, kmax);
    std::ofstream os(out);
    if (!os) throw InvalidInput("cannot write " + out);
    os << "k,delta,jumps\n";
    for (int k = 0; k <= table.max_jumps(); ++k)
        os << k << "," << format_double(table.delta[k]) << ","
           << table.argmin[k].jump_count() << "\n";
    std::cout << "wrote " << table.max_jumps() + 1 << " rows to " << out << "\n";
}

void cmd_path(const std::string& input, const std::string& out, const std::string& criticals_out) {
    const Eigen::VectorXd y = read_series_csv(input);
    const ScaleSpacePath path = path_from_samples(y);
    write_text(out, to_json(path));
    if (!criticals_out.empty()) {
        std::ofstream os(criticals_out);
        if (!os) throw InvalidInput("cannot write " + criticals_out);
        os << "gamma,k\n";
        for (std::size_t i = 0; i < path.critical_gammas.size(); ++i)
            os << format_double(path.critical_gammas[i]) << "," << path.pieces[i + 1].jumps << "\n";
    }
    std::cout << "pieces=" << path.pieces.size()
              << " criticals=" << path.critical_gammas.size() << "\n";
}

void cmd_target_path(const std::string& signal, Eigen::Index n, bool approximate,
                     const std::string& out) {
    const SignalSpec spec = SignalSpec::parse(signal);
    ScaleSpacePath path;
    if (signal_is_step(spec)) {
        path = deterministic_path(signal_step(spec), n,
                                  approximate ? GridPolicy::Approximate : GridPolicy::Strict);
    } else {
        const SampledSignal samples = signal_cell_means(spec, n);
        const double residual =
            signal_squared_norm(spec) - samples.squaredNorm() / static_cast<double>(n);
        path = path_from_samples(samples, std::max(residual, 0.0));
    }
    write_text(out, to_json(path));
    std::cout << "pieces=" << path.pieces.size()
              << " criticals=" << path.critical_gammas.size()
              << " residual_offset=" << format_double(path.residual_offset) << "\n";
}

void cmd_metrics(const std::string& a, const std::string& b, const std::string& metric,
                 double tol, const std::string& witness_out) {
    const StepFunction f = read_step_function(a);
    const StepFunction g = read_step_function(b);
    double value = 0.0;
    if (metric == "l2") value = distance(f, g, Norm::L2);
    else if (metric == "sup") value = distance(f, g, Norm::Sup);
    else if (metric == "hausdorff") value = hausdorff_jumps(f.jump_locations(), g.jump_locations());
    else if (metric == "skorokhod") {
        const SkorokhodResult res = skorokhod_distance(f, g, tol);
        value = res.distance;
        if (!witness_out.empty()) write_text(witness_out, to_json(res.witness));
    } else {
        throw InvalidInput("unknown metric '" + metric + "'");
    }
    std::cout << format_double(value) << "\n";
}

void cmd_diag(const std::string& model_text, Eigen::Index n, int seeds, const std::string& out) {
    NoiseModel model = NoiseModel::parse(model_text);
    std::ofstream os(out);
    if (!os) throw InvalidInput("cannot write " + out);
    os << "n,seed,M_n,M_dyadic,beta_n,pass\n";
    int passed = 0;
    for (int seed = 0; seed < seeds; ++seed) {
        model.seed = static_cast<std::uint64_t>(seed);
        const Eigen::VectorXd xi = sample_noise(model, n);
        const NoiseDiagnostics diag = check_noise_bound(xi, beta_n(model, n));
        os << n << "," << seed << "," << format_double(diag.max_stat) << ","
           << format_double(diag.max_stat_dyadic) << "," << format_double(diag.beta) << ","
           << (diag.pass ? 1 : 0) << "\n";
        passed += diag.pass ? 1 : 0;
    }
    std::cout << "pass rate " << passed << "/" << seeds << "\n";
}

void cmd_experiment(const std::string& config_path, const std::string& out_dir) {
    const ExperimentConfig config = parse_experiment_config(config_path);
    const ExperimentReport report = config.kind == ExperimentConfig::Kind::Consistency
                                        ? run_consistency(config)
                                        : run_scale_compare(config);
    write_report(report, out_dir);
    std::cout << "report written to " << out_dir << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"jump-penalized least squares estimation and scale spaces"};
    app.require_subcommand(1);

    std::string input, out, criticals_out, a, b, metric = "l2", witness_out;
    std::string signal = "blocks", model_text = "gaussian:1.0", config_path;
    double gamma = 0.1, tol = 1e-6;
    int kmax = -1, seeds = 1;
    Eigen::Index n = 64;

    auto* fit = app.add_subcommand("fit", "minimize the jump-penalized objective at one gamma");
    fit->add_option("--input", input, "series CSV")->required();
    fit->add_option("--gamma", gamma, "smoothing parameter")->required();
    fit->add_option("--out", out, "segmentation JSON")->required();
    fit->callback([&]() { cmd_fit(input, gamma, out); });

    auto* deltas = app.add_subcommand("deltas", "best squared error for every jump budget");
    deltas->add_option("--input", input, "series CSV")->required();
    deltas->add_option("--kmax", kmax, "largest jump budget (default n-1)");
    deltas->add_option("--out", out, "deltas CSV")->required();
    deltas->callback([&]() { cmd_deltas(input, kmax, out); });

    auto* path = app.add_subcommand("path", "full solution path over gamma");
    path->add_option("--input", input, "series CSV")->required();
    path->add_option("--out", out, "path JSON")->required();
    path->add_option("--criticals-out", criticals_out, "critical (gamma, k) CSV");
    path->callback([&]() { cmd_path(input, out, criticals_out); });

    bool approximate = false;
    auto* target = app.add_subcommand("target-path", "solution path of a noiseless signal");
    target->add_option("--signal", signal, "signal spec (blocks, sin, ramp, step:<json>)");
    target->add_option("--n", n, "grid resolution")->required();
    target->add_flag("--approximate", approximate, "accept off-grid breakpoints");
    target->add_option("--out", out, "path JSON")->required();
    target->callback([&]() { cmd_target_path(signal, n, approximate, out); });

    auto* metrics = app.add_subcommand("metrics", "distance between two step functions");
    metrics->add_option("--a", a, "step function JSON")->required();
    metrics->add_option("--b", b, "step function JSON")->required();
    metrics->add_option("--metric", metric, "l2 | sup | skorokhod | hausdorff")->required();
    metrics->add_option("--tol", tol, "skorokhod bisection tolerance");
    metrics->add_option("--witness-out", witness_out, "time-change witness JSON (skorokhod)");
    metrics->callback([&]() { cmd_metrics(a, b, metric, tol, witness_out); });

    auto* diag = app.add_subcommand("diag", "noise envelope diagnostics over seeds");
    diag->add_option("--model", model_text, "noise model spec")->required();
    diag->add_option("--n", n, "series length")->required();
    diag->add_option("--seeds", seeds, "number of seeds")->required();
    diag->add_option("--out", out, "diagnostics CSV")->required();
    diag->callback([&]() { cmd_diag(model_text, n, seeds, out); });

    auto* experiment = app.add_subcommand("experiment", "run a configured experiment");
    experiment->add_option("--config", config_path, "TOML config")->required();
    experiment->add_option("--out", out, "report directory")->required();
    experiment->callback([&]() { cmd_experiment(config_path, out); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const jplse::InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
