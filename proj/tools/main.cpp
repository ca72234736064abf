#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "celltraj/heatmap.hpp"
#include "celltraj/pipeline.hpp"
#include "celltraj/report.hpp"
#include "celltraj/simulation.hpp"

namespace {

using namespace celltraj;

std::vector<int> parse_changes(const std::string& text) {
    std::vector<int> out;
    if (text.empty() || text == "none") return out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        int value = 0;
        const char* first = tok.data();
        const char* last = tok.data() + tok.size();
        auto res = std::from_chars(first, last, value);
        if (tok.empty() || res.ec != std::errc() || res.ptr != last) {
            throw ConfigError("cannot parse change time '" + tok +
                              "' in --changes (expected comma-separated integers or 'none')");
        }
        out.push_back(value);
    }
    return out;
}

std::string shortest(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string truth_path_for(const std::string& out_path) {
    const std::filesystem::path p(out_path);
    std::filesystem::path sidecar = p;
    sidecar.replace_extension(".truth.json");
    if (sidecar == p) sidecar += ".truth.json";
    return sidecar.string();
}

void write_sim_dataset(const SampledRun& run, const SimConfig& cfg, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot open output file for writing: " + path);
    }
    out << "time,cell_type";
    for (int g = 0; g < cfg.genes; ++g) out << ",g" << g + 1;
    out << '\n';
    for (int t = 0; t <= cfg.horizon; ++t) {
        for (int i = 0; i < cfg.cells; ++i) {
            const Eigen::Index row = static_cast<Eigen::Index>(t) * cfg.cells + i;
            out << t << ",type" << run.labels[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] + 1;
            for (int g = 0; g < cfg.genes; ++g) out << ',' << shortest(run.pooled_expr(row, g));
            out << '\n';
        }
    }
    if (!out) {
        throw InputError("failed while writing: " + path);
    }
}

std::string format_detected(const std::vector<int>& detected) {
    if (detected.empty()) return "none";
    std::ostringstream os;
    for (std::size_t i = 0; i < detected.size(); ++i) {
        if (i > 0) os << ' ';
        os << detected[i];
    }
    return os.str();
}

int cmd_analyze(const std::string& input, const std::string& out_dir,
                const AnalysisOptions& opt) {
    const Dataset ds = parse_dataset(input);
    for (const std::string& w : ds.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "parsed " << ds.num_records() << " cells, " << ds.num_types() << " types, "
              << ds.num_times() << " time points\n";

    const AnalysisReport report = analyze_dataset(ds, opt);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw InputError("cannot create output directory " + out_dir + ": " + ec.message());
    }

    const std::vector<Marginal> marginals = empirical_marginals(ds);
    for (const PairRecord& rec : report.pairs) {
        char name[32];
        std::snprintf(name, sizeof(name), "pair_%03d.svg", rec.t);
        const TransportPlan plan(rec.plan,
                                 smooth(marginals[static_cast<std::size_t>(rec.t)],
                                        opt.smooth_delta),
                                 marginals[static_cast<std::size_t>(rec.t) + 1]);
        write_heatmap(plan, report.type_labels,
                      (std::filesystem::path(out_dir) / name).string());
    }

    const std::string report_path = (std::filesystem::path(out_dir) / "report.json").string();
    write_analysis_report(report, report_path);

    std::cout << "detected change points: " << format_detected(report.detected) << '\n';
    std::cout << "report: " << report_path << '\n';
    std::cout << "heatmaps: " << report.pairs.size() << " files in " << out_dir << '\n';
    return 0;
}

int cmd_simulate(const SimConfig& cfg, const std::string& out_path) {
    const SimTruth truth = generate_truth(cfg, SolverConfig{});
    const SampledRun run = sample_run(truth.marginals, cfg, 0);
    write_sim_dataset(run, cfg, out_path);
    const std::string sidecar = truth_path_for(out_path);
    write_truth(truth, cfg, sidecar);
    std::cout << "dataset: " << out_path << " (" << (cfg.horizon + 1) * cfg.cells
              << " rows, " << cfg.genes << " features)\n";
    std::cout << "truth: " << sidecar << '\n';
    return 0;
}

int cmd_bench(const BenchConfig& cfg, const std::string& out_path) {
    const BenchmarkReport report = run_benchmark(cfg);
    write_benchmark_report(report, out_path);

    char buf[256];
    std::cout << "runs: " << cfg.runs << '\n';
    if (!cfg.sim.change_times.empty()) {
        std::snprintf(buf, sizeof(buf), "mean F-score: %.6g (se %.6g)\n", report.mean_f,
                      report.se_f);
        std::cout << buf;
        std::snprintf(buf, sizeof(buf), "mean precision: %.6g, mean recall: %.6g\n",
                      report.mean_precision, report.mean_recall);
        std::cout << buf;
        std::snprintf(buf, sizeof(buf), "mean plan error at changes: %.6g (se %.6g)\n",
                      report.mean_err_change, report.se_err_change);
        std::cout << buf;
    }
    std::snprintf(buf, sizeof(buf), "mean plan error elsewhere: %.6g (se %.6g)\n",
                  report.mean_err_nonchange, report.se_err_nonchange);
    std::cout << buf;
    std::cout << "runs with no detection: " << report.runs_with_no_detection << '\n';
    if (report.single_run) {
        std::cout << "single run: standard errors are zero by construction\n";
    }
    std::cout << "report: " << out_path << '\n';
    return 0;
}

int cmd_eval(const std::string& truth_path, const std::string& detected_path) {
    const std::set<int> truth = read_change_set(truth_path);
    const std::set<int> detected = read_change_set(detected_path);
    const DetectionMetrics m = score_detection(truth, detected);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "precision: %.6g\nrecall: %.6g\nf_score: %.6g\n",
                  m.precision, m.recall, m.f_score);
    std::cout << buf;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cell-type trajectory coupling and change-point detection"};
    app.require_subcommand(1);

    int threads = 1;
    app.add_option("--threads", threads, "worker thread cap for pair solves and runs")
        ->capture_default_str();

    AnalysisOptions opt;
    std::string input, analyze_out;
    CLI::App* analyze = app.add_subcommand("analyze", "run the full pipeline on a dataset");
    analyze->add_option("--input", input, "dataset file: time, cell_type, features")
        ->required();
    analyze->add_option("--out", analyze_out, "output directory (report.json + heatmaps)")
        ->required();
    analyze->add_option("--lambda", opt.solver.lambda, "row-marginal KL penalty weight")
        ->capture_default_str();
    analyze
        ->add_option("--epsilon-scale", opt.solver.epsilon_scale,
                     "entropic epsilon relative to the largest cost entry")
        ->capture_default_str();
    analyze->add_option("--delta", opt.smooth_delta, "source smoothing before each solve")
        ->capture_default_str();
    analyze->add_option("--window", opt.window, "peak window half-width")
        ->capture_default_str();
    analyze
        ->add_option("--threshold-k", opt.threshold_k,
                     "detection threshold in MAD multiples above the median")
        ->capture_default_str();

    SimConfig sim;
    std::string sim_changes = "10,20,30,40";
    std::string sim_sine = sine_form_name(sim.sine_form);
    std::string sim_out;
    CLI::App* simulate =
        app.add_subcommand("simulate", "generate a synthetic dataset plus a truth sidecar");
    simulate->add_option("--d", sim.d, "cell types")->capture_default_str();
    simulate->add_option("--t", sim.horizon, "time horizon T (time points 0..T)")
        ->capture_default_str();
    simulate->add_option("--g", sim.genes, "genes per cell")->capture_default_str();
    simulate->add_option("--n", sim.cells, "cells per time point")->capture_default_str();
    simulate->add_option("--nu", sim.nu, "growth amplitude")->capture_default_str();
    simulate->add_option("--eta", sim.eta, "change magnitude")->capture_default_str();
    simulate->add_option("--changes", sim_changes, "change times, comma-separated or 'none'")
        ->capture_default_str();
    simulate->add_option("--seed", sim.seed, "root RNG seed")->capture_default_str();
    simulate->add_option("--sine-form", sim_sine, "growth sine grouping: pi-inside | pi-outside")
        ->capture_default_str();
    simulate->add_option("--out", sim_out, "dataset path; truth goes next to it")->required();

    BenchConfig bench_cfg;
    std::string bench_changes = "10,20,30,40";
    std::string bench_sine = sine_form_name(bench_cfg.sim.sine_form);
    std::string bench_reducer = reducer_name(bench_cfg.sim.reducer);
    std::string bench_out;
    CLI::App* bench = app.add_subcommand("bench", "Monte Carlo estimation benchmark");
    bench->add_option("--runs", bench_cfg.runs, "Monte Carlo runs")->capture_default_str();
    bench->add_option("--d", bench_cfg.sim.d, "cell types")->capture_default_str();
    bench->add_option("--t", bench_cfg.sim.horizon, "time horizon T")->capture_default_str();
    bench->add_option("--g", bench_cfg.sim.genes, "genes per cell")->capture_default_str();
    bench->add_option("--n", bench_cfg.sim.cells, "cells per time point")->capture_default_str();
    bench->add_option("--nu", bench_cfg.sim.nu, "growth amplitude")->capture_default_str();
    bench->add_option("--eta", bench_cfg.sim.eta, "change magnitude")->capture_default_str();
    bench->add_option("--changes", bench_changes, "change times, comma-separated or 'none'")
        ->capture_default_str();
    bench->add_option("--seed", bench_cfg.sim.seed, "root RNG seed")->capture_default_str();
    bench->add_option("--sine-form", bench_sine, "growth sine grouping: pi-inside | pi-outside")
        ->capture_default_str();
    bench
        ->add_option("--reducer", bench_reducer,
                     "feature reduction before centroids: principal-axes | identity")
        ->capture_default_str();
    bench->add_option("--lambda", bench_cfg.solver.lambda, "row-marginal KL penalty weight")
        ->capture_default_str();
    bench
        ->add_option("--epsilon-scale", bench_cfg.solver.epsilon_scale,
                     "entropic epsilon relative to the largest cost entry")
        ->capture_default_str();
    bench->add_option("--delta", bench_cfg.smooth_delta, "source smoothing before each solve")
        ->capture_default_str();
    bench->add_option("--window", bench_cfg.window, "peak window half-width")
        ->capture_default_str();
    bench
        ->add_option("--threshold-k", bench_cfg.threshold_k,
                     "detection threshold in MAD multiples above the median")
        ->capture_default_str();
    bench->add_option("--out", bench_out, "benchmark report path")->required();

    std::string truth_path, detected_path;
    CLI::App* eval = app.add_subcommand("eval", "score detected change points against truth");
    eval->add_option("--truth", truth_path, "truth sidecar or report with change_times")
        ->required();
    eval->add_option("--detected", detected_path, "analysis report or file with detected")
        ->required();

    // global options stay usable after the subcommand name
    for (CLI::App* sub : {analyze, simulate, bench, eval}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 4;  // bad flags are configuration errors
    }

    try {
        if (analyze->parsed()) {
            opt.threads = threads;
            return cmd_analyze(input, analyze_out, opt);
        }
        if (simulate->parsed()) {
            sim.change_times = parse_changes(sim_changes);
            sim.sine_form = parse_sine_form(sim_sine);
            return cmd_simulate(sim, sim_out);
        }
        if (bench->parsed()) {
            bench_cfg.sim.change_times = parse_changes(bench_changes);
            bench_cfg.sim.sine_form = parse_sine_form(bench_sine);
            bench_cfg.sim.reducer = parse_reducer(bench_reducer);
            bench_cfg.threads = threads;
            return cmd_bench(bench_cfg, bench_out);
        }
        return cmd_eval(truth_path, detected_path);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << '\n';
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
