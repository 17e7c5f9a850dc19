// Benchmark CLI: `run` executes the cross-validation protocol from a config
// file, `transferability` probes cross-domain tree error, `sweep` grids the
// (N, D) hyperparameters, `trace` aggregates per-iteration error series.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cotr/dataset.hpp"
#include "cotr/harness.hpp"
#include "cotr/tree.hpp"

namespace {

struct RunArgs {
    std::string config;
    std::string out_dir = "results";
    std::vector<double> rates;
    std::vector<std::string> methods;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

int cmd_run(const RunArgs& args) {
    cotr::ExperimentConfig cfg = cotr::load_config(args.config);
    if (!args.rates.empty()) cfg.label_rates = args.rates;
    if (!args.methods.empty()) {
        cfg.methods.clear();
        for (const std::string& m : args.methods) {
            cfg.methods.push_back(cotr::method_from_string(m));
        }
    }
    if (args.seed_given) cfg.master_seed = args.seed;

    const cotr::ExperimentResults results = cotr::run_experiment(cfg);

    const std::filesystem::path dir(args.out_dir);
    std::filesystem::create_directories(dir);
    cotr::write_records_csv(dir / (cfg.name + "_records.csv"), results.records);
    cotr::write_traces_csv(dir / (cfg.name + "_traces.csv"), results.traces);
    const std::string summary = cotr::render_summary(cotr::summarize(results));
    {
        std::ofstream out(dir / (cfg.name + "_summary.txt"));
        out << summary;
    }
    std::cout << summary;

    std::size_t failed = 0;
    for (const cotr::ResultRecord& r : results.records) {
        if (r.failed) {
            ++failed;
            std::cerr << "failed: " << r.dataset << " rate " << r.rate << " "
                      << cotr::to_string(r.method) << " fold " << r.fold << "."
                      << r.source_rep << "." << r.target_rep << ": " << r.message
                      << "\n";
        }
    }
    std::cout << results.records.size() << " runs, " << failed << " failed; "
              << "records in " << (dir / (cfg.name + "_records.csv")).string()
              << "\n";
    return failed == 0 ? 0 : 1;
}

int cmd_transferability(const std::string& config, int depth) {
    const cotr::ExperimentConfig cfg = cotr::load_config(config);
    const cotr::Dataset raw = cotr::load_csv(cfg.data_path, cfg.schema);
    const auto [source, target] = cotr::split_domains(raw, cfg.split);
    const auto [s_to_t, t_to_s] = cotr::transferability(
        cotr::encode(source), cotr::encode(target),
        depth > 0 ? depth : cotr::kUnboundedDepth);
    std::printf("source->target error: %.4f\n", s_to_t);
    std::printf("target->source error: %.4f\n", t_to_s);
    return 0;
}

int cmd_sweep(const std::string& config, const std::vector<int>& n_list,
              const std::vector<int>& d_list, const std::string& out) {
    const cotr::ExperimentConfig cfg = cotr::load_config(config);
    const cotr::SweepResult grid = cotr::sweep(cfg, n_list, d_list);
    std::cout << cotr::render_sweep(grid);
    if (!out.empty()) {
        cotr::write_sweep_csv(out, grid);
        std::cout << "grid written to " << out << "\n";
    }
    if (grid.failures > 0) {
        std::cerr << grid.failures << " runs failed\n";
        return 1;
    }
    return 0;
}

int cmd_trace(const std::string& traces_path, const std::string& dataset,
              const std::string& method, double rate, const std::string& out) {
    std::vector<cotr::TraceRecord> traces = cotr::read_traces_csv(traces_path);
    std::erase_if(traces, [&](const cotr::TraceRecord& t) {
        if (!dataset.empty() && t.dataset != dataset) return true;
        if (!method.empty() && t.method != cotr::method_from_string(method)) {
            return true;
        }
        if (rate >= 0.0 && t.rate != rate) return true;
        return false;
    });
    if (traces.empty()) {
        std::cerr << "no traces match the filter\n";
        return 1;
    }
    const std::vector<double> series = cotr::trace_export(traces);
    std::ostringstream body;
    body << "iteration,mean_error\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%zu,%.6f\n", i, series[i]);
        body << buf;
    }
    std::cout << body.str();
    if (!out.empty()) {
        std::ofstream f(out);
        f << body.str();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Co-Transfer benchmark runner"};
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "Run the benchmark protocol");
    run->add_option("--config", run_args.config, "Experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--out", run_args.out_dir,
                    "Directory for records/traces/summary files");
    run->add_option("--rates", run_args.rates, "Override label rates")
        ->delimiter(',');
    run->add_option("--methods", run_args.methods, "Override method list")
        ->delimiter(',');
    run->add_option("--seed", run_args.seed, "Override master seed")
        ->each([&run_args](const std::string&) { run_args.seed_given = true; });

    std::string transfer_config;
    int transfer_depth = 0;
    CLI::App* transfer = app.add_subcommand(
        "transferability", "Cross-domain error of single trees");
    transfer->add_option("--config", transfer_config, "Experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    transfer->add_option("--depth", transfer_depth,
                         "Tree depth (default: unbounded)");

    std::string sweep_config;
    std::string sweep_out;
    std::vector<int> n_list;
    std::vector<int> d_list;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Grid of Co-Transfer error over (N, D)");
    sweep_cmd->add_option("--config", sweep_config, "Experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sweep_cmd->add_option("--n-list", n_list, "Boosting round counts")
        ->required()
        ->delimiter(',');
    sweep_cmd->add_option("--d-list", d_list, "Tree depths")
        ->required()
        ->delimiter(',');
    sweep_cmd->add_option("--out", sweep_out, "CSV output path");

    std::string trace_path;
    std::string trace_dataset;
    std::string trace_method;
    std::string trace_out;
    double trace_rate = -1.0;
    CLI::App* trace =
        app.add_subcommand("trace", "Mean error per iteration across runs");
    trace->add_option("--traces", trace_path, "Traces CSV from a run")
        ->required()
        ->check(CLI::ExistingFile);
    trace->add_option("--dataset", trace_dataset, "Filter by dataset name");
    trace->add_option("--method", trace_method, "Filter by method");
    trace->add_option("--rate", trace_rate, "Filter by label rate");
    trace->add_option("--out", trace_out, "CSV output path");

    CLI11_PARSE(app, argc, argv);
    try {
        if (run->parsed()) return cmd_run(run_args);
        if (transfer->parsed()) {
            return cmd_transferability(transfer_config, transfer_depth);
        }
        if (sweep_cmd->parsed()) {
            return cmd_sweep(sweep_config, n_list, d_list, sweep_out);
        }
        if (trace->parsed()) {
            return cmd_trace(trace_path, trace_dataset, trace_method, trace_rate,
                             trace_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
