// Experiment runner: label-rate sweeps over 5-fold cross validation with
// repeated labeled/unlabeled partitions, the five benchmark methods, paired
// significance tests against Co-Transfer, and record/trace/grid files.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cotr/dataset.hpp"

namespace cotr {

// Numeric ids feed seed derivation; they are frozen so extending the method
// list never changes existing runs' randomness.
enum class Method {
    DT = 0,
    TrAdaBoost = 1,
    TriTraining = 2,
    CoTransfer = 3,
    TrAdaBoostA = 4,
};

std::string to_string(Method m);
Method method_from_string(std::string_view name);

struct ExperimentConfig {
    std::string name;
    std::filesystem::path data_path;
    Schema schema;
    SplitRule split;
    std::vector<double> label_rates{0.10, 0.20, 0.40, 0.50};
    int folds = 5;
    int source_repeats = 2;
    int target_repeats = 3;
    int rounds = 10;  // boosting rounds N
    int depth = 10;   // base tree depth D
    std::vector<Method> methods{Method::DT, Method::TrAdaBoost,
                                Method::TriTraining, Method::CoTransfer,
                                Method::TrAdaBoostA};
    std::uint64_t master_seed = 1;
};

// JSON config; relative data paths resolve against the config's directory.
ExperimentConfig load_config(const std::filesystem::path& path);

struct ResultRecord {
    std::string dataset;
    double rate = 0.0;
    Method method = Method::DT;
    int fold = 0;
    int source_rep = 0;
    int target_rep = 0;
    double initial_error = 0.0;  // NaN for non-iterative methods
    double final_error = 0.0;
    std::size_t iterations = 0;  // 0 for non-iterative methods
    double wall_seconds = 0.0;
    bool failed = false;
    std::string message;  // failure reason
};

// Held-out error per iteration of one run; element 0 is the initial ensemble.
struct TraceRecord {
    std::string dataset;
    double rate = 0.0;
    Method method = Method::CoTransfer;
    int fold = 0;
    int source_rep = 0;
    int target_rep = 0;
    std::vector<double> errors;
};

struct ExperimentResults {
    std::vector<ResultRecord> records;
    std::vector<TraceRecord> traces;
};

// The data one (fold, source_rep, target_rep) cell feeds to a method.
struct RunInputs {
    EncodedDataset source_labeled;
    EncodedDataset source_unlabeled;
    EncodedDataset target_labeled;
    EncodedDataset target_unlabeled;
    EncodedDataset test;
    int rounds = 10;
    int depth = 10;
};

struct MethodOutcome {
    double initial_error = 0.0;  // NaN unless iterative
    double final_error = 0.0;
    std::size_t iterations = 0;  // 0 unless iterative
    std::vector<double> trace;   // empty unless iterative
};

// Table 2 data strategy: DT sees only the labeled target rows; TrAdaBoost
// adds the labeled source rows; tri-training adds the unlabeled target pool;
// Co-Transfer sees all four pools (unlabeled rows stay unlabeled); the
// TrAdaBoost_A oracle gets every pool with ground truth revealed.
MethodOutcome run_method(Method method, const RunInputs& in, std::uint64_t seed);

ExperimentResults run_experiment(const ExperimentConfig& cfg);

// (error of source-trained tree on target, error of target-trained tree on
// source).
std::pair<double, double> transferability(const EncodedDataset& source,
                                          const EncodedDataset& target,
                                          int depth);

enum class Significance { Better, Worse, NotSignificant };

struct TTestResult {
    Significance verdict = Significance::NotSignificant;
    double t = 0.0;
    double p = 1.0;
};

// Paired two-tailed t-test of a against b; Better means a's mean is lower
// and the difference is significant at alpha. Identical vectors are
// not-significant; a constant nonzero shift is significant by its sign.
TTestResult t_test(std::span<const double> a, std::span<const double> b,
                   double alpha = 0.05);

struct SummaryCell {
    Method method = Method::DT;
    std::size_t runs = 0;
    std::size_t failures = 0;
    double mean_initial = 0.0;     // NaN for non-iterative methods
    double mean_final = 0.0;
    double mean_iterations = 0.0;  // NaN for non-iterative methods
    std::optional<TTestResult> vs_cotransfer;
};

struct SummaryRow {
    std::string dataset;
    double rate = 0.0;
    std::vector<SummaryCell> cells;  // one per method present
};

std::vector<SummaryRow> summarize(const ExperimentResults& results);
std::string render_summary(const std::vector<SummaryRow>& rows);

void write_records_csv(const std::filesystem::path& path,
                       std::span<const ResultRecord> records);
std::vector<ResultRecord> read_records_csv(const std::filesystem::path& path);
void write_traces_csv(const std::filesystem::path& path,
                      std::span<const TraceRecord> traces);
std::vector<TraceRecord> read_traces_csv(const std::filesystem::path& path);

// Mean error per iteration index across runs; shorter runs contribute their
// final value to later indices (carry-forward padding).
std::vector<double> trace_export(std::span<const TraceRecord> traces);

struct SweepResult {
    std::vector<int> n_values;
    std::vector<int> d_values;
    std::vector<double> mean_final;  // row-major: n_values x d_values
    std::size_t failures = 0;

    double cell(std::size_t ni, std::size_t di) const {
        return mean_final[ni * d_values.size() + di];
    }
};

// Co-Transfer mean final error per (N, D), averaged over every label rate
// and run in the config.
SweepResult sweep(const ExperimentConfig& cfg, const std::vector<int>& n_list,
                  const std::vector<int>& d_list);
std::string render_sweep(const SweepResult& grid);
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& grid);

}  // namespace cotr
