#include "cotr/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include "cotr/cotransfer.hpp"
#include "cotr/rng.hpp"
#include "cotr/tradaboost.hpp"
#include "cotr/tree.hpp"
#include "cotr/tritraining.hpp"

namespace cotr {

namespace {

constexpr std::uint64_t kTagFold = 101;
constexpr std::uint64_t kTagSourcePartition = 102;
constexpr std::uint64_t kTagTargetPartition = 103;
constexpr std::uint64_t kTagRun = 104;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_cell(double v, int width, int precision) {
    char buf[40];
    if (std::isnan(v)) {
        std::snprintf(buf, sizeof(buf), "%*s", width, "-");
    } else {
        std::snprintf(buf, sizeof(buf), "%*.*f", width, precision, v);
    }
    return buf;
}

template <typename Model>
double test_error(const Model& model, const EncodedDataset& test) {
    if (test.size() == 0) {
        throw std::invalid_argument("test_error: empty test set");
    }
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        if (model.predict(test.row(i)) != test.labels[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(test.size());
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (const char c : line) {
        if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    cells.push_back(cell);
    return cells;
}

std::string sanitize_message(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

}  // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::DT: return "DT";
        case Method::TrAdaBoost: return "TrAdaBoost";
        case Method::TriTraining: return "TriTraining";
        case Method::CoTransfer: return "CoTransfer";
        case Method::TrAdaBoostA: return "TrAdaBoostA";
    }
    throw std::invalid_argument("unknown method id");
}

Method method_from_string(std::string_view name) {
    if (name == "DT") return Method::DT;
    if (name == "TrAdaBoost") return Method::TrAdaBoost;
    if (name == "TriTraining" || name == "Tri-training") return Method::TriTraining;
    if (name == "CoTransfer" || name == "Co-Transfer") return Method::CoTransfer;
    if (name == "TrAdaBoostA" || name == "TrAdaBoost_A") return Method::TrAdaBoostA;
    throw std::invalid_argument("unknown method: " + std::string(name));
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config: " + path.string());
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("config " + path.string() + ": " + e.what());
    }

    ExperimentConfig cfg;
    cfg.name = j.at("name").get<std::string>();
    std::filesystem::path data = j.at("data").get<std::string>();
    if (data.is_relative()) data = path.parent_path() / data;
    cfg.data_path = data;

    cfg.schema.label_name = j.at("label").get<std::string>();
    for (const auto& a : j.at("attributes")) {
        Attribute attr;
        attr.name = a.at("name").get<std::string>();
        const std::string kind = a.value("kind", std::string("numeric"));
        if (kind == "numeric") {
            attr.kind = AttrKind::Numeric;
        } else if (kind == "categorical") {
            attr.kind = AttrKind::Categorical;
            attr.values = a.at("values").get<std::vector<std::string>>();
        } else {
            throw std::runtime_error("config: attribute '" + attr.name +
                                     "' has unknown kind '" + kind + "'");
        }
        cfg.schema.attributes.push_back(std::move(attr));
    }

    const auto& s = j.at("split");
    cfg.split.attribute = s.at("attribute").get<std::string>();
    cfg.split.op = s.value("op", std::string("=="));
    const auto& v = s.at("value");
    cfg.split.value = v.is_string() ? v.get<std::string>() : v.dump();
    cfg.split.drop_attribute = s.value("drop", true);

    if (j.contains("label_rates")) {
        cfg.label_rates = j.at("label_rates").get<std::vector<double>>();
    }
    cfg.folds = j.value("folds", 5);
    cfg.source_repeats = j.value("source_repeats", 2);
    cfg.target_repeats = j.value("target_repeats", 3);
    cfg.rounds = j.value("rounds", 10);
    cfg.depth = j.value("depth", 10);
    if (j.contains("methods")) {
        cfg.methods.clear();
        for (const auto& m : j.at("methods")) {
            cfg.methods.push_back(method_from_string(m.get<std::string>()));
        }
    }
    cfg.master_seed = j.value("seed", std::uint64_t{1});

    if (cfg.folds < 2) throw std::runtime_error("config: folds must be >= 2");
    if (cfg.source_repeats < 1 || cfg.target_repeats < 1) {
        throw std::runtime_error("config: repeats must be >= 1");
    }
    if (cfg.rounds < 1 || cfg.depth < 1) {
        throw std::runtime_error("config: rounds and depth must be >= 1");
    }
    if (cfg.label_rates.empty()) {
        throw std::runtime_error("config: label_rates must be nonempty");
    }
    for (const double r : cfg.label_rates) {
        if (!(r > 0.0 && r < 1.0)) {
            throw std::runtime_error("config: label rates must lie in (0, 1)");
        }
    }
    if (cfg.methods.empty()) {
        throw std::runtime_error("config: method list must be nonempty");
    }
    return cfg;
}

MethodOutcome run_method(Method method, const RunInputs& in, std::uint64_t seed) {
    MethodOutcome out;
    out.initial_error = kNaN;
    switch (method) {
        case Method::DT: {
            const TreeModel tree = fit_tree(in.target_labeled, kUnboundedDepth);
            out.final_error = test_error(tree, in.test);
            break;
        }
        case Method::TrAdaBoost: {
            const TrAdaBoostModel model = fit_tradaboost(
                in.source_labeled, in.target_labeled, in.rounds, in.depth);
            out.final_error = test_error(model, in.test);
            break;
        }
        case Method::TriTraining: {
            const TriRun run = fit_tritraining(in.target_labeled,
                                               in.target_unlabeled, seed,
                                               &in.test);
            out.initial_error = run.initial_holdout_error;
            out.final_error = run.trace.back().holdout_error;
            out.iterations = run.model.iterations;
            out.trace.push_back(run.initial_holdout_error);
            for (const TriIterationTrace& t : run.trace) {
                out.trace.push_back(t.holdout_error);
            }
            break;
        }
        case Method::CoTransfer: {
            DomainPair pair;
            pair.labeled = {in.source_labeled, in.target_labeled};
            pair.unlabeled = {in.source_unlabeled, in.target_unlabeled};
            CoTransferOptions options;
            options.rounds = in.rounds;
            options.depth = in.depth;
            CoTransferEval eval;
            eval.test[1] = &in.test;
            const CoTransferRun run = fit_cotransfer(pair, options, seed, &eval);
            out.initial_error = run.initial_holdout_error[1];
            out.final_error = run.trace.back().holdout_error[1];
            out.iterations = run.state.iterations;
            out.trace.push_back(run.initial_holdout_error[1]);
            for (const CoTransferRoundTrace& t : run.trace) {
                out.trace.push_back(t.holdout_error[1]);
            }
            break;
        }
        case Method::TrAdaBoostA: {
            const EncodedDataset source = EncodedDataset::concat(
                in.source_labeled, in.source_unlabeled.unsealed());
            const EncodedDataset target = EncodedDataset::concat(
                in.target_labeled, in.target_unlabeled.unsealed());
            const TrAdaBoostModel model =
                fit_tradaboost(source, target, in.rounds, in.depth);
            out.final_error = test_error(model, in.test);
            break;
        }
    }
    return out;
}

ExperimentResults run_experiment(const ExperimentConfig& cfg) {
    const Dataset raw = load_csv(cfg.data_path, cfg.schema);
    const auto [source_raw, target_raw] = split_domains(raw, cfg.split);
    const auto folds =
        kfold(target_raw, cfg.folds, derive_seed(cfg.master_seed, {kTagFold}));

    ExperimentResults out;
    for (std::size_t ri = 0; ri < cfg.label_rates.size(); ++ri) {
        const double rate = cfg.label_rates[ri];
        for (int f = 0; f < cfg.folds; ++f) {
            const auto& [target_train, target_test] = folds[f];
            const EncodedDataset test = encode(target_test);

            std::vector<std::pair<EncodedDataset, EncodedDataset>> source_parts;
            for (int sr = 0; sr < cfg.source_repeats; ++sr) {
                const auto [dsl, dsu] = partition_label_rate(
                    source_raw, rate,
                    derive_seed(cfg.master_seed, {kTagSourcePartition, ri,
                                                  static_cast<std::uint64_t>(f),
                                                  static_cast<std::uint64_t>(sr)}));
                source_parts.emplace_back(encode(dsl), encode(dsu));
            }
            std::vector<std::pair<EncodedDataset, EncodedDataset>> target_parts;
            for (int tr = 0; tr < cfg.target_repeats; ++tr) {
                const auto [dtl, dtu] = partition_label_rate(
                    target_train, rate,
                    derive_seed(cfg.master_seed, {kTagTargetPartition, ri,
                                                  static_cast<std::uint64_t>(f),
                                                  static_cast<std::uint64_t>(tr)}));
                target_parts.emplace_back(encode(dtl), encode(dtu));
            }

            for (int sr = 0; sr < cfg.source_repeats; ++sr) {
                for (int tr = 0; tr < cfg.target_repeats; ++tr) {
                    RunInputs in;
                    in.source_labeled = source_parts[sr].first;
                    in.source_unlabeled = source_parts[sr].second;
                    in.target_labeled = target_parts[tr].first;
                    in.target_unlabeled = target_parts[tr].second;
                    in.test = test;
                    in.rounds = cfg.rounds;
                    in.depth = cfg.depth;

                    for (const Method method : cfg.methods) {
                        ResultRecord rec;
                        rec.dataset = cfg.name;
                        rec.rate = rate;
                        rec.method = method;
                        rec.fold = f;
                        rec.source_rep = sr;
                        rec.target_rep = tr;
                        rec.initial_error = kNaN;

                        const std::uint64_t seed = derive_seed(
                            cfg.master_seed,
                            {kTagRun, ri, static_cast<std::uint64_t>(f),
                             static_cast<std::uint64_t>(sr),
                             static_cast<std::uint64_t>(tr),
                             static_cast<std::uint64_t>(method)});
                        const auto t0 = std::chrono::steady_clock::now();
                        try {
                            const MethodOutcome o = run_method(method, in, seed);
                            rec.initial_error = o.initial_error;
                            rec.final_error = o.final_error;
                            rec.iterations = o.iterations;
                            if (!o.trace.empty()) {
                                TraceRecord tr_rec;
                                tr_rec.dataset = cfg.name;
                                tr_rec.rate = rate;
                                tr_rec.method = method;
                                tr_rec.fold = f;
                                tr_rec.source_rep = sr;
                                tr_rec.target_rep = tr;
                                tr_rec.errors = o.trace;
                                out.traces.push_back(std::move(tr_rec));
                            }
                        } catch (const std::exception& e) {
                            rec.failed = true;
                            rec.message = e.what();
                            rec.final_error = kNaN;
                        }
                        rec.wall_seconds =
                            std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
                        out.records.push_back(std::move(rec));
                    }
                }
            }
        }
    }
    return out;
}

std::pair<double, double> transferability(const EncodedDataset& source,
                                          const EncodedDataset& target,
                                          int depth) {
    for (const EncodedDataset* d : {&source, &target}) {
        for (const int y : d->labels) {
            if (y == kNoLabel) {
                throw std::invalid_argument(
                    "transferability: both sets must be fully labeled");
            }
        }
    }
    const TreeModel on_source = fit_tree(source, depth);
    const TreeModel on_target = fit_tree(target, depth);
    return {test_error(on_source, target), test_error(on_target, source)};
}

TTestResult t_test(std::span<const double> a, std::span<const double> b,
                   double alpha) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("t_test: length mismatch");
    }
    const std::size_t n = a.size();
    if (n < 2) throw std::invalid_argument("t_test: need at least 2 pairs");

    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i] - mean;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(n - 1);

    TTestResult res;
    if (var == 0.0) {
        if (mean == 0.0) return res;  // identical vectors: not significant
        res.t = mean < 0.0 ? -std::numeric_limits<double>::infinity()
                           : std::numeric_limits<double>::infinity();
        res.p = 0.0;
        res.verdict = mean < 0.0 ? Significance::Better : Significance::Worse;
        return res;
    }
    res.t = mean / std::sqrt(var / static_cast<double>(n));
    const boost::math::students_t dist(static_cast<double>(n - 1));
    res.p = 2.0 * boost::math::cdf(dist, -std::abs(res.t));
    if (res.p < alpha) {
        res.verdict = mean < 0.0 ? Significance::Better : Significance::Worse;
    }
    return res;
}

std::vector<SummaryRow> summarize(const ExperimentResults& results) {
    using GroupKey = std::pair<std::string, double>;  // (dataset, rate)
    using RunKey = std::tuple<int, int, int>;         // (fold, source, target)
    struct CellData {
        std::map<RunKey, double> finals;
        std::vector<double> initials;
        std::vector<double> iterations;
        std::size_t runs = 0;
        std::size_t failures = 0;
    };
    std::vector<GroupKey> group_order;
    std::map<GroupKey, std::map<Method, CellData>> cells;
    std::map<GroupKey, std::vector<Method>> method_order;

    for (const ResultRecord& r : results.records) {
        const GroupKey key{r.dataset, r.rate};
        auto& by_method = cells[key];
        if (by_method.empty()) group_order.push_back(key);
        if (!by_method.count(r.method)) method_order[key].push_back(r.method);
        CellData& cell = by_method[r.method];
        ++cell.runs;
        if (r.failed) {
            ++cell.failures;
            continue;
        }
        cell.finals[{r.fold, r.source_rep, r.target_rep}] = r.final_error;
        if (!std::isnan(r.initial_error)) cell.initials.push_back(r.initial_error);
        if (r.iterations > 0) {
            cell.iterations.push_back(static_cast<double>(r.iterations));
        }
    }

    auto mean_of = [](const std::vector<double>& v) {
        if (v.empty()) return kNaN;
        double s = 0.0;
        for (const double x : v) s += x;
        return s / static_cast<double>(v.size());
    };

    std::vector<SummaryRow> rows;
    for (const GroupKey& key : group_order) {
        SummaryRow row;
        row.dataset = key.first;
        row.rate = key.second;
        const auto& by_method = cells[key];
        const CellData* cot = nullptr;
        if (auto it = by_method.find(Method::CoTransfer); it != by_method.end()) {
            cot = &it->second;
        }
        for (const Method m : method_order[key]) {
            const CellData& cell = by_method.at(m);
            SummaryCell sc;
            sc.method = m;
            sc.runs = cell.runs;
            sc.failures = cell.failures;
            sc.mean_initial = mean_of(cell.initials);
            sc.mean_iterations = mean_of(cell.iterations);
            std::vector<double> finals;
            for (const auto& [rk, v] : cell.finals) finals.push_back(v);
            sc.mean_final = mean_of(finals);
            // Pair Co-Transfer against the baseline on matched runs.
            if (m != Method::CoTransfer && cot != nullptr) {
                std::vector<double> va;
                std::vector<double> vb;
                for (const auto& [rk, v] : cot->finals) {
                    if (auto it = cell.finals.find(rk); it != cell.finals.end()) {
                        va.push_back(v);
                        vb.push_back(it->second);
                    }
                }
                if (va.size() >= 2) sc.vs_cotransfer = t_test(va, vb);
            }
            row.cells.push_back(std::move(sc));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string render_summary(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    out << "dataset          rate   method        runs  initial    final     iter"
           "   vs Co-Transfer\n";
    out << std::string(88, '-') << "\n";
    for (const SummaryRow& row : rows) {
        for (const SummaryCell& c : row.cells) {
            char head[64];
            std::snprintf(head, sizeof(head), "%-16s %.2f   %-12s %5zu",
                          row.dataset.c_str(), row.rate,
                          to_string(c.method).c_str(), c.runs);
            out << head;
            out << fmt_cell(c.mean_initial, 9, 4) << fmt_cell(c.mean_final, 9, 4)
                << fmt_cell(c.mean_iterations, 9, 2);
            if (c.vs_cotransfer) {
                const char* marker =
                    c.vs_cotransfer->verdict == Significance::Better   ? "•"
                    : c.vs_cotransfer->verdict == Significance::Worse ? "◦"
                                                                      : "★";
                char tail[48];
                std::snprintf(tail, sizeof(tail), "   %s (p=%.4f)", marker,
                              c.vs_cotransfer->p);
                out << tail;
            }
            if (c.failures > 0) out << "   [" << c.failures << " failed]";
            out << "\n";
        }
        out << "\n";
    }
    return out.str();
}

void write_records_csv(const std::filesystem::path& path,
                       std::span<const ResultRecord> records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "dataset,rate,method,fold,source_rep,target_rep,initial_error,"
           "final_error,iterations,wall_seconds,failed,message\n";
    for (const ResultRecord& r : records) {
        out << r.dataset << ',' << fmt_double(r.rate) << ',' << to_string(r.method)
            << ',' << r.fold << ',' << r.source_rep << ',' << r.target_rep << ',';
        if (!std::isnan(r.initial_error)) out << fmt_double(r.initial_error);
        out << ',';
        if (!std::isnan(r.final_error)) out << fmt_double(r.final_error);
        out << ',';
        if (r.iterations > 0) out << r.iterations;
        out << ',' << fmt_double(r.wall_seconds) << ',' << (r.failed ? 1 : 0)
            << ',' << sanitize_message(r.message) << '\n';
    }
}

std::vector<ResultRecord> read_records_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::vector<ResultRecord> records;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        const std::vector<std::string> c = split_csv_line(line);
        if (c.size() != 12) {
            throw std::runtime_error("records csv: malformed line: " + line);
        }
        ResultRecord r;
        r.dataset = c[0];
        r.rate = std::stod(c[1]);
        r.method = method_from_string(c[2]);
        r.fold = std::stoi(c[3]);
        r.source_rep = std::stoi(c[4]);
        r.target_rep = std::stoi(c[5]);
        r.initial_error = c[6].empty() ? kNaN : std::stod(c[6]);
        r.final_error = c[7].empty() ? kNaN : std::stod(c[7]);
        r.iterations = c[8].empty() ? 0 : std::stoul(c[8]);
        r.wall_seconds = std::stod(c[9]);
        r.failed = c[10] == "1";
        r.message = c[11];
        records.push_back(std::move(r));
    }
    return records;
}

void write_traces_csv(const std::filesystem::path& path,
                      std::span<const TraceRecord> traces) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "dataset,rate,method,fold,source_rep,target_rep,series\n";
    for (const TraceRecord& t : traces) {
        out << t.dataset << ',' << fmt_double(t.rate) << ',' << to_string(t.method)
            << ',' << t.fold << ',' << t.source_rep << ',' << t.target_rep << ',';
        for (std::size_t i = 0; i < t.errors.size(); ++i) {
            if (i > 0) out << ';';
            out << fmt_double(t.errors[i]);
        }
        out << '\n';
    }
}

std::vector<TraceRecord> read_traces_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::vector<TraceRecord> traces;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        const std::vector<std::string> c = split_csv_line(line);
        if (c.size() != 7) {
            throw std::runtime_error("traces csv: malformed line: " + line);
        }
        TraceRecord t;
        t.dataset = c[0];
        t.rate = std::stod(c[1]);
        t.method = method_from_string(c[2]);
        t.fold = std::stoi(c[3]);
        t.source_rep = std::stoi(c[4]);
        t.target_rep = std::stoi(c[5]);
        std::istringstream series(c[6]);
        std::string cell;
        while (std::getline(series, cell, ';')) {
            t.errors.push_back(std::stod(cell));
        }
        traces.push_back(std::move(t));
    }
    return traces;
}

std::vector<double> trace_export(std::span<const TraceRecord> traces) {
    std::size_t longest = 0;
    for (const TraceRecord& t : traces) {
        longest = std::max(longest, t.errors.size());
    }
    std::vector<double> means(longest, 0.0);
    for (std::size_t i = 0; i < longest; ++i) {
        double sum = 0.0;
        for (const TraceRecord& t : traces) {
            sum += t.errors[std::min(i, t.errors.size() - 1)];
        }
        means[i] = sum / static_cast<double>(traces.size());
    }
    return means;
}

SweepResult sweep(const ExperimentConfig& cfg, const std::vector<int>& n_list,
                  const std::vector<int>& d_list) {
    if (n_list.empty() || d_list.empty()) {
        throw std::invalid_argument("sweep: empty N or D list");
    }
    SweepResult grid;
    grid.n_values = n_list;
    grid.d_values = d_list;
    for (const int n : n_list) {
        for (const int d : d_list) {
            ExperimentConfig point = cfg;
            point.rounds = n;
            point.depth = d;
            point.methods = {Method::CoTransfer};
            const ExperimentResults results = run_experiment(point);
            double sum = 0.0;
            std::size_t count = 0;
            for (const ResultRecord& r : results.records) {
                if (r.failed) {
                    ++grid.failures;
                    continue;
                }
                sum += r.final_error;
                ++count;
            }
            grid.mean_final.push_back(
                count == 0 ? kNaN : sum / static_cast<double>(count));
        }
    }
    return grid;
}

std::string render_sweep(const SweepResult& grid) {
    std::ostringstream out;
    out << "     N\\D";
    for (const int d : grid.d_values) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%9d", d);
        out << buf;
    }
    out << "\n";
    for (std::size_t ni = 0; ni < grid.n_values.size(); ++ni) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%8d", grid.n_values[ni]);
        out << buf;
        for (std::size_t di = 0; di < grid.d_values.size(); ++di) {
            out << fmt_cell(grid.cell(ni, di), 9, 4);
        }
        out << "\n";
    }
    return out.str();
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& grid) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "N,D,mean_final\n";
    for (std::size_t ni = 0; ni < grid.n_values.size(); ++ni) {
        for (std::size_t di = 0; di < grid.d_values.size(); ++di) {
            out << grid.n_values[ni] << ',' << grid.d_values[di] << ','
                << fmt_double(grid.cell(ni, di)) << '\n';
        }
    }
}

}  // namespace cotr
