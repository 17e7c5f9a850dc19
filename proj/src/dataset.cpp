#include "cotr/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cotr/rng.hpp"

namespace cotr {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim surrounding whitespace and a trailing CR
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_numeric(const std::string& cell, std::size_t row, const std::string& col) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        fail("row " + std::to_string(row) + ", column '" + col +
             "': cannot parse numeric value '" + cell + "'");
    }
}

int vocab_index(const Attribute& attr, const std::string& cell, std::size_t row) {
    const auto it = std::find(attr.values.begin(), attr.values.end(), cell);
    if (it == attr.values.end()) {
        fail("row " + std::to_string(row) + ", column '" + attr.name +
             "': unknown categorical value '" + cell + "'");
    }
    return static_cast<int>(it - attr.values.begin());
}

}  // namespace

int Schema::attribute_index(std::string_view name) const {
    for (std::size_t i = 0; i < attributes.size(); ++i) {
        if (attributes[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

std::size_t Schema::encoded_width() const {
    std::size_t w = 0;
    for (const auto& a : attributes) {
        w += a.kind == AttrKind::Numeric ? 1 : a.values.size();
    }
    return w;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset out;
    out.schema = schema;
    out.rows.reserve(indices.size());
    out.labels.reserve(indices.size());
    std::vector<int> sealed_vals;
    sealed_vals.reserve(indices.size());
    const bool have_sealed = !sealed.empty();
    for (const std::size_t i : indices) {
        out.rows.push_back(rows[i]);
        out.labels.push_back(labels[i]);
        if (have_sealed) sealed_vals.push_back(sealed.reveal()[i]);
    }
    if (have_sealed) out.sealed = SealedLabels(std::move(sealed_vals));
    return out;
}

bool EncodedDataset::has_both_classes() const {
    bool c0 = false, c1 = false;
    for (const int y : labels) {
        c0 |= y == 0;
        c1 |= y == 1;
    }
    return c0 && c1;
}

EncodedDataset EncodedDataset::unsealed() const {
    EncodedDataset out = *this;
    for (std::size_t i = 0; i < out.labels.size(); ++i) {
        if (out.labels[i] == kNoLabel) {
            if (sealed.empty() || sealed.reveal()[i] == kNoLabel) {
                fail("unsealed(): row " + std::to_string(i) + " has no ground-truth label");
            }
            out.labels[i] = sealed.reveal()[i];
        }
    }
    return out;
}

EncodedDataset EncodedDataset::concat(const EncodedDataset& a, const EncodedDataset& b) {
    if (a.cols != b.cols && a.size() != 0 && b.size() != 0) {
        fail("concat: column count mismatch (" + std::to_string(a.cols) + " vs " +
             std::to_string(b.cols) + ")");
    }
    EncodedDataset out;
    out.cols = a.size() != 0 ? a.cols : b.cols;
    out.values = a.values;
    out.values.insert(out.values.end(), b.values.begin(), b.values.end());
    out.labels = a.labels;
    out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
    // sealed ground truth is not carried through concatenation
    return out;
}

Dataset load_csv(const std::filesystem::path& path, const Schema& schema) {
    std::ifstream in(path);
    if (!in) fail("cannot open file: " + path.string());

    std::string line;
    if (!std::getline(in, line)) fail("empty file: " + path.string());
    const std::vector<std::string> header = split_line(line);

    // map schema columns (attributes + label) onto header positions
    std::vector<int> attr_pos(schema.attributes.size(), -1);
    int label_pos = -1;
    for (std::size_t h = 0; h < header.size(); ++h) {
        if (header[h] == schema.label_name) label_pos = static_cast<int>(h);
        const int a = schema.attribute_index(header[h]);
        if (a >= 0) attr_pos[a] = static_cast<int>(h);
    }
    if (label_pos < 0) fail("header is missing label column '" + schema.label_name + "'");
    for (std::size_t a = 0; a < attr_pos.size(); ++a) {
        if (attr_pos[a] < 0) {
            fail("header is missing attribute column '" + schema.attributes[a].name + "'");
        }
    }

    Dataset out;
    out.schema = schema;
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        ++row_no;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size()) {
            fail("row " + std::to_string(row_no) + ": expected " +
                 std::to_string(header.size()) + " cells, got " + std::to_string(cells.size()));
        }
        std::vector<double> row(schema.attributes.size());
        for (std::size_t a = 0; a < schema.attributes.size(); ++a) {
            const std::string& cell = cells[attr_pos[a]];
            const Attribute& attr = schema.attributes[a];
            if (cell.empty() || cell == "?") {
                fail("row " + std::to_string(row_no) + ", column '" + attr.name +
                     "': missing value");
            }
            row[a] = attr.kind == AttrKind::Numeric
                         ? parse_numeric(cell, row_no, attr.name)
                         : static_cast<double>(vocab_index(attr, cell, row_no));
        }
        const std::string& lab = cells[label_pos];
        if (lab != "0" && lab != "1") {
            fail("row " + std::to_string(row_no) + ", column '" + schema.label_name +
                 "': label must be 0 or 1, got '" + lab + "'");
        }
        out.rows.push_back(std::move(row));
        out.labels.push_back(lab == "1" ? 1 : 0);
    }
    return out;
}

EncodedDataset encode(const Dataset& d) {
    EncodedDataset out;
    out.cols = d.schema.encoded_width();
    out.values.resize(d.size() * out.cols, 0.0);
    out.labels = d.labels;
    out.sealed = d.sealed;
    for (std::size_t r = 0; r < d.size(); ++r) {
        double* cell = out.values.data() + r * out.cols;
        for (std::size_t a = 0; a < d.schema.attributes.size(); ++a) {
            const Attribute& attr = d.schema.attributes[a];
            if (attr.kind == AttrKind::Numeric) {
                *cell++ = d.rows[r][a];
            } else {
                cell[static_cast<std::size_t>(d.rows[r][a])] = 1.0;
                cell += attr.values.size();
            }
        }
    }
    return out;
}

std::pair<Dataset, Dataset> split_domains(const Dataset& d, const SplitRule& rule) {
    const int a = d.schema.attribute_index(rule.attribute);
    if (a < 0) fail("split rule references unknown attribute '" + rule.attribute + "'");
    const Attribute& attr = d.schema.attributes[static_cast<std::size_t>(a)];

    double ref = 0.0;
    if (attr.kind == AttrKind::Categorical) {
        if (rule.op != "==" && rule.op != "!=") {
            fail("split rule: operator '" + rule.op + "' not valid for categorical attribute");
        }
        const auto it = std::find(attr.values.begin(), attr.values.end(), rule.value);
        if (it == attr.values.end()) {
            fail("split rule: unknown categorical value '" + rule.value + "'");
        }
        ref = static_cast<double>(it - attr.values.begin());
    } else {
        ref = parse_numeric(rule.value, 0, rule.attribute);
    }

    const auto matches = [&](double v) -> bool {
        if (rule.op == "==") return v == ref;
        if (rule.op == "!=") return v != ref;
        if (rule.op == "<") return v < ref;
        if (rule.op == "<=") return v <= ref;
        if (rule.op == ">") return v > ref;
        if (rule.op == ">=") return v >= ref;
        fail("split rule: unknown operator '" + rule.op + "'");
    };

    std::vector<std::size_t> source_idx, target_idx;
    for (std::size_t r = 0; r < d.size(); ++r) {
        (matches(d.rows[r][static_cast<std::size_t>(a)]) ? target_idx : source_idx).push_back(r);
    }
    if (source_idx.empty()) fail("split rule leaves the source domain empty");
    if (target_idx.empty()) fail("split rule leaves the target domain empty");

    Dataset source = d.subset(source_idx);
    Dataset target = d.subset(target_idx);
    if (rule.drop_attribute) {
        for (Dataset* part : {&source, &target}) {
            part->schema.attributes.erase(part->schema.attributes.begin() + a);
            for (auto& row : part->rows) row.erase(row.begin() + a);
        }
    }
    return {std::move(source), std::move(target)};
}

std::pair<Dataset, Dataset> partition_label_rate(const Dataset& d, double rate,
                                                 std::uint64_t seed) {
    if (!(rate > 0.0 && rate < 1.0)) fail("label rate must lie in (0, 1)");
    if (d.size() == 0) fail("cannot partition an empty dataset");

    const std::size_t want = static_cast<std::size_t>(
        std::ceil(rate * static_cast<double>(d.size())));

    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t r = 0; r < d.size(); ++r) {
        if (d.labels[r] != 0 && d.labels[r] != 1) fail("partition requires labeled data");
        by_class[static_cast<std::size_t>(d.labels[r])].push_back(r);
    }

    // proportional allocation, remainder by largest fractional part
    std::array<std::size_t, 2> take{0, 0};
    std::array<double, 2> frac{0.0, 0.0};
    std::size_t assigned = 0;
    for (int c = 0; c < 2; ++c) {
        const double exact = rate * static_cast<double>(by_class[c].size());
        take[c] = static_cast<std::size_t>(std::floor(exact));
        frac[c] = exact - std::floor(exact);
        assigned += take[c];
    }
    while (assigned < want) {
        const int c = (frac[0] >= frac[1]) ? 0 : 1;
        take[c] += 1;
        frac[c] = -1.0;
        ++assigned;
    }
    for (int c = 0; c < 2; ++c) {
        take[c] = std::min(take[c], by_class[c].size());
        if (take[c] == 0) {
            fail("label rate " + std::to_string(rate) +
                 " leaves class " + std::to_string(c) + " absent from the labeled set");
        }
    }

    Rng rng(seed);
    std::vector<std::size_t> labeled_idx;
    std::vector<bool> is_labeled(d.size(), false);
    for (int c = 0; c < 2; ++c) {
        auto order = by_class[c];
        rng.shuffle(order);
        for (std::size_t i = 0; i < take[c]; ++i) {
            labeled_idx.push_back(order[i]);
            is_labeled[order[i]] = true;
        }
    }
    std::sort(labeled_idx.begin(), labeled_idx.end());
    std::vector<std::size_t> unlabeled_idx;
    for (std::size_t r = 0; r < d.size(); ++r) {
        if (!is_labeled[r]) unlabeled_idx.push_back(r);
    }

    Dataset labeled = d.subset(labeled_idx);
    Dataset unlabeled = d.subset(unlabeled_idx);
    // hide labels on the unlabeled side but keep the ground truth sealed
    std::vector<int> sealed_vals = unlabeled.labels;
    unlabeled.sealed = SealedLabels(std::move(sealed_vals));
    std::fill(unlabeled.labels.begin(), unlabeled.labels.end(), kNoLabel);
    return {std::move(labeled), std::move(unlabeled)};
}

std::vector<std::pair<Dataset, Dataset>> kfold(const Dataset& d, int k, std::uint64_t seed) {
    if (k < 2) fail("kfold requires k >= 2");
    if (d.size() < static_cast<std::size_t>(k)) fail("kfold requires |d| >= k");

    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t r = 0; r < d.size(); ++r) {
        by_class[d.labels[r] == 1 ? 1 : 0].push_back(r);
    }
    Rng rng(seed);
    std::vector<std::vector<std::size_t>> fold_idx(static_cast<std::size_t>(k));
    for (int c = 0; c < 2; ++c) {
        auto order = by_class[c];
        rng.shuffle(order);
        for (std::size_t i = 0; i < order.size(); ++i) {
            fold_idx[i % static_cast<std::size_t>(k)].push_back(order[i]);
        }
    }

    std::vector<std::pair<Dataset, Dataset>> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int f = 0; f < k; ++f) {
        std::vector<std::size_t> test = fold_idx[static_cast<std::size_t>(f)];
        std::sort(test.begin(), test.end());
        std::vector<bool> in_test(d.size(), false);
        for (const std::size_t i : test) in_test[i] = true;
        std::vector<std::size_t> train;
        for (std::size_t r = 0; r < d.size(); ++r) {
            if (!in_test[r]) train.push_back(r);
        }
        out.emplace_back(d.subset(train), d.subset(test));
    }
    return out;
}

EncodedDataset bootstrap_sample(const EncodedDataset& labeled, std::uint64_t seed) {
    const std::size_t n = labeled.size();
    if (n == 0) fail("bootstrap of an empty dataset");
    constexpr int kMaxRedraws = 32;
    Rng rng(seed);
    for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
        EncodedDataset out;
        out.cols = labeled.cols;
        out.values.reserve(n * labeled.cols);
        out.labels.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = rng.uniform_index(n);
            const auto row = labeled.row(j);
            out.values.insert(out.values.end(), row.begin(), row.end());
            out.labels.push_back(labeled.labels[j]);
        }
        if (out.has_both_classes()) return out;
    }
    fail("bootstrap produced a single-class sample after " +
         std::to_string(kMaxRedraws) + " redraws");
}

}  // namespace cotr
