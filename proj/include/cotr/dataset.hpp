// Dataset ingestion, categorical encoding, domain splitting, label-rate
// partitioning, stratified k-fold cross validation and bootstrap sampling.
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cotr {

enum class AttrKind { Numeric, Categorical };

struct Attribute {
    std::string name;
    AttrKind kind = AttrKind::Numeric;
    std::vector<std::string> values;  // categorical vocabulary; empty for numeric
};

struct Schema {
    std::vector<Attribute> attributes;
    std::string label_name;

    int attribute_index(std::string_view name) const;
    // Width of the one-hot encoded feature matrix.
    std::size_t encoded_width() const;
};

inline constexpr int kNoLabel = -1;

// Ground-truth labels of rows whose labels are hidden from training. Access
// goes through reveal() so the only legitimate consumers (the all-labels
// oracle baseline and test assertions) are easy to audit.
class SealedLabels {
public:
    SealedLabels() = default;
    explicit SealedLabels(std::vector<int> values) : values_(std::move(values)) {}

    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }
    const std::vector<int>& reveal() const { return values_; }
    std::vector<int>& reveal_mutable() { return values_; }

private:
    std::vector<int> values_;  // kNoLabel where no ground truth is held
};

// Raw dataset: one row per instance. Categorical cells store the vocabulary
// index of their value; numeric cells store the value itself.
struct Dataset {
    Schema schema;
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;   // 0/1, or kNoLabel when hidden
    SealedLabels sealed;       // ground truth for hidden labels

    std::size_t size() const { return rows.size(); }
    // New dataset holding the given rows (in the given order).
    Dataset subset(std::span<const std::size_t> indices) const;
};

// Dense numeric matrix with categorical attributes one-hot expanded.
struct EncodedDataset {
    std::size_t cols = 0;
    std::vector<double> values;  // row-major
    std::vector<int> labels;
    SealedLabels sealed;

    std::size_t size() const { return cols == 0 ? 0 : values.size() / cols; }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(values).subspan(i * cols, cols);
    }
    bool has_both_classes() const;

    // Copy with hidden labels replaced by their sealed ground truth.
    // Only the all-labels oracle baseline may call this.
    EncodedDataset unsealed() const;

    static EncodedDataset concat(const EncodedDataset& a, const EncodedDataset& b);
};

// Indexed labeled/unlabeled pools for the two domains: index 0 is the source
// domain, index 1 the target domain.
struct DomainPair {
    std::array<EncodedDataset, 2> labeled;
    std::array<EncodedDataset, 2> unlabeled;
};

// Declarative domain-split rule: rows satisfying (attribute op value) go to
// the target domain, the rest to the source domain.
struct SplitRule {
    std::string attribute;
    std::string op = "==";     // ==, !=, <, <=, >, >=
    std::string value;         // category name, or numeric literal
    bool drop_attribute = true;
};

// Parses a comma-separated file with a header row against the schema.
// Rows are returned in file order; any malformed cell aborts with an error
// naming the row and column.
Dataset load_csv(const std::filesystem::path& path, const Schema& schema);

EncodedDataset encode(const Dataset& d);

std::pair<Dataset, Dataset> split_domains(const Dataset& d, const SplitRule& rule);

// Stratified split into ceil(rate*|d|) labeled rows and the rest with labels
// moved into the sealed field.
std::pair<Dataset, Dataset> partition_label_rate(const Dataset& d, double rate,
                                                 std::uint64_t seed);

// Stratified k-fold: returns (train, test) pairs whose test folds partition d.
std::vector<std::pair<Dataset, Dataset>> kfold(const Dataset& d, int k,
                                               std::uint64_t seed);

// Same-size sample drawn with replacement. Redraws (bounded) until both
// classes are present.
EncodedDataset bootstrap_sample(const EncodedDataset& labeled, std::uint64_t seed);

}  // namespace cotr
