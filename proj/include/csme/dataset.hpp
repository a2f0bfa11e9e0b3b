#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace csme {

/// In-memory feature dataset: one row per sample, binary labels with the
/// minority (positive) class encoded as 1. Rows, ids and labels stay aligned;
/// instances are treated as immutable once built and are safe to share across
/// threads.
struct LabeledDataset {
    std::vector<std::string> ids;
    std::vector<double> features;  // row-major, n_rows() x n_features
    std::vector<int> labels;
    std::size_t n_features = 0;
    std::string source_tag;  // free-form provenance, e.g. upstream extractor name

    std::size_t n_rows() const { return ids.size(); }

    std::span<const double> row(std::size_t i) const {
        return {features.data() + i * n_features, n_features};
    }

    std::size_t count_label(int label) const;

    /// Throws std::runtime_error if sizes disagree, a label is outside {0,1},
    /// or any feature value is non-finite.
    void validate() const;
};

/// Maps each sample index to a fold id in [0, k).
struct FoldAssignment {
    std::vector<std::size_t> fold_of;
    std::size_t k = 0;
};

/// Binary feature-subset mask; bit m selects the m-th feature column.
struct FeatureMask {
    std::vector<std::uint8_t> bits;

    std::size_t cardinality() const;
    static FeatureMask all_ones(std::size_t n);
};

/// Feature file format: UTF-8 comma-delimited text. An optional first line
/// `#source=<tag>` carries provenance; the header is `id,label,f1,...,fn`;
/// every data row is an id token, a {0,1} label and n decimal reals.
/// Malformed input is rejected with the offending line number.
LabeledDataset load_feature_file(const std::string& path);

/// Writes the same format back. Reals are emitted with full round-trip
/// precision so save/load reproduces the matrix exactly.
void save_feature_file(const LabeledDataset& ds, const std::string& path);

/// Splits per class: each class contributes round(class_count * test_fraction)
/// samples to the test side. Deterministic in (ds, test_fraction, seed) and
/// independent of row order (class lists are canonicalized by id before the
/// seeded shuffle).
std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& ds,
                                                           double test_fraction,
                                                           std::uint64_t seed);

/// Stratified k folds: per class, fold sizes differ by at most one. Same
/// determinism contract as stratified_split.
FoldAssignment stratified_kfold(const LabeledDataset& ds, std::size_t k, std::uint64_t seed);

/// Keeps exactly the columns with mask bit 1, in ascending column order.
/// The empty subset is rejected.
LabeledDataset project(const LabeledDataset& ds, const FeatureMask& mask);

/// New dataset containing the given rows, in the given order.
LabeledDataset subset(const LabeledDataset& ds, std::span<const std::size_t> rows);

/// Per-column z-score scaling fitted on a training set. Off by default in the
/// pipeline; exposed for callers whose features are not commensurate.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> sd;

    static Standardizer fit(const LabeledDataset& train);
    LabeledDataset apply(const LabeledDataset& ds) const;
};

}  // namespace csme
