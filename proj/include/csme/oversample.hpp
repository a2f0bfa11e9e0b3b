#pragma once

#include <cstdint>

#include "csme/dataset.hpp"

namespace csme {

struct OversampleConfig {
    double r = 1.0;             // oversampling ratio: synthetic / original minority count
    std::size_t k_neighbors = 5;
    std::uint64_t seed = 0;
};

/// Number of synthetic samples for a given minority count and ratio:
/// round(r * n_minority).
long long synthetic_count(long long n_minority, double r);

/// SMOTE in feature space. Appends round(r * n_minority) minority-labeled
/// rows, each interpolated between a minority sample and one of its
/// k_neighbors nearest minority neighbors (Euclidean, self excluded, distance
/// ties broken by lower row index). Seeds are derived per (seed, parent row,
/// visit), so output is identical regardless of scheduling. Original rows are
/// passed through untouched; synthetic ids are
/// `syn:<visit>:<parent_row>:<neighbor_row>`.
LabeledDataset smote(const LabeledDataset& ds, const OversampleConfig& cfg);

}  // namespace csme
