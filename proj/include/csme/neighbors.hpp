#pragma once

#include <span>
#include <vector>

#include "csme/dataset.hpp"

namespace csme {

enum class Distance { euclidean };

struct KnnConfig {
    std::size_t k = 3;
    Distance distance = Distance::euclidean;
};

/// Fraction of minority labels among the k nearest training rows; ties at the
/// k-th distance are broken by lower row index. Values lie in {0, 1/k, .., 1},
/// which makes the score directly usable for ROC construction.
double knn_score(const LabeledDataset& train, std::span<const double> query,
                 const KnnConfig& cfg);

/// knn_score applied to every row of `queries`. Queries are independent, so
/// the loop may run on several threads; results are keyed by row index.
std::vector<double> knn_scores(const LabeledDataset& train, const LabeledDataset& queries,
                               const KnnConfig& cfg, std::size_t threads = 1);

/// Hard labels: 1 iff knn_score > threshold. Threshold 0.5 with odd k is plain
/// majority vote.
std::vector<int> knn_classify(const LabeledDataset& train, const LabeledDataset& queries,
                              const KnnConfig& cfg, double threshold);

}  // namespace csme
