#include "csme/neighbors.hpp"

#include <algorithm>
#include <stdexcept>

#include "csme/parallel.hpp"

namespace csme {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        acc += d * d;
    }
    return acc;
}

}  // namespace

double knn_score(const LabeledDataset& train, std::span<const double> query,
                 const KnnConfig& cfg) {
    if (query.size() != train.n_features) {
        throw std::invalid_argument("query dimension does not match training features");
    }
    if (cfg.k < 1 || cfg.k > train.n_rows()) {
        throw std::invalid_argument("k must be in [1, n_train]");
    }

    // Brute-force reference search; (distance, row index) ordering fixes ties.
    std::vector<std::pair<double, std::size_t>> dist(train.n_rows());
    for (std::size_t i = 0; i < train.n_rows(); ++i) {
        dist[i] = {squared_distance(train.row(i), query), i};
    }
    if (cfg.k < dist.size()) {
        std::nth_element(dist.begin(), dist.begin() + cfg.k, dist.end());
    }
    std::size_t minority = 0;
    for (std::size_t m = 0; m < cfg.k; ++m) {
        if (train.labels[dist[m].second] == 1) ++minority;
    }
    return static_cast<double>(minority) / static_cast<double>(cfg.k);
}

std::vector<double> knn_scores(const LabeledDataset& train, const LabeledDataset& queries,
                               const KnnConfig& cfg, std::size_t threads) {
    if (queries.n_features != train.n_features) {
        throw std::invalid_argument("query dimension does not match training features");
    }
    std::vector<double> scores(queries.n_rows());
    parallel_for(queries.n_rows(), threads,
                 [&](std::size_t i) { scores[i] = knn_score(train, queries.row(i), cfg); });
    return scores;
}

std::vector<int> knn_classify(const LabeledDataset& train, const LabeledDataset& queries,
                              const KnnConfig& cfg, double threshold) {
    const auto scores = knn_scores(train, queries, cfg);
    std::vector<int> labels(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        labels[i] = scores[i] > threshold ? 1 : 0;
    }
    return labels;
}

}  // namespace csme
