#include "csme/oversample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "csme/rng.hpp"

namespace csme {

long long synthetic_count(long long n_minority, double r) {
    if (n_minority < 0) throw std::invalid_argument("n_minority must be >= 0");
    if (r < 0.0) throw std::invalid_argument("oversampling ratio must be >= 0");
    return std::llround(r * static_cast<double>(n_minority));
}

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

LabeledDataset smote(const LabeledDataset& ds, const OversampleConfig& cfg) {
    if (cfg.r < 0.0) throw std::invalid_argument("oversampling ratio must be >= 0");
    if (cfg.k_neighbors < 1) throw std::invalid_argument("k_neighbors must be >= 1");
    if (cfg.r == 0.0) return ds;

    std::vector<std::size_t> minority;
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        if (ds.labels[i] == 1) minority.push_back(i);
    }
    if (minority.empty()) {
        throw std::runtime_error("cannot oversample: minority class is empty");
    }
    if (minority.size() < cfg.k_neighbors + 1) {
        throw std::runtime_error("minority class too small: need at least " +
                                 std::to_string(cfg.k_neighbors + 1) + " samples, have " +
                                 std::to_string(minority.size()));
    }

    const auto total = static_cast<std::size_t>(
        synthetic_count(static_cast<long long>(minority.size()), cfg.r));

    // k nearest minority neighbors of each minority row, ordered by
    // (distance, row index).
    std::vector<std::vector<std::size_t>> neighbors(minority.size());
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t a = 0; a < minority.size(); ++a) {
        dist.clear();
        for (std::size_t b = 0; b < minority.size(); ++b) {
            if (b == a) continue;
            dist.emplace_back(squared_distance(ds.row(minority[a]), ds.row(minority[b])),
                              minority[b]);
        }
        std::nth_element(dist.begin(), dist.begin() + cfg.k_neighbors, dist.end());
        std::sort(dist.begin(), dist.begin() + cfg.k_neighbors);
        neighbors[a].reserve(cfg.k_neighbors);
        for (std::size_t m = 0; m < cfg.k_neighbors; ++m) {
            neighbors[a].push_back(dist[m].second);
        }
    }

    LabeledDataset out = ds;
    out.ids.reserve(ds.n_rows() + total);
    out.labels.reserve(ds.n_rows() + total);
    out.features.reserve((ds.n_rows() + total) * ds.n_features);

    // One synthetic sample per visit, cycling through the minority rows.
    for (std::size_t visit = 0; visit < total; ++visit) {
        const std::size_t ordinal = visit % minority.size();
        const std::size_t parent_row = minority[ordinal];
        rng::SplitMix64 gen(rng::derive(cfg.seed, {parent_row, visit}));
        const std::size_t neighbor_row = neighbors[ordinal][gen.next_below(cfg.k_neighbors)];
        const double lambda = gen.next_unit();

        const auto s = ds.row(parent_row);
        const auto t = ds.row(neighbor_row);
        for (std::size_t j = 0; j < ds.n_features; ++j) {
            out.features.push_back(s[j] + lambda * (t[j] - s[j]));
        }
        out.labels.push_back(1);
        out.ids.push_back("syn:" + std::to_string(visit) + ":" + std::to_string(parent_row) +
                          ":" + std::to_string(neighbor_row));
    }
    return out;
}

}  // namespace csme
