#include "csme/synthbench.hpp"

#include <algorithm>
#include <stdexcept>

#include "csme/parallel.hpp"
#include "csme/rng.hpp"
#include "csme/search.hpp"

namespace csme {

void SynthSpec::validate() const {
    if (n_features == 0) throw std::invalid_argument("n_features must be >= 1");
    if (informative.empty()) throw std::invalid_argument("informative set must be non-empty");
    for (std::size_t j : informative) {
        if (j >= n_features) {
            throw std::invalid_argument("informative index " + std::to_string(j) +
                                        " out of range");
        }
    }
    if (n_minority < 1 || n_majority < 1) {
        throw std::invalid_argument("both classes need at least one sample");
    }
    if (class_separation < 0.0) throw std::invalid_argument("class_separation must be >= 0");
    if (noise_sd < 0.0) throw std::invalid_argument("noise_sd must be >= 0");
}

LabeledDataset generate(const SynthSpec& spec) {
    spec.validate();
    std::vector<bool> is_informative(spec.n_features, false);
    for (std::size_t j : spec.informative) is_informative[j] = true;

    LabeledDataset ds;
    ds.n_features = spec.n_features;
    ds.source_tag = "synthbench";
    const std::size_t total = spec.n_minority + spec.n_majority;
    ds.ids.reserve(total);
    ds.labels.reserve(total);
    ds.features.reserve(total * spec.n_features);

    for (std::size_t i = 0; i < total; ++i) {
        const bool minority = i < spec.n_minority;
        const double mean = (minority ? 0.5 : -0.5) * spec.class_separation;
        ds.labels.push_back(minority ? 1 : 0);
        ds.ids.push_back((minority ? "pos" : "neg") +
                         std::to_string(minority ? i : i - spec.n_minority));
        rng::SplitMix64 gen(rng::derive(spec.seed, {i}));
        for (std::size_t j = 0; j < spec.n_features; ++j) {
            if (is_informative[j]) {
                ds.features.push_back(mean + gen.next_normal());
            } else {
                ds.features.push_back(spec.noise_sd * gen.next_normal());
            }
        }
    }
    return ds;
}

std::pair<FeatureMask, double> exhaustive_best_subset(const LabeledDataset& train,
                                                      const FoldAssignment& folds,
                                                      const KnnConfig& knn,
                                                      std::size_t threads) {
    const std::size_t n = train.n_features;
    if (n > 16) {
        throw std::invalid_argument("exhaustive search limited to n <= 16 features, got " +
                                    std::to_string(n));
    }
    const std::size_t count = (std::size_t{1} << n) - 1;

    std::vector<double> j(count);
    parallel_for(count, threads, [&](std::size_t i) {
        const std::size_t value = i + 1;
        FeatureMask mask;
        mask.bits.resize(n);
        for (std::size_t d = 0; d < n; ++d) mask.bits[d] = (value >> d) & 1u;
        j[i] = criterion(mask, train, folds, knn, 1);
    });

    std::size_t best = 0;
    auto cardinality = [](std::size_t value) {
        return static_cast<std::size_t>(__builtin_popcountll(value));
    };
    for (std::size_t i = 1; i < count; ++i) {
        if (j[i] < j[best] ||
            (j[i] == j[best] && cardinality(i + 1) < cardinality(best + 1))) {
            best = i;
        }
    }
    FeatureMask mask;
    mask.bits.resize(n);
    for (std::size_t d = 0; d < n; ++d) mask.bits[d] = ((best + 1) >> d) & 1u;
    return {mask, j[best]};
}

}  // namespace csme
