#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "csme/dataset.hpp"
#include "csme/neighbors.hpp"

namespace csme {

/// Desk-scale benchmark generator: a planted subset of informative columns
/// separates the classes, every other column is shared noise.
struct SynthSpec {
    std::size_t n_features = 12;
    std::vector<std::size_t> informative = {0, 1, 2};
    std::size_t n_minority = 50;
    std::size_t n_majority = 50;
    double class_separation = 2.0;  // distance between class means, in within-class SD units
    double noise_sd = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Informative columns are class-conditional Gaussians with means
/// +-class_separation/2 and unit SD (minority on the positive side); the rest
/// are zero-mean Gaussians with noise_sd for both classes. Deterministic per
/// seed and independent of scheduling.
LabeledDataset generate(const SynthSpec& spec);

/// Evaluates the criterion for every non-empty mask (2^n - 1 of them) and
/// returns the argmin, ties to smaller cardinality then lower mask value.
/// Tractability bound: n <= 16.
std::pair<FeatureMask, double> exhaustive_best_subset(const LabeledDataset& train,
                                                      const FoldAssignment& folds,
                                                      const KnnConfig& knn,
                                                      std::size_t threads = 1);

}  // namespace csme
