#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csme/dataset.hpp"
#include "csme/neighbors.hpp"

namespace csme {

enum class Algorithm { ga, bpso };

Algorithm parse_algorithm(const std::string& name);
std::string algorithm_name(Algorithm algo);

struct SearchConfig {
    std::size_t population_size = 30;
    std::size_t fe_budget = 6000;    // criterion evaluations per run
    std::size_t runs_r = 40;         // independent runs per selection
    std::size_t cv_folds = 10;
    KnnConfig knn{};
    double ga_pc = 0.8;              // crossover probability
    std::optional<double> ga_pm{};   // per-bit flip probability; default 1/n
    double ga_mix = 0.5;             // per-bit exchange probability in uniform crossover
    double bpso_omega = 1.0;         // inertia weight
    double bpso_c1 = 2.0;
    double bpso_c2 = 2.0;
    double bpso_vmax = 6.0;          // velocity clamp
    std::uint64_t master_seed = 1;
    std::size_t threads = 1;

    void validate(std::size_t n_features) const;
};

struct RunResult {
    FeatureMask best_mask;
    double best_j = 0.0;
    std::size_t cardinality = 0;
    std::vector<double> history;  // best-so-far J after each evaluated generation
};

struct SelectionReport {
    Algorithm algorithm = Algorithm::ga;
    std::vector<RunResult> per_run;
    FeatureMask best_overall;
    double j_prime = 0.0;  // criterion of the all-ones mask
    double j_mean = 0.0;
    double j_sd = 0.0;
    double j_best = 0.0;
    double xi_mean = 0.0;
    double xi_sd = 0.0;
    std::size_t xi_best = 0;
    double pi_percent = 0.0;
    double xi_percent = 0.0;
};

/// Wrapper criterion J: project the training set by the mask, run stratified
/// cross-validation with a k-NN scorer, and return 1 minus the mean held-out
/// AUC. Lower is better; values always lie in [0,1].
double criterion(const FeatureMask& mask, const LabeledDataset& train,
                 const FoldAssignment& folds, const KnnConfig& knn, std::size_t threads = 1);

/// Aggregation step of the criterion, split out for direct testing.
double criterion_from_fold_aucs(std::span<const double> fold_aucs);

/// Fold assignment a run uses for every one of its criterion evaluations.
/// Fixed per run so J is a deterministic function of the mask within the run.
FoldAssignment run_fold_assignment(const LabeledDataset& train, const SearchConfig& cfg,
                                   std::uint64_t run_seed);

std::uint64_t run_seed_for(std::uint64_t master_seed, std::size_t run_index);

/// Generational GA over masks: binary tournament selection,
/// parameterized-uniform crossover (probability ga_pc, per-bit exchange
/// ga_mix), per-bit flip mutation, elitism of one. Runs fe_budget /
/// population_size generations, the initial population included.
RunResult ga_run(const LabeledDataset& train, const SearchConfig& cfg, std::uint64_t run_seed);

/// Classical binary PSO with global best: velocities clamped to +-bpso_vmax,
/// bits resampled with probability sigmoid(velocity). Same budget accounting
/// and return contract as ga_run.
RunResult bpso_run(const LabeledDataset& train, const SearchConfig& cfg, std::uint64_t run_seed);

/// Index of the winning run: minimum best_j, ties to smaller cardinality,
/// then lower run index.
std::size_t select_best_run(std::span<const RunResult> runs);

/// runs_r independent runs with seeds derived from master_seed, aggregated
/// into a SelectionReport. Byte-identical output for a given (train, cfg)
/// regardless of thread count.
SelectionReport multi_run_select(Algorithm algo, const LabeledDataset& train,
                                 const SearchConfig& cfg);

/// Mask file: first line `n=<int>`, second line space-separated ascending
/// selected indices (1-based).
void save_mask_file(const FeatureMask& mask, const std::string& path);
FeatureMask load_mask_file(const std::string& path);

/// Human-readable report (key-value header plus per-run table) and its
/// delimited counterpart. Both carry the same numbers.
std::string selection_report_text(const SelectionReport& report, const SearchConfig& cfg);
std::string selection_runs_csv(const SelectionReport& report);

}  // namespace csme
