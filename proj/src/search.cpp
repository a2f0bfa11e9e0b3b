#include "csme/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "csme/metrics.hpp"
#include "csme/parallel.hpp"
#include "csme/rng.hpp"
#include "text_util.hpp"

namespace csme {

namespace {

// Seed-hierarchy tags. Every random draw is keyed on logical coordinates so
// repeated executions and any degree of evaluation parallelism agree bit for
// bit.
constexpr std::uint64_t kFoldTag = 0;
constexpr std::uint64_t kInitTag = 1;
constexpr std::uint64_t kGenTag = 2;
constexpr std::uint64_t kRunTag = 10;
constexpr std::uint64_t kJPrimeFoldTag = 11;

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

std::string mask_key(const FeatureMask& mask) {
    return std::string(reinterpret_cast<const char*>(mask.bits.data()), mask.bits.size());
}

/// Memoizes criterion values within one run. J is a fixed function of the
/// mask there (folds are frozen per run), so caching only saves recomputing
/// revisited masks; FE accounting stays population_size per generation.
class CriterionCache {
public:
    CriterionCache(const LabeledDataset& train, FoldAssignment folds, KnnConfig knn,
                   std::size_t threads)
        : train_(train), folds_(std::move(folds)), knn_(knn), threads_(threads) {}

    std::vector<double> evaluate(const std::vector<FeatureMask>& population) {
        std::vector<const FeatureMask*> fresh;
        std::vector<std::string> fresh_keys;
        for (const auto& mask : population) {
            auto key = mask_key(mask);
            if (memo_.find(key) == memo_.end()) {
                memo_.emplace(key, 0.0);  // reserve slot; filled below
                fresh_keys.push_back(std::move(key));
                fresh.push_back(&mask);
            }
        }
        std::vector<double> fresh_j(fresh.size());
        parallel_for(fresh.size(), threads_, [&](std::size_t i) {
            fresh_j[i] = criterion(*fresh[i], train_, folds_, knn_, 1);
        });
        for (std::size_t i = 0; i < fresh.size(); ++i) {
            memo_[fresh_keys[i]] = fresh_j[i];
        }
        std::vector<double> out(population.size());
        for (std::size_t i = 0; i < population.size(); ++i) {
            out[i] = memo_.at(mask_key(population[i]));
        }
        return out;
    }

private:
    const LabeledDataset& train_;
    FoldAssignment folds_;
    KnnConfig knn_;
    std::size_t threads_;
    std::unordered_map<std::string, double> memo_;
};

std::size_t argmin_index(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] < values[best]) best = i;
    }
    return best;
}

void mutate_bits(FeatureMask& mask, rng::SplitMix64& gen, double pm) {
    for (auto& bit : mask.bits) {
        if (gen.next_unit() < pm) bit ^= 1;
    }
}

void repair_if_empty(FeatureMask& mask, rng::SplitMix64& gen) {
    if (mask.cardinality() == 0) {
        mask.bits[gen.next_below(mask.bits.size())] = 1;
    }
}

std::size_t tournament(rng::SplitMix64& gen, std::span<const double> j) {
    const std::size_t a = gen.next_below(j.size());
    const std::size_t b = gen.next_below(j.size());
    if (j[a] < j[b]) return a;
    if (j[b] < j[a]) return b;
    return std::min(a, b);
}

}  // namespace

Algorithm parse_algorithm(const std::string& name) {
    if (name == "ga") return Algorithm::ga;
    if (name == "bpso") return Algorithm::bpso;
    throw std::invalid_argument("unknown algorithm '" + name + "' (expected ga or bpso)");
}

std::string algorithm_name(Algorithm algo) {
    return algo == Algorithm::ga ? "ga" : "bpso";
}

void SearchConfig::validate(std::size_t n_features) const {
    if (n_features < 2) throw std::invalid_argument("need at least 2 features to search");
    if (population_size < 2) throw std::invalid_argument("population_size must be >= 2");
    if (fe_budget < population_size) {
        throw std::invalid_argument("fe_budget must be >= population_size");
    }
    if (runs_r < 1) throw std::invalid_argument("runs_r must be >= 1");
    if (cv_folds < 2) throw std::invalid_argument("cv_folds must be >= 2");
    if (knn.k < 1) throw std::invalid_argument("knn k must be >= 1");
    auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!in_unit(ga_pc) || !in_unit(ga_mix) || (ga_pm && !in_unit(*ga_pm))) {
        throw std::invalid_argument("GA probabilities must be in [0,1]");
    }
    if (!(bpso_vmax > 0.0)) throw std::invalid_argument("bpso_vmax must be > 0");
}

double criterion_from_fold_aucs(std::span<const double> fold_aucs) {
    if (fold_aucs.empty()) throw std::invalid_argument("no fold AUCs");
    double sum = 0.0;
    for (double a : fold_aucs) sum += a;
    return 1.0 - sum / static_cast<double>(fold_aucs.size());
}

double criterion(const FeatureMask& mask, const LabeledDataset& train,
                 const FoldAssignment& folds, const KnnConfig& knn, std::size_t threads) {
    if (mask.cardinality() == 0) throw std::invalid_argument("empty subset");
    if (folds.fold_of.size() != train.n_rows()) {
        throw std::invalid_argument("fold assignment does not match dataset");
    }
    const LabeledDataset projected = project(train, mask);

    std::vector<double> fold_aucs(folds.k);
    parallel_for(folds.k, threads, [&](std::size_t f) {
        std::vector<std::size_t> train_rows;
        std::vector<std::size_t> test_rows;
        for (std::size_t i = 0; i < projected.n_rows(); ++i) {
            (folds.fold_of[i] == f ? test_rows : train_rows).push_back(i);
        }
        const LabeledDataset fold_train = subset(projected, train_rows);
        std::vector<int> truth(test_rows.size());
        std::vector<double> scores(test_rows.size());
        for (std::size_t q = 0; q < test_rows.size(); ++q) {
            truth[q] = projected.labels[test_rows[q]];
            scores[q] = knn_score(fold_train, projected.row(test_rows[q]), knn);
        }
        const bool has_pos = std::find(truth.begin(), truth.end(), 1) != truth.end();
        const bool has_neg = std::find(truth.begin(), truth.end(), 0) != truth.end();
        if (!has_pos || !has_neg) {
            throw std::runtime_error("fold " + std::to_string(f) + " is missing a class");
        }
        fold_aucs[f] = auc(roc_curve(truth, scores));
    });
    return criterion_from_fold_aucs(fold_aucs);
}

FoldAssignment run_fold_assignment(const LabeledDataset& train, const SearchConfig& cfg,
                                   std::uint64_t run_seed) {
    return stratified_kfold(train, cfg.cv_folds, rng::derive(run_seed, {kFoldTag}));
}

std::uint64_t run_seed_for(std::uint64_t master_seed, std::size_t run_index) {
    return rng::derive(master_seed, {kRunTag, run_index});
}

RunResult ga_run(const LabeledDataset& train, const SearchConfig& cfg, std::uint64_t run_seed) {
    cfg.validate(train.n_features);
    const std::size_t n = train.n_features;
    const double pm = cfg.ga_pm.value_or(1.0 / static_cast<double>(n));
    CriterionCache cache(train, run_fold_assignment(train, cfg, run_seed), cfg.knn,
                         cfg.threads);

    std::vector<FeatureMask> population(cfg.population_size);
    rng::SplitMix64 init(rng::derive(run_seed, {kInitTag}));
    for (auto& individual : population) {
        individual.bits.resize(n);
        do {
            for (auto& bit : individual.bits) bit = init.next_bool() ? 1 : 0;
        } while (individual.cardinality() == 0);
    }

    const std::size_t generations = cfg.fe_budget / cfg.population_size;
    std::vector<double> j = cache.evaluate(population);

    RunResult result;
    std::size_t best = argmin_index(j);
    result.best_mask = population[best];
    result.best_j = j[best];
    result.history.reserve(generations);
    result.history.push_back(result.best_j);

    for (std::size_t gen = 1; gen < generations; ++gen) {
        rng::SplitMix64 breed(rng::derive(run_seed, {kGenTag, gen}));
        std::vector<FeatureMask> next;
        next.reserve(population.size());
        next.push_back(population[argmin_index(j)]);  // elitism of one
        while (next.size() < population.size()) {
            FeatureMask child_a = population[tournament(breed, j)];
            FeatureMask child_b = population[tournament(breed, j)];
            if (breed.next_unit() < cfg.ga_pc) {
                for (std::size_t d = 0; d < n; ++d) {
                    if (breed.next_unit() < cfg.ga_mix) {
                        std::swap(child_a.bits[d], child_b.bits[d]);
                    }
                }
            }
            mutate_bits(child_a, breed, pm);
            repair_if_empty(child_a, breed);
            mutate_bits(child_b, breed, pm);
            repair_if_empty(child_b, breed);
            next.push_back(std::move(child_a));
            if (next.size() < population.size()) next.push_back(std::move(child_b));
        }
        population = std::move(next);
        j = cache.evaluate(population);
        const std::size_t gen_best = argmin_index(j);
        if (j[gen_best] < result.best_j) {
            result.best_j = j[gen_best];
            result.best_mask = population[gen_best];
        }
        result.history.push_back(result.best_j);
    }
    result.cardinality = result.best_mask.cardinality();
    return result;
}

RunResult bpso_run(const LabeledDataset& train, const SearchConfig& cfg,
                   std::uint64_t run_seed) {
    cfg.validate(train.n_features);
    const std::size_t n = train.n_features;
    CriterionCache cache(train, run_fold_assignment(train, cfg, run_seed), cfg.knn,
                         cfg.threads);

    std::vector<FeatureMask> position(cfg.population_size);
    std::vector<std::vector<double>> velocity(cfg.population_size);
    rng::SplitMix64 init(rng::derive(run_seed, {kInitTag}));
    for (std::size_t i = 0; i < cfg.population_size; ++i) {
        position[i].bits.resize(n);
        for (auto& bit : position[i].bits) bit = init.next_bool() ? 1 : 0;
        repair_if_empty(position[i], init);
        velocity[i].resize(n);
        for (auto& v : velocity[i]) v = init.next_in(-cfg.bpso_vmax, cfg.bpso_vmax);
    }

    const std::size_t generations = cfg.fe_budget / cfg.population_size;
    std::vector<double> j = cache.evaluate(position);

    std::vector<FeatureMask> pbest = position;
    std::vector<double> pbest_j = j;
    std::size_t g = argmin_index(pbest_j);
    FeatureMask gbest = pbest[g];
    double gbest_j = pbest_j[g];

    RunResult result;
    result.history.reserve(generations);
    result.history.push_back(gbest_j);

    for (std::size_t it = 1; it < generations; ++it) {
        rng::SplitMix64 update(rng::derive(run_seed, {kGenTag, it}));
        for (std::size_t i = 0; i < cfg.population_size; ++i) {
            for (std::size_t d = 0; d < n; ++d) {
                const double u1 = update.next_unit();
                const double u2 = update.next_unit();
                const double x = static_cast<double>(position[i].bits[d]);
                double v = cfg.bpso_omega * velocity[i][d] +
                           cfg.bpso_c1 * u1 * (static_cast<double>(pbest[i].bits[d]) - x) +
                           cfg.bpso_c2 * u2 * (static_cast<double>(gbest.bits[d]) - x);
                v = std::clamp(v, -cfg.bpso_vmax, cfg.bpso_vmax);
                velocity[i][d] = v;
                position[i].bits[d] = update.next_unit() < sigmoid(v) ? 1 : 0;
            }
            repair_if_empty(position[i], update);
        }
        j = cache.evaluate(position);
        for (std::size_t i = 0; i < cfg.population_size; ++i) {
            if (j[i] < pbest_j[i]) {
                pbest_j[i] = j[i];
                pbest[i] = position[i];
            }
        }
        for (std::size_t i = 0; i < cfg.population_size; ++i) {
            if (pbest_j[i] < gbest_j) {
                gbest_j = pbest_j[i];
                gbest = pbest[i];
            }
        }
        result.history.push_back(gbest_j);
    }

    result.best_mask = std::move(gbest);
    result.best_j = gbest_j;
    result.cardinality = result.best_mask.cardinality();
    return result;
}

std::size_t select_best_run(std::span<const RunResult> runs) {
    if (runs.empty()) throw std::invalid_argument("no runs");
    std::size_t best = 0;
    for (std::size_t i = 1; i < runs.size(); ++i) {
        if (runs[i].best_j < runs[best].best_j ||
            (runs[i].best_j == runs[best].best_j &&
             runs[i].cardinality < runs[best].cardinality)) {
            best = i;
        }
    }
    return best;
}

namespace {

std::pair<double, double> mean_sd(std::span<const double> values) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (values.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

}  // namespace

SelectionReport multi_run_select(Algorithm algo, const LabeledDataset& train,
                                 const SearchConfig& cfg) {
    cfg.validate(train.n_features);

    SelectionReport report;
    report.algorithm = algo;

    const FoldAssignment jprime_folds = stratified_kfold(
        train, cfg.cv_folds, rng::derive(cfg.master_seed, {kJPrimeFoldTag}));
    report.j_prime = criterion(FeatureMask::all_ones(train.n_features), train, jprime_folds,
                               cfg.knn, cfg.threads);

    report.per_run.resize(cfg.runs_r);
    const bool parallel_runs = cfg.threads > 1 && cfg.runs_r > 1;
    SearchConfig run_cfg = cfg;
    if (parallel_runs) run_cfg.threads = 1;  // runs are the parallel unit
    parallel_for(cfg.runs_r, parallel_runs ? cfg.threads : 1, [&](std::size_t i) {
        const std::uint64_t seed = run_seed_for(cfg.master_seed, i);
        report.per_run[i] =
            algo == Algorithm::ga ? ga_run(train, run_cfg, seed) : bpso_run(train, run_cfg, seed);
    });

    const std::size_t best = select_best_run(report.per_run);
    report.best_overall = report.per_run[best].best_mask;
    report.j_best = report.per_run[best].best_j;
    report.xi_best = report.per_run[best].cardinality;

    std::vector<double> js;
    std::vector<double> xis;
    js.reserve(cfg.runs_r);
    xis.reserve(cfg.runs_r);
    for (const auto& run : report.per_run) {
        js.push_back(run.best_j);
        xis.push_back(static_cast<double>(run.cardinality));
    }
    std::tie(report.j_mean, report.j_sd) = mean_sd(js);
    std::tie(report.xi_mean, report.xi_sd) = mean_sd(xis);
    report.pi_percent = improvement_pi(report.j_prime, report.j_mean);
    report.xi_percent = reduction_xi(train.n_features, report.xi_mean);
    return report;
}

void save_mask_file(const FeatureMask& mask, const std::string& path) {
    if (mask.cardinality() == 0) throw std::invalid_argument("empty subset");
    std::string out = "n=" + std::to_string(mask.bits.size()) + "\n";
    bool first = true;
    for (std::size_t j = 0; j < mask.bits.size(); ++j) {
        if (!mask.bits[j]) continue;
        if (!first) out += ' ';
        out += std::to_string(j + 1);  // 1-based feature indices
        first = false;
    }
    out += '\n';
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error(path + ": cannot open file for writing");
    file << out;
    if (!file) throw std::runtime_error(path + ": write failed");
}

FeatureMask load_mask_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open file");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty mask file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("n=", 0) != 0) {
        throw std::runtime_error(path + ": first line must be n=<int>");
    }
    std::size_t n = 0;
    try {
        n = std::stoul(line.substr(2));
    } catch (const std::exception&) {
        throw std::runtime_error(path + ": first line must be n=<int>");
    }
    if (n == 0) throw std::runtime_error(path + ": n must be >= 1");

    FeatureMask mask;
    mask.bits.assign(n, 0);
    if (!std::getline(in, line)) throw std::runtime_error(path + ": missing index line");
    std::istringstream indices(line);
    long long prev = 0;
    long long index = 0;
    while (indices >> index) {
        if (index < 1 || static_cast<std::size_t>(index) > n) {
            throw std::runtime_error(path + ": index " + std::to_string(index) +
                                     " out of range [1," + std::to_string(n) + "]");
        }
        if (index <= prev) {
            throw std::runtime_error(path + ": indices must be strictly ascending");
        }
        mask.bits[static_cast<std::size_t>(index) - 1] = 1;
        prev = index;
    }
    if (!indices.eof()) throw std::runtime_error(path + ": malformed index line");
    if (mask.cardinality() == 0) throw std::runtime_error(path + ": empty subset");
    return mask;
}

std::string selection_report_text(const SelectionReport& report, const SearchConfig& cfg) {
    std::string out;
    out += "algorithm=" + algorithm_name(report.algorithm) + "\n";
    out += "n_features=" + std::to_string(report.best_overall.bits.size()) + "\n";
    out += "runs=" + std::to_string(report.per_run.size()) + "\n";
    out += "population=" + std::to_string(cfg.population_size) + "\n";
    out += "fe_budget=" + std::to_string(cfg.fe_budget) + "\n";
    out += "cv_folds=" + std::to_string(cfg.cv_folds) + "\n";
    out += "knn_k=" + std::to_string(cfg.knn.k) + "\n";
    out += "master_seed=" + std::to_string(cfg.master_seed) + "\n";
    out += "j_prime=" + detail::fmt_g(report.j_prime) + "\n";
    out += "j_mean=" + detail::fmt_g(report.j_mean) + "\n";
    out += "j_sd=" + detail::fmt_g(report.j_sd) + "\n";
    out += "j_best=" + detail::fmt_g(report.j_best) + "\n";
    out += "xi_mean=" + detail::fmt_g(report.xi_mean) + "\n";
    out += "xi_sd=" + detail::fmt_g(report.xi_sd) + "\n";
    out += "xi_best=" + std::to_string(report.xi_best) + "\n";
    out += "pi_percent=" + detail::fmt_g(report.pi_percent) + "\n";
    out += "xi_percent=" + detail::fmt_g(report.xi_percent) + "\n";
    out += "best_subset=";
    bool first = true;
    for (std::size_t j = 0; j < report.best_overall.bits.size(); ++j) {
        if (!report.best_overall.bits[j]) continue;
        if (!first) out += ' ';
        out += std::to_string(j + 1);
        first = false;
    }
    out += "\n\n";
    out += "  run        best_j    xi\n";
    for (std::size_t i = 0; i < report.per_run.size(); ++i) {
        char row[96];
        std::snprintf(row, sizeof(row), "%5zu  %12s  %4zu\n", i,
                      detail::fmt_g(report.per_run[i].best_j).c_str(), report.per_run[i].cardinality);
        out += row;
    }
    return out;
}

std::string selection_runs_csv(const SelectionReport& report) {
    std::string out = "run,best_j,cardinality\n";
    for (std::size_t i = 0; i < report.per_run.size(); ++i) {
        out += std::to_string(i) + "," + detail::fmt_g(report.per_run[i].best_j) + "," +
               std::to_string(report.per_run[i].cardinality) + "\n";
    }
    return out;
}

}  // namespace csme
