#include <cstdint>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "csme/pipeline.hpp"

namespace {

using csme::KeyValueConfig;

/// Flags win over config-file values, which win over built-in defaults.
struct Resolver {
    const KeyValueConfig& cfg;

    void str(CLI::Option* opt, std::string& target, const std::string& key) const {
        if (!opt->count() && cfg.has(key)) target = cfg.get_string(key);
    }
    void real(CLI::Option* opt, double& target, const std::string& key) const {
        if (!opt->count() && cfg.has(key)) target = cfg.get_double(key);
    }
    void size(CLI::Option* opt, std::size_t& target, const std::string& key) const {
        if (!opt->count() && cfg.has(key)) target = cfg.get_size(key);
    }
    void seed(CLI::Option* opt, std::uint64_t& target, const std::string& key) const {
        if (!opt->count() && cfg.has(key)) target = cfg.get_uint64(key);
    }
    void flag(CLI::Option* opt, bool& target, const std::string& key) const {
        if (!opt->count() && cfg.has(key)) target = cfg.get_bool(key);
    }
    bool explicit_for(CLI::Option* opt, const std::string& key) const {
        return opt->count() > 0 || cfg.has(key);
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CSME screening pipeline: SMOTE class balancing, GA/BPSO wrapper "
                 "feature selection, k-NN classification and ROC evaluation"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "Flat key=value config file; flags win")
        ->expected(1);

    // split
    auto* split = app.add_subcommand("split", "Stratified train/test split of a feature file");
    csme::SplitArgs split_args;
    auto* sp_in = split->add_option("--input", split_args.input, "Feature file");
    auto* sp_frac =
        split->add_option("--test-fraction", split_args.test_fraction, "Test fraction in (0,1)");
    auto* sp_seed = split->add_option("--seed", split_args.seed, "Random seed");
    auto* sp_out = split->add_option("--out", split_args.out_dir, "Output directory");

    // oversample
    auto* oversample = app.add_subcommand("oversample", "SMOTE-balance a feature file");
    csme::OversampleArgs os_args;
    auto* os_in = oversample->add_option("--input", os_args.input, "Feature file");
    auto* os_r = oversample->add_option("--r", os_args.r, "Oversampling ratio (>= 0)");
    auto* os_k =
        oversample->add_option("--k-neighbors", os_args.k_neighbors, "Minority neighbors");
    auto* os_seed = oversample->add_option("--seed", os_args.seed, "Random seed");
    auto* os_out = oversample->add_option("--out", os_args.out_dir, "Output directory");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a planted-subset benchmark dataset");
    csme::SynthArgs synth_args;
    std::string informative_list;
    auto* sy_n = synth->add_option("--n-features", synth_args.spec.n_features, "Feature count");
    auto* sy_inf = synth->add_option("--informative", informative_list,
                                     "Comma-separated informative column indices (0-based)");
    auto* sy_min = synth->add_option("--n-minority", synth_args.spec.n_minority, "Minority rows");
    auto* sy_maj = synth->add_option("--n-majority", synth_args.spec.n_majority, "Majority rows");
    auto* sy_sep = synth->add_option("--class-separation", synth_args.spec.class_separation,
                                     "Class mean separation");
    auto* sy_noise = synth->add_option("--noise-sd", synth_args.spec.noise_sd,
                                       "SD of uninformative columns");
    auto* sy_seed = synth->add_option("--seed", synth_args.spec.seed, "Random seed");
    auto* sy_out = synth->add_option("--out", synth_args.out_dir, "Output directory");

    // select
    auto* select = app.add_subcommand("select", "GA/BPSO wrapper feature selection");
    csme::SelectArgs select_args;
    std::string algorithm_name = "ga";
    bool desk_scale = false;
    auto* se_train = select->add_option("--train", select_args.train_path, "Training features");
    auto* se_algo = select->add_option("--algorithm", algorithm_name, "ga or bpso");
    auto* se_r = select->add_option("--r", select_args.r, "Oversampling ratio before search");
    auto* se_kn =
        select->add_option("--k-neighbors", select_args.k_neighbors, "SMOTE minority neighbors");
    auto* se_pop =
        select->add_option("--population", select_args.search.population_size, "Population size");
    auto* se_fe = select->add_option("--fe-budget", select_args.search.fe_budget,
                                     "Criterion evaluations per run");
    auto* se_runs = select->add_option("--runs", select_args.search.runs_r, "Independent runs");
    auto* se_folds =
        select->add_option("--folds", select_args.search.cv_folds, "Cross-validation folds");
    auto* se_knnk = select->add_option("--knn-k", select_args.search.knn.k, "k-NN neighbor count");
    auto* se_pc =
        select->add_option("--ga-pc", select_args.search.ga_pc, "GA crossover probability");
    double ga_pm = -1.0;
    auto* se_pm = select->add_option("--ga-pm", ga_pm, "GA per-bit mutation probability "
                                                       "(default 1/n)");
    auto* se_mix = select->add_option("--ga-mix", select_args.search.ga_mix,
                                      "Uniform-crossover exchange probability");
    auto* se_omega =
        select->add_option("--bpso-omega", select_args.search.bpso_omega, "BPSO inertia weight");
    auto* se_c1 = select->add_option("--bpso-c1", select_args.search.bpso_c1, "BPSO c1");
    auto* se_c2 = select->add_option("--bpso-c2", select_args.search.bpso_c2, "BPSO c2");
    auto* se_vmax =
        select->add_option("--bpso-vmax", select_args.search.bpso_vmax, "BPSO velocity clamp");
    auto* se_seed = select->add_option("--seed", select_args.search.master_seed, "Master seed");
    auto* se_threads = select->add_option("--threads", select_args.search.threads,
                                          "Worker threads (results are thread-count invariant)");
    auto* se_desk = select->add_flag("--desk-scale", desk_scale,
                                     "Shrink runs/FE budget for quick experiments");
    auto* se_out = select->add_option("--out", select_args.out_dir, "Output directory");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Train k-NN and report test metrics");
    csme::EvaluateArgs eval_args;
    auto* ev_train = evaluate->add_option("--train", eval_args.train_path, "Training features");
    auto* ev_test = evaluate->add_option("--test", eval_args.test_path, "Test features");
    auto* ev_mask = evaluate->add_option("--mask", eval_args.mask_path, "Optional mask file");
    auto* ev_r = evaluate->add_option("--r", eval_args.r, "Oversampling ratio");
    auto* ev_kn =
        evaluate->add_option("--k-neighbors", eval_args.k_neighbors, "SMOTE minority neighbors");
    auto* ev_knnk = evaluate->add_option("--knn-k", eval_args.knn.k, "k-NN neighbor count");
    bool ev_norm_flag = false;
    auto* ev_norm = evaluate->add_flag("--normalize", ev_norm_flag,
                                       "z-score features using training statistics");
    auto* ev_minse =
        evaluate->add_option("--min-se", eval_args.min_se, "Sensitivity floor for point B");
    auto* ev_prev =
        evaluate->add_option("--prevalence", eval_args.prevalence, "Disease prevalence");
    auto* ev_cfn = evaluate->add_option("--cost-fn", eval_args.cost_fn, "False-negative cost");
    auto* ev_cfp = evaluate->add_option("--cost-fp", eval_args.cost_fp, "False-positive cost");
    auto* ev_seed = evaluate->add_option("--seed", eval_args.seed, "Random seed");
    auto* ev_threads = evaluate->add_option("--threads", eval_args.threads, "Worker threads");
    auto* ev_out = evaluate->add_option("--out", eval_args.out_dir, "Output directory");

    // sweep-r
    auto* sweep = app.add_subcommand("sweep-r", "Evaluate a range of oversampling ratios");
    csme::SweepArgs sweep_args;
    std::string r_values_list;
    auto* sw_train = sweep->add_option("--train", sweep_args.train_path, "Training features");
    auto* sw_test = sweep->add_option("--test", sweep_args.test_path, "Test features");
    auto* sw_rv = sweep->add_option("--r-values", r_values_list,
                                    "Comma-separated ratios, e.g. 0,0.5,1,1.5,2");
    auto* sw_kn =
        sweep->add_option("--k-neighbors", sweep_args.k_neighbors, "SMOTE minority neighbors");
    auto* sw_knnk = sweep->add_option("--knn-k", sweep_args.knn.k, "k-NN neighbor count");
    bool sw_norm_flag = false;
    auto* sw_norm = sweep->add_flag("--normalize", sw_norm_flag,
                                    "z-score features using training statistics");
    auto* sw_seed = sweep->add_option("--seed", sweep_args.seed, "Random seed");
    auto* sw_threads = sweep->add_option("--threads", sweep_args.threads, "Worker threads");
    auto* sw_out = sweep->add_option("--out", sweep_args.out_dir, "Output directory");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);

        KeyValueConfig cfg;
        if (!config_path.empty()) cfg = KeyValueConfig::load(config_path);
        const Resolver rv{cfg};

        if (split->parsed()) {
            rv.str(sp_in, split_args.input, "input");
            rv.real(sp_frac, split_args.test_fraction, "test_fraction");
            rv.seed(sp_seed, split_args.seed, "seed");
            rv.str(sp_out, split_args.out_dir, "out");
            if (split_args.input.empty()) throw std::runtime_error("split: --input is required");
            csme::cmd_split(split_args);
        } else if (oversample->parsed()) {
            rv.str(os_in, os_args.input, "input");
            rv.real(os_r, os_args.r, "r");
            rv.size(os_k, os_args.k_neighbors, "k_neighbors");
            rv.seed(os_seed, os_args.seed, "seed");
            rv.str(os_out, os_args.out_dir, "out");
            if (os_args.input.empty()) {
                throw std::runtime_error("oversample: --input is required");
            }
            csme::cmd_oversample(os_args);
        } else if (synth->parsed()) {
            rv.size(sy_n, synth_args.spec.n_features, "n_features");
            rv.str(sy_inf, informative_list, "informative");
            rv.size(sy_min, synth_args.spec.n_minority, "n_minority");
            rv.size(sy_maj, synth_args.spec.n_majority, "n_majority");
            rv.real(sy_sep, synth_args.spec.class_separation, "class_separation");
            rv.real(sy_noise, synth_args.spec.noise_sd, "noise_sd");
            rv.seed(sy_seed, synth_args.spec.seed, "seed");
            rv.str(sy_out, synth_args.out_dir, "out");
            if (rv.explicit_for(sy_inf, "informative")) {
                synth_args.spec.informative = csme::parse_index_list(informative_list);
            }
            csme::cmd_synth(synth_args);
        } else if (select->parsed()) {
            rv.str(se_train, select_args.train_path, "train");
            rv.str(se_algo, algorithm_name, "algorithm");
            rv.real(se_r, select_args.r, "r");
            rv.size(se_kn, select_args.k_neighbors, "k_neighbors");
            rv.size(se_pop, select_args.search.population_size, "population");
            rv.size(se_fe, select_args.search.fe_budget, "fe_budget");
            rv.size(se_runs, select_args.search.runs_r, "runs");
            rv.size(se_folds, select_args.search.cv_folds, "folds");
            rv.size(se_knnk, select_args.search.knn.k, "knn_k");
            rv.real(se_pc, select_args.search.ga_pc, "ga_pc");
            rv.real(se_pm, ga_pm, "ga_pm");
            rv.real(se_mix, select_args.search.ga_mix, "ga_mix");
            rv.real(se_omega, select_args.search.bpso_omega, "bpso_omega");
            rv.real(se_c1, select_args.search.bpso_c1, "bpso_c1");
            rv.real(se_c2, select_args.search.bpso_c2, "bpso_c2");
            rv.real(se_vmax, select_args.search.bpso_vmax, "bpso_vmax");
            rv.seed(se_seed, select_args.search.master_seed, "seed");
            rv.size(se_threads, select_args.search.threads, "threads");
            rv.flag(se_desk, desk_scale, "desk_scale");
            rv.str(se_out, select_args.out_dir, "out");
            if (select_args.train_path.empty()) {
                throw std::runtime_error("select: --train is required");
            }
            select_args.algorithm = csme::parse_algorithm(algorithm_name);
            if (rv.explicit_for(se_pm, "ga_pm")) select_args.search.ga_pm = ga_pm;
            if (desk_scale) {
                if (!rv.explicit_for(se_runs, "runs")) select_args.search.runs_r = 5;
                if (!rv.explicit_for(se_fe, "fe_budget")) select_args.search.fe_budget = 1500;
            }
            csme::cmd_select(select_args);
        } else if (evaluate->parsed()) {
            rv.str(ev_train, eval_args.train_path, "train");
            rv.str(ev_test, eval_args.test_path, "test");
            rv.str(ev_mask, eval_args.mask_path, "mask");
            rv.real(ev_r, eval_args.r, "r");
            rv.size(ev_kn, eval_args.k_neighbors, "k_neighbors");
            rv.size(ev_knnk, eval_args.knn.k, "knn_k");
            rv.flag(ev_norm, ev_norm_flag, "normalize");
            rv.real(ev_minse, eval_args.min_se, "min_se");
            rv.real(ev_prev, eval_args.prevalence, "prevalence");
            rv.real(ev_cfn, eval_args.cost_fn, "cost_fn");
            rv.real(ev_cfp, eval_args.cost_fp, "cost_fp");
            rv.seed(ev_seed, eval_args.seed, "seed");
            rv.size(ev_threads, eval_args.threads, "threads");
            rv.str(ev_out, eval_args.out_dir, "out");
            eval_args.normalize = ev_norm_flag;
            if (eval_args.train_path.empty() || eval_args.test_path.empty()) {
                throw std::runtime_error("evaluate: --train and --test are required");
            }
            csme::cmd_evaluate(eval_args);
        } else if (sweep->parsed()) {
            rv.str(sw_train, sweep_args.train_path, "train");
            rv.str(sw_test, sweep_args.test_path, "test");
            rv.str(sw_rv, r_values_list, "r_values");
            rv.size(sw_kn, sweep_args.k_neighbors, "k_neighbors");
            rv.size(sw_knnk, sweep_args.knn.k, "knn_k");
            rv.flag(sw_norm, sw_norm_flag, "normalize");
            rv.seed(sw_seed, sweep_args.seed, "seed");
            rv.size(sw_threads, sweep_args.threads, "threads");
            rv.str(sw_out, sweep_args.out_dir, "out");
            sweep_args.normalize = sw_norm_flag;
            if (sweep_args.train_path.empty() || sweep_args.test_path.empty()) {
                throw std::runtime_error("sweep-r: --train and --test are required");
            }
            if (rv.explicit_for(sw_rv, "r_values")) {
                sweep_args.r_values = csme::parse_double_list(r_values_list);
            }
            csme::cmd_sweep_r(sweep_args);
        }
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
