#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "csme/dataset.hpp"
#include "csme/neighbors.hpp"
#include "csme/oversample.hpp"
#include "csme/search.hpp"
#include "csme/synthbench.hpp"

namespace csme {

/// Flat `key=value` configuration file; '#' starts a comment. Command-line
/// flags override these values.
class KeyValueConfig {
public:
    static KeyValueConfig load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::size_t get_size(const std::string& key) const;
    std::uint64_t get_uint64(const std::string& key) const;
    bool get_bool(const std::string& key) const;

private:
    std::map<std::string, std::string> values_;
};

std::vector<double> parse_double_list(const std::string& text);
std::vector<std::size_t> parse_index_list(const std::string& text);

struct SplitArgs {
    std::string input;
    double test_fraction = 0.2;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
};

struct OversampleArgs {
    std::string input;
    double r = 1.0;
    std::size_t k_neighbors = 5;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
};

struct SynthArgs {
    SynthSpec spec;
    std::string out_dir = "out";
};

struct SelectArgs {
    std::string train_path;
    Algorithm algorithm = Algorithm::ga;
    double r = 1.0;  // oversampling applied before the search; 0 disables
    std::size_t k_neighbors = 5;
    SearchConfig search{};
    std::string out_dir = "out";
};

struct EvaluateArgs {
    std::string train_path;
    std::string test_path;
    std::string mask_path;  // empty: use all features
    double r = 1.0;
    std::size_t k_neighbors = 5;
    KnnConfig knn{};
    bool normalize = false;
    double min_se = 0.95;
    double prevalence = 0.015;
    double cost_fn = 1.0;
    double cost_fp = 1.0;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::string out_dir = "out";
};

struct SweepArgs {
    std::string train_path;
    std::string test_path;
    std::vector<double> r_values = {0.0, 0.5, 1.0, 1.5, 2.0};
    std::size_t k_neighbors = 5;
    KnnConfig knn{};
    bool normalize = false;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::string out_dir = "out";
};

/// Pipeline commands. Each is a pure function of (args, input files): a
/// repeated invocation writes byte-identical files. All failures surface as
/// exceptions; the CLI maps them to `error:` diagnostics and a nonzero exit.
void cmd_split(const SplitArgs& args);                // -> train.csv, test.csv
void cmd_oversample(const OversampleArgs& args);      // -> oversampled.csv
void cmd_synth(const SynthArgs& args);                // -> synth.csv
void cmd_select(const SelectArgs& args);              // -> report.txt, runs.csv, mask.txt
void cmd_evaluate(const EvaluateArgs& args);          // -> evaluation.txt/.csv, roc.csv
void cmd_sweep_r(const SweepArgs& args);              // -> sweep.txt/.csv, roc_r<r>.csv

/// Name of the per-r ROC file written by cmd_sweep_r.
std::string roc_file_name(double r);

}  // namespace csme
