#include "csme/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "csme/metrics.hpp"
#include "csme/rng.hpp"
#include "text_util.hpp"

namespace csme {

namespace {

constexpr std::uint64_t kOversampleTag = 20;

using detail::fmt_exact;
using detail::fmt_g;
using detail::write_text_file;

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

std::string out_path(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / name).string();
}

/// Oversampling seed tied to (seed, r) only, so the same ratio reproduces the
/// same synthetic rows whether it is reached via evaluate, select or a sweep.
std::uint64_t oversample_seed(std::uint64_t seed, double r) {
    return rng::derive(seed, {kOversampleTag, std::bit_cast<std::uint64_t>(r)});
}

LabeledDataset maybe_oversample(const LabeledDataset& train, double r,
                                std::size_t k_neighbors, std::uint64_t seed) {
    if (r == 0.0) return train;
    OversampleConfig cfg;
    cfg.r = r;
    cfg.k_neighbors = k_neighbors;
    cfg.seed = oversample_seed(seed, r);
    return smote(train, cfg);
}

struct TestMetrics {
    Summary at_threshold;
    double auc_value = 0.0;
    RocCurve curve;
};

TestMetrics score_test_set(const LabeledDataset& train, const LabeledDataset& test,
                           const KnnConfig& knn, std::size_t threads) {
    TestMetrics m;
    const auto scores = knn_scores(train, test, knn, threads);
    std::vector<int> predicted(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        predicted[i] = scores[i] > 0.5 ? 1 : 0;
    }
    m.at_threshold = summary(confusion(test.labels, predicted));
    m.curve = roc_curve(test.labels, scores);
    m.auc_value = auc(m.curve);
    return m;
}

}  // namespace

KeyValueConfig KeyValueConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open config file");
    KeyValueConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        const std::string entry = trim(line);
        if (entry.empty()) continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(path + ": expected key=value at line " +
                                     std::to_string(line_no));
        }
        const std::string key = trim(entry.substr(0, eq));
        if (key.empty()) {
            throw std::runtime_error(path + ": empty key at line " + std::to_string(line_no));
        }
        cfg.values_[key] = trim(entry.substr(eq + 1));
    }
    return cfg;
}

std::string KeyValueConfig::get_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw std::runtime_error("config key '" + key + "' not set");
    return it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
    const std::string text = get_string(key);
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::runtime_error("config key '" + key + "': not a number: '" + text + "'");
    }
    return value;
}

std::size_t KeyValueConfig::get_size(const std::string& key) const {
    const std::string text = get_string(key);
    std::size_t value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::runtime_error("config key '" + key + "': not a non-negative integer: '" +
                                 text + "'");
    }
    return value;
}

std::uint64_t KeyValueConfig::get_uint64(const std::string& key) const {
    const std::string text = get_string(key);
    std::uint64_t value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::runtime_error("config key '" + key + "': not a non-negative integer: '" +
                                 text + "'");
    }
    return value;
}

bool KeyValueConfig::get_bool(const std::string& key) const {
    const std::string text = get_string(key);
    if (text == "1" || text == "true") return true;
    if (text == "0" || text == "false") return false;
    throw std::runtime_error("config key '" + key + "': expected true/false/1/0, got '" + text +
                             "'");
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        const std::string cell = trim(text.substr(start, end - start));
        if (cell.empty()) throw std::invalid_argument("empty entry in list '" + text + "'");
        double v = 0.0;
        const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
            throw std::invalid_argument("not a number: '" + cell + "'");
        }
        values.push_back(v);
        start = end + 1;
        if (end == text.size()) break;
    }
    if (values.empty()) throw std::invalid_argument("empty list");
    return values;
}

std::vector<std::size_t> parse_index_list(const std::string& text) {
    const auto doubles = parse_double_list(text);
    std::vector<std::size_t> values;
    values.reserve(doubles.size());
    for (double v : doubles) {
        if (v < 0.0 || v != std::floor(v)) {
            throw std::invalid_argument("expected non-negative integer in list '" + text + "'");
        }
        values.push_back(static_cast<std::size_t>(v));
    }
    return values;
}

void cmd_split(const SplitArgs& args) {
    const LabeledDataset ds = load_feature_file(args.input);
    const auto [train, test] = stratified_split(ds, args.test_fraction, args.seed);
    save_feature_file(train, out_path(args.out_dir, "train.csv"));
    save_feature_file(test, out_path(args.out_dir, "test.csv"));
}

void cmd_oversample(const OversampleArgs& args) {
    const LabeledDataset ds = load_feature_file(args.input);
    const LabeledDataset balanced =
        maybe_oversample(ds, args.r, args.k_neighbors, args.seed);
    save_feature_file(balanced, out_path(args.out_dir, "oversampled.csv"));
}

void cmd_synth(const SynthArgs& args) {
    save_feature_file(generate(args.spec), out_path(args.out_dir, "synth.csv"));
}

void cmd_select(const SelectArgs& args) {
    const LabeledDataset raw = load_feature_file(args.train_path);
    const LabeledDataset train =
        maybe_oversample(raw, args.r, args.k_neighbors, args.search.master_seed);
    const SelectionReport report = multi_run_select(args.algorithm, train, args.search);
    write_text_file(out_path(args.out_dir, "report.txt"),
                    selection_report_text(report, args.search));
    write_text_file(out_path(args.out_dir, "runs.csv"), selection_runs_csv(report));
    save_mask_file(report.best_overall, out_path(args.out_dir, "mask.txt"));
}

void cmd_evaluate(const EvaluateArgs& args) {
    LabeledDataset train = load_feature_file(args.train_path);
    LabeledDataset test = load_feature_file(args.test_path);
    if (test.n_features != train.n_features) {
        throw std::runtime_error("train/test feature counts differ (" +
                                 std::to_string(train.n_features) + " vs " +
                                 std::to_string(test.n_features) + ")");
    }
    train = maybe_oversample(train, args.r, args.k_neighbors, args.seed);
    if (!args.mask_path.empty()) {
        const FeatureMask mask = load_mask_file(args.mask_path);
        if (mask.bits.size() != train.n_features) {
            throw std::runtime_error(args.mask_path + ": mask is over " +
                                     std::to_string(mask.bits.size()) + " features, data has " +
                                     std::to_string(train.n_features));
        }
        train = project(train, mask);
        test = project(test, mask);
    }
    if (args.normalize) {
        const Standardizer scaler = Standardizer::fit(train);
        train = scaler.apply(train);
        test = scaler.apply(test);
    }

    const TestMetrics m = score_test_set(train, test, args.knn, args.threads);
    const OperatingPoint a = operating_point_a(m.curve);
    const OperatingPoint b = operating_point_b(m.curve, args.min_se);
    const double cost_a = expected_cost(a, args.prevalence, args.cost_fn, args.cost_fp);
    const double cost_b = expected_cost(b, args.prevalence, args.cost_fn, args.cost_fp);

    save_roc_csv(m.curve, out_path(args.out_dir, "roc.csv"));

    // The report carries results only (no input echo), so evaluations that
    // are semantically identical produce identical files.
    std::string text;
    text += "threshold=0.5\n";
    text += "se=" + fmt_g(m.at_threshold.se) + "\n";
    text += "sp=" + fmt_g(m.at_threshold.sp) + "\n";
    text += "accuracy=" + fmt_g(m.at_threshold.accuracy) + "\n";
    text += "auc=" + fmt_g(m.auc_value) + "\n";
    text += "min_se=" + fmt_g(args.min_se) + "\n";
    text += "prevalence=" + fmt_g(args.prevalence) + "\n";
    text += "cost_fn=" + fmt_g(args.cost_fn) + "\n";
    text += "cost_fp=" + fmt_g(args.cost_fp) + "\n";
    text += "roc_file=roc.csv\n\n";
    text += "point     threshold            se            sp      accuracy expected_cost\n";
    for (const auto& [name, op, cost] :
         {std::tuple<const char*, const OperatingPoint&, double>{"A", a, cost_a},
          std::tuple<const char*, const OperatingPoint&, double>{"B", b, cost_b}}) {
        char row[160];
        std::snprintf(row, sizeof(row), "%-5s %13s %13s %13s %13s %13s\n", name,
                      fmt_g(op.threshold).c_str(), fmt_g(op.se).c_str(), fmt_g(op.sp).c_str(),
                      fmt_g(op.accuracy).c_str(), fmt_g(cost).c_str());
        text += row;
    }
    write_text_file(out_path(args.out_dir, "evaluation.txt"), text);

    std::string csv = "metric,value\n";
    csv += "se," + fmt_g(m.at_threshold.se) + "\n";
    csv += "sp," + fmt_g(m.at_threshold.sp) + "\n";
    csv += "accuracy," + fmt_g(m.at_threshold.accuracy) + "\n";
    csv += "auc," + fmt_g(m.auc_value) + "\n";
    csv += "a_threshold," + fmt_g(a.threshold) + "\n";
    csv += "a_se," + fmt_g(a.se) + "\n";
    csv += "a_sp," + fmt_g(a.sp) + "\n";
    csv += "a_accuracy," + fmt_g(a.accuracy) + "\n";
    csv += "a_expected_cost," + fmt_g(cost_a) + "\n";
    csv += "b_threshold," + fmt_g(b.threshold) + "\n";
    csv += "b_se," + fmt_g(b.se) + "\n";
    csv += "b_sp," + fmt_g(b.sp) + "\n";
    csv += "b_accuracy," + fmt_g(b.accuracy) + "\n";
    csv += "b_expected_cost," + fmt_g(cost_b) + "\n";
    write_text_file(out_path(args.out_dir, "evaluation.csv"), csv);
}

std::string roc_file_name(double r) { return "roc_r" + fmt_exact(r) + ".csv"; }

void cmd_sweep_r(const SweepArgs& args) {
    if (args.r_values.empty()) throw std::invalid_argument("r_values must be non-empty");
    const LabeledDataset train = load_feature_file(args.train_path);
    const LabeledDataset test = load_feature_file(args.test_path);
    if (test.n_features != train.n_features) {
        throw std::runtime_error("train/test feature counts differ");
    }

    std::string table = "        r           auc            se            sp      accuracy  roc_file\n";
    std::string csv = "r,auc,se,sp,accuracy,roc_file\n";
    for (const double r : args.r_values) {
        if (r < 0.0) throw std::invalid_argument("oversampling ratio must be >= 0");
        LabeledDataset train_r = maybe_oversample(train, r, args.k_neighbors, args.seed);
        LabeledDataset test_r = test;
        if (args.normalize) {
            const Standardizer scaler = Standardizer::fit(train_r);
            train_r = scaler.apply(train_r);
            test_r = scaler.apply(test_r);
        }
        const TestMetrics m = score_test_set(train_r, test_r, args.knn, args.threads);
        const std::string roc_name = roc_file_name(r);
        save_roc_csv(m.curve, out_path(args.out_dir, roc_name));

        char row[200];
        std::snprintf(row, sizeof(row), "%9s %13s %13s %13s %13s  %s\n", fmt_exact(r).c_str(),
                      fmt_g(m.auc_value).c_str(), fmt_g(m.at_threshold.se).c_str(),
                      fmt_g(m.at_threshold.sp).c_str(), fmt_g(m.at_threshold.accuracy).c_str(),
                      roc_name.c_str());
        table += row;
        csv += fmt_exact(r) + "," + fmt_g(m.auc_value) + "," + fmt_g(m.at_threshold.se) + "," +
               fmt_g(m.at_threshold.sp) + "," + fmt_g(m.at_threshold.accuracy) + "," + roc_name +
               "\n";
    }
    write_text_file(out_path(args.out_dir, "sweep.txt"), table);
    write_text_file(out_path(args.out_dir, "sweep.csv"), csv);
}

}  // namespace csme
