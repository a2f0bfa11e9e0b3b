#include "csme/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "csme/rng.hpp"

namespace csme {

namespace {

std::vector<std::string> split_cells(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return cells;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error(path + ": " + what);
}

double parse_real(const std::string& path, const std::string& cell, std::size_t line_no) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last) {
        fail(path, "non-numeric cell '" + cell + "' at line " + std::to_string(line_no));
    }
    if (!std::isfinite(value)) {
        fail(path, "non-finite value at line " + std::to_string(line_no));
    }
    return value;
}

void append_real(std::string& out, double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    out.append(buf, res.ptr);
}

/// Class index lists in a canonical order: sorted by id so the downstream
/// seeded shuffle, and therefore fold/split membership, does not depend on
/// the row order of the input.
std::vector<std::size_t> class_indices_by_id(const LabeledDataset& ds, int label) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        if (ds.labels[i] == label) idx.push_back(i);
    }
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (ds.ids[a] != ds.ids[b]) return ds.ids[a] < ds.ids[b];
        return a < b;
    });
    return idx;
}

}  // namespace

std::size_t LabeledDataset::count_label(int label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

void LabeledDataset::validate() const {
    if (labels.size() != ids.size()) {
        throw std::runtime_error("dataset: ids/labels size mismatch");
    }
    if (features.size() != ids.size() * n_features) {
        throw std::runtime_error("dataset: feature matrix size mismatch");
    }
    for (int label : labels) {
        if (label != 0 && label != 1) {
            throw std::runtime_error("dataset: label outside {0,1}");
        }
    }
    for (double v : features) {
        if (!std::isfinite(v)) {
            throw std::runtime_error("dataset: non-finite feature value");
        }
    }
}

std::size_t FeatureMask::cardinality() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

FeatureMask FeatureMask::all_ones(std::size_t n) {
    FeatureMask mask;
    mask.bits.assign(n, 1);
    return mask;
}

LabeledDataset load_feature_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(path, "cannot open file");

    LabeledDataset ds;
    std::string line;
    std::size_t line_no = 0;

    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) return false;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    };

    if (!next_line()) fail(path, "empty file");
    if (line.rfind("#source=", 0) == 0) {
        ds.source_tag = line.substr(8);
        if (!next_line()) fail(path, "missing header");
    }

    const auto header = split_cells(line);
    if (header.size() < 3 || header[0] != "id" || header[1] != "label") {
        fail(path, "malformed header at line " + std::to_string(line_no) +
                       " (expected id,label,f1,...,fn)");
    }
    ds.n_features = header.size() - 2;

    std::unordered_set<std::string> seen_ids;
    while (next_line()) {
        if (line.empty()) {
            if (in.peek() == std::char_traits<char>::eof()) break;
            fail(path, "ragged row at line " + std::to_string(line_no));
        }
        const auto cells = split_cells(line);
        if (cells.size() != ds.n_features + 2) {
            fail(path, "ragged row at line " + std::to_string(line_no));
        }
        if (!seen_ids.insert(cells[0]).second) {
            fail(path, "duplicate id '" + cells[0] + "' at line " + std::to_string(line_no));
        }
        if (cells[1] != "0" && cells[1] != "1") {
            fail(path, "label outside {0,1} at line " + std::to_string(line_no));
        }
        ds.ids.push_back(cells[0]);
        ds.labels.push_back(cells[1] == "1" ? 1 : 0);
        for (std::size_t j = 0; j < ds.n_features; ++j) {
            ds.features.push_back(parse_real(path, cells[j + 2], line_no));
        }
    }

    ds.validate();
    return ds;
}

void save_feature_file(const LabeledDataset& ds, const std::string& path) {
    ds.validate();
    for (const auto& id : ds.ids) {
        if (id.find(',') != std::string::npos) {
            throw std::runtime_error(path + ": id '" + id + "' contains a comma");
        }
    }

    std::string out;
    out.reserve(ds.n_rows() * (ds.n_features * 12 + 16));
    if (!ds.source_tag.empty()) {
        out += "#source=";
        out += ds.source_tag;
        out += '\n';
    }
    out += "id,label";
    for (std::size_t j = 0; j < ds.n_features; ++j) {
        out += ",f";
        out += std::to_string(j + 1);
    }
    out += '\n';
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        out += ds.ids[i];
        out += ',';
        out += ds.labels[i] == 1 ? '1' : '0';
        const auto row = ds.row(i);
        for (double v : row) {
            out += ',';
            append_real(out, v);
        }
        out += '\n';
    }

    std::ofstream file(path, std::ios::binary);
    if (!file) fail(path, "cannot open file for writing");
    file << out;
    if (!file) fail(path, "write failed");
}

std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& ds,
                                                           double test_fraction,
                                                           std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw std::invalid_argument("test_fraction must be in (0,1)");
    }
    std::vector<std::size_t> test_rows;
    std::vector<std::size_t> train_rows;
    for (int label : {0, 1}) {
        auto idx = class_indices_by_id(ds, label);
        if (idx.size() < 2) {
            throw std::runtime_error("class " + std::to_string(label) +
                                     " has fewer than 2 samples");
        }
        rng::SplitMix64 gen(rng::derive(seed, {static_cast<std::uint64_t>(label)}));
        gen.shuffle(idx);
        const auto n_test = static_cast<std::size_t>(
            std::llround(static_cast<double>(idx.size()) * test_fraction));
        test_rows.insert(test_rows.end(), idx.begin(), idx.begin() + n_test);
        train_rows.insert(train_rows.end(), idx.begin() + n_test, idx.end());
    }
    std::sort(test_rows.begin(), test_rows.end());
    std::sort(train_rows.begin(), train_rows.end());
    return {subset(ds, train_rows), subset(ds, test_rows)};
}

FoldAssignment stratified_kfold(const LabeledDataset& ds, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("fold count must be >= 2");
    FoldAssignment folds;
    folds.k = k;
    folds.fold_of.assign(ds.n_rows(), 0);
    for (int label : {0, 1}) {
        auto idx = class_indices_by_id(ds, label);
        if (idx.size() < k) {
            throw std::runtime_error("class " + std::to_string(label) + " smaller than k=" +
                                     std::to_string(k));
        }
        rng::SplitMix64 gen(rng::derive(seed, {static_cast<std::uint64_t>(label)}));
        gen.shuffle(idx);
        for (std::size_t j = 0; j < idx.size(); ++j) {
            folds.fold_of[idx[j]] = j % k;
        }
    }
    return folds;
}

LabeledDataset project(const LabeledDataset& ds, const FeatureMask& mask) {
    if (mask.bits.size() != ds.n_features) {
        throw std::invalid_argument("mask length does not match feature count");
    }
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < mask.bits.size(); ++j) {
        if (mask.bits[j]) cols.push_back(j);
    }
    if (cols.empty()) throw std::invalid_argument("empty subset");

    LabeledDataset out;
    out.ids = ds.ids;
    out.labels = ds.labels;
    out.source_tag = ds.source_tag;
    out.n_features = cols.size();
    out.features.reserve(ds.n_rows() * cols.size());
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        const auto row = ds.row(i);
        for (std::size_t c : cols) out.features.push_back(row[c]);
    }
    return out;
}

LabeledDataset subset(const LabeledDataset& ds, std::span<const std::size_t> rows) {
    LabeledDataset out;
    out.n_features = ds.n_features;
    out.source_tag = ds.source_tag;
    out.ids.reserve(rows.size());
    out.labels.reserve(rows.size());
    out.features.reserve(rows.size() * ds.n_features);
    for (std::size_t r : rows) {
        out.ids.push_back(ds.ids[r]);
        out.labels.push_back(ds.labels[r]);
        const auto row = ds.row(r);
        out.features.insert(out.features.end(), row.begin(), row.end());
    }
    return out;
}

Standardizer Standardizer::fit(const LabeledDataset& train) {
    if (train.n_rows() == 0) throw std::invalid_argument("cannot fit standardizer on empty data");
    Standardizer s;
    s.mean.assign(train.n_features, 0.0);
    s.sd.assign(train.n_features, 0.0);
    const double n = static_cast<double>(train.n_rows());
    for (std::size_t i = 0; i < train.n_rows(); ++i) {
        const auto row = train.row(i);
        for (std::size_t j = 0; j < train.n_features; ++j) s.mean[j] += row[j];
    }
    for (double& m : s.mean) m /= n;
    for (std::size_t i = 0; i < train.n_rows(); ++i) {
        const auto row = train.row(i);
        for (std::size_t j = 0; j < train.n_features; ++j) {
            const double d = row[j] - s.mean[j];
            s.sd[j] += d * d;
        }
    }
    for (double& v : s.sd) {
        v = std::sqrt(v / n);
        if (v == 0.0) v = 1.0;  // constant column: center only
    }
    return s;
}

LabeledDataset Standardizer::apply(const LabeledDataset& ds) const {
    if (ds.n_features != mean.size()) {
        throw std::invalid_argument("standardizer dimension mismatch");
    }
    LabeledDataset out = ds;
    for (std::size_t i = 0; i < out.n_rows(); ++i) {
        for (std::size_t j = 0; j < out.n_features; ++j) {
            double& v = out.features[i * out.n_features + j];
            v = (v - mean[j]) / sd[j];
        }
    }
    return out;
}

}  // namespace csme
