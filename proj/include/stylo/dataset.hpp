#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stylo/corpus.hpp"
#include "stylo/rng.hpp"

namespace stylo {

class DatasetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kNumAuthors = 10;

/// Rows of frequency vectors with author labels 0-9.
struct FeatureMatrix {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::string feature_set_name;
    std::size_t n_features = 0;

    std::size_t size() const { return rows.size(); }
    bool empty() const { return rows.empty(); }

    void add_row(std::vector<double> v, int label) {
        if (n_features == 0 && rows.empty()) n_features = v.size();
        if (v.size() != n_features) {
            throw DatasetError("row has " + std::to_string(v.size()) + " features, expected " +
                               std::to_string(n_features));
        }
        if (label < 0 || label >= kNumAuthors) {
            throw DatasetError("label out of range 0-9: " + std::to_string(label));
        }
        rows.push_back(std::move(v));
        labels.push_back(label);
    }
};

inline FeatureMatrix featurize_corpus(std::span<const Document> corpus, const FeatureSet& fs) {
    FeatureMatrix m;
    m.feature_set_name = fs.name;
    m.n_features = fs.size();
    for (const auto& doc : corpus) {
        if (doc.word_count == 0) continue; // frequencies undefined
        m.add_row(featurize(doc, fs), doc.author_id);
    }
    return m;
}

/// Concatenation rule for methods without a validation phase: train and
/// validation become one training set.
inline FeatureMatrix concat(const FeatureMatrix& a, const FeatureMatrix& b) {
    if (!a.empty() && !b.empty() && a.n_features != b.n_features) {
        throw DatasetError("concat: feature counts differ");
    }
    FeatureMatrix out = a;
    for (std::size_t i = 0; i < b.size(); ++i) {
        out.add_row(b.rows[i], b.labels[i]);
    }
    return out;
}

/// 50%-25%-25% stratified split. Per author with n texts:
/// validation = test = floor(n/4), train = n - 2*floor(n/4).
struct Split {
    FeatureMatrix train;
    FeatureMatrix validation;
    FeatureMatrix test;
    std::uint64_t shuffle_seed = 0;
};

/// Shuffles each author's rows with the fixed PRNG and deals them into
/// train/validation/test. Equal seeds give bit-identical splits; different
/// seeds change membership but never the per-author sizes.
inline Split split_corpus(const FeatureMatrix& m, std::uint64_t seed) {
    std::map<int, std::vector<std::size_t>> by_author;
    for (std::size_t i = 0; i < m.size(); ++i) by_author[m.labels[i]].push_back(i);

    for (const auto& [author, idx] : by_author) {
        if (idx.size() < 4) {
            throw DatasetError("author " + std::to_string(author) + " has only " +
                               std::to_string(idx.size()) + " rows; need at least 4 to split");
        }
    }

    Split split;
    split.shuffle_seed = seed;
    for (auto* part : {&split.train, &split.validation, &split.test}) {
        part->feature_set_name = m.feature_set_name;
        part->n_features = m.n_features;
    }

    Rng rng(seed);
    for (auto& [author, idx] : by_author) {
        shuffle(idx, rng);
        const std::size_t quarter = idx.size() / 4;
        const std::size_t n_train = idx.size() - 2 * quarter;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            FeatureMatrix* part = i < n_train                ? &split.train
                                  : i < n_train + quarter    ? &split.validation
                                                             : &split.test;
            part->add_row(m.rows[idx[i]], m.labels[idx[i]]);
        }
    }
    return split;
}

namespace detail {

/// Shortest decimal form that reads back to the same double.
inline void append_double(std::string& out, double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    out.append(buf, res.ptr);
}

} // namespace detail

/// One row per line: frequencies separated by single spaces, label last.
/// Numbers use shortest round-trip form so read(write(m)) == m bit-exactly.
inline void write_matrix(const FeatureMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DatasetError("cannot write matrix file: " + path.string());
    std::string line;
    for (std::size_t i = 0; i < m.size(); ++i) {
        line.clear();
        for (const double v : m.rows[i]) {
            detail::append_double(line, v);
            line.push_back(' ');
        }
        line += std::to_string(m.labels[i]);
        line.push_back('\n');
        out << line;
    }
}

/// Reads the format above. Tolerant of repeated whitespace, tabs and CRLF
/// (the published split files are not byte-uniform).
inline FeatureMatrix read_matrix(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetError("cannot open matrix file: " + path.string());
    FeatureMatrix m;
    std::string line;
    std::size_t line_no = 0;
    std::vector<double> fields;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        fields.clear();
        const char* p = line.data();
        const char* end = p + line.size();
        while (p < end) {
            while (p < end && (*p == ' ' || *p == '\t')) ++p;
            if (p == end) break;
            double value = 0;
            const auto res = std::from_chars(p, end, value);
            if (res.ec != std::errc()) {
                throw DatasetError(path.string() + ":" + std::to_string(line_no) +
                                   ": non-numeric field");
            }
            p = res.ptr;
            if (p < end && *p != ' ' && *p != '\t') {
                throw DatasetError(path.string() + ":" + std::to_string(line_no) +
                                   ": non-numeric field");
            }
            fields.push_back(value);
        }
        if (fields.empty()) continue;
        if (fields.size() < 2) {
            throw DatasetError(path.string() + ":" + std::to_string(line_no) +
                               ": row needs at least one feature and a label");
        }
        const double raw_label = fields.back();
        fields.pop_back();
        const int label = static_cast<int>(raw_label);
        if (raw_label != static_cast<double>(label) || label < 0 || label >= kNumAuthors) {
            throw DatasetError(path.string() + ":" + std::to_string(line_no) +
                               ": label outside 0-9");
        }
        if (m.n_features != 0 && fields.size() != m.n_features) {
            throw DatasetError(path.string() + ":" + std::to_string(line_no) + ": ragged row (" +
                               std::to_string(fields.size()) + " features, expected " +
                               std::to_string(m.n_features) + ")");
        }
        for (const double v : fields) {
            if (v < 0.0 || v > 1.0) {
                throw DatasetError(path.string() + ":" + std::to_string(line_no) +
                                   ": frequency outside [0,1]");
            }
        }
        m.add_row(fields, label);
    }
    return m;
}

} // namespace stylo
