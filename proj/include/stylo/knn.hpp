#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "stylo/dataset.hpp"

namespace stylo {

/// k nearest neighbors under Euclidean distance with majority vote.
/// Candidates are ordered by (distance, label, row index) so distance ties
/// resolve the same way on every run; vote ties go to the smallest label.
struct KnnModel {
    FeatureMatrix train;
    int k = 1;
};

inline KnnModel knn_fit(FeatureMatrix train, int k) {
    if (k < 1 || static_cast<std::size_t>(k) > train.size()) {
        throw DatasetError("knn: k must be in [1, " + std::to_string(train.size()) + "]");
    }
    return KnnModel{std::move(train), k};
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline int knn_predict(const KnnModel& model, std::span<const double> x) {
    if (x.size() != model.train.n_features) {
        throw DatasetError("knn: query has " + std::to_string(x.size()) +
                           " features, model expects " + std::to_string(model.train.n_features));
    }
    struct Candidate {
        double dist;
        int label;
        std::size_t row;
    };
    std::vector<Candidate> cand;
    cand.reserve(model.train.size());
    for (std::size_t i = 0; i < model.train.size(); ++i) {
        cand.push_back({squared_distance(model.train.rows[i], x), model.train.labels[i], i});
    }
    const auto canonical = [](const Candidate& a, const Candidate& b) {
        return std::tie(a.dist, a.label, a.row) < std::tie(b.dist, b.label, b.row);
    };
    const std::size_t k = static_cast<std::size_t>(model.k);
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end(),
                      canonical);
    int votes[kNumAuthors] = {};
    for (std::size_t i = 0; i < k; ++i) ++votes[cand[i].label];
    int best = 0;
    for (int c = 1; c < kNumAuthors; ++c) {
        if (votes[c] > votes[best]) best = c; // ties keep the smaller label
    }
    return best;
}

/// Test error as the tables report it: percent of incorrectly classified items.
inline double knn_test_error_pct(const KnnModel& model, const FeatureMatrix& test) {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        if (knn_predict(model, test.rows[i]) != test.labels[i]) ++wrong;
    }
    return test.empty() ? 0.0 : 100.0 * static_cast<double>(wrong) / static_cast<double>(test.size());
}

} // namespace stylo
