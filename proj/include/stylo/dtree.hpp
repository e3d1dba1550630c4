#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stylo/dataset.hpp"

namespace stylo {

class DtreeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The three pruning controls swept in the experiments. Defaults mirror the
/// reference tool: global pruning on, 25% confidence, min 2 cases per branch.
struct TreeOptions {
    bool global_prune = true;
    int confidence_factor = 25; // percent, 10..100
    int min_cases = 2;          // 1..30

    void validate() const {
        if (confidence_factor < 10 || confidence_factor > 100) {
            throw DtreeError("confidence factor must be in [10,100], got " +
                             std::to_string(confidence_factor));
        }
        if (min_cases < 1 || min_cases > 30) {
            throw DtreeError("min_cases must be in [1,30], got " + std::to_string(min_cases));
        }
    }
};

namespace detail {

/// Extra errors predicted for a leaf with n cases and e observed errors:
/// the upper confidence bound of the binomial at confidence cf, with the
/// classic piecewise approximation (normal bound with continuity
/// correction, interpolated z table).
inline double add_errs(double n, double e, double cf) {
    static const double val[] = {0, 0.001, 0.005, 0.01, 0.05, 0.10, 0.20, 0.40, 1.00};
    static const double dev[] = {4.0, 3.09, 2.58, 2.33, 1.65, 1.28, 0.84, 0.25, 0.00};
    int i = 1;
    while (cf > val[i]) ++i;
    double coeff = dev[i - 1] + (dev[i] - dev[i - 1]) * (cf - val[i - 1]) / (val[i] - val[i - 1]);
    coeff *= coeff;

    if (e < 1e-6) {
        return n * (1.0 - std::exp(std::log(cf) / n));
    }
    if (e < 0.9999) {
        const double v0 = n * (1.0 - std::exp(std::log(cf) / n));
        return v0 + e * (add_errs(n, 1.0, cf) - v0);
    }
    if (e + 0.5 >= n) {
        return 0.67 * (n - e);
    }
    const double pr =
        (e + 0.5 + coeff / 2 +
         std::sqrt(coeff * ((e + 0.5) * (1.0 - (e + 0.5) / n) + coeff / 4.0))) /
        (n + coeff);
    return n * pr - e;
}

inline double entropy(std::span<const int> class_counts, int total) {
    if (total == 0) return 0.0;
    double h = 0;
    for (int c : class_counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / total;
        h -= p * std::log2(p);
    }
    return h;
}

} // namespace detail

struct TreeNode {
    bool leaf = true;
    int attribute = -1;
    double threshold = 0;
    int left = -1;  // x[attribute] <= threshold
    int right = -1; // x[attribute] >  threshold
    int label = 0;  // majority class at this node
    int n_cases = 0;
    int n_errors = 0; // training cases not of the majority class
};

/// Binary decision tree over continuous attributes. Size counts every node,
/// branches and leaves alike.
class DecisionTree {
public:
    std::vector<TreeNode> nodes;
    std::size_t n_features = 0;

    int predict(std::span<const double> x) const {
        if (x.size() != n_features) {
            throw DtreeError("dtree: input has " + std::to_string(x.size()) +
                             " features, tree expects " + std::to_string(n_features));
        }
        int i = 0;
        while (!nodes[static_cast<std::size_t>(i)].leaf) {
            const TreeNode& nd = nodes[static_cast<std::size_t>(i)];
            i = x[static_cast<std::size_t>(nd.attribute)] <= nd.threshold ? nd.left : nd.right;
        }
        return nodes[static_cast<std::size_t>(i)].label;
    }

    std::size_t size() const { return nodes.size(); }

    std::size_t n_leaves() const {
        std::size_t n = 0;
        for (const auto& nd : nodes) n += nd.leaf ? 1 : 0;
        return n;
    }

    void dump(std::ostream& os) const {
        dump_node(os, 0, 0);
        os << "size = " << size() << "\n";
    }

private:
    void dump_node(std::ostream& os, int idx, int depth) const {
        const TreeNode& nd = nodes[static_cast<std::size_t>(idx)];
        const auto indent = [&] {
            for (int d = 0; d < depth; ++d) os << "|   ";
        };
        if (nd.leaf) {
            indent();
            os << "author " << nd.label << " (" << nd.n_cases << "/" << nd.n_errors << ")\n";
            return;
        }
        indent();
        os << "f" << nd.attribute << " <= " << nd.threshold << " :\n";
        dump_node(os, nd.left, depth + 1);
        indent();
        os << "f" << nd.attribute << " > " << nd.threshold << " :\n";
        dump_node(os, nd.right, depth + 1);
    }
};

namespace detail {

struct TreeBuilder {
    const FeatureMatrix& data;
    TreeOptions opts;
    std::vector<TreeNode> nodes;

    explicit TreeBuilder(const FeatureMatrix& d, TreeOptions o) : data(d), opts(o) {}

    static constexpr double kGainEps = 1e-12;

    int majority(std::span<const int> counts) const {
        int best = 0;
        for (int c = 1; c < kNumAuthors; ++c) {
            if (counts[static_cast<std::size_t>(c)] > counts[static_cast<std::size_t>(best)]) {
                best = c; // ties keep the smaller label
            }
        }
        return best;
    }

    int build(std::vector<std::size_t>& idx) {
        std::array<int, kNumAuthors> counts{};
        for (std::size_t r : idx) ++counts[static_cast<std::size_t>(data.labels[r])];
        const int n = static_cast<int>(idx.size());

        TreeNode node;
        node.label = majority(counts);
        node.n_cases = n;
        node.n_errors = n - counts[static_cast<std::size_t>(node.label)];

        const int node_index = static_cast<int>(nodes.size());
        nodes.push_back(node);
        // min_cases acts as a stopping rule: a node with fewer than
        // 2*min_cases cases cannot support two branches. The split choice
        // itself never depends on min_cases, so raising it only truncates
        // the same tree skeleton earlier.
        if (node.n_errors == 0 || n < 2 * opts.min_cases) {
            return node_index;
        }

        const double h_node = entropy(counts, n);
        double best_ratio = -1;
        int best_attr = -1;
        double best_threshold = 0;

        std::vector<std::size_t> order(idx);
        std::array<int, kNumAuthors> left_counts{};
        for (std::size_t attr = 0; attr < data.n_features; ++attr) {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return data.rows[a][attr] < data.rows[b][attr];
            });
            left_counts.fill(0);
            for (int i = 0; i + 1 < n; ++i) {
                const std::size_t row = order[static_cast<std::size_t>(i)];
                ++left_counts[static_cast<std::size_t>(data.labels[row])];
                const double v = data.rows[row][attr];
                const double v_next = data.rows[order[static_cast<std::size_t>(i + 1)]][attr];
                if (v_next <= v) continue; // not a boundary between distinct values
                const int nl = i + 1;
                const int nr = n - nl;

                std::array<int, kNumAuthors> right_counts{};
                for (int c = 0; c < kNumAuthors; ++c) {
                    right_counts[static_cast<std::size_t>(c)] =
                        counts[static_cast<std::size_t>(c)] -
                        left_counts[static_cast<std::size_t>(c)];
                }
                const double pl = static_cast<double>(nl) / n;
                const double pr = static_cast<double>(nr) / n;
                const double gain =
                    h_node - pl * entropy(left_counts, nl) - pr * entropy(right_counts, nr);
                if (gain <= kGainEps) continue;
                const double split_info = -pl * std::log2(pl) - pr * std::log2(pr);
                const double ratio = gain / split_info;
                // first candidate wins ties: lowest attribute, then lowest threshold
                if (ratio > best_ratio + kGainEps) {
                    best_ratio = ratio;
                    best_attr = static_cast<int>(attr);
                    best_threshold = (v + v_next) / 2.0;
                }
            }
        }

        if (best_attr < 0) return node_index; // no admissible split

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t r : idx) {
            (data.rows[r][static_cast<std::size_t>(best_attr)] <= best_threshold ? left_idx
                                                                                 : right_idx)
                .push_back(r);
        }
        const int left = build(left_idx);
        const int right = build(right_idx);
        nodes[static_cast<std::size_t>(node_index)].leaf = false;
        nodes[static_cast<std::size_t>(node_index)].attribute = best_attr;
        nodes[static_cast<std::size_t>(node_index)].threshold = best_threshold;
        nodes[static_cast<std::size_t>(node_index)].left = left;
        nodes[static_cast<std::size_t>(node_index)].right = right;
        return node_index;
    }

    /// Bottom-up pessimistic pruning. Collapses a subtree into a leaf when
    /// the leaf's predicted errors do not exceed the subtree's by more than
    /// `slack` cases; returns the subtree's predicted errors.
    double prune(int idx, double cf, double slack) {
        TreeNode& nd = nodes[static_cast<std::size_t>(idx)];
        const double as_leaf = nd.n_errors + add_errs(nd.n_cases, nd.n_errors, cf);
        if (nd.leaf) return as_leaf;
        const double as_subtree = prune(nd.left, cf, slack) + prune(nd.right, cf, slack);
        if (as_leaf <= as_subtree + slack) {
            nd.leaf = true;
            nd.left = nd.right = -1;
            nd.attribute = -1;
            return as_leaf;
        }
        return as_subtree;
    }

    /// Drops nodes that became unreachable after pruning.
    std::vector<TreeNode> compact() const {
        std::vector<TreeNode> out;
        compact_rec(0, out);
        return out;
    }

    int compact_rec(int idx, std::vector<TreeNode>& out) const {
        const TreeNode& nd = nodes[static_cast<std::size_t>(idx)];
        const int at = static_cast<int>(out.size());
        out.push_back(nd);
        if (!nd.leaf) {
            out[static_cast<std::size_t>(at)].left = compact_rec(nd.left, out);
            out[static_cast<std::size_t>(at)].right = compact_rec(nd.right, out);
        }
        return at;
    }
};

} // namespace detail

/// Greedy gain-ratio induction over midpoint thresholds, then pessimistic
/// pruning at the configured confidence. The optional global pass repeats
/// the bottom-up estimate with a half-case slack, removing borderline
/// subtrees the local pass kept (an approximation of the reference tool's
/// global stage; it can only shrink the tree).
inline DecisionTree dtree_train(const FeatureMatrix& train, TreeOptions opts = {}) {
    opts.validate();
    if (train.empty()) throw DtreeError("dtree_train: empty training set");
    detail::TreeBuilder builder(train, opts);
    std::vector<std::size_t> idx(train.size());
    std::iota(idx.begin(), idx.end(), 0);
    builder.build(idx);
    const double cf = opts.confidence_factor / 100.0;
    builder.prune(0, cf, 0.1);
    if (opts.global_prune) {
        builder.prune(0, cf, 0.5);
    }
    DecisionTree tree;
    tree.nodes = builder.compact();
    tree.n_features = train.n_features;
    return tree;
}

inline int dtree_predict(const DecisionTree& tree, std::span<const double> x) {
    return tree.predict(x);
}

inline double dtree_test_error_pct(const DecisionTree& tree, const FeatureMatrix& test) {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        if (tree.predict(test.rows[i]) != test.labels[i]) ++wrong;
    }
    return test.empty() ? 0.0
                        : 100.0 * static_cast<double>(wrong) / static_cast<double>(test.size());
}

} // namespace stylo
