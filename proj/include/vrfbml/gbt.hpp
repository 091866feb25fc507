#ifndef VRFBML_GBT_HPP
#define VRFBML_GBT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "vrfbml/dataset.hpp"
#include "vrfbml/errors.hpp"

namespace vrfbml {

/**
 * Optimal leaf value under squared loss with unit hessians and L2 leaf
 * regularization: sum(residuals) / (count + lambda).
 */
inline double leaf_output(std::span<const double> residuals, double lambda) {
    if (residuals.empty()) throw TrainingError("leaf_output: empty residual list");
    if (!(lambda >= 0.0)) throw TrainingError("leaf_output: lambda must be >= 0");
    double sum = 0.0;
    for (double r : residuals) sum += r;
    return sum / (static_cast<double>(residuals.size()) + lambda);
}

/**
 * Second-order split gain with unit hessians:
 * 0.5 * [GL^2/(nL+lambda) + GR^2/(nR+lambda) - (GL+GR)^2/(nL+nR+lambda)].
 */
inline double split_gain(std::span<const double> left_residuals,
                         std::span<const double> right_residuals, double lambda) {
    if (left_residuals.empty() || right_residuals.empty())
        throw TrainingError("split_gain: both sides must be nonempty");
    if (!(lambda >= 0.0)) throw TrainingError("split_gain: lambda must be >= 0");
    double gl = 0.0, gr = 0.0;
    for (double r : left_residuals) gl += r;
    for (double r : right_residuals) gr += r;
    const auto nl = static_cast<double>(left_residuals.size());
    const auto nr = static_cast<double>(right_residuals.size());
    return 0.5 * (gl * gl / (nl + lambda) + gr * gr / (nr + lambda) -
                  (gl + gr) * (gl + gr) / (nl + nr + lambda));
}

struct GbtHyper {
    int rounds = 100;
    double learning_rate = 0.3; // eta in (0, 1]
    double lambda = 1.0;        // L2 leaf regularization
    int max_depth = 6;
    int min_child_count = 1;
    double min_split_gain = 0.0;

    void validate() const {
        if (rounds < 1) throw TrainingError("gbt: rounds must be >= 1");
        if (!(learning_rate > 0.0 && learning_rate <= 1.0))
            throw TrainingError("gbt: learning_rate must be in (0, 1]");
        if (!(lambda >= 0.0)) throw TrainingError("gbt: lambda must be >= 0");
        if (max_depth < 0) throw TrainingError("gbt: max_depth must be >= 0");
        if (min_child_count < 1) throw TrainingError("gbt: min_child_count must be >= 1");
        if (!(min_split_gain >= 0.0)) throw TrainingError("gbt: min_split_gain must be >= 0");
    }
};

/// Flat binary tree over the single time feature. Node 0 is the root;
/// internal nodes route x < threshold to the left child.
struct TreeNode {
    double threshold = 0.0; // internal nodes only
    double value = 0.0;     // leaves only
    int left = -1;
    int right = -1;

    bool is_leaf() const { return left < 0; }
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    double evaluate(double x) const {
        int idx = 0;
        while (!nodes[idx].is_leaf()) idx = x < nodes[idx].threshold ? nodes[idx].left : nodes[idx].right;
        return nodes[idx].value;
    }
};

struct GbtModel {
    double base_score = 0.0; // initial prediction (training target mean)
    std::vector<RegressionTree> trees;
    double learning_rate = 0.3;
    double lambda = 1.0;
    int max_depth = 6;
    int min_child_count = 1;
    double min_split_gain = 0.0;
};

namespace gbt_detail {

struct Builder {
    const std::vector<double>& x; // sorted ascending within each node range
    const std::vector<double>& residuals;
    const GbtHyper& hyper;
    RegressionTree& tree;
    std::vector<double>& leaf_of_sample; // raw leaf value seen by each sample

    // order holds sample indices sorted by x; a node owns order[begin, end)
    int build(std::vector<std::size_t>& order, std::size_t begin, std::size_t end, int depth) {
        const std::size_t count = end - begin;
        double best_gain = hyper.min_split_gain;
        std::size_t best_pos = 0;
        double best_threshold = 0.0;
        bool has_split = false;

        if (depth < hyper.max_depth && count >= 2) {
            double total = 0.0;
            for (std::size_t k = begin; k < end; ++k) total += residuals[order[k]];
            const double lambda = hyper.lambda;
            const double parent_term =
                total * total / (static_cast<double>(count) + lambda);
            double left_sum = 0.0;
            for (std::size_t k = begin; k + 1 < end; ++k) {
                left_sum += residuals[order[k]];
                const double x_here = x[order[k]];
                const double x_next = x[order[k + 1]];
                if (x_next == x_here) continue; // only between distinct values
                const auto nl = static_cast<double>(k + 1 - begin);
                const auto nr = static_cast<double>(end - k - 1);
                if (nl < hyper.min_child_count || nr < hyper.min_child_count) continue;
                const double right_sum = total - left_sum;
                const double gain = 0.5 * (left_sum * left_sum / (nl + lambda) +
                                           right_sum * right_sum / (nr + lambda) - parent_term);
                // strict > keeps the lowest threshold on ties
                if (gain > best_gain) {
                    best_gain = gain;
                    best_pos = k + 1;
                    best_threshold = 0.5 * (x_here + x_next);
                    has_split = true;
                }
            }
        }

        const int node_index = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        if (!has_split) {
            double sum = 0.0;
            for (std::size_t k = begin; k < end; ++k) sum += residuals[order[k]];
            const double value = sum / (static_cast<double>(count) + hyper.lambda);
            tree.nodes[node_index].value = value;
            for (std::size_t k = begin; k < end; ++k) leaf_of_sample[order[k]] = value;
            return node_index;
        }
        tree.nodes[node_index].threshold = best_threshold;
        const int left = build(order, begin, best_pos, depth + 1);
        const int right = build(order, best_pos, end, depth + 1);
        tree.nodes[node_index].left = left;
        tree.nodes[node_index].right = right;
        return node_index;
    }
};

} // namespace gbt_detail

/**
 * Second-order gradient boosting with exact greedy splits over midpoints of
 * consecutive distinct times. The base prediction is the target mean, each
 * round fits one tree to the current residuals, and predictions move by
 * learning_rate times the raw leaf value.
 */
inline GbtModel fit_gbt(const TimeSeriesDataset& train, const GbtHyper& hyper = {}) {
    hyper.validate();
    const std::size_t n = train.size();
    if (n < 1) throw TrainingError("fit_gbt: need at least 1 sample");

    const std::vector<double> x = train.times();
    const std::vector<double> y = train.temperatures();

    GbtModel model;
    model.learning_rate = hyper.learning_rate;
    model.lambda = hyper.lambda;
    model.max_depth = hyper.max_depth;
    model.min_child_count = hyper.min_child_count;
    model.min_split_gain = hyper.min_split_gain;
    model.base_score = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

    std::vector<double> predictions(n, model.base_score);
    std::vector<double> residuals(n, 0.0);
    std::vector<double> leaf_of_sample(n, 0.0);

    model.trees.reserve(static_cast<std::size_t>(hyper.rounds));
    for (int round = 0; round < hyper.rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) residuals[i] = y[i] - predictions[i];
        RegressionTree tree;
        gbt_detail::Builder builder{x, residuals, hyper, tree, leaf_of_sample};
        builder.build(order, 0, n, 0);
        for (std::size_t i = 0; i < n; ++i)
            predictions[i] += hyper.learning_rate * leaf_of_sample[i];
        model.trees.push_back(std::move(tree));
    }
    return model;
}

inline double predict_gbt(const GbtModel& model, double time_s) {
    double acc = model.base_score;
    for (const auto& tree : model.trees) acc += model.learning_rate * tree.evaluate(time_s);
    return acc;
}

} // namespace vrfbml

#endif // VRFBML_GBT_HPP
