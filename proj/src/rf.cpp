#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "retiomics/models.hpp"
#include "retiomics/rng.hpp"

namespace retiomics::models {

namespace {

struct TreeBuilder {
    const Matrix& X;
    std::span<const int> y;
    const ModelSpec& spec;
    std::size_t mtry;
    Rng& rng;
    Tree tree;

    // Draws `mtry` distinct feature indices (partial Fisher-Yates).
    std::vector<std::size_t> sample_features() {
        std::vector<std::size_t> all(X.cols);
        std::iota(all.begin(), all.end(), 0);
        for (std::size_t i = 0; i < mtry; ++i) {
            const std::size_t j = i + rng.uniform_int(all.size() - i);
            std::swap(all[i], all[j]);
        }
        all.resize(mtry);
        return all;
    }

    static double gini(std::size_t pos, std::size_t total) {
        if (total == 0) return 0.0;
        const double p = static_cast<double>(pos) / static_cast<double>(total);
        return 2.0 * p * (1.0 - p);
    }

    int build(std::vector<std::size_t>& samples, int depth) {
        const std::size_t n = samples.size();
        std::size_t pos = 0;
        for (std::size_t i : samples) pos += static_cast<std::size_t>(y[i]);

        const int node_index = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[node_index].leaf_value = static_cast<double>(pos) / static_cast<double>(n);

        const bool pure = pos == 0 || pos == n;
        const bool depth_capped = spec.max_depth >= 0 && depth >= spec.max_depth;
        if (pure || depth_capped || n < 2 * static_cast<std::size_t>(spec.min_leaf)) {
            return node_index;
        }

        // Best (feature, threshold) by Gini decrease over a random feature
        // subset; first strictly better candidate wins so results follow the
        // deterministic rng stream.
        double best_gain = 1e-12;
        int best_feature = -1;
        double best_threshold = 0.0;
        const double parent_impurity = gini(pos, n);
        std::vector<std::pair<double, int>> values(n);
        for (std::size_t f : sample_features()) {
            for (std::size_t i = 0; i < n; ++i) {
                values[i] = {X(samples[i], f), y[samples[i]]};
            }
            std::sort(values.begin(), values.end());
            std::size_t left_n = 0, left_pos = 0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                ++left_n;
                left_pos += static_cast<std::size_t>(values[i].second);
                if (values[i].first == values[i + 1].first) continue;
                const std::size_t right_n = n - left_n;
                if (left_n < static_cast<std::size_t>(spec.min_leaf) ||
                    right_n < static_cast<std::size_t>(spec.min_leaf)) {
                    continue;
                }
                const std::size_t right_pos = pos - left_pos;
                const double weighted =
                    (static_cast<double>(left_n) * gini(left_pos, left_n) +
                     static_cast<double>(right_n) * gini(right_pos, right_n)) /
                    static_cast<double>(n);
                const double gain = parent_impurity - weighted;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = static_cast<int>(f);
                    best_threshold = values[i].first +
                                     0.5 * (values[i + 1].first - values[i].first);
                }
            }
        }
        if (best_feature < 0) return node_index;

        std::vector<std::size_t> left, right;
        for (std::size_t i : samples) {
            (X(i, static_cast<std::size_t>(best_feature)) <= best_threshold ? left : right)
                .push_back(i);
        }
        if (left.empty() || right.empty()) return node_index;  // numeric edge guard

        tree.nodes[node_index].feature = best_feature;
        tree.nodes[node_index].threshold = best_threshold;
        const int l = build(left, depth + 1);
        tree.nodes[node_index].left = l;
        const int r = build(right, depth + 1);
        tree.nodes[node_index].right = r;
        return node_index;
    }
};

}  // namespace

TrainedModel train_rf(const Matrix& X, std::span<const int> y, const ModelSpec& spec) {
    const std::size_t p = X.cols;
    const std::size_t mtry =
        spec.features_per_split > 0
            ? std::min<std::size_t>(static_cast<std::size_t>(spec.features_per_split), p)
            : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(p))));

    TrainedModel model;
    model.spec = spec;
    model.n_features = p;
    for (int t = 0; t < spec.n_trees; ++t) {
        // Per-tree stream derived from the master seed, so tree-level
        // parallelism could never reorder draws.
        Rng rng(derive_seed(spec.seed, "tree", static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> bootstrap(X.rows);
        for (auto& s : bootstrap) s = rng.uniform_int(X.rows);
        TreeBuilder builder{X, y, spec, mtry, rng, {}};
        builder.build(bootstrap, 0);
        model.trees.push_back(std::move(builder.tree));
    }
    return model;
}

}  // namespace retiomics::models
