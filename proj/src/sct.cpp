#include "nidrex/sct.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nidrex {

int ScoreClusteringTree::route(const FeatureVector& x) const {
    check_dim(x, dim, "ScoreClusteringTree::route");
    int node = 0;
    while (!nodes[node].is_leaf())
        node = x[nodes[node].feature] <= nodes[node].threshold ? nodes[node].left
                                                               : nodes[node].right;
    return node;
}

std::vector<int> ScoreClusteringTree::leaf_ids() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].is_leaf()) out.push_back(static_cast<int>(i));
    return out;
}

PathRule ScoreClusteringTree::path_rule(int leaf) const {
    if (leaf < 0 || leaf >= static_cast<int>(nodes.size()) || !nodes[leaf].is_leaf())
        throw ContractViolation("path_rule: not a leaf of this tree");
    PathRule rule(dim);
    // Parent links are not stored; walk down from the root instead.
    int node = 0;
    while (node != leaf) {
        const SctNode& n = nodes[node];
        // The leaf lies in exactly one subtree; find which by index range.
        // Node indices are assigned preorder, so the right subtree's indices
        // all exceed the left subtree's.
        if (leaf >= n.right) {
            rule[n.feature] = rule[n.feature].intersect(Interval::more_than(n.threshold));
            node = n.right;
        } else {
            rule[n.feature] = rule[n.feature].intersect(Interval::at_most(n.threshold));
            node = n.left;
        }
    }
    return rule;
}

int ScoreClusteringTree::depth() const {
    // Preorder layout: compute by walking.
    struct Item {
        int node;
        int depth;
    };
    int best = 0;
    std::vector<Item> stack{{0, 0}};
    while (!stack.empty()) {
        auto [node, d] = stack.back();
        stack.pop_back();
        best = std::max(best, d);
        if (!nodes[node].is_leaf()) {
            stack.push_back({nodes[node].left, d + 1});
            stack.push_back({nodes[node].right, d + 1});
        }
    }
    return best;
}

std::string ScoreClusteringTree::dump() const {
    std::ostringstream os;
    struct Item {
        int node;
        int depth;
    };
    std::vector<Item> stack{{0, 0}};
    while (!stack.empty()) {
        auto [node, d] = stack.back();
        stack.pop_back();
        const SctNode& n = nodes[node];
        for (int i = 0; i < d; ++i) os << "  ";
        if (n.is_leaf()) {
            os << "leaf#" << node << " n=" << n.samples.size()
               << (n.label ? " anomalous" : " unlabeled") << "\n";
        } else {
            os << "node#" << node << " x" << n.feature << " <= " << n.threshold << "\n";
            stack.push_back({n.right, d + 1});
            stack.push_back({n.left, d + 1});
        }
    }
    return os.str();
}

bool ScoreClusteringTree::operator==(const ScoreClusteringTree& o) const {
    if (dim != o.dim || !(norm == o.norm) || nodes.size() != o.nodes.size())
        return false;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const SctNode &a = nodes[i], &b = o.nodes[i];
        if (a.feature != b.feature || a.threshold != b.threshold || a.left != b.left ||
            a.right != b.right || a.samples != b.samples || a.label != b.label)
            return false;
    }
    return true;
}

std::optional<SplitChoice> best_split(const Dataset& data,
                                      const std::vector<double>& norm_scores,
                                      const std::vector<int>& samples) {
    const std::size_t n = samples.size();
    if (n < 2) return std::nullopt;
    const std::size_t d = data[samples[0]].size();

    double total = 0.0;
    for (int i : samples) total += norm_scores[i];
    const double parent_impurity = gini(total / static_cast<double>(n));

    std::optional<SplitChoice> best;
    std::vector<std::pair<double, double>> vals(n);  // (feature value, score)
    for (std::size_t f = 0; f < d; ++f) {
        for (std::size_t i = 0; i < n; ++i)
            vals[i] = {data[samples[i]][f], norm_scores[samples[i]]};
        std::sort(vals.begin(), vals.end());
        if (vals.front().first == vals.back().first) continue;

        double left_sum = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            left_sum += vals[i].second;
            if (vals[i].first == vals[i + 1].first) continue;
            const double t = vals[i].first + 0.5 * (vals[i + 1].first - vals[i].first);
            const double nl = static_cast<double>(i + 1);
            const double nr = static_cast<double>(n - i - 1);
            const double gain = parent_impurity -
                                nl / static_cast<double>(n) * gini(left_sum / nl) -
                                nr / static_cast<double>(n) * gini((total - left_sum) / nr);
            if (gain > 0.0 &&
                (!best || gain > best->gain ||
                 (gain == best->gain && (static_cast<int>(f) < best->feature ||
                                         (static_cast<int>(f) == best->feature &&
                                          t < best->threshold))))) {
                best = SplitChoice{static_cast<int>(f), t, gain};
            }
        }
    }
    return best;
}

namespace {

struct SctBuilder {
    const Dataset& data;
    const std::vector<double>& raw;
    const std::vector<double>& norm;
    double phi;
    const SctParams& params;
    std::vector<SctNode> nodes;

    int grow(std::vector<int>&& samples, int depth) {
        const int self = static_cast<int>(nodes.size());
        nodes.push_back({});

        bool stop = static_cast<int>(samples.size()) <= 1 || depth >= params.max_depth;
        if (!stop) {
            double mn = kInf, mx = -kInf;
            for (int i : samples) {
                mn = std::min(mn, norm[i]);
                mx = std::max(mx, norm[i]);
            }
            stop = (mx - mn) < params.epsilon;
        }

        std::optional<SplitChoice> split;
        if (!stop) split = best_split(data, norm, samples);

        if (!split) {
            SctNode& leaf = nodes[self];
            leaf.samples = std::move(samples);
            std::sort(leaf.samples.begin(), leaf.samples.end());
            leaf.label = 1;
            for (int i : leaf.samples)
                if (!(raw[i] < phi)) {
                    leaf.label = 0;
                    break;
                }
            return self;
        }

        std::vector<int> left, right;
        for (int i : samples)
            (data[i][split->feature] <= split->threshold ? left : right).push_back(i);
        samples.clear();

        nodes[self].feature = split->feature;
        nodes[self].threshold = split->threshold;
        const int l = grow(std::move(left), depth + 1);
        const int r = grow(std::move(right), depth + 1);
        nodes[self].left = l;
        nodes[self].right = r;
        return self;
    }
};

}  // namespace

ScoreClusteringTree build_sct(const Dataset& data,
                              const std::vector<double>& raw_scores, double phi,
                              const SctParams& params) {
    if (data.empty()) throw ContractViolation("build_sct: empty data");
    if (raw_scores.size() != data.size())
        throw ContractViolation("build_sct: scores/data size mismatch");
    if (params.max_depth < 1) throw ContractViolation("build_sct: max_depth must be >= 1");
    if (!(params.epsilon > 0.0)) throw ContractViolation("build_sct: epsilon must be > 0");

    ScoreClusteringTree tree;
    tree.dim = data[0].size();
    double mn = kInf, mx = -kInf;
    for (double s : raw_scores) {
        mn = std::min(mn, s);
        mx = std::max(mx, s);
    }
    tree.norm = ScoreNorm{mn, mx};

    std::vector<double> norm(raw_scores.size());
    for (std::size_t i = 0; i < raw_scores.size(); ++i)
        norm[i] = tree.norm.normalize(raw_scores[i]);

    std::vector<int> all(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) all[i] = static_cast<int>(i);

    SctBuilder builder{data, raw_scores, norm, phi, params, {}};
    builder.grow(std::move(all), 0);
    tree.nodes = std::move(builder.nodes);
    return tree;
}

ScoreClusteringTree build_sct(const Dataset& data, const SourceModel& model,
                              double phi, const SctParams& params) {
    return build_sct(data, model.score_batch(data), phi, params);
}

}  // namespace nidrex
