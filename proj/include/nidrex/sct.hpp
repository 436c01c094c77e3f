#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nidrex/model.hpp"
#include "nidrex/types.hpp"

namespace nidrex {

/// Min-max frame for mapping raw model scores onto [0,1] so the Gini
/// impurity below behaves like one over a pseudo-probability.
struct ScoreNorm {
    double min = 0.0;
    double max = 1.0;

    bool degenerate() const { return !(max > min); }

    double normalize(double raw) const {
        if (degenerate()) return 0.5;
        const double p = (raw - min) / (max - min);
        return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
    }

    bool operator==(const ScoreNorm&) const = default;
};

/// Gini impurity of a two-outcome pseudo-probability: 2p(1-p).
inline double gini(double p) { return 2.0 * p * (1.0 - p); }

struct SctParams {
    int max_depth = 8;       // stopping condition: node depth reaches this
    double epsilon = 0.05;   // stopping condition: normalized score spread below this
};

struct SctNode {
    int feature = -1;        // split feature (internal nodes only)
    double threshold = 0.0;  // left: x <= t, right: x > t
    int left = -1;
    int right = -1;
    std::vector<int> samples;  // training indices (leaves only)
    int label = 0;             // leaves: 1 = anomalous, 0 = unlabeled

    bool is_leaf() const { return left < 0; }
};

/// Per-dimension conjunction of the split constraints on a root-to-leaf
/// path, with repeated constraints on one dimension merged.
using PathRule = std::vector<Interval>;

struct ScoreClusteringTree {
    std::vector<SctNode> nodes;  // index 0 is the root
    ScoreNorm norm;
    std::size_t dim = 0;

    /// Leaf index the sample routes to.
    int route(const FeatureVector& x) const;

    std::vector<int> leaf_ids() const;

    PathRule path_rule(int leaf) const;

    int depth() const;

    std::string dump() const;  // indented debug text

    bool operator==(const ScoreClusteringTree&) const;
};

struct SplitChoice {
    int feature;
    double threshold;
    double gain;
};

/// Best (feature, midpoint) split by Gini gain over the node's mean
/// normalized score; ties broken toward the lowest feature index, then the
/// lowest threshold. Empty when no split has positive gain.
std::optional<SplitChoice> best_split(const Dataset& data,
                                      const std::vector<double>& norm_scores,
                                      const std::vector<int>& samples);

/// Grows the tree by recursive gain-maximizing splits; a node becomes a
/// leaf when it holds one sample, when its normalized score spread falls
/// below epsilon, when it reaches max_depth, or when no split has positive
/// gain. A leaf is labeled anomalous iff every sample at it has raw score
/// strictly below phi.
ScoreClusteringTree build_sct(const Dataset& data, const SourceModel& model,
                              double phi, const SctParams& params);

/// Same, reusing precomputed raw scores (data[i] scored as raw_scores[i]).
ScoreClusteringTree build_sct(const Dataset& data,
                              const std::vector<double>& raw_scores, double phi,
                              const SctParams& params);

}  // namespace nidrex
