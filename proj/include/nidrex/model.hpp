#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "nidrex/types.hpp"

namespace nidrex {

/// Uniform scoring interface over the source anomaly detectors.
///
/// Orientation contract: higher score = more normal; a sample x is an
/// anomaly iff score(x) < phi for the calibrated threshold phi. Models
/// are immutable once trained, so score() is safe to call concurrently.
class SourceModel {
  public:
    virtual ~SourceModel() = default;

    virtual double score(const FeatureVector& x) const = 0;

    virtual std::vector<double> score_batch(const Dataset& xs) const {
        std::vector<double> out;
        out.reserve(xs.size());
        for (const auto& x : xs) out.push_back(score(x));
        return out;
    }

    virtual std::string kind() const = 0;
    virtual std::size_t dim() const = 0;
};

struct IsoNode {
    int feature = -1;  // -1 for leaves
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int size = 0;  // samples that reached this node during training
};

struct IsoTree {
    std::vector<IsoNode> nodes;  // index 0 is the root

    double path_length(const FeatureVector& x) const;
};

/// Average unsuccessful-search path length of a BST with n nodes.
double average_path_length(std::size_t n);

class IsolationForest final : public SourceModel {
  public:
    IsolationForest(std::vector<IsoTree> trees, std::size_t subsample,
                    std::uint64_t seed, std::size_t d)
        : trees_(std::move(trees)), subsample_(subsample), seed_(seed), dim_(d) {}

    double score(const FeatureVector& x) const override;
    std::string kind() const override { return "iforest"; }
    std::size_t dim() const override { return dim_; }

    const std::vector<IsoTree>& trees() const { return trees_; }
    std::size_t subsample() const { return subsample_; }
    std::uint64_t seed() const { return seed_; }

  private:
    std::vector<IsoTree> trees_;
    std::size_t subsample_;
    std::uint64_t seed_;
    std::size_t dim_;
};

/// Deterministic for a fixed seed. Each tree is grown on a subsample of
/// size min(psi, |data|) drawn without replacement, with depth capped at
/// ceil(log2(psi)).
std::unique_ptr<IsolationForest> train_iforest(const Dataset& data, int trees,
                                               int psi, std::uint64_t seed);

class GaussianMixtureDensity final : public SourceModel {
  public:
    struct Component {
        double weight;
        std::vector<double> mean;
        std::vector<double> var;  // diagonal covariance, all > 0
    };

    GaussianMixtureDensity(std::vector<Component> comps, std::uint64_t seed);

    /// Log-density of x under the mixture.
    double score(const FeatureVector& x) const override;
    std::string kind() const override { return "gmm"; }
    std::size_t dim() const override { return dim_; }

    const std::vector<Component>& components() const { return comps_; }
    std::uint64_t seed() const { return seed_; }

  private:
    std::vector<Component> comps_;
    std::uint64_t seed_;
    std::size_t dim_;
};

/// EM fit with k-means++ style seeding and a variance floor; deterministic
/// for a fixed seed.
std::unique_ptr<GaussianMixtureDensity> train_gmm(const Dataset& data, int components,
                                                  std::uint64_t seed, int max_iters = 100,
                                                  double tol = 1e-8);

/// Adapter for scorers that live outside this process. Scores are fetched
/// through a batch callback; anything able to answer "score these vectors"
/// (a Python function, an RPC shim, ...) plugs in here.
class ExternalModel final : public SourceModel {
  public:
    using BatchScorer = std::function<std::vector<double>(const Dataset&)>;

    ExternalModel(std::size_t d, BatchScorer scorer)
        : dim_(d), scorer_(std::move(scorer)) {}

    double score(const FeatureVector& x) const override {
        check_dim(x, dim_, "ExternalModel::score");
        auto out = scorer_(Dataset{x});
        if (out.size() != 1)
            throw ContractViolation("external scorer returned wrong batch size");
        return out[0];
    }

    std::vector<double> score_batch(const Dataset& xs) const override {
        for (const auto& x : xs) check_dim(x, dim_, "ExternalModel::score_batch");
        auto out = scorer_(xs);
        if (out.size() != xs.size())
            throw ContractViolation("external scorer returned wrong batch size");
        return out;
    }

    std::string kind() const override { return "external"; }
    std::size_t dim() const override { return dim_; }

  private:
    std::size_t dim_;
    BatchScorer scorer_;
};

/// Pass-through wrapper that counts model queries. Used by the boundary
/// estimator's query budget and by tests asserting that interpretation
/// never touches the model.
class CountingModel final : public SourceModel {
  public:
    explicit CountingModel(const SourceModel& inner) : inner_(inner) {}

    double score(const FeatureVector& x) const override {
        queries_.fetch_add(1, std::memory_order_relaxed);
        return inner_.score(x);
    }

    std::vector<double> score_batch(const Dataset& xs) const override {
        queries_.fetch_add(static_cast<long long>(xs.size()), std::memory_order_relaxed);
        return inner_.score_batch(xs);
    }

    std::string kind() const override { return inner_.kind(); }
    std::size_t dim() const override { return inner_.dim(); }

    long long queries() const { return queries_.load(std::memory_order_relaxed); }
    void reset() { queries_.store(0, std::memory_order_relaxed); }

  private:
    const SourceModel& inner_;
    mutable std::atomic<long long> queries_{0};
};

/// Empirical q-quantile (lower interpolation) of the model scores over
/// `data`. At most a q + 1/|data| fraction of the calibration data scores
/// strictly below the returned threshold.
double calibrate_threshold(const SourceModel& model, const Dataset& data, double q);

}  // namespace nidrex
