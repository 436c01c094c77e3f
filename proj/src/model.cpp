#include "nidrex/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace nidrex {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060;

int depth_limit_for(std::size_t psi) {
    return static_cast<int>(std::ceil(std::log2(static_cast<double>(psi))));
}

struct TreeBuilder {
    const Dataset& data;
    std::mt19937_64& rng;
    int depth_limit;
    std::vector<IsoNode> nodes;

    int build(std::vector<int>& idx, int lo, int hi, int depth) {
        const int n = hi - lo;
        const int self = static_cast<int>(nodes.size());
        nodes.push_back({});
        nodes[self].size = n;
        if (n <= 1 || depth >= depth_limit) return self;

        // Candidate features are those not constant over this partition.
        const std::size_t d = data[idx[lo]].size();
        std::vector<int> usable;
        usable.reserve(d);
        for (std::size_t f = 0; f < d; ++f) {
            double mn = data[idx[lo]][f], mx = mn;
            for (int i = lo + 1; i < hi; ++i) {
                mn = std::min(mn, data[idx[i]][f]);
                mx = std::max(mx, data[idx[i]][f]);
            }
            if (mx > mn) usable.push_back(static_cast<int>(f));
        }
        if (usable.empty()) return self;

        const int f = usable[std::uniform_int_distribution<std::size_t>(
            0, usable.size() - 1)(rng)];
        double mn = data[idx[lo]][f], mx = mn;
        for (int i = lo + 1; i < hi; ++i) {
            mn = std::min(mn, data[idx[i]][f]);
            mx = std::max(mx, data[idx[i]][f]);
        }
        const double split = std::uniform_real_distribution<double>(mn, mx)(rng);

        auto mid_it = std::partition(idx.begin() + lo, idx.begin() + hi,
                                     [&](int i) { return data[i][f] < split; });
        const int mid = static_cast<int>(mid_it - idx.begin());
        if (mid == lo || mid == hi) return self;  // degenerate draw

        nodes[self].feature = f;
        nodes[self].threshold = split;
        nodes[self].left = build(idx, lo, mid, depth + 1);
        nodes[self].right = build(idx, mid, hi, depth + 1);
        return self;
    }
};

}  // namespace

double average_path_length(std::size_t n) {
    if (n <= 1) return 0.0;
    if (n == 2) return 1.0;
    const double nd = static_cast<double>(n);
    return 2.0 * (std::log(nd - 1.0) + kEulerGamma) - 2.0 * (nd - 1.0) / nd;
}

double IsoTree::path_length(const FeatureVector& x) const {
    int node = 0;
    double depth = 0.0;
    while (nodes[node].feature >= 0) {
        node = x[nodes[node].feature] < nodes[node].threshold ? nodes[node].left
                                                              : nodes[node].right;
        depth += 1.0;
    }
    return depth + average_path_length(static_cast<std::size_t>(nodes[node].size));
}

double IsolationForest::score(const FeatureVector& x) const {
    check_dim(x, dim_, "IsolationForest::score");
    double total = 0.0;
    for (const auto& t : trees_) total += t.path_length(x);
    const double mean_path = total / static_cast<double>(trees_.size());
    const double anomaly = std::exp2(-mean_path / average_path_length(subsample_));
    return 1.0 - anomaly;  // higher = more normal
}

std::unique_ptr<IsolationForest> train_iforest(const Dataset& data, int trees,
                                               int psi, std::uint64_t seed) {
    if (data.size() < 2) throw ContractViolation("train_iforest: need at least 2 samples");
    if (trees < 1) throw ContractViolation("train_iforest: tree count must be >= 1");
    if (psi < 2) throw ContractViolation("train_iforest: subsample size must be >= 2");
    const std::size_t d = data[0].size();
    for (const auto& x : data) {
        check_dim(x, d, "train_iforest");
        check_finite(x, "train_iforest");
    }

    const std::size_t sub = std::min<std::size_t>(psi, data.size());
    std::mt19937_64 rng(seed);
    std::vector<IsoTree> forest;
    forest.reserve(trees);

    std::vector<int> all(data.size());
    std::iota(all.begin(), all.end(), 0);

    for (int t = 0; t < trees; ++t) {
        // Partial Fisher-Yates: the first `sub` entries become the subsample.
        std::vector<int> idx = all;
        for (std::size_t i = 0; i < sub; ++i) {
            std::size_t j = std::uniform_int_distribution<std::size_t>(
                i, idx.size() - 1)(rng);
            std::swap(idx[i], idx[j]);
        }
        idx.resize(sub);

        TreeBuilder builder{data, rng, depth_limit_for(sub), {}};
        builder.nodes.reserve(2 * sub);
        builder.build(idx, 0, static_cast<int>(sub), 0);
        forest.push_back(IsoTree{std::move(builder.nodes)});
    }
    return std::make_unique<IsolationForest>(std::move(forest), sub, seed, d);
}

GaussianMixtureDensity::GaussianMixtureDensity(std::vector<Component> comps,
                                               std::uint64_t seed)
    : comps_(std::move(comps)), seed_(seed) {
    if (comps_.empty()) throw ContractViolation("gmm: need at least one component");
    dim_ = comps_[0].mean.size();
    double wsum = 0.0;
    for (const auto& c : comps_) {
        if (c.mean.size() != dim_ || c.var.size() != dim_)
            throw ContractViolation("gmm: inconsistent component dimensions");
        if (c.weight <= 0.0 || c.weight > 1.0)
            throw ContractViolation("gmm: component weight outside (0,1]");
        for (double v : c.var)
            if (!(v > 0.0)) throw ContractViolation("gmm: variance must be positive");
        wsum += c.weight;
    }
    if (std::abs(wsum - 1.0) > 1e-9)
        throw ContractViolation("gmm: weights must sum to 1");
}

double GaussianMixtureDensity::score(const FeatureVector& x) const {
    check_dim(x, dim_, "GaussianMixtureDensity::score");
    constexpr double kLog2Pi = 1.8378770664093454836;
    double best = -kInf;
    std::vector<double> logs(comps_.size());
    for (std::size_t k = 0; k < comps_.size(); ++k) {
        const auto& c = comps_[k];
        double l = std::log(c.weight);
        for (std::size_t i = 0; i < dim_; ++i) {
            const double z = x[i] - c.mean[i];
            l -= 0.5 * (kLog2Pi + std::log(c.var[i]) + z * z / c.var[i]);
        }
        logs[k] = l;
        best = std::max(best, l);
    }
    double acc = 0.0;
    for (double l : logs) acc += std::exp(l - best);
    return best + std::log(acc);
}

std::unique_ptr<GaussianMixtureDensity> train_gmm(const Dataset& data, int components,
                                                  std::uint64_t seed, int max_iters,
                                                  double tol) {
    if (data.empty()) throw ContractViolation("train_gmm: empty data");
    if (components < 1) throw ContractViolation("train_gmm: need >= 1 component");
    const std::size_t d = data[0].size();
    const std::size_t n = data.size();
    for (const auto& x : data) {
        check_dim(x, d, "train_gmm");
        check_finite(x, "train_gmm");
    }
    const std::size_t k = std::min<std::size_t>(components, n);

    // Global variance, reused as initial spread and as the variance floor.
    std::vector<double> gmean(d, 0.0), gvar(d, 0.0);
    for (const auto& x : data)
        for (std::size_t i = 0; i < d; ++i) gmean[i] += x[i];
    for (std::size_t i = 0; i < d; ++i) gmean[i] /= static_cast<double>(n);
    for (const auto& x : data)
        for (std::size_t i = 0; i < d; ++i) {
            const double z = x[i] - gmean[i];
            gvar[i] += z * z;
        }
    for (std::size_t i = 0; i < d; ++i)
        gvar[i] = std::max(gvar[i] / static_cast<double>(n), 1e-12);
    std::vector<double> floor(d);
    for (std::size_t i = 0; i < d; ++i) floor[i] = std::max(1e-6 * gvar[i], 1e-12);

    // k-means++ style seeding of the means.
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> centers;
    centers.push_back(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
    std::vector<double> dist2(n, kInf);
    while (centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d2 = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double z = data[i][j] - data[centers.back()][j];
                d2 += z * z;
            }
            dist2[i] = std::min(dist2[i], d2);
            total += dist2[i];
        }
        if (total <= 0.0) break;
        double r = std::uniform_real_distribution<double>(0.0, total)(rng);
        std::size_t pick = 0;
        for (std::size_t i = 0; i < n; ++i) {
            r -= dist2[i];
            if (r <= 0.0) {
                pick = i;
                break;
            }
        }
        centers.push_back(pick);
    }

    std::vector<GaussianMixtureDensity::Component> comps(centers.size());
    for (std::size_t c = 0; c < centers.size(); ++c) {
        comps[c].weight = 1.0 / static_cast<double>(centers.size());
        comps[c].mean = data[centers[c]];
        comps[c].var = gvar;
    }

    std::vector<std::vector<double>> resp(n, std::vector<double>(comps.size()));
    constexpr double kLog2Pi = 1.8378770664093454836;
    double prev_ll = -kInf;
    for (int iter = 0; iter < max_iters; ++iter) {
        // E step
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = -kInf;
            for (std::size_t c = 0; c < comps.size(); ++c) {
                double l = std::log(comps[c].weight);
                for (std::size_t j = 0; j < d; ++j) {
                    const double z = data[i][j] - comps[c].mean[j];
                    l -= 0.5 * (kLog2Pi + std::log(comps[c].var[j]) + z * z / comps[c].var[j]);
                }
                resp[i][c] = l;
                best = std::max(best, l);
            }
            double acc = 0.0;
            for (double& l : resp[i]) acc += std::exp(l - best);
            const double norm = best + std::log(acc);
            ll += norm;
            for (double& l : resp[i]) l = std::exp(l - norm);
        }
        // M step
        for (std::size_t c = 0; c < comps.size(); ++c) {
            double w = 0.0;
            std::vector<double> mu(d, 0.0), var(d, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                w += resp[i][c];
                for (std::size_t j = 0; j < d; ++j) mu[j] += resp[i][c] * data[i][j];
            }
            if (w < 1e-12) continue;  // dead component keeps old parameters
            for (std::size_t j = 0; j < d; ++j) mu[j] /= w;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < d; ++j) {
                    const double z = data[i][j] - mu[j];
                    var[j] += resp[i][c] * z * z;
                }
            for (std::size_t j = 0; j < d; ++j)
                var[j] = std::max(var[j] / w, floor[j]);
            comps[c].weight = w / static_cast<double>(n);
            comps[c].mean = std::move(mu);
            comps[c].var = std::move(var);
        }
        double wsum = 0.0;
        for (auto& c : comps) wsum += c.weight;
        for (auto& c : comps) c.weight /= wsum;

        if (std::abs(ll - prev_ll) < tol * (1.0 + std::abs(ll))) break;
        prev_ll = ll;
    }
    return std::make_unique<GaussianMixtureDensity>(std::move(comps), seed);
}

double calibrate_threshold(const SourceModel& model, const Dataset& data, double q) {
    if (!(q > 0.0 && q < 1.0))
        throw ContractViolation("calibrate_threshold: q must lie in (0,1)");
    if (data.empty() || static_cast<double>(data.size()) < 1.0 / q)
        throw ContractViolation("calibrate_threshold: need at least 1/q samples");
    std::vector<double> scores = model.score_batch(data);
    std::sort(scores.begin(), scores.end());
    const std::size_t idx = static_cast<std::size_t>(
        std::floor(q * static_cast<double>(scores.size() - 1)));
    return scores[idx];
}

}  // namespace nidrex
