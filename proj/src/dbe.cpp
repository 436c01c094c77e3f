#include "nidrex/dbe.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace nidrex {

namespace {

double machine_floor(double lo, double hi) {
    const double scale = std::max({std::abs(lo), std::abs(hi), 1.0});
    return scale * std::numeric_limits<double>::epsilon();
}

// splitmix64-style mixing for derived seeds
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (a * 2ULL + b + 1ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

std::vector<FeatureVector> sample_face(const Hypercube& cube, std::size_t dim,
                                       Face face, int n, std::mt19937_64& rng) {
    const std::size_t d = cube.dim();
    const double coord = face == Face::High ? cube.hi[dim] : cube.lo[dim];
    std::vector<FeatureVector> out(n, FeatureVector(d));
    for (auto& e : out) {
        for (std::size_t j = 0; j < d; ++j) {
            if (j == dim || cube.width(j) <= 0.0) {
                e[j] = j == dim ? coord : cube.lo[j];
            } else {
                e[j] = std::uniform_real_distribution<double>(cube.lo[j], cube.hi[j])(rng);
            }
        }
    }
    return out;
}

std::vector<FeatureVector> draw_aux(const FeatureVector& e, std::size_t dim, Face face,
                                    const std::vector<double>& sigma, int n_aux,
                                    std::mt19937_64& rng) {
    std::vector<FeatureVector> out(n_aux, FeatureVector(e.size()));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double dir = face == Face::High ? 1.0 : -1.0;
    for (auto& a : out) {
        for (std::size_t j = 0; j < e.size(); ++j) {
            const double draw = gauss(rng) * sigma[j];
            a[j] = j == dim ? e[j] + dir * std::abs(draw) : e[j] + draw;
        }
    }
    return out;
}

}  // namespace

Hypercube minimal_hypercube(const Dataset& data, const std::vector<int>& samples,
                            const std::vector<double>& raw_scores, double phi) {
    Hypercube cube;
    bool any = false;
    for (int i : samples) {
        if (!(raw_scores[i] > phi)) continue;
        const FeatureVector& x = data[i];
        if (!any) {
            cube.lo = x;
            cube.hi = x;
            any = true;
            continue;
        }
        for (std::size_t j = 0; j < x.size(); ++j) {
            cube.lo[j] = std::min(cube.lo[j], x[j]);
            cube.hi[j] = std::max(cube.hi[j], x[j]);
        }
    }
    if (!any) throw NoNormalSample();
    return cube;
}

Hypercube minimal_hypercube(const Dataset& data, const std::vector<int>& samples,
                            const SourceModel& model, double phi) {
    std::vector<double> scores(data.size(), -kInf);
    Dataset subset;
    subset.reserve(samples.size());
    for (int i : samples) subset.push_back(data[i]);
    const auto s = model.score_batch(subset);
    for (std::size_t k = 0; k < samples.size(); ++k) scores[samples[k]] = s[k];
    return minimal_hypercube(data, samples, scores, phi);
}

std::vector<double> sampling_sigma(const Hypercube& cube, double rho) {
    std::vector<double> sigma(cube.dim());
    for (std::size_t j = 0; j < cube.dim(); ++j)
        sigma[j] = rho * std::max(cube.width(j), machine_floor(cube.lo[j], cube.hi[j]));
    return sigma;
}

std::vector<FeatureVector> sample_auxiliary(const FeatureVector& e, std::size_t dim,
                                            Face face, const std::vector<double>& sigma,
                                            int n_aux, std::uint64_t seed) {
    if (n_aux < 1) throw ContractViolation("sample_auxiliary: need n_aux >= 1");
    if (dim >= e.size() || sigma.size() != e.size())
        throw ContractViolation("sample_auxiliary: dimension mismatch");
    std::mt19937_64 rng(seed);
    return draw_aux(e, dim, face, sigma, n_aux, rng);
}

FaceResult explore_face(const Hypercube& cube, std::size_t dim, Face face,
                        const SourceModel& model, double phi, const DbeParams& params) {
    if (params.n_explorers < 1 || params.n_aux < 1 || params.max_iters < 1 ||
        !(params.rho > 0.0) || !(params.eta_frac > 0.0) || !(params.delta > 0.0))
        throw ContractViolation("explore_face: bad parameters");

    const std::size_t d = cube.dim();
    const double face_coord = face == Face::High ? cube.hi[dim] : cube.lo[dim];
    const std::vector<double> sigma = sampling_sigma(cube, params.rho);
    std::vector<double> stride(d);
    for (std::size_t j = 0; j < d; ++j)
        stride[j] = params.eta_frac *
                    std::max(cube.width(j), machine_floor(cube.lo[j], cube.hi[j]));

    std::mt19937_64 rng(mix_seed(params.seed, dim, face == Face::High ? 1 : 0));

    FaceResult result;
    auto emit_constraint = [&](double coord) {
        result.is_constraint = true;
        // An extension never retracts inside the cube.
        result.bound = face == Face::High ? std::max(coord, cube.hi[dim])
                                          : std::min(coord, cube.lo[dim]);
        return result;
    };

    std::vector<FeatureVector> explorers =
        sample_face(cube, dim, face, params.n_explorers, rng);

    double first_score = 0.0;       // best initial-explorer score at iteration 0
    double best_seen = kInf;        // lowest auxiliary score across all iterations
    FeatureVector best_seen_point;

    struct Pair {
        int origin;
        std::size_t aux;  // index into the flat auxiliary batch
        double score;
    };

    for (int iter = 0; iter < params.max_iters; ++iter) {
        const std::vector<double> escore = model.score_batch(explorers);
        result.queries += static_cast<long long>(explorers.size());
        if (iter == 0) first_score = *std::min_element(escore.begin(), escore.end());

        Dataset batch;
        batch.reserve(explorers.size() * params.n_aux);
        std::vector<int> origin;
        origin.reserve(batch.capacity());
        for (std::size_t e = 0; e < explorers.size(); ++e) {
            auto aux = draw_aux(explorers[e], dim, face, sigma, params.n_aux, rng);
            for (auto& a : aux) {
                batch.push_back(std::move(a));
                origin.push_back(static_cast<int>(e));
            }
        }
        const std::vector<double> ascore = model.score_batch(batch);
        result.queries += static_cast<long long>(batch.size());

        // Stopping condition i: an auxiliary crossed below the threshold.
        std::size_t crossed = batch.size();
        for (std::size_t a = 0; a < batch.size(); ++a) {
            if (ascore[a] < best_seen) {
                best_seen = ascore[a];
                best_seen_point = batch[a];
            }
            if (ascore[a] < phi && (crossed == batch.size() || ascore[a] < ascore[crossed]))
                crossed = a;
        }
        if (crossed != batch.size()) return emit_constraint(batch[crossed][dim]);

        // Beam: keep the n_explorers lowest-scoring auxiliaries (pooled).
        std::vector<Pair> pairs;
        pairs.reserve(batch.size());
        for (std::size_t a = 0; a < batch.size(); ++a)
            pairs.push_back({origin[a], a, ascore[a]});
        const std::size_t keep = std::min<std::size_t>(params.n_explorers, pairs.size());
        std::partial_sort(pairs.begin(), pairs.begin() + keep, pairs.end(),
                          [](const Pair& a, const Pair& b) {
                              return a.score < b.score ||
                                     (a.score == b.score && a.aux < b.aux);
                          });
        pairs.resize(keep);

        std::vector<FeatureVector> next;
        next.reserve(keep);
        for (const Pair& p : pairs) {
            const FeatureVector& e = explorers[p.origin];
            const FeatureVector& a = batch[p.aux];
            const double fe = escore[p.origin];
            FeatureVector step(d);
            for (std::size_t j = 0; j < d; ++j) {
                const double mid = 0.5 * (e[j] + a[j]);
                const double run = e[j] - a[j];
                const int s = run == 0.0 ? 0 : sign_of((fe - p.score) / run);
                step[j] = mid - stride[j] * static_cast<double>(s);
            }
            next.push_back(std::move(step));
        }
        explorers = std::move(next);
    }

    // Stopping condition ii: out of iterations.
    if (std::abs(first_score - best_seen) < params.delta) return result;  // contour
    return emit_constraint(best_seen_point[dim]);
}

BoundaryRule estimate_boundary(const Hypercube& cube, const SourceModel& model,
                               double phi, const DbeParams& params) {
    const std::size_t d = cube.dim();
    BoundaryRule rule;
    rule.cube = cube;
    rule.upper.assign(d, std::nullopt);
    rule.lower.assign(d, std::nullopt);

    bool fully_degenerate = true;
    for (std::size_t j = 0; j < d; ++j)
        if (cube.width(j) > 0.0) fully_degenerate = false;

    bool any_constraint = false;
    if (!fully_degenerate) {
        for (std::size_t i = 0; i < d; ++i) {
            for (Face face : {Face::Low, Face::High}) {
                const FaceResult r = explore_face(cube, i, face, model, phi, params);
                rule.queries += r.queries;
                if (!r.is_constraint) continue;
                any_constraint = true;
                if (face == Face::High)
                    rule.upper[i] = r.bound;
                else
                    rule.lower[i] = r.bound;
            }
        }
    }

    if (!any_constraint) {
        // A constraint-free conjunction would accept everything; fall back to
        // the cube inflated by one sampling radius per dimension.
        rule.all_contour = true;
        for (std::size_t j = 0; j < d; ++j) {
            const double r =
                params.rho * std::max(cube.width(j), machine_floor(cube.lo[j], cube.hi[j]));
            rule.upper[j] = cube.hi[j] + r;
            rule.lower[j] = cube.lo[j] - r;
        }
    }
    return rule;
}

}  // namespace nidrex
