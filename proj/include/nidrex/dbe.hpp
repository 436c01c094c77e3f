#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nidrex/model.hpp"
#include "nidrex/types.hpp"

namespace nidrex {

/// A leaf subspace holds no sample the source model scores above phi.
struct NoNormalSample : std::runtime_error {
    NoNormalSample() : std::runtime_error("no sample scores above the threshold") {}
};

enum class Face { Low, High };

struct DbeParams {
    int n_explorers = 16;   // initial explorers per face
    int n_aux = 8;          // auxiliary explorers per initial explorer
    double rho = 0.1;       // sampling radius as a fraction of each dimension's width
    double eta_frac = 0.05; // stride as a fraction of each dimension's width
    int max_iters = 20;
    double delta = 0.01;    // absolute score-change tolerance for the contour test
    std::uint64_t seed = 0;
};

/// Per-dimension one-sided extensions of a reference hypercube. A point is
/// a member iff it lies inside the cube, or satisfies every recorded
/// constraint (x_i <= upper[i], x_i > lower[i]; absent entries are contour
/// dimensions and unconstrained).
struct BoundaryRule {
    Hypercube cube;
    std::vector<std::optional<double>> upper;
    std::vector<std::optional<double>> lower;
    bool all_contour = false;  // every face was a contour; bounds fall back to the inflated cube
    long long queries = 0;     // model queries spent building this rule

    bool member(const FeatureVector& x) const {
        if (cube.contains(x)) return true;
        for (std::size_t i = 0; i < cube.dim(); ++i) {
            if (upper[i] && !(x[i] <= *upper[i])) return false;
            if (lower[i] && !(x[i] > *lower[i])) return false;
        }
        return true;
    }
};

/// Componentwise min/max box over the samples the model deems normal
/// (score > phi). Throws NoNormalSample when no sample qualifies.
Hypercube minimal_hypercube(const Dataset& data, const std::vector<int>& samples,
                            const std::vector<double>& raw_scores, double phi);
Hypercube minimal_hypercube(const Dataset& data, const std::vector<int>& samples,
                            const SourceModel& model, double phi);

/// Per-dimension sampling scale rho * |hi - lo|, floored at machine scale
/// so zero-width dimensions still get a usable radius.
std::vector<double> sampling_sigma(const Hypercube& cube, double rho);

/// N_s points near e, gaussian per dimension with the given scales; the
/// `dim` coordinate is half-truncated outward of the face (>= e_dim for the
/// high face, <= e_dim for the low face).
std::vector<FeatureVector> sample_auxiliary(const FeatureVector& e, std::size_t dim,
                                            Face face, const std::vector<double>& sigma,
                                            int n_aux, std::uint64_t seed);

struct FaceResult {
    bool is_constraint = false;  // false: contour
    double bound = 0.0;          // valid when is_constraint
    long long queries = 0;
};

/// Walks explorers outward from one face of the cube until an auxiliary
/// explorer scores below phi (constraint at its coordinate) or the
/// iteration cap is hit (contour when the best score seen moved less than
/// delta from the starting face's, otherwise a constraint at the
/// lowest-scoring auxiliary seen). Emitted bounds never retract inside the
/// cube.
FaceResult explore_face(const Hypercube& cube, std::size_t dim, Face face,
                        const SourceModel& model, double phi, const DbeParams& params);

/// Runs explore_face over both faces of every dimension. When every face
/// is a contour the constraints fall back to the cube inflated by
/// rho * width per dimension (flagged via all_contour).
BoundaryRule estimate_boundary(const Hypercube& cube, const SourceModel& model,
                               double phi, const DbeParams& params);

}  // namespace nidrex
