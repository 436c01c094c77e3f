#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace nidrex {

using FeatureVector = std::vector<double>;
using Dataset = std::vector<FeatureVector>;

/// Raised when a caller breaks a documented precondition (dimension
/// mismatch, bad hyperparameter, ...).
struct ContractViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised on malformed input files.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// One-dimensional constraint with independently open/closed ends.
/// Default-constructed it is unbounded (matches everything).
struct Interval {
    double lo = -kInf;
    double hi = kInf;
    bool lo_open = false;  // true: x > lo, false: x >= lo
    bool hi_open = false;  // true: x < hi, false: x <= hi

    static Interval at_most(double v) { return {-kInf, v, false, false}; }
    static Interval less_than(double v) { return {-kInf, v, false, true}; }
    static Interval at_least(double v) { return {v, kInf, false, false}; }
    static Interval more_than(double v) { return {v, kInf, true, false}; }
    static Interval closed(double a, double b) { return {a, b, false, false}; }

    bool unconstrained() const { return lo == -kInf && hi == kInf; }

    bool has_lower() const { return lo != -kInf; }
    bool has_upper() const { return hi != kInf; }

    bool contains(double x) const {
        if (lo_open ? !(x > lo) : !(x >= lo)) return false;
        if (hi_open ? !(x < hi) : !(x <= hi)) return false;
        return true;
    }

    bool empty() const {
        if (lo > hi) return true;
        if (lo == hi && (lo_open || hi_open)) return true;
        return false;
    }

    Interval intersect(const Interval& o) const {
        Interval r = *this;
        if (o.lo > r.lo || (o.lo == r.lo && o.lo_open)) {
            r.lo = o.lo;
            r.lo_open = o.lo_open;
        }
        if (o.hi < r.hi || (o.hi == r.hi && o.hi_open)) {
            r.hi = o.hi;
            r.hi_open = o.hi_open;
        }
        return r;
    }

    bool operator==(const Interval&) const = default;
};

/// Axis-aligned closed box, one (lo, hi) pair per dimension.
struct Hypercube {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t dim() const { return lo.size(); }

    double width(std::size_t i) const { return hi[i] - lo[i]; }

    bool contains(const FeatureVector& x) const {
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        return true;
    }

    bool operator==(const Hypercube&) const = default;
};

/// Per-dimension training min/max used to put feature values and rule
/// bounds on a comparable scale. The map is affine and unclamped;
/// dimensions constant in training fall back to unit width.
struct Normalizer {
    std::vector<double> min;
    std::vector<double> max;

    static Normalizer fit(const Dataset& data);

    std::size_t dim() const { return min.size(); }

    double width(std::size_t i) const {
        return max[i] > min[i] ? max[i] - min[i] : 1.0;
    }

    double normalize(std::size_t i, double v) const { return (v - min[i]) / width(i); }

    bool operator==(const Normalizer&) const = default;
};

/// splitmix64-style mixing for deriving per-subtask RNG seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

inline void check_dim(const FeatureVector& x, std::size_t d, const char* who) {
    if (x.size() != d)
        throw ContractViolation(std::string(who) + ": expected " +
                                std::to_string(d) + "-dimensional input, got " +
                                std::to_string(x.size()));
}

inline void check_finite(const FeatureVector& x, const char* who) {
    for (double v : x)
        if (!std::isfinite(v))
            throw ContractViolation(std::string(who) + ": non-finite feature value");
}

}  // namespace nidrex
