#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nidrex/types.hpp"

namespace nidrex {

enum class FeatureKind { RawInteger, DerivedMean, DerivedVariance };
enum class Direction { Fwd, Bwd, Both, None };

struct FeatureDef {
    std::string name;
    Direction dir = Direction::None;
    FeatureKind kind = FeatureKind::RawInteger;
    int width = 32;       // key bit width (raw features)
    std::string family;   // "size" or "iat" for derived statistics
    std::string unit;

    bool operator==(const FeatureDef&) const = default;
};

struct FeatureSpec {
    std::vector<FeatureDef> features;

    std::size_t dim() const { return features.size(); }

    /// Canonical 30-feature flow layout:
    ///   [0] l4_proto  [1] dst_port  [2] duration_us
    ///   [3..5]   packet count            fwd/bwd/both
    ///   [6..17]  packet size  mean/max/min/var x fwd/bwd/both
    ///   [18..29] inter-arrival mean/max/min/var x fwd/bwd/both
    static FeatureSpec flow();

    /// d plain integer features f0..f{d-1}; used for abstract vector data.
    static FeatureSpec generic(std::size_t d, int width = 32);

    bool operator==(const FeatureSpec&) const = default;
};

const char* to_string(FeatureKind k);
const char* to_string(Direction d);
FeatureKind feature_kind_from(const std::string& s);
Direction direction_from(const std::string& s);

}  // namespace nidrex
