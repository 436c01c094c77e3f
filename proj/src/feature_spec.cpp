#include "nidrex/feature_spec.hpp"

#include <array>

namespace nidrex {

const char* to_string(FeatureKind k) {
    switch (k) {
        case FeatureKind::RawInteger: return "raw";
        case FeatureKind::DerivedMean: return "mean";
        case FeatureKind::DerivedVariance: return "var";
    }
    return "raw";
}

const char* to_string(Direction d) {
    switch (d) {
        case Direction::Fwd: return "fwd";
        case Direction::Bwd: return "bwd";
        case Direction::Both: return "both";
        case Direction::None: return "n/a";
    }
    return "n/a";
}

FeatureKind feature_kind_from(const std::string& s) {
    if (s == "raw") return FeatureKind::RawInteger;
    if (s == "mean") return FeatureKind::DerivedMean;
    if (s == "var") return FeatureKind::DerivedVariance;
    throw ParseError("unknown feature kind: " + s);
}

Direction direction_from(const std::string& s) {
    if (s == "fwd") return Direction::Fwd;
    if (s == "bwd") return Direction::Bwd;
    if (s == "both") return Direction::Both;
    if (s == "n/a") return Direction::None;
    throw ParseError("unknown direction: " + s);
}

FeatureSpec FeatureSpec::flow() {
    FeatureSpec spec;
    auto& f = spec.features;
    f.push_back({"l4_proto", Direction::None, FeatureKind::RawInteger, 8, "", ""});
    f.push_back({"dst_port", Direction::Fwd, FeatureKind::RawInteger, 16, "", ""});
    f.push_back({"duration_us", Direction::Both, FeatureKind::RawInteger, 32, "", "us"});

    static const std::array<std::pair<Direction, const char*>, 3> dirs{
        {{Direction::Fwd, "fwd"}, {Direction::Bwd, "bwd"}, {Direction::Both, "both"}}};

    for (auto [dir, dname] : dirs)
        f.push_back({std::string("pkt_count_") + dname, dir, FeatureKind::RawInteger, 32,
                     "", "packets"});

    struct Stat {
        const char* name;
        FeatureKind kind;
    };
    static const std::array<Stat, 4> stats{{{"mean", FeatureKind::DerivedMean},
                                            {"max", FeatureKind::RawInteger},
                                            {"min", FeatureKind::RawInteger},
                                            {"var", FeatureKind::DerivedVariance}}};

    for (auto [sname, kind] : stats)
        for (auto [dir, dname] : dirs)
            f.push_back({std::string("pkt_size_") + sname + "_" + dname, dir, kind, 32,
                         "size", "bytes"});
    for (auto [sname, kind] : stats)
        for (auto [dir, dname] : dirs)
            f.push_back({std::string("iat_") + sname + "_" + dname, dir, kind, 32, "iat",
                         "us"});
    return spec;
}

FeatureSpec FeatureSpec::generic(std::size_t d, int width) {
    FeatureSpec spec;
    spec.features.reserve(d);
    for (std::size_t i = 0; i < d; ++i)
        spec.features.push_back({"f" + std::to_string(i), Direction::None,
                                 FeatureKind::RawInteger, width, "", ""});
    return spec;
}

}  // namespace nidrex
