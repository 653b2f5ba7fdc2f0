#ifndef STREETMORPH_FEATURES_HPP
#define STREETMORPH_FEATURES_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core.hpp"
#include "raster.hpp"

namespace streetmorph {

enum class ArtifactClass : std::uint8_t { Car, Lamppost, Pedestrian, Rest };
constexpr int kClassCount = 4;

inline const char* to_string(ArtifactClass c) {
    switch (c) {
        case ArtifactClass::Car: return "Car";
        case ArtifactClass::Lamppost: return "Lamppost";
        case ArtifactClass::Pedestrian: return "Pedestrian";
        case ArtifactClass::Rest: return "Rest";
    }
    return "Rest";
}

inline ArtifactClass parse_artifact_class(const std::string& s) {
    if (s == "Car") return ArtifactClass::Car;
    if (s == "Lamppost") return ArtifactClass::Lamppost;
    if (s == "Pedestrian") return ArtifactClass::Pedestrian;
    if (s == "Rest") return ArtifactClass::Rest;
    throw ParseError("unknown artifact class '" + s + "'");
}

/// Per-component statistics over estimated heights and point accumulation.
struct FeatureVector {
    double height_mean = 0, height_std = 0, height_max = 0, height_min = 0, height_mode = 0;
    double acc_mean = 0, acc_std = 0, acc_max = 0, acc_min = 0, acc_mode = 0;
    double surface = 0;  // square meters

    static constexpr int kCount = 11;
    static const std::array<std::string, kCount>& names() {
        static const std::array<std::string, kCount> n = {
            "height_mean", "height_std", "height_max", "height_min", "height_mode",
            "acc_mean",    "acc_std",    "acc_max",    "acc_min",    "acc_mode",
            "surface"};
        return n;
    }
    std::array<double, kCount> values() const {
        return {height_mean, height_std, height_max, height_min, height_mode, acc_mean,
                acc_std,     acc_max,    acc_min,    acc_mode,   surface};
    }
};

namespace feature_detail {

struct Stats {
    double mean, stddev, vmax, vmin, mode;
};

/// Mode = mean of the samples falling in the most populated histogram bin
/// (ties go to the lower bin), which keeps the mode inside [min, max].
inline Stats describe(const std::vector<double>& v, double bin_width) {
    Stats s{0, 0, v[0], v[0], 0};
    for (double x : v) {
        s.mean += x;
        s.vmax = std::max(s.vmax, x);
        s.vmin = std::min(s.vmin, x);
    }
    s.mean /= double(v.size());
    for (double x : v) s.stddev += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(s.stddev / double(v.size()));

    std::map<std::int64_t, std::pair<std::size_t, double>> bins;  // bin -> (count, sum)
    for (double x : v) {
        auto b = static_cast<std::int64_t>(std::floor(x / bin_width + 1e-9));
        auto& e = bins[b];
        ++e.first;
        e.second += x;
    }
    std::size_t best_count = 0;
    std::int64_t best_bin = 0;
    for (const auto& [bin, e] : bins) {  // ascending bins, strict > keeps the lower tie
        if (e.first > best_count) {
            best_count = e.first;
            best_bin = bin;
        }
    }
    s.mode = bins[best_bin].second / double(best_count);
    return s;
}

}  // namespace feature_detail

/// Features of one component given its pixel indices into the rasters.
inline FeatureVector extract_features(const std::vector<std::size_t>& pixels,
                                      const Raster& heights, const Raster& accumulation,
                                      const CameraFrame& frame) {
    if (pixels.empty()) throw Error("extract_features: empty component");
    std::vector<double> hv, av;
    hv.reserve(pixels.size());
    av.reserve(pixels.size());
    for (std::size_t k : pixels) {
        hv.push_back(heights.values[k]);
        av.push_back(accumulation.values[k]);
    }
    auto hs = feature_detail::describe(hv, 0.10);
    auto as = feature_detail::describe(av, 1.0);
    FeatureVector f;
    f.height_mean = hs.mean;
    f.height_std = hs.stddev;
    f.height_max = hs.vmax;
    f.height_min = hs.vmin;
    f.height_mode = hs.mode;
    f.acc_mean = as.mean;
    f.acc_std = as.stddev;
    f.acc_max = as.vmax;
    f.acc_min = as.vmin;
    f.acc_mode = as.mode;
    f.surface = double(pixels.size()) / (frame.resolution * frame.resolution);
    return f;
}

/// Features for every labeled component of a label image, ordered by label.
inline std::vector<std::pair<std::int32_t, FeatureVector>> extract_component_features(
    const LabelImage& components, const Raster& heights, const Raster& accumulation) {
    std::int32_t ncomp = 0;
    for (auto l : components.labels) ncomp = std::max(ncomp, l);
    std::vector<std::vector<std::size_t>> pixels(ncomp + 1);
    for (std::size_t k = 0; k < components.labels.size(); ++k)
        if (components.labels[k] > 0) pixels[components.labels[k]].push_back(k);
    std::vector<std::pair<std::int32_t, FeatureVector>> out;
    for (std::int32_t l = 1; l <= ncomp; ++l)
        if (!pixels[l].empty())
            out.push_back({l, extract_features(pixels[l], heights, accumulation, heights.frame)});
    return out;
}

}  // namespace streetmorph

#endif
