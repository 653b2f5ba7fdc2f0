#ifndef STREETMORPH_RASTER_HPP
#define STREETMORPH_RASTER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "core.hpp"

namespace streetmorph {

/// Virtual top-down camera on the XY plane. Pixel (i,j) covers the world square
/// [origin_x + i/resolution, origin_x + (i+1)/resolution) x likewise in y.
struct CameraFrame {
    double origin_x = 0.0;
    double origin_y = 0.0;
    double resolution = 20.0;  // pixels per meter
    int width = 0;
    int height = 0;

    std::optional<std::pair<int, int>> pixel_of(double x, double y) const {
        int i = static_cast<int>(std::floor((x - origin_x) * resolution));
        int j = static_cast<int>(std::floor((y - origin_y) * resolution));
        if (i < 0 || i >= width || j < 0 || j >= height) return std::nullopt;
        return std::make_pair(i, j);
    }

    double center_x(int i) const { return origin_x + (i + 0.5) / resolution; }
    double center_y(int j) const { return origin_y + (j + 0.5) / resolution; }

    bool operator==(const CameraFrame&) const = default;
};

/// 2D grid of non-negative height values with a validity mask. Invalid pixels
/// carry value 0 and are excluded from all morphological adjacency.
struct Raster {
    CameraFrame frame;
    std::vector<double> values;
    std::vector<std::uint8_t> valid;

    Raster() = default;
    explicit Raster(const CameraFrame& f)
        : frame(f),
          values(static_cast<std::size_t>(f.width) * f.height, 0.0),
          valid(static_cast<std::size_t>(f.width) * f.height, 0) {}

    int width() const { return frame.width; }
    int height() const { return frame.height; }
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * frame.width + i; }
    double at(int i, int j) const { return values[idx(i, j)]; }
    double& at(int i, int j) { return values[idx(i, j)]; }
    bool is_valid(int i, int j) const { return valid[idx(i, j)] != 0; }
    void set(int i, int j, double v) {
        values[idx(i, j)] = v;
        valid[idx(i, j)] = 1;
    }
    bool in_bounds(int i, int j) const { return i >= 0 && i < frame.width && j >= 0 && j < frame.height; }

    std::size_t valid_count() const {
        std::size_t n = 0;
        for (auto v : valid) n += v;
        return n;
    }
};

using RangeImage = Raster;         // max height per pixel
using AccumulationImage = Raster;  // point count per pixel (stored as real)

/// Tight frame over the cloud's XY bounding box plus a 1-pixel margin per side.
inline CameraFrame fit_frame(const PointCloud& cloud, double resolution) {
    if (cloud.empty()) throw Error("fit_frame: empty cloud");
    if (resolution <= 0.0) throw Error("fit_frame: resolution must be positive");
    double minx = std::numeric_limits<double>::infinity(), maxx = -minx;
    double miny = minx, maxy = maxx;
    for (const auto& p : cloud.points) {
        minx = std::min(minx, p.x);
        maxx = std::max(maxx, p.x);
        miny = std::min(miny, p.y);
        maxy = std::max(maxy, p.y);
    }
    CameraFrame f;
    f.resolution = resolution;
    f.origin_x = minx - 1.0 / resolution;
    f.origin_y = miny - 1.0 / resolution;
    f.width = std::max(1, static_cast<int>(std::ceil((maxx - minx) * resolution - 1e-9))) + 2;
    f.height = std::max(1, static_cast<int>(std::ceil((maxy - miny) * resolution - 1e-9))) + 2;
    return f;
}

struct Projection {
    RangeImage range;
    AccumulationImage accumulation;
    std::size_t dropped = 0;  // points falling outside the frame
    double z_offset = 0.0;    // minimum z subtracted from all heights
};

/// Projects the cloud through the frame. Heights are normalized so the lowest
/// point of the cloud sits at 0.
inline Projection project(const PointCloud& cloud, const CameraFrame& frame) {
    Projection out;
    out.range = RangeImage(frame);
    out.accumulation = AccumulationImage(frame);
    double minz = std::numeric_limits<double>::infinity();
    for (const auto& p : cloud.points) minz = std::min(minz, p.z);
    if (cloud.empty()) minz = 0.0;
    out.z_offset = minz;
    for (const auto& p : cloud.points) {
        auto px = frame.pixel_of(p.x, p.y);
        if (!px) {
            ++out.dropped;
            continue;
        }
        auto [i, j] = *px;
        double h = p.z - minz;
        std::size_t k = out.range.idx(i, j);
        if (!out.range.valid[k] || h > out.range.values[k]) out.range.values[k] = h;
        out.range.valid[k] = 1;
        out.accumulation.values[k] += 1.0;
        out.accumulation.valid[k] = 1;
    }
    return out;
}

enum class DownsampleMode { Max, Sum };

/// Block-reduces the raster by an integer factor: max (range) or sum
/// (accumulation) over each factor x factor block. A non-divisible last block
/// is the partial remainder, so the coarse frame still covers the fine one.
inline Raster downsample(const Raster& r, int factor, DownsampleMode mode) {
    if (factor < 1) throw Error("downsample: factor must be >= 1");
    if (factor == 1) return r;
    CameraFrame f = r.frame;
    f.resolution = r.frame.resolution / factor;
    f.width = (r.width() + factor - 1) / factor;
    f.height = (r.height() + factor - 1) / factor;
    Raster out(f);
    for (int j = 0; j < r.height(); ++j) {
        for (int i = 0; i < r.width(); ++i) {
            if (!r.is_valid(i, j)) continue;
            int ci = i / factor, cj = j / factor;
            std::size_t k = out.idx(ci, cj);
            double v = r.at(i, j);
            if (!out.valid[k]) {
                out.values[k] = v;
                out.valid[k] = 1;
            } else if (mode == DownsampleMode::Max) {
                out.values[k] = std::max(out.values[k], v);
            } else {
                out.values[k] += v;
            }
        }
    }
    return out;
}

}  // namespace streetmorph

#endif
