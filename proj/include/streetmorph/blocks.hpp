#ifndef STREETMORPH_BLOCKS_HPP
#define STREETMORPH_BLOCKS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "core.hpp"
#include "morphology.hpp"
#include "raster.hpp"

namespace streetmorph {

/// Dominant facade line in Hough normal form, in pixel coordinates of the
/// raster it was detected on (frame kept for world conversions).
struct FacadeLine {
    double theta = 0.0;  // normal angle, radians in [0, pi)
    double rho = 0.0;    // signed distance from the raster origin, pixels
    double score = 0.0;  // accumulated weight
    CameraFrame frame;

    /// Signed arc-length coordinate (meters) of a world point along the line.
    double arc_position(double x, double y) const {
        double u = (x - frame.origin_x) * frame.resolution;
        double v = (y - frame.origin_y) * frame.resolution;
        return (-u * std::sin(theta) + v * std::cos(theta)) / frame.resolution;
    }
};

/// Building height profile sampled along the facade line.
struct HeightProfile {
    std::vector<double> positions;  // arc length, meters, uniform spacing
    std::vector<double> heights;    // max range value across the band, meters
    double spacing = 0.0;
};

struct BlockCut {
    double position = 0.0;  // arc length, meters
};

/// Weighted Hough transform over the valid pixels: each pixel votes for the
/// (theta, rho) lines through its center with its range value as weight.
inline FacadeLine detect_facade_line(const Raster& range) {
    const int w = range.width(), h = range.height();
    constexpr double kThetaStepDeg = 0.5;
    const int ntheta = static_cast<int>(std::lround(180.0 / kThetaStepDeg));
    const int diag = static_cast<int>(std::ceil(std::sqrt(double(w) * w + double(h) * h))) + 1;
    const int nrho = 2 * diag + 1;

    std::vector<double> sins(ntheta), coss(ntheta);
    for (int a = 0; a < ntheta; ++a) {
        double th = a * kThetaStepDeg * M_PI / 180.0;
        sins[a] = std::sin(th);
        coss[a] = std::cos(th);
    }
    std::vector<double> acc(static_cast<std::size_t>(ntheta) * nrho, 0.0);
    bool any = false;
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            if (!range.is_valid(i, j)) continue;
            any = true;
            double wgt = range.at(i, j);
            double u = i + 0.5, v = j + 0.5;
            for (int a = 0; a < ntheta; ++a) {
                int r = static_cast<int>(std::lround(u * coss[a] + v * sins[a])) + diag;
                acc[static_cast<std::size_t>(a) * nrho + r] += wgt;
            }
        }
    }
    if (!any) throw Error("detect_facade_line: no valid pixels");

    std::size_t best = 0;
    for (std::size_t k = 1; k < acc.size(); ++k)
        if (acc[k] > acc[best]) best = k;
    FacadeLine line;
    line.theta = double(best / nrho) * kThetaStepDeg * M_PI / 180.0;
    line.rho = double(static_cast<int>(best % nrho) - diag);
    line.score = acc[best];
    line.frame = range.frame;
    return line;
}

/// Max range value per unit arc-length step within the perpendicular band of
/// +-band_halfwidth meters around the line. Steps with no valid pixel are 0.
inline HeightProfile extract_profile(const Raster& range, const FacadeLine& line,
                                     double band_halfwidth) {
    if (band_halfwidth <= 0) throw Error("extract_profile: band_halfwidth must be positive");
    const int w = range.width(), h = range.height();
    const double s = std::sin(line.theta), c = std::cos(line.theta);
    const double res = range.frame.resolution;
    const double band_px = band_halfwidth * res;

    // arc-length span of the whole raster, in pixels
    double tmin = 1e300, tmax = -1e300;
    for (int ci : {0, w - 1}) {
        for (int cj : {0, h - 1}) {
            double t = -(ci + 0.5) * s + (cj + 0.5) * c;
            tmin = std::min(tmin, t);
            tmax = std::max(tmax, t);
        }
    }
    // the line must pass through the raster
    {
        double dmin = 1e300;
        for (int ci : {0, w - 1})
            for (int cj : {0, h - 1})
                dmin = std::min(dmin, (ci + 0.5) * c + (cj + 0.5) * s - line.rho);
        double dmax = -1e300;
        for (int ci : {0, w - 1})
            for (int cj : {0, h - 1})
                dmax = std::max(dmax, (ci + 0.5) * c + (cj + 0.5) * s - line.rho);
        if (dmin > band_px || dmax < -band_px)
            throw Error("extract_profile: line outside the raster");
    }

    const int nbins = static_cast<int>(std::lround(tmax - tmin)) + 1;
    HeightProfile prof;
    prof.spacing = 1.0 / res;
    prof.positions.resize(nbins);
    prof.heights.assign(nbins, 0.0);
    for (int b = 0; b < nbins; ++b) prof.positions[b] = (tmin + b) / res;
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            if (!range.is_valid(i, j)) continue;
            double u = i + 0.5, v = j + 0.5;
            if (std::abs(u * c + v * s - line.rho) > band_px) continue;
            int b = static_cast<int>(std::lround(-u * s + v * c - tmin));
            if (b < 0 || b >= nbins) continue;
            prof.heights[b] = std::max(prof.heights[b], range.at(i, j));
        }
    }
    return prof;
}

/// 1D median filter with symmetric boundary reflection.
inline HeightProfile smooth_profile(const HeightProfile& profile, int window) {
    if (window < 1 || window % 2 == 0) throw Error("smooth_profile: window must be odd and >= 1");
    const int n = static_cast<int>(profile.heights.size());
    HeightProfile out = profile;
    if (window == 1 || n == 0) return out;
    const int half = window / 2;
    std::vector<double> buf;
    buf.reserve(window);
    auto reflect = [&](int i) {
        while (i < 0 || i >= n) {
            if (i < 0) i = -i - 1;
            if (i >= n) i = 2 * n - 1 - i;
        }
        return i;
    };
    for (int i = 0; i < n; ++i) {
        buf.clear();
        for (int d = -half; d <= half; ++d) buf.push_back(profile.heights[reflect(i + d)]);
        std::nth_element(buf.begin(), buf.begin() + half, buf.end());
        out.heights[i] = buf[half];
    }
    return out;
}

/// 1D marker watershed: maxima surviving an h-maxima filter at min_depth seed
/// basins on the inverted profile; each basin boundary yields one cut.
inline std::vector<BlockCut> cut_profile(const HeightProfile& profile, double min_depth) {
    if (min_depth <= 0) throw Error("cut_profile: min_depth must be positive");
    const int n = static_cast<int>(profile.heights.size());
    std::vector<BlockCut> cuts;
    if (n < 2) return cuts;

    CameraFrame f;
    f.resolution = 1.0 / profile.spacing;
    f.width = n;
    f.height = 1;
    Raster prof(f);
    std::fill(prof.valid.begin(), prof.valid.end(), 1);
    prof.values = profile.heights;

    Raster filt = h_maxima(prof, min_depth, Connectivity::Cross4);
    LabelImage markers = regional_maxima(filt, Connectivity::Cross4);
    double top = *std::max_element(filt.values.begin(), filt.values.end());
    Raster inverted = filt;
    for (auto& v : inverted.values) v = top - v;
    LabelImage basins = watershed(inverted, markers, Connectivity::Cross4);
    for (int i = 0; i + 1 < n; ++i) {
        if (basins.labels[i] != basins.labels[i + 1])
            cuts.push_back({0.5 * (profile.positions[i] + profile.positions[i + 1])});
    }
    return cuts;
}

/// Block index per point: count of cuts at or below the point's arc position
/// (ties go to the higher-arc-length block).
inline std::vector<std::size_t> block_assignment(const PointCloud& cloud, const FacadeLine& line,
                                                 const std::vector<BlockCut>& cuts) {
    std::vector<double> pos;
    pos.reserve(cuts.size());
    for (const auto& c : cuts) pos.push_back(c.position);
    std::vector<std::size_t> out(cloud.size());
    for (std::size_t k = 0; k < cloud.size(); ++k) {
        double t = line.arc_position(cloud.points[k].x, cloud.points[k].y);
        out[k] = static_cast<std::size_t>(std::upper_bound(pos.begin(), pos.end(), t) -
                                          pos.begin());
    }
    return out;
}

/// Partition the cloud at the cut positions, preserving point order per block.
inline std::vector<PointCloud> split_blocks(const PointCloud& cloud, const FacadeLine& line,
                                            const std::vector<BlockCut>& cuts) {
    std::vector<std::size_t> assign = block_assignment(cloud, line, cuts);
    std::vector<PointCloud> blocks(cuts.size() + 1);
    for (std::size_t k = 0; k < cloud.size(); ++k)
        blocks[assign[k]].points.push_back(cloud.points[k]);
    return blocks;
}

}  // namespace streetmorph

#endif
