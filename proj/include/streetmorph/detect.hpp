#ifndef STREETMORPH_DETECT_HPP
#define STREETMORPH_DETECT_HPP

#include <algorithm>
#include <cstdint>
#include <queue>
#include <vector>

#include "core.hpp"
#include "ground.hpp"
#include "morphology.hpp"
#include "raster.hpp"

namespace streetmorph {

/// Artifact heights on the ground mask plus the separation labeling.
/// An artifact pixel is a mask pixel whose estimated height exceeded the
/// detection threshold; everything else in the mask is ground marker.
struct ArtifactMap {
    Raster heights;                          // FTH values on the whole ground mask
    LabelImage components;                   // 0 = none, else dense 1..K
    std::vector<std::uint8_t> ground_marker; // mask minus artifact pixels

    bool is_artifact(std::size_t k) const { return heights.valid[k] && !ground_marker[k]; }
};

/// Height-based artifact detection: invert the masked range image, ring the
/// domain at the inverted maximum (the original minimal height), take the fill
/// top-hat and keep pixels strictly above the threshold.
inline ArtifactMap detect_artifacts(const GroundMask& gm, double threshold,
                                    Connectivity se = Connectivity::Square8) {
    if (threshold <= 0) throw Error("detect_artifacts: threshold must be positive");
    const Raster& src = gm.filled;
    const int w = src.width(), h = src.height();
    double maxv = 0.0;
    bool any = false;
    for (std::size_t k = 0; k < src.values.size(); ++k) {
        if (!gm.mask[k]) continue;
        maxv = any ? std::max(maxv, src.values[k]) : src.values[k];
        any = true;
    }
    if (!any) throw Error("detect_artifacts: empty ground mask");

    // inverted masked image on a grid padded by one pixel per side
    CameraFrame pf = src.frame;
    pf.width = w + 2;
    pf.height = h + 2;
    pf.origin_x -= 1.0 / pf.resolution;
    pf.origin_y -= 1.0 / pf.resolution;
    Raster inv(pf);
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            std::size_t k = src.idx(i, j);
            if (!gm.mask[k]) continue;
            std::size_t pk = inv.idx(i + 1, j + 1);
            inv.valid[pk] = 1;
            // no-data is already excluded by the valid mask, so every mask
            // pixel inverts (a value of exactly 0 is real lowest ground)
            inv.values[pk] = maxv - src.values[k];
        }
    }
    // background ring at zero, the inverted image's minimum: open ground
    // drains through it to the border, so only enclosed basins (artifact
    // silhouettes) are filled and the top-hat measures height above the
    // local surrounding ground
    std::vector<std::size_t> ring;
    auto nb = morph_detail::offsets(Connectivity::Square8);
    for (int j = 0; j < pf.height; ++j) {
        for (int i = 0; i < pf.width; ++i) {
            if (inv.is_valid(i, j)) continue;
            for (int n = 0; n < nb.n; ++n) {
                int ni = i + nb.di[n], nj = j + nb.dj[n];
                if (inv.in_bounds(ni, nj) && inv.is_valid(ni, nj)) {
                    ring.push_back(inv.idx(i, j));
                    break;
                }
            }
        }
    }
    for (std::size_t k : ring) {
        inv.valid[k] = 1;
        inv.values[k] = 0.0;
    }

    Raster fth = fill_top_hat(inv, se);

    ArtifactMap out;
    out.heights = Raster(src.frame);
    out.components = LabelImage(w, h);
    out.ground_marker.assign(src.values.size(), 0);
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            std::size_t k = src.idx(i, j);
            if (!gm.mask[k]) continue;
            double v = fth.at(i + 1, j + 1);
            out.heights.valid[k] = 1;
            out.heights.values[k] = v;
            if (!(v > threshold)) out.ground_marker[k] = 1;
        }
    }
    return out;
}

/// Split merged artifacts: simplify the height image (area opening then
/// h-maxima), take its regional maxima as markers, flood the gradient with an
/// added background marker on the ground, and keep the non-background basins.
inline ArtifactMap separate_components(const ArtifactMap& map, std::int64_t area_px, double h,
                                       Connectivity se = Connectivity::Square8) {
    if (h <= 0 || area_px < 1) throw Error("separate_components: h > 0 and area_px >= 1 required");
    const int w = map.heights.width(), hh = map.heights.height();
    Raster filtered = h_maxima(area_opening(map.heights, area_px, se), h, se);

    LabelImage rm = regional_maxima(filtered, se);
    std::int32_t nmax = 0;
    for (auto l : rm.labels) nmax = std::max(nmax, l);
    // keep only maxima that touch artifact pixels; the rest belong to the ground
    std::vector<std::int32_t> remap(nmax + 1, 0);
    for (std::size_t k = 0; k < rm.labels.size(); ++k)
        if (rm.labels[k] > 0 && map.is_artifact(k)) remap[rm.labels[k]] = 1;
    std::int32_t m = 0;
    for (std::int32_t l = 1; l <= nmax; ++l)
        if (remap[l]) remap[l] = ++m;
    const std::int32_t background = m + 1;

    LabelImage markers(w, hh);
    for (std::size_t k = 0; k < markers.labels.size(); ++k) {
        if (map.heights.valid[k] && map.ground_marker[k]) markers.labels[k] = background;
        if (rm.labels[k] > 0 && remap[rm.labels[k]] > 0) markers.labels[k] = remap[rm.labels[k]];
    }

    LabelImage ws = watershed(gradient(filtered, se), markers, se);

    ArtifactMap out = map;
    out.components = LabelImage(w, hh);
    for (std::size_t k = 0; k < ws.labels.size(); ++k)
        if (map.is_artifact(k) && ws.labels[k] >= 1 && ws.labels[k] < background)
            out.components.labels[k] = ws.labels[k];

    // per-blob fixups on the original 8-connected artifact blobs
    Raster blob_domain = map.heights;
    for (std::size_t k = 0; k < blob_domain.valid.size(); ++k)
        if (!map.is_artifact(k)) blob_domain.valid[k] = 0;
    LabelImage blobs = connected_components(blob_domain, Connectivity::Square8);
    std::int32_t nblob = 0;
    for (auto l : blobs.labels) nblob = std::max(nblob, l);
    std::vector<std::uint8_t> has_label(nblob + 1, 0);
    for (std::size_t k = 0; k < blobs.labels.size(); ++k)
        if (blobs.labels[k] > 0 && out.components.labels[k] > 0) has_label[blobs.labels[k]] = 1;
    std::int32_t next = background;  // fresh labels for marker-less blobs
    std::vector<std::int32_t> blob_label(nblob + 1, 0);
    for (std::size_t k = 0; k < blobs.labels.size(); ++k) {
        std::int32_t b = blobs.labels[k];
        if (b > 0 && !has_label[b]) {
            if (blob_label[b] == 0) blob_label[b] = next++;
            out.components.labels[k] = blob_label[b];
        }
    }
    // any remaining unlabeled artifact pixel joins the nearest labeled pixel
    // of its blob (multi-source BFS)
    {
        std::queue<std::size_t> q;
        for (std::size_t k = 0; k < out.components.labels.size(); ++k)
            if (map.is_artifact(k) && out.components.labels[k] > 0) q.push(k);
        auto nb = morph_detail::offsets(Connectivity::Square8);
        while (!q.empty()) {
            std::size_t k = q.front();
            q.pop();
            int i = static_cast<int>(k % w), j = static_cast<int>(k / w);
            for (int n = 0; n < nb.n; ++n) {
                int ni = i + nb.di[n], nj = j + nb.dj[n];
                if (ni < 0 || ni >= w || nj < 0 || nj >= hh) continue;
                std::size_t nk = map.heights.idx(ni, nj);
                if (!map.is_artifact(nk) || out.components.labels[nk] > 0) continue;
                if (blobs.labels[nk] != blobs.labels[k]) continue;
                out.components.labels[nk] = out.components.labels[k];
                q.push(nk);
            }
        }
    }

    // dense relabel in row-major first-appearance order
    std::vector<std::int32_t> dense(next + 1, 0);
    std::int32_t count = 0;
    for (auto& l : out.components.labels) {
        if (l <= 0) continue;
        if (dense[l] == 0) dense[l] = ++count;
        l = dense[l];
    }
    return out;
}

/// Drop components that are too small in pixels or too thin in point support;
/// their pixels fall back to the ground marker.
inline ArtifactMap filter_small(const ArtifactMap& map, const Raster& accumulation,
                                std::int64_t min_px, double min_acc) {
    std::int32_t ncomp = 0;
    for (auto l : map.components.labels) ncomp = std::max(ncomp, l);
    std::vector<std::int64_t> px(ncomp + 1, 0);
    std::vector<double> max_acc(ncomp + 1, 0.0);
    for (std::size_t k = 0; k < map.components.labels.size(); ++k) {
        std::int32_t l = map.components.labels[k];
        if (l <= 0) continue;
        ++px[l];
        max_acc[l] = std::max(max_acc[l], accumulation.values[k]);
    }
    std::vector<std::int32_t> keep(ncomp + 1, 0);
    std::int32_t next = 0;
    for (std::int32_t l = 1; l <= ncomp; ++l)
        if (px[l] >= min_px && max_acc[l] >= min_acc) keep[l] = ++next;

    ArtifactMap out = map;
    for (std::size_t k = 0; k < out.components.labels.size(); ++k) {
        std::int32_t l = out.components.labels[k];
        if (l <= 0) continue;
        if (keep[l]) {
            out.components.labels[k] = keep[l];
        } else {
            out.components.labels[k] = 0;
            out.ground_marker[k] = 1;
        }
    }
    return out;
}

}  // namespace streetmorph

#endif
