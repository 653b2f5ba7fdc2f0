#ifndef STREETMORPH_GROUND_HPP
#define STREETMORPH_GROUND_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "core.hpp"
#include "morphology.hpp"
#include "raster.hpp"

namespace streetmorph {

/// Ground mask on the camera frame, paired with the gap-completed range image
/// the detection stage reuses.
struct GroundMask {
    Raster filled;                  // gap-completed range image
    std::vector<std::uint8_t> mask; // 1 = ground, aligned with filled.values

    bool is_ground(int i, int j) const { return mask[filled.idx(i, j)] != 0; }
};

namespace ground_detail {

/// 4-connected digital segment from a to b; calls visit(i, j, t) with
/// t in [0, 1] the arc-length fraction, endpoints included.
template <typename Visit>
void walk_line4(int x0, int y0, int x1, int y1, Visit visit) {
    int dx = std::abs(x1 - x0), dy = std::abs(y1 - y0);
    int sx = x1 >= x0 ? 1 : -1, sy = y1 >= y0 ? 1 : -1;
    int steps = dx + dy;
    int x = x0, y = y0, ix = 0, iy = 0;
    visit(x, y, 0.0);
    while (ix < dx || iy < dy) {
        if ((1 + 2 * ix) * dy < (1 + 2 * iy) * dx) {
            x += sx;
            ++ix;
        } else {
            y += sy;
            ++iy;
        }
        visit(x, y, steps > 0 ? double(ix + iy) / steps : 1.0);
    }
}

struct PixelRef {
    int i, j;
};

}  // namespace ground_detail

/// Connect the components of the valid domain by drawing straight links
/// between nearest component pairs, interpolating heights along each link.
/// Existing valid pixels are never modified. Iterates until connected.
inline Raster link_regions(const Raster& range, Connectivity se) {
    using ground_detail::PixelRef;
    Raster out = range;
    const int w = out.width(), h = out.height();
    for (int round = 0; round < w * h; ++round) {
        LabelImage cc = connected_components(out, se);
        std::int32_t ncomp = 0;
        for (auto l : cc.labels) ncomp = std::max(ncomp, l);
        if (ncomp <= 1) break;

        // boundary pixels per component (pixels with an invalid or off-image neighbor)
        std::vector<std::vector<PixelRef>> boundary(ncomp + 1);
        auto nb = morph_detail::offsets(Connectivity::Square8);
        for (int j = 0; j < h; ++j) {
            for (int i = 0; i < w; ++i) {
                std::int32_t l = cc.at(i, j);
                if (l == 0) continue;
                bool edge = false;
                for (int n = 0; n < nb.n && !edge; ++n) {
                    int ni = i + nb.di[n], nj = j + nb.dj[n];
                    if (!out.in_bounds(ni, nj) || !out.is_valid(ni, nj)) edge = true;
                }
                if (edge) boundary[l].push_back({i, j});
            }
        }

        // nearest neighboring component for each component
        struct Link {
            double d2 = std::numeric_limits<double>::infinity();
            std::int32_t other = 0;
            PixelRef from{0, 0}, to{0, 0};
        };
        std::vector<Link> best(ncomp + 1);
        for (std::int32_t a = 1; a <= ncomp; ++a) {
            for (std::int32_t b = 1; b <= ncomp; ++b) {
                if (a == b) continue;
                for (const auto& pa : boundary[a]) {
                    for (const auto& pb : boundary[b]) {
                        double d2 = double(pa.i - pb.i) * (pa.i - pb.i) +
                                    double(pa.j - pb.j) * (pa.j - pb.j);
                        if (d2 < best[a].d2 || (d2 == best[a].d2 && b < best[a].other)) {
                            best[a] = {d2, b, pa, pb};
                        }
                    }
                }
            }
        }
        for (std::int32_t a = 1; a <= ncomp; ++a) {
            const Link& lk = best[a];
            if (lk.other == 0) continue;
            double h0 = out.at(lk.from.i, lk.from.j);
            double h1 = out.at(lk.to.i, lk.to.j);
            ground_detail::walk_line4(lk.from.i, lk.from.j, lk.to.i, lk.to.j,
                                      [&](int i, int j, double t) {
                                          std::size_t k = out.idx(i, j);
                                          if (out.valid[k]) return;
                                          out.valid[k] = 1;
                                          out.values[k] = h0 + (h1 - h0) * t;
                                      });
        }
    }
    return out;
}

/// Fill every enclosed invalid region ("basin") by hole filling restricted to
/// the basin's bounding box plus a one-pixel collar. Basins touching the image
/// border stay invalid.
inline Raster fill_gaps(const Raster& range, Connectivity se) {
    const int w = range.width(), h = range.height();
    {
        LabelImage cc = connected_components(range, se);
        std::int32_t ncomp = 0;
        for (auto l : cc.labels) ncomp = std::max(ncomp, l);
        if (ncomp > 1) throw Error("fill_gaps: valid domain is not connected");
    }
    Raster out = range;

    // connected components of invalid pixels (4-connectivity keeps basins
    // separated by the 1-px links distinct)
    std::vector<std::int32_t> basin(range.values.size(), 0);
    std::int32_t nbasin = 0;
    std::vector<std::size_t> stack;
    std::vector<std::uint8_t> touches_border;
    std::vector<int> bi0, bi1, bj0, bj1;
    for (std::size_t k0 = 0; k0 < range.values.size(); ++k0) {
        if (range.valid[k0] || basin[k0] != 0) continue;
        ++nbasin;
        touches_border.push_back(0);
        bi0.push_back(w);
        bi1.push_back(-1);
        bj0.push_back(h);
        bj1.push_back(-1);
        basin[k0] = nbasin;
        stack.assign(1, k0);
        while (!stack.empty()) {
            std::size_t k = stack.back();
            stack.pop_back();
            int i = static_cast<int>(k % w), j = static_cast<int>(k / w);
            auto& tb = touches_border.back();
            if (i == 0 || j == 0 || i == w - 1 || j == h - 1) tb = 1;
            bi0.back() = std::min(bi0.back(), i);
            bi1.back() = std::max(bi1.back(), i);
            bj0.back() = std::min(bj0.back(), j);
            bj1.back() = std::max(bj1.back(), j);
            const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
            for (int n = 0; n < 4; ++n) {
                int ni = i + di[n], nj = j + dj[n];
                if (ni < 0 || ni >= w || nj < 0 || nj >= h) continue;
                std::size_t nk = range.idx(ni, nj);
                if (range.valid[nk] || basin[nk] != 0) continue;
                basin[nk] = nbasin;
                stack.push_back(nk);
            }
        }
    }

    for (std::int32_t b = 1; b <= nbasin; ++b) {
        if (touches_border[b - 1]) continue;
        int i0 = std::max(0, bi0[b - 1] - 1), i1 = std::min(w - 1, bi1[b - 1] + 1);
        int j0 = std::max(0, bj0[b - 1] - 1), j1 = std::min(h - 1, bj1[b - 1] + 1);
        CameraFrame sf;
        sf.origin_x = range.frame.origin_x + i0 / range.frame.resolution;
        sf.origin_y = range.frame.origin_y + j0 / range.frame.resolution;
        sf.resolution = range.frame.resolution;
        sf.width = i1 - i0 + 1;
        sf.height = j1 - j0 + 1;
        Raster sub(sf);
        double ceiling = 0.0;
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i)
                if (range.is_valid(i, j)) ceiling = std::max(ceiling, range.at(i, j));
        ceiling += 1.0;
        for (int j = j0; j <= j1; ++j) {
            for (int i = i0; i <= i1; ++i) {
                std::size_t k = range.idx(i, j), sk = sub.idx(i - i0, j - j0);
                if (range.valid[k]) {
                    sub.valid[sk] = 1;
                    sub.values[sk] = range.values[k];
                } else if (basin[k] == b) {
                    sub.valid[sk] = 1;  // basin pixels start at 0, fill raises them
                } else {
                    // a foreign basin in the window: impassable, but it must not
                    // turn its neighbors into fill borders
                    sub.valid[sk] = 1;
                    sub.values[sk] = ceiling;
                }
            }
        }
        Raster filled = fill(sub, se);
        for (int j = j0; j <= j1; ++j) {
            for (int i = i0; i <= i1; ++i) {
                std::size_t k = range.idx(i, j);
                if (!range.valid[k] && basin[k] == b) {
                    out.valid[k] = 1;
                    out.values[k] = filled.at(i - i0, j - j0);
                }
            }
        }
    }
    return out;
}

/// Quasi-flat-zone ground segmentation: the largest region seeds the mask and
/// every region fully enclosed by it (off-border, all external neighbors in the
/// seed) is merged in, so holes punched by thin high objects stay ground.
inline GroundMask segment_ground(const Raster& filled, double lambda, Connectivity se) {
    LabelImage zones = quasi_flat_zones(filled, lambda, se);
    std::int32_t nzone = 0;
    for (auto l : zones.labels) nzone = std::max(nzone, l);
    if (nzone == 0) throw Error("segment_ground: no valid pixels");

    std::vector<std::int64_t> count(nzone + 1, 0);
    for (auto l : zones.labels)
        if (l > 0) ++count[l];
    std::int32_t seed = 1;
    for (std::int32_t z = 2; z <= nzone; ++z)
        if (count[z] > count[seed]) seed = z;

    // group non-seed zones into connected islands; an island merges only when
    // it avoids the image border and every external neighbor is a valid seed
    // pixel (an invalid neighbor means the far side is unseen, e.g. a wall)
    const int w = filled.width(), h = filled.height();
    Raster rest = filled;
    for (std::size_t k = 0; k < rest.valid.size(); ++k)
        if (zones.labels[k] == 0 || zones.labels[k] == seed) rest.valid[k] = 0;
    LabelImage islands = connected_components(rest, se);
    std::int32_t nisl = 0;
    for (auto l : islands.labels) nisl = std::max(nisl, l);
    std::vector<std::uint8_t> enclosed(nisl + 1, 1);
    auto nb = morph_detail::offsets(se);
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            std::int32_t l = islands.at(i, j);
            if (l == 0) continue;
            if (i == 0 || j == 0 || i == w - 1 || j == h - 1) enclosed[l] = 0;
            for (int n = 0; n < nb.n; ++n) {
                int ni = i + nb.di[n], nj = j + nb.dj[n];
                if (!filled.in_bounds(ni, nj)) continue;
                if (islands.at(ni, nj) == l || zones.at(ni, nj) == seed) continue;
                enclosed[l] = 0;
            }
        }
    }

    GroundMask gm;
    gm.filled = filled;
    gm.mask.assign(filled.values.size(), 0);
    for (std::size_t k = 0; k < zones.labels.size(); ++k) {
        if (zones.labels[k] == seed || (islands.labels[k] > 0 && enclosed[islands.labels[k]]))
            gm.mask[k] = 1;
    }
    return gm;
}

/// 1 = Ground on the mask, 2 = Facade on every other valid pixel.
inline LabelImage facade_ground_labels(const GroundMask& gm) {
    LabelImage out(gm.filled.width(), gm.filled.height());
    for (std::size_t k = 0; k < gm.filled.values.size(); ++k) {
        if (gm.mask[k]) out.labels[k] = 1;
        else if (gm.filled.valid[k]) out.labels[k] = 2;
    }
    return out;
}

}  // namespace streetmorph

#endif
