#ifndef STREETMORPH_MORPHOLOGY_HPP
#define STREETMORPH_MORPHOLOGY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <queue>
#include <vector>

#include "core.hpp"
#include "raster.hpp"

namespace streetmorph {

/// Pixel adjacency: 4-connected cross or 8-connected square, both symmetric
/// about the center.
enum class Connectivity { Cross4, Square8 };

namespace morph_detail {

struct Neighborhood {
    int di[8];
    int dj[8];
    int n;
};

inline Neighborhood offsets(Connectivity c) {
    if (c == Connectivity::Cross4) return {{1, -1, 0, 0}, {0, 0, 1, -1}, 4};
    return {{1, -1, 0, 0, 1, 1, -1, -1}, {0, 0, 1, -1, 1, -1, 1, -1}, 8};
}

inline void check_same_grid(const Raster& a, const Raster& b, const char* op) {
    if (a.width() != b.width() || a.height() != b.height())
        throw DimensionMismatch(std::string(op) + ": dimension mismatch");
    if (a.valid != b.valid) throw Error(std::string(op) + ": validity masks differ");
}

/// Vincent-style hybrid reconstruction by dilation: forward/backward raster
/// scans followed by FIFO propagation. marker <= mask pointwise on the valid
/// domain; invalid pixels are excluded from adjacency.
inline Raster reconstruct_dilate_impl(const Raster& marker, const Raster& mask, Connectivity se) {
    check_same_grid(marker, mask, "reconstruct");
    const int w = mask.width(), h = mask.height();
    Raster r = marker;
    auto nb = offsets(se);
    auto scan = [&](bool forward) {
        int j0 = forward ? 0 : h - 1, j1 = forward ? h : -1, dj = forward ? 1 : -1;
        for (int j = j0; j != j1; j += dj) {
            int i0 = forward ? 0 : w - 1, i1 = forward ? w : -1, di = forward ? 1 : -1;
            for (int i = i0; i != i1; i += di) {
                std::size_t k = r.idx(i, j);
                if (!r.valid[k]) continue;
                double best = r.values[k];
                for (int t = 0; t < nb.n; ++t) {
                    int ni = i + nb.di[t], nj = j + nb.dj[t];
                    // causal half of the neighborhood only
                    if (forward ? (nj > j || (nj == j && ni >= i)) : (nj < j || (nj == j && ni <= i)))
                        continue;
                    if (ni < 0 || ni >= w || nj < 0 || nj >= h) continue;
                    std::size_t nk = r.idx(ni, nj);
                    if (!r.valid[nk]) continue;
                    best = std::max(best, r.values[nk]);
                }
                r.values[k] = std::min(best, mask.values[k]);
            }
        }
    };
    scan(true);
    std::deque<std::size_t> fifo;
    scan(false);
    for (int j = h - 1; j >= 0; --j) {
        for (int i = w - 1; i >= 0; --i) {
            std::size_t k = r.idx(i, j);
            if (!r.valid[k]) continue;
            for (int t = 0; t < nb.n; ++t) {
                int ni = i + nb.di[t], nj = j + nb.dj[t];
                if (ni < 0 || ni >= w || nj < 0 || nj >= h) continue;
                std::size_t nk = r.idx(ni, nj);
                if (!r.valid[nk]) continue;
                if (r.values[nk] < r.values[k] && r.values[nk] < mask.values[nk]) {
                    fifo.push_back(k);
                    break;
                }
            }
        }
    }
    while (!fifo.empty()) {
        std::size_t k = fifo.front();
        fifo.pop_front();
        int i = static_cast<int>(k % w), j = static_cast<int>(k / w);
        for (int t = 0; t < nb.n; ++t) {
            int ni = i + nb.di[t], nj = j + nb.dj[t];
            if (ni < 0 || ni >= w || nj < 0 || nj >= h) continue;
            std::size_t nk = r.idx(ni, nj);
            if (!r.valid[nk]) continue;
            if (r.values[nk] < r.values[k] && mask.values[nk] != r.values[nk]) {
                r.values[nk] = std::min(r.values[k], mask.values[nk]);
                fifo.push_back(nk);
            }
        }
    }
    return r;
}

}  // namespace morph_detail

/// Limit of iterated geodesic dilation of `marker` capped at `mask`
/// (marker <= mask). Result r satisfies marker <= r <= mask.
inline Raster reconstruct_by_dilation(const Raster& marker, const Raster& mask, Connectivity se) {
    for (std::size_t k = 0; k < mask.values.size(); ++k) {
        if (mask.valid[k] && marker.values[k] > mask.values[k] + 1e-12)
            throw Error("reconstruct_by_dilation: marker exceeds mask");
    }
    return morph_detail::reconstruct_dilate_impl(marker, mask, se);
}

/// Dual: iterated geodesic erosion of `marker` floored at `mask`
/// (marker >= mask). Result r satisfies mask <= r <= marker.
inline Raster reconstruct_by_erosion(const Raster& marker, const Raster& mask, Connectivity se) {
    for (std::size_t k = 0; k < mask.values.size(); ++k) {
        if (mask.valid[k] && marker.values[k] < mask.values[k] - 1e-12)
            throw Error("reconstruct_by_erosion: marker below mask");
    }
    Raster nm = marker, nk = mask;
    for (auto& v : nm.values) v = -v;
    for (auto& v : nk.values) v = -v;
    Raster r = morph_detail::reconstruct_dilate_impl(nm, nk, se);
    for (auto& v : r.values) v = -v;
    for (std::size_t k = 0; k < r.values.size(); ++k)
        if (!r.valid[k]) r.values[k] = 0.0;
    return r;
}

/// Hole filling: reconstruction by erosion from a marker that equals f on the
/// border of the valid domain and max(f) elsewhere. Removes regional minima not
/// connected to the domain border.
inline Raster fill(const Raster& f, Connectivity se) {
    const int w = f.width(), h = f.height();
    if (f.valid_count() == 0) return f;
    double maxv = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < f.values.size(); ++k)
        if (f.valid[k]) maxv = std::max(maxv, f.values[k]);
    auto nb = morph_detail::offsets(se);
    Raster marker = f;
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            std::size_t k = f.idx(i, j);
            if (!f.valid[k]) continue;
            bool border = (i == 0 || j == 0 || i == w - 1 || j == h - 1);
            for (int t = 0; !border && t < nb.n; ++t) {
                int ni = i + nb.di[t], nj = j + nb.dj[t];
                if (!f.in_bounds(ni, nj) || !f.valid[f.idx(ni, nj)]) border = true;
            }
            marker.values[k] = border ? f.values[k] : maxv;
        }
    }
    return reconstruct_by_erosion(marker, f, se);
}

/// FTH(f) = FILL(f) - f; non-negative, zero on the domain border.
inline Raster fill_top_hat(const Raster& f, Connectivity se) {
    Raster g = fill(f, se);
    for (std::size_t k = 0; k < g.values.size(); ++k)
        if (g.valid[k]) g.values[k] = std::max(0.0, g.values[k] - f.values[k]);
    return g;
}

/// Partition of the valid domain into maximal connected regions grown over
/// adjacencies with |f_p - f_q| <= lambda. Region ids dense from 1 in
/// row-major discovery order.
inline LabelImage quasi_flat_zones(const Raster& f, double lambda, Connectivity se) {
    if (lambda < 0) throw Error("quasi_flat_zones: lambda must be >= 0");
    const int w = f.width(), h = f.height();
    LabelImage out(w, h);
    auto nb = morph_detail::offsets(se);
    // millimeter quantization keeps the partition stable under constant shifts
    const std::int64_t lam_mm = std::llround(lambda * 1000.0);
    auto mm = [&](std::size_t k) { return std::llround(f.values[k] * 1000.0); };
    std::vector<std::size_t> stack;
    std::int32_t next = 0;
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            std::size_t k = f.idx(i, j);
            if (!f.valid[k] || out.labels[k] != 0) continue;
            out.labels[k] = ++next;
            stack.assign(1, k);
            while (!stack.empty()) {
                std::size_t c = stack.back();
                stack.pop_back();
                int ci = static_cast<int>(c % w), cj = static_cast<int>(c / w);
                for (int t = 0; t < nb.n; ++t) {
                    int ni = ci + nb.di[t], nj = cj + nb.dj[t];
                    if (!f.in_bounds(ni, nj)) continue;
                    std::size_t nk = f.idx(ni, nj);
                    if (!f.valid[nk] || out.labels[nk] != 0) continue;
                    if (std::abs(mm(nk) - mm(c)) <= lam_mm) {
                        out.labels[nk] = next;
                        stack.push_back(nk);
                    }
                }
            }
        }
    }
    return out;
}

/// Area opening (union-find over pixels sorted by decreasing value): flattens
/// every regional maximum whose peak components have area below area_px.
inline Raster area_opening(const Raster& f, std::int64_t area_px, Connectivity se) {
    if (area_px < 1) throw Error("area_opening: area must be >= 1");
    const int w = f.width(), h = f.height();
    Raster out = f;
    if (area_px == 1) return out;
    auto nb = morph_detail::offsets(se);
    std::vector<std::size_t> order;
    order.reserve(f.values.size());
    for (std::size_t k = 0; k < f.values.size(); ++k)
        if (f.valid[k]) order.push_back(k);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (f.values[a] != f.values[b]) return f.values[a] > f.values[b];
        return a < b;
    });
    std::vector<std::int64_t> rank(f.values.size(), -1);
    for (std::size_t t = 0; t < order.size(); ++t) rank[order[t]] = static_cast<std::int64_t>(t);
    const std::int64_t NONE = std::numeric_limits<std::int64_t>::min();
    std::vector<std::int64_t> parent(f.values.size(), NONE);
    auto find_root = [&](std::size_t x) {
        std::size_t r = x;
        while (parent[r] >= 0) r = static_cast<std::size_t>(parent[r]);
        while (parent[x] >= 0) {
            std::size_t nxt = static_cast<std::size_t>(parent[x]);
            parent[x] = static_cast<std::int64_t>(r);
            x = nxt;
        }
        return r;
    };
    for (std::size_t p : order) {
        parent[p] = -1;  // new root, area 1
        int pi = static_cast<int>(p % w), pj = static_cast<int>(p / w);
        for (int t = 0; t < nb.n; ++t) {
            int ni = pi + nb.di[t], nj = pj + nb.dj[t];
            if (!f.in_bounds(ni, nj)) continue;
            std::size_t q = f.idx(ni, nj);
            if (!f.valid[q] || parent[q] == NONE) continue;  // not yet processed
            std::size_t r = find_root(q);
            if (r == p) continue;
            if (f.values[r] == f.values[p] || -parent[r] < area_px) {
                parent[p] += parent[r];
                parent[r] = static_cast<std::int64_t>(p);
            } else {
                parent[p] = -area_px;  // saturated: criterion already met
            }
        }
    }
    for (std::size_t t = order.size(); t-- > 0;) {
        std::size_t p = order[t];
        if (parent[p] >= 0) out.values[p] = out.values[static_cast<std::size_t>(parent[p])];
        else out.values[p] = f.values[p];
    }
    return out;
}

/// Suppresses maxima of dynamic <= h via reconstruction by dilation of f - h.
inline Raster h_maxima(const Raster& f, double h, Connectivity se) {
    if (h < 0) throw Error("h_maxima: h must be >= 0");
    Raster marker = f;
    for (std::size_t k = 0; k < marker.values.size(); ++k)
        if (marker.valid[k]) marker.values[k] -= h;
    return morph_detail::reconstruct_dilate_impl(marker, f, se);
}

/// Labels connected plateaus strictly higher than every valid neighbor;
/// background 0, labels dense from 1 in row-major discovery order.
inline LabelImage regional_maxima(const Raster& f, Connectivity se) {
    const int w = f.width(), h = f.height();
    LabelImage out(w, h);
    auto nb = morph_detail::offsets(se);
    std::vector<std::size_t> stack, plateau;
    std::vector<std::uint8_t> seen(f.values.size(), 0);
    std::int32_t next = 0;
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            std::size_t k = f.idx(i, j);
            if (!f.valid[k] || seen[k]) continue;
            // flood the equal-value plateau, checking for higher neighbors
            bool is_max = true;
            double v = f.values[k];
            seen[k] = 1;
            stack.assign(1, k);
            plateau.assign(1, k);
            while (!stack.empty()) {
                std::size_t c = stack.back();
                stack.pop_back();
                int ci = static_cast<int>(c % w), cj = static_cast<int>(c / w);
                for (int t = 0; t < nb.n; ++t) {
                    int ni = ci + nb.di[t], nj = cj + nb.dj[t];
                    if (!f.in_bounds(ni, nj)) continue;
                    std::size_t nk = f.idx(ni, nj);
                    if (!f.valid[nk]) continue;
                    if (f.values[nk] > v) is_max = false;
                    else if (f.values[nk] == v && !seen[nk]) {
                        seen[nk] = 1;
                        stack.push_back(nk);
                        plateau.push_back(nk);
                    }
                }
            }
            if (is_max) {
                ++next;
                for (std::size_t c : plateau) out.labels[c] = next;
            }
        }
    }
    return out;
}

/// Morphological gradient: windowed dilation minus erosion over the SE
/// (window restricted to valid pixels, center included).
inline Raster gradient(const Raster& f, Connectivity se) {
    const int w = f.width(), h = f.height();
    Raster out = f;
    auto nb = morph_detail::offsets(se);
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            std::size_t k = f.idx(i, j);
            if (!f.valid[k]) continue;
            double lo = f.values[k], hi = f.values[k];
            for (int t = 0; t < nb.n; ++t) {
                int ni = i + nb.di[t], nj = j + nb.dj[t];
                if (!f.in_bounds(ni, nj)) continue;
                std::size_t nk = f.idx(ni, nj);
                if (!f.valid[nk]) continue;
                lo = std::min(lo, f.values[nk]);
                hi = std::max(hi, f.values[nk]);
            }
            out.values[k] = hi - lo;
        }
    }
    return out;
}

/// Marker-based watershed: hierarchical-queue flooding in increasing value
/// order. Priority is the value quantized to millimeters; FIFO among equal
/// priorities with row-major marker insertion, so the result is deterministic.
/// Every valid pixel reachable from a marker gets that marker's label; no
/// watershed-line pixels are produced.
inline LabelImage watershed(const Raster& f, const LabelImage& markers, Connectivity se) {
    const int w = f.width(), h = f.height();
    if (markers.width != w || markers.height != h)
        throw DimensionMismatch("watershed: marker dimensions differ");
    bool any = false;
    for (auto l : markers.labels) any = any || l != 0;
    if (!any) throw Error("watershed: empty markers");
    auto nb = morph_detail::offsets(se);
    LabelImage out = markers;
    struct Entry {
        std::int64_t prio;
        std::uint64_t seq;
        std::size_t pix;
        std::int32_t label;
    };
    auto cmp = [](const Entry& a, const Entry& b) {
        if (a.prio != b.prio) return a.prio > b.prio;
        return a.seq > b.seq;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> pq(cmp);
    std::uint64_t seq = 0;
    auto prio_of = [&](std::size_t k) {
        return static_cast<std::int64_t>(std::llround(f.values[k] * 1000.0));
    };
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            std::size_t k = f.idx(i, j);
            if (!f.valid[k] || out.labels[k] == 0) continue;
            for (int t = 0; t < nb.n; ++t) {
                int ni = i + nb.di[t], nj = j + nb.dj[t];
                if (!f.in_bounds(ni, nj)) continue;
                std::size_t nk = f.idx(ni, nj);
                if (!f.valid[nk] || out.labels[nk] != 0) continue;
                pq.push({prio_of(nk), seq++, nk, out.labels[k]});
            }
        }
    }
    while (!pq.empty()) {
        Entry e = pq.top();
        pq.pop();
        if (out.labels[e.pix] != 0) continue;
        out.labels[e.pix] = e.label;
        int i = static_cast<int>(e.pix % w), j = static_cast<int>(e.pix / w);
        for (int t = 0; t < nb.n; ++t) {
            int ni = i + nb.di[t], nj = j + nb.dj[t];
            if (!f.in_bounds(ni, nj)) continue;
            std::size_t nk = f.idx(ni, nj);
            if (!f.valid[nk] || out.labels[nk] != 0) continue;
            pq.push({prio_of(nk), seq++, nk, e.label});
        }
    }
    return out;
}

/// Connected-component labeling of the valid domain (values ignored).
inline LabelImage connected_components(const Raster& f, Connectivity se) {
    const int w = f.width(), h = f.height();
    LabelImage out(w, h);
    auto nb = morph_detail::offsets(se);
    std::vector<std::size_t> stack;
    std::int32_t next = 0;
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            std::size_t k = f.idx(i, j);
            if (!f.valid[k] || out.labels[k] != 0) continue;
            out.labels[k] = ++next;
            stack.assign(1, k);
            while (!stack.empty()) {
                std::size_t c = stack.back();
                stack.pop_back();
                int ci = static_cast<int>(c % w), cj = static_cast<int>(c / w);
                for (int t = 0; t < nb.n; ++t) {
                    int ni = ci + nb.di[t], nj = cj + nb.dj[t];
                    if (!f.in_bounds(ni, nj)) continue;
                    std::size_t nk = f.idx(ni, nj);
                    if (!f.valid[nk] || out.labels[nk] != 0) continue;
                    out.labels[nk] = next;
                    stack.push_back(nk);
                }
            }
        }
    }
    return out;
}

}  // namespace streetmorph

#endif
