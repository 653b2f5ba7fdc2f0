#ifndef STREETMORPH_PGM_HPP
#define STREETMORPH_PGM_HPP

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "core.hpp"
#include "raster.hpp"

namespace streetmorph {

// Rasters serialize as 16-bit PGM (P2 or P5), values quantized to centimeters,
// invalid pixels encoded as 0. A sidecar text header <path>.hdr carries
// `origin_x origin_y resolution width height`.

namespace pgm_detail {

inline void write_sidecar(const CameraFrame& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out.precision(17);
    out << f.origin_x << ' ' << f.origin_y << ' ' << f.resolution << ' ' << f.width << ' '
        << f.height << '\n';
}

inline CameraFrame read_sidecar(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    CameraFrame f;
    if (!(in >> f.origin_x >> f.origin_y >> f.resolution >> f.width >> f.height))
        throw ParseError("malformed sidecar header: " + path);
    return f;
}

inline void write_pgm16(const std::vector<std::uint16_t>& px, int w, int h,
                        const std::string& path, bool binary) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << (binary ? "P5" : "P2") << '\n' << w << ' ' << h << '\n' << 65535 << '\n';
    if (binary) {
        for (std::uint16_t v : px) {
            char b[2] = {static_cast<char>(v >> 8), static_cast<char>(v & 0xff)};
            out.write(b, 2);
        }
    } else {
        for (int j = 0; j < h; ++j) {
            for (int i = 0; i < w; ++i) {
                out << px[static_cast<std::size_t>(j) * w + i] << (i + 1 == w ? '\n' : ' ');
            }
        }
    }
    if (!out) throw Error("write failure: " + path);
}

inline std::vector<std::uint16_t> read_pgm16(const std::string& path, int& w, int& h) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::string magic;
    in >> magic;
    if (magic != "P2" && magic != "P5") throw ParseError("not a PGM file: " + path);
    // skip whitespace and comment lines between header tokens
    auto next_token = [&in, &path]() -> long {
        while (true) {
            int c = in.peek();
            if (c == '#') {
                std::string line;
                std::getline(in, line);
            } else if (std::isspace(c)) {
                in.get();
            } else {
                break;
            }
        }
        long v;
        if (!(in >> v)) throw ParseError("malformed PGM header: " + path);
        return v;
    };
    w = static_cast<int>(next_token());
    h = static_cast<int>(next_token());
    long maxval = next_token();
    if (maxval <= 0 || maxval > 65535) throw ParseError("unsupported PGM maxval: " + path);
    std::vector<std::uint16_t> px(static_cast<std::size_t>(w) * h);
    if (magic == "P5") {
        in.get();  // single whitespace after maxval
        for (auto& v : px) {
            int hi = in.get(), lo = maxval > 255 ? in.get() : 0;
            if (hi < 0 || (maxval > 255 && lo < 0)) throw ParseError("truncated PGM: " + path);
            v = maxval > 255 ? static_cast<std::uint16_t>((hi << 8) | lo)
                             : static_cast<std::uint16_t>(hi);
        }
    } else {
        for (auto& v : px) {
            long t;
            if (!(in >> t)) throw ParseError("truncated PGM: " + path);
            v = static_cast<std::uint16_t>(t);
        }
    }
    return px;
}

}  // namespace pgm_detail

inline void write_raster_pgm(const Raster& r, const std::string& path, bool binary = true) {
    std::vector<std::uint16_t> px(r.values.size(), 0);
    for (std::size_t k = 0; k < r.values.size(); ++k) {
        if (!r.valid[k]) continue;
        double q = std::round(r.values[k] * 100.0);  // centimeters
        px[k] = static_cast<std::uint16_t>(std::clamp(q, 0.0, 65535.0));
    }
    pgm_detail::write_pgm16(px, r.width(), r.height(), path, binary);
    pgm_detail::write_sidecar(r.frame, path + ".hdr");
}

inline Raster read_raster_pgm(const std::string& path) {
    int w = 0, h = 0;
    auto px = pgm_detail::read_pgm16(path, w, h);
    CameraFrame f = pgm_detail::read_sidecar(path + ".hdr");
    if (f.width != w || f.height != h)
        throw DimensionMismatch("PGM and sidecar dimensions disagree: " + path);
    Raster r(f);
    for (std::size_t k = 0; k < px.size(); ++k) {
        if (px[k] == 0) continue;  // 0 encodes invalid
        r.values[k] = px[k] / 100.0;
        r.valid[k] = 1;
    }
    return r;
}

inline void write_labels_pgm(const LabelImage& li, const CameraFrame& frame,
                             const std::string& path, bool binary = true) {
    std::vector<std::uint16_t> px(li.labels.size(), 0);
    for (std::size_t k = 0; k < li.labels.size(); ++k) {
        px[k] = static_cast<std::uint16_t>(std::clamp(li.labels[k], 0, 65535));
    }
    pgm_detail::write_pgm16(px, li.width, li.height, path, binary);
    pgm_detail::write_sidecar(frame, path + ".hdr");
}

inline LabelImage read_labels_pgm(const std::string& path, CameraFrame* frame = nullptr) {
    int w = 0, h = 0;
    auto px = pgm_detail::read_pgm16(path, w, h);
    if (frame) *frame = pgm_detail::read_sidecar(path + ".hdr");
    LabelImage li(w, h);
    for (std::size_t k = 0; k < px.size(); ++k) li.labels[k] = px[k];
    return li;
}

/// In-memory equivalent of a PGM write/read round trip: quantizes to
/// centimeters and drops pixels that would encode as 0. Pipeline stages pass
/// rasters through this so in-process runs match file-based stage runs exactly.
inline Raster pgm_roundtrip(const Raster& r) {
    Raster out(r.frame);
    for (std::size_t k = 0; k < r.values.size(); ++k) {
        if (!r.valid[k]) continue;
        double q = std::clamp(std::round(r.values[k] * 100.0), 0.0, 65535.0);
        if (q == 0.0) continue;
        out.values[k] = q / 100.0;
        out.valid[k] = 1;
    }
    return out;
}

}  // namespace streetmorph

#endif
