#ifndef STREETMORPH_CLOUD_IO_HPP
#define STREETMORPH_CLOUD_IO_HPP

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "core.hpp"
#include "raster.hpp"

namespace streetmorph {

enum class CloudFormat { XyzAscii, PlyAscii };

namespace io_detail {

inline bool parse_double(std::string_view tok, double& out) {
    const char* b = tok.data();
    const char* e = b + tok.size();
    auto res = std::from_chars(b, e, out);
    return res.ec == std::errc() && res.ptr == e;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> toks;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) toks.push_back(line.substr(i, j - i));
        i = j;
    }
    return toks;
}

inline Point3 parse_xyz_line(const std::vector<std::string_view>& toks, std::size_t lineno) {
    Point3 p;
    if (toks.size() < 3 || !parse_double(toks[0], p.x) || !parse_double(toks[1], p.y) ||
        !parse_double(toks[2], p.z)) {
        throw ParseError("malformed line " + std::to_string(lineno));
    }
    if (!p.finite()) throw ParseError("NonFiniteCoordinate(line " + std::to_string(lineno) + ")");
    return p;
}

}  // namespace io_detail

/// Parses XYZ-ASCII (one `x y z` per line, `#` comments skipped) or ASCII PLY.
/// Reports malformed input with 1-based line numbers; rejects empty files.
inline PointCloud parse_cloud(std::istream& in, CloudFormat format = CloudFormat::XyzAscii) {
    PointCloud cloud;
    std::string line;
    std::size_t lineno = 0;
    if (format == CloudFormat::XyzAscii) {
        while (std::getline(in, line)) {
            ++lineno;
            auto toks = io_detail::split_ws(line);
            if (toks.empty() || toks[0][0] == '#') continue;
            cloud.points.push_back(io_detail::parse_xyz_line(toks, lineno));
        }
    } else {
        // Minimal ASCII PLY: header through end_header, then vertex lines whose
        // first three properties are x y z.
        std::size_t vertex_count = 0;
        bool in_header = false, ascii = false;
        if (!std::getline(in, line) || io_detail::split_ws(line).empty() ||
            io_detail::split_ws(line)[0] != "ply") {
            throw ParseError("not a PLY stream (line 1)");
        }
        lineno = 1;
        in_header = true;
        while (in_header && std::getline(in, line)) {
            ++lineno;
            auto toks = io_detail::split_ws(line);
            if (toks.empty()) continue;
            if (toks[0] == "format") {
                ascii = toks.size() > 1 && toks[1] == "ascii";
            } else if (toks[0] == "element" && toks.size() > 2 && toks[1] == "vertex") {
                double n;
                if (!io_detail::parse_double(toks[2], n) || n < 0)
                    throw ParseError("malformed line " + std::to_string(lineno));
                vertex_count = static_cast<std::size_t>(n);
            } else if (toks[0] == "end_header") {
                in_header = false;
            }
        }
        if (in_header) throw ParseError("PLY header not terminated");
        if (!ascii) throw ParseError("only ASCII PLY is supported");
        for (std::size_t v = 0; v < vertex_count; ++v) {
            if (!std::getline(in, line))
                throw ParseError("truncated PLY at line " + std::to_string(lineno + 1));
            ++lineno;
            cloud.points.push_back(io_detail::parse_xyz_line(io_detail::split_ws(line), lineno));
        }
    }
    if (cloud.empty()) throw ParseError("empty cloud");
    return cloud;
}

inline PointCloud parse_cloud_file(const std::string& path,
                                   CloudFormat format = CloudFormat::XyzAscii) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    return parse_cloud(in, format);
}

namespace io_detail {

inline void append_coord(std::string& out, double v) {
    char buf[64];
    int n = std::snprintf(buf, sizeof buf, "%.6f", v);
    out.append(buf, static_cast<std::size_t>(n));
}

}  // namespace io_detail

/// Emits one `x y z kind componentId` line per point (componentId 0 unless the
/// label is an artifact). Coordinates round-trip through parse_cloud for
/// decimals of at most 6 fractional digits.
inline void write_labeled_cloud(const PointCloud& cloud, std::ostream& out) {
    if (!cloud.labels) throw Error("write_labeled_cloud: cloud has no labels");
    if (cloud.labels->size() != cloud.points.size())
        throw Error("write_labeled_cloud: label count does not match point count");
    std::string buf;
    buf.reserve(1 << 16);
    for (std::size_t k = 0; k < cloud.points.size(); ++k) {
        const auto& p = cloud.points[k];
        const auto& l = (*cloud.labels)[k];
        io_detail::append_coord(buf, p.x);
        buf.push_back(' ');
        io_detail::append_coord(buf, p.y);
        buf.push_back(' ');
        io_detail::append_coord(buf, p.z);
        buf.push_back(' ');
        buf.append(to_string(l.kind));
        buf.push_back(' ');
        buf.append(std::to_string(l.component_id));
        buf.push_back('\n');
        if (buf.size() > (1 << 15)) {
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error("write_labeled_cloud: sink write failure");
}

/// Writes bare XYZ-ASCII (no labels required).
inline void write_cloud(const PointCloud& cloud, std::ostream& out) {
    std::string buf;
    buf.reserve(1 << 16);
    for (const auto& p : cloud.points) {
        io_detail::append_coord(buf, p.x);
        buf.push_back(' ');
        io_detail::append_coord(buf, p.y);
        buf.push_back(' ');
        io_detail::append_coord(buf, p.z);
        buf.push_back('\n');
        if (buf.size() > (1 << 15)) {
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error("write_cloud: sink write failure");
}

/// Reads labeled-cloud lines back (`x y z kind componentId`).
inline PointCloud parse_labeled_cloud(std::istream& in) {
    PointCloud cloud;
    cloud.labels.emplace();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = io_detail::split_ws(line);
        if (toks.empty() || toks[0][0] == '#') continue;
        cloud.points.push_back(io_detail::parse_xyz_line(toks, lineno));
        SegmentLabel l;
        if (toks.size() >= 5) {
            std::string kind(toks[3]);
            double id = 0;
            if (!io_detail::parse_double(toks[4], id))
                throw ParseError("malformed line " + std::to_string(lineno));
            if (kind == "Ground") l = SegmentLabel::ground();
            else if (kind == "Facade") l = SegmentLabel::facade();
            else if (kind == "Artifact") l = SegmentLabel::artifact(static_cast<std::uint32_t>(id));
            else l = SegmentLabel::unassigned();
        }
        cloud.labels->push_back(l);
    }
    if (cloud.empty()) throw ParseError("empty cloud");
    return cloud;
}

/// Transfers raster region labels back onto the 3D points that generated them.
/// Points outside the raster or in unmapped regions become Unassigned.
inline PointCloud back_project(const PointCloud& cloud, const LabelImage& labels,
                               const CameraFrame& frame,
                               const std::function<std::optional<SegmentLabel>(std::int32_t)>& label_map) {
    if (labels.width != frame.width || labels.height != frame.height)
        throw DimensionMismatch("back_project: label image and frame dimensions differ");
    PointCloud out;
    out.points = cloud.points;
    out.labels.emplace(cloud.size(), SegmentLabel::unassigned());
    for (std::size_t k = 0; k < cloud.points.size(); ++k) {
        auto px = frame.pixel_of(cloud.points[k].x, cloud.points[k].y);
        if (!px) continue;
        if (auto l = label_map(labels.at(px->first, px->second))) (*out.labels)[k] = *l;
    }
    return out;
}

}  // namespace streetmorph

#endif
