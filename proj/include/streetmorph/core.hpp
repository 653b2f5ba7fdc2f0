#ifndef STREETMORPH_CORE_HPP
#define STREETMORPH_CORE_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace streetmorph {

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

enum class LabelKind : std::uint8_t { Unassigned, Facade, Ground, Artifact };

/// Per-point segment label. component_id is nonzero exactly when kind is Artifact.
struct SegmentLabel {
    LabelKind kind = LabelKind::Unassigned;
    std::uint32_t component_id = 0;

    static SegmentLabel unassigned() { return {LabelKind::Unassigned, 0}; }
    static SegmentLabel facade() { return {LabelKind::Facade, 0}; }
    static SegmentLabel ground() { return {LabelKind::Ground, 0}; }
    static SegmentLabel artifact(std::uint32_t id) { return {LabelKind::Artifact, id}; }

    bool operator==(const SegmentLabel&) const = default;
};

inline const char* to_string(LabelKind k) {
    switch (k) {
        case LabelKind::Unassigned: return "Unassigned";
        case LabelKind::Facade: return "Facade";
        case LabelKind::Ground: return "Ground";
        case LabelKind::Artifact: return "Artifact";
    }
    return "Unassigned";
}

struct PointCloud {
    std::vector<Point3> points;
    std::optional<std::vector<SegmentLabel>> labels;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

/// Dense 2D grid of region identifiers; 0 means background / unlabeled.
struct LabelImage {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> labels;

    LabelImage() = default;
    LabelImage(int w, int h) : width(w), height(h), labels(static_cast<std::size_t>(w) * h, 0) {}

    std::int32_t& at(int i, int j) { return labels[static_cast<std::size_t>(j) * width + i]; }
    std::int32_t at(int i, int j) const { return labels[static_cast<std::size_t>(j) * width + i]; }
    bool in_bounds(int i, int j) const { return i >= 0 && i < width && j >= 0 && j < height; }
};

class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public Error {
  public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

class DimensionMismatch : public Error {
  public:
    explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

}  // namespace streetmorph

#endif
