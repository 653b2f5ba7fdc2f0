#ifndef STREETMORPH_SCENE_GEN_HPP
#define STREETMORPH_SCENE_GEN_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cloud_io.hpp"
#include "core.hpp"

namespace streetmorph {

/// Ground-truth class of a generated point.
enum class GtClass : std::uint8_t { Ground, Facade, Car, Lamppost, Pedestrian, Rest };

inline const char* to_string(GtClass c) {
    switch (c) {
        case GtClass::Ground: return "Ground";
        case GtClass::Facade: return "Facade";
        case GtClass::Car: return "Car";
        case GtClass::Lamppost: return "Lamppost";
        case GtClass::Pedestrian: return "Pedestrian";
        case GtClass::Rest: return "Rest";
    }
    return "Ground";
}

/// Deterministic synthetic street scene: sloped ground strip, optional facade
/// wall segments along y = width, and ground-level obstacles with known
/// footprints. Same seed, same byte-identical cloud.
struct SceneSpec {
    double length = 100.0;          // street extent along x, meters
    double width = 20.0;            // street extent along y, meters
    double slope = 0.0;             // ground grade along x (dz/dx)
    double facade_height = 18.0;    // 0 disables the wall
    double density = 400.0;         // points per square meter (~5 cm spacing)
    double roughness_amplitude = 0.0;
    int roughness_count = 0;        // number of smooth ground bumps
    bool occlusion = false;
    double sensor_y = 10.0;         // sensor line runs along x at this y
    double sensor_height = 2.2;
    std::uint64_t seed = 1;
    std::vector<std::pair<double, double>> wall_segments;  // x intervals; empty = full length

    struct Instance {
        GtClass cls = GtClass::Rest;
        double x = 0.0, y = 0.0;       // footprint center
        double sx = 1.0, sy = 1.0, sz = 1.0;  // box dims (Rest); fixed for the other classes
    };
    std::vector<Instance> instances;

    static Instance car(double x, double y) { return {GtClass::Car, x, y, 4.2, 1.8, 1.5}; }
    static Instance lamppost(double x, double y) { return {GtClass::Lamppost, x, y, 0, 0, 8.0}; }
    static Instance pedestrian(double x, double y) { return {GtClass::Pedestrian, x, y, 0, 0, 1.7}; }
    static Instance rest(double x, double y, double sx, double sy, double sz) {
        return {GtClass::Rest, x, y, sx, sy, sz};
    }
};

constexpr double kLamppostPoleRadius = 0.08;
constexpr double kLamppostHeadRadius = 0.30;
constexpr double kPedestrianRadius = 0.25;

struct GeneratedScene {
    PointCloud cloud;
    std::vector<GtClass> classes;        // one per point
    std::vector<std::int32_t> instance;  // 0 for ground/facade, else 1-based instance index
};

namespace scene_detail {

struct Bump {
    double cx, cy, sigma, amp;
};

inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{seed, stream ^ std::uint64_t{0x9e3779b97f4a7c15}};
    return std::mt19937_64(seq);
}

// footprint half-extents in x and y
inline void footprint(const SceneSpec::Instance& in, double& hx, double& hy) {
    switch (in.cls) {
        case GtClass::Car:
        case GtClass::Rest:
            hx = in.sx / 2;
            hy = in.sy / 2;
            break;
        case GtClass::Lamppost:
            hx = hy = kLamppostHeadRadius;
            break;
        case GtClass::Pedestrian:
            hx = hy = kPedestrianRadius;
            break;
        default:
            hx = hy = 0;
    }
}

inline double instance_height(const SceneSpec::Instance& in) {
    switch (in.cls) {
        case GtClass::Car: return 1.5;
        case GtClass::Lamppost: return 8.0;
        case GtClass::Pedestrian: return 1.7;
        default: return in.sz;
    }
}

/// Does the segment from (y0,z0) to (y1,z1) in a vertical plane pass through
/// the rectangle [ry0,ry1] x [rz0,rz1]?
inline bool segment_hits_rect(double y0, double z0, double y1, double z1, double ry0, double ry1,
                              double rz0, double rz1) {
    if (std::max(y0, y1) < ry0 || std::min(y0, y1) > ry1) return false;
    double ca = std::max(ry0, std::min(y0, y1));
    double cb = std::min(ry1, std::max(y0, y1));
    if (std::abs(y1 - y0) < 1e-12) {
        return z0 <= rz1 || z1 <= rz1;  // vertical drop within the slab
    }
    auto z_at = [&](double y) { return z0 + (z1 - z0) * (y - y0) / (y1 - y0); };
    double za = z_at(ca), zb = z_at(cb);
    double lo = std::min(za, zb), hi = std::max(za, zb);
    return hi >= rz0 && lo <= rz1;
}

}  // namespace scene_detail

class SceneGenerator {
  public:
    explicit SceneGenerator(const SceneSpec& spec) : spec_(spec) { validate(); }

    const std::vector<scene_detail::Bump>& bumps() const { return bumps_; }

    double ground_z(double x, double y) const {
        double z = spec_.slope * x;
        for (const auto& b : bumps_) {
            double d2 = (x - b.cx) * (x - b.cx) + (y - b.cy) * (y - b.cy);
            z += b.amp * std::exp(-d2 / (2 * b.sigma * b.sigma));
        }
        return z;
    }

    /// Is the vertical-plane ray from the sensor line to ground point p blocked
    /// by some instance? Sensor is taken abeam (same x as the point).
    bool occluded(double px, double py, double pz) const {
        using namespace scene_detail;
        for (const auto& in : spec_.instances) {
            double hx, hy;
            footprint(in, hx, hy);
            if (px < in.x - hx || px > in.x + hx) continue;
            double base = spec_.slope * in.x;  // obstacle base height
            double top = base + instance_height(in);
            // chord half-width for round footprints
            double cy0 = in.y - hy, cy1 = in.y + hy;
            if (in.cls == GtClass::Lamppost || in.cls == GtClass::Pedestrian) {
                double r = hy;
                double dx = px - in.x;
                double c = std::sqrt(std::max(0.0, r * r - dx * dx));
                cy0 = in.y - c;
                cy1 = in.y + c;
            }
            if (py >= cy0 && py <= cy1) continue;  // the point is the obstacle's own footprint
            if (segment_hits_rect(spec_.sensor_y, spec_.slope * px + spec_.sensor_height, py, pz,
                                  cy0, cy1, base, top))
                return true;
        }
        return false;
    }

    GeneratedScene generate() const {
        using namespace scene_detail;
        GeneratedScene out;
        auto add = [&](const Point3& p, GtClass c, std::int32_t inst) {
            out.cloud.points.push_back(p);
            out.classes.push_back(c);
            out.instance.push_back(inst);
        };

        {  // ground
            auto rng = stream_rng(spec_.seed, 0);
            std::uniform_real_distribution<double> ux(0.0, spec_.length), uy(0.0, spec_.width);
            auto n = static_cast<std::size_t>(std::llround(spec_.length * spec_.width * spec_.density));
            for (std::size_t k = 0; k < n; ++k) {
                double x = ux(rng), y = uy(rng);
                double z = ground_z(x, y);
                if (inside_instance(x, y)) continue;
                if (spec_.occlusion && occluded(x, y, z)) continue;
                add({x, y, z}, GtClass::Ground, 0);
            }
        }
        if (spec_.facade_height > 0) {  // facade wall at y = width
            auto rng = stream_rng(spec_.seed, 1);
            auto segments = spec_.wall_segments;
            if (segments.empty()) segments.push_back({0.0, spec_.length});
            for (std::size_t s = 0; s < segments.size(); ++s) {
                auto [x0, x1] = segments[s];
                auto n = static_cast<std::size_t>(
                    std::llround((x1 - x0) * spec_.facade_height * spec_.density));
                std::uniform_real_distribution<double> ux(x0, x1), uz(0.0, spec_.facade_height);
                for (std::size_t k = 0; k < n; ++k) {
                    double x = ux(rng);
                    add({x, spec_.width, spec_.slope * x + uz(rng)}, GtClass::Facade, 0);
                }
            }
        }
        for (std::size_t idx = 0; idx < spec_.instances.size(); ++idx) {
            auto rng = stream_rng(spec_.seed, 2 + idx);
            sample_instance(spec_.instances[idx], static_cast<std::int32_t>(idx + 1), rng,
                            [&](const Point3& p, GtClass c, std::int32_t inst) { add(p, c, inst); });
        }
        return out;
    }

  private:
    void validate() {
        using namespace scene_detail;
        if (spec_.length <= 0 || spec_.width <= 0 || spec_.density <= 0)
            throw Error("scene: dimensions and density must be positive");
        for (const auto& in : spec_.instances) {
            double hx, hy;
            footprint(in, hx, hy);
            if (in.x - hx < 0 || in.x + hx > spec_.length || in.y - hy < 0 ||
                in.y + hy > spec_.width)
                throw Error("scene: instance outside street bounds");
        }
        for (std::size_t a = 0; a < spec_.instances.size(); ++a) {
            for (std::size_t b = a + 1; b < spec_.instances.size(); ++b) {
                double hxa, hya, hxb, hyb;
                footprint(spec_.instances[a], hxa, hya);
                footprint(spec_.instances[b], hxb, hyb);
                if (std::abs(spec_.instances[a].x - spec_.instances[b].x) < hxa + hxb &&
                    std::abs(spec_.instances[a].y - spec_.instances[b].y) < hya + hyb)
                    throw Error("scene: overlapping instances");
            }
        }
        if (spec_.roughness_count > 0 && spec_.roughness_amplitude > 0) {
            auto rng = scene_detail::stream_rng(spec_.seed, 0xb0b5);
            std::uniform_real_distribution<double> ux(0.0, spec_.length), uy(0.0, spec_.width);
            std::uniform_real_distribution<double> ua(spec_.roughness_amplitude * 0.5,
                                                      spec_.roughness_amplitude);
            std::uniform_real_distribution<double> us(0.5, 1.5);
            for (int k = 0; k < spec_.roughness_count; ++k)
                bumps_.push_back({ux(rng), uy(rng), us(rng), ua(rng)});
        }
    }

    bool inside_instance(double x, double y) const {
        using namespace scene_detail;
        for (const auto& in : spec_.instances) {
            double hx, hy;
            footprint(in, hx, hy);
            if (x >= in.x - hx && x <= in.x + hx && y >= in.y - hy && y <= in.y + hy) return true;
        }
        return false;
    }

    template <typename Add>
    void sample_instance(const SceneSpec::Instance& in, std::int32_t inst, std::mt19937_64& rng,
                         Add add) const {
        using namespace scene_detail;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double base = ground_z(in.x, in.y);
        auto n_for = [&](double area) {
            return static_cast<std::size_t>(std::llround(area * spec_.density));
        };
        if (in.cls == GtClass::Car || in.cls == GtClass::Rest) {
            double sx = in.cls == GtClass::Car ? 4.2 : in.sx;
            double sy = in.cls == GtClass::Car ? 1.8 : in.sy;
            double sz = in.cls == GtClass::Car ? 1.5 : in.sz;
            for (std::size_t k = 0; k < n_for(sx * sy); ++k) {  // top face
                add({in.x - sx / 2 + u(rng) * sx, in.y - sy / 2 + u(rng) * sy, base + sz}, in.cls,
                    inst);
            }
            // four sides
            for (int side = 0; side < 4; ++side) {
                double len = side < 2 ? sx : sy;
                for (std::size_t k = 0; k < n_for(len * sz); ++k) {
                    double t = u(rng) * len, z = base + u(rng) * sz;
                    Point3 p;
                    if (side == 0) p = {in.x - sx / 2 + t, in.y - sy / 2, z};
                    else if (side == 1) p = {in.x - sx / 2 + t, in.y + sy / 2, z};
                    else if (side == 2) p = {in.x - sx / 2, in.y - sy / 2 + t, z};
                    else p = {in.x + sx / 2, in.y - sy / 2 + t, z};
                    add(p, in.cls, inst);
                }
            }
        } else if (in.cls == GtClass::Pedestrian) {
            const double r = kPedestrianRadius, h = 1.7;
            for (std::size_t k = 0; k < n_for(2 * M_PI * r * h); ++k) {  // lateral surface
                double a = u(rng) * 2 * M_PI;
                add({in.x + r * std::cos(a), in.y + r * std::sin(a), base + u(rng) * h}, in.cls,
                    inst);
            }
            for (std::size_t k = 0; k < n_for(M_PI * r * r); ++k) {  // top disc
                double a = u(rng) * 2 * M_PI, rr = r * std::sqrt(u(rng));
                add({in.x + rr * std::cos(a), in.y + rr * std::sin(a), base + h}, in.cls, inst);
            }
        } else {  // lamppost: thin pole plus head sphere
            const double r = kLamppostPoleRadius, h = 8.0, hr = kLamppostHeadRadius;
            for (std::size_t k = 0; k < n_for(2 * M_PI * r * h); ++k) {
                double a = u(rng) * 2 * M_PI;
                add({in.x + r * std::cos(a), in.y + r * std::sin(a), base + u(rng) * h}, in.cls,
                    inst);
            }
            for (std::size_t k = 0; k < n_for(4 * M_PI * hr * hr); ++k) {
                double a = u(rng) * 2 * M_PI, c = 2 * u(rng) - 1;
                double s = std::sqrt(std::max(0.0, 1 - c * c));
                add({in.x + hr * s * std::cos(a), in.y + hr * s * std::sin(a), base + h + hr * c},
                    in.cls, inst);
            }
        }
    }

    SceneSpec spec_;
    std::vector<scene_detail::Bump> bumps_;
};

inline GeneratedScene generate_scene(const SceneSpec& spec) {
    return SceneGenerator(spec).generate();
}

/// Declarative text config: `key value` lines plus repeated instance stanzas
/// (`car x y`, `lamppost x y`, `pedestrian x y`, `rest x y sx sy sz`,
/// `wall x0 x1`). `#` comments skipped.
inline SceneSpec parse_scene_spec(std::istream& in) {
    SceneSpec spec;
    spec.facade_height = 0.0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key) || key[0] == '#') continue;
        auto need = [&](double& v) {
            if (!(ls >> v)) throw ParseError("scene spec: malformed line " + std::to_string(lineno));
        };
        if (key == "length") need(spec.length);
        else if (key == "width") need(spec.width);
        else if (key == "slope") need(spec.slope);
        else if (key == "facade") need(spec.facade_height);
        else if (key == "density") need(spec.density);
        else if (key == "seed") {
            double s;
            need(s);
            spec.seed = static_cast<std::uint64_t>(s);
        } else if (key == "occlusion") {
            double v;
            need(v);
            spec.occlusion = v != 0;
        } else if (key == "sensor") {
            need(spec.sensor_y);
            need(spec.sensor_height);
        } else if (key == "roughness") {
            double n;
            need(spec.roughness_amplitude);
            need(n);
            spec.roughness_count = static_cast<int>(n);
        } else if (key == "wall") {
            double a, b;
            need(a);
            need(b);
            spec.wall_segments.push_back({a, b});
        } else if (key == "car" || key == "lamppost" || key == "pedestrian" || key == "rest") {
            double x, y;
            need(x);
            need(y);
            if (key == "car") spec.instances.push_back(SceneSpec::car(x, y));
            else if (key == "lamppost") spec.instances.push_back(SceneSpec::lamppost(x, y));
            else if (key == "pedestrian") spec.instances.push_back(SceneSpec::pedestrian(x, y));
            else {
                double sx, sy, sz;
                need(sx);
                need(sy);
                need(sz);
                spec.instances.push_back(SceneSpec::rest(x, y, sx, sy, sz));
            }
        } else {
            throw ParseError("scene spec: unknown key '" + key + "' at line " +
                             std::to_string(lineno));
        }
    }
    return spec;
}

inline void write_ground_truth_csv(const GeneratedScene& scene, std::ostream& out) {
    out << "point_index,class,instance_id\n";
    for (std::size_t k = 0; k < scene.cloud.size(); ++k)
        out << k << ',' << to_string(scene.classes[k]) << ',' << scene.instance[k] << '\n';
}

}  // namespace streetmorph

#endif
