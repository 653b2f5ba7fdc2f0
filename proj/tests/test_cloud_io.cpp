#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>
#include <sstream>

#include "streetmorph/cloud_io.hpp"
#include "streetmorph/raster.hpp"

using namespace streetmorph;

TEST_CASE("parse XYZ-ASCII in file order") {
    std::istringstream in("0 0 0\n1 2 3\n");
    PointCloud c = parse_cloud(in);
    REQUIRE(c.size() == 2);
    CHECK(c.points[0].x == 0.0);
    CHECK(c.points[1].x == 1.0);
    CHECK(c.points[1].y == 2.0);
    CHECK(c.points[1].z == 3.0);
    CHECK_FALSE(c.labels.has_value());
}

TEST_CASE("parse skips comments and blank lines") {
    std::istringstream in("# header\n\n1 1 1\n  # another\n2 2 2\n");
    PointCloud c = parse_cloud(in);
    REQUIRE(c.size() == 2);
}

TEST_CASE("parse rejects non-finite coordinates with the line number") {
    std::istringstream in("0 0 nan\n");
    try {
        parse_cloud(in);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
}

TEST_CASE("parse rejects malformed lines and empty files") {
    std::istringstream bad("1 2\n");
    CHECK_THROWS_AS(parse_cloud(bad), ParseError);
    std::istringstream junk("1 2 x\n");
    CHECK_THROWS_AS(parse_cloud(junk), ParseError);
    std::istringstream empty("");
    CHECK_THROWS_AS(parse_cloud(empty), ParseError);
    std::istringstream comment_only("# nothing\n");
    CHECK_THROWS_AS(parse_cloud(comment_only), ParseError);
}

TEST_CASE("parse ASCII PLY") {
    std::istringstream in(
        "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\n"
        "property float z\nend_header\n0.5 1.5 2.5\n3 4 5\n");
    PointCloud c = parse_cloud(in, CloudFormat::PlyAscii);
    REQUIRE(c.size() == 2);
    CHECK(c.points[0].z == 2.5);
    CHECK(c.points[1].x == 3.0);
}

TEST_CASE("PLY errors: binary format and truncation") {
    std::istringstream bin(
        "ply\nformat binary_little_endian 1.0\nelement vertex 1\nend_header\n");
    CHECK_THROWS_AS(parse_cloud(bin, CloudFormat::PlyAscii), ParseError);
    std::istringstream trunc("ply\nformat ascii 1.0\nelement vertex 3\nend_header\n1 2 3\n");
    CHECK_THROWS_AS(parse_cloud(trunc, CloudFormat::PlyAscii), ParseError);
}

TEST_CASE("labeled output format") {
    PointCloud c;
    c.points = {{1, 2, 0}};
    c.labels = std::vector<SegmentLabel>{SegmentLabel::ground()};
    std::ostringstream out;
    write_labeled_cloud(c, out);
    CHECK(out.str() == "1.000000 2.000000 0.000000 Ground 0\n");
}

TEST_CASE("write requires labels") {
    PointCloud c;
    c.points = {{1, 2, 3}};
    std::ostringstream out;
    CHECK_THROWS_AS(write_labeled_cloud(c, out), Error);
}

TEST_CASE("coordinates round-trip bit-for-bit for 6-decimal inputs") {
    std::mt19937 rng(3);
    std::uniform_int_distribution<long> micro(-200000000L, 200000000L);
    PointCloud c;
    c.labels.emplace();
    for (int k = 0; k < 500; ++k) {
        c.points.push_back({micro(rng) / 1e6, micro(rng) / 1e6, micro(rng) / 1e6});
        c.labels->push_back(k % 2 ? SegmentLabel::facade() : SegmentLabel::artifact(k + 1));
    }
    std::ostringstream out;
    write_labeled_cloud(c, out);
    std::istringstream in(out.str());
    PointCloud back = parse_cloud(in);
    REQUIRE(back.size() == c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
        REQUIRE(back.points[k].x == c.points[k].x);
        REQUIRE(back.points[k].y == c.points[k].y);
        REQUIRE(back.points[k].z == c.points[k].z);
    }
    // labels survive the labeled-cloud parser too
    std::istringstream in2(out.str());
    PointCloud lab = parse_labeled_cloud(in2);
    REQUIRE(lab.labels.has_value());
    for (std::size_t k = 0; k < c.size(); ++k) REQUIRE((*lab.labels)[k] == (*c.labels)[k]);
}

TEST_CASE("distinct component ids survive a write/scan cycle") {
    PointCloud c;
    c.labels.emplace();
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    for (std::uint32_t id = 1; id <= 442; ++id) {
        for (int rep = 0; rep < 3; ++rep) {
            c.points.push_back({u(rng), u(rng), u(rng)});
            c.labels->push_back(SegmentLabel::artifact(id));
        }
    }
    std::ostringstream out;
    write_labeled_cloud(c, out);
    // independent text scan of the last column
    std::istringstream in(out.str());
    std::set<std::string> ids;
    std::string x, y, z, kind, id;
    while (in >> x >> y >> z >> kind >> id) ids.insert(id);
    CHECK(ids.size() == 442);
}

namespace {

LabelImage constant_labels(int w, int h, std::int32_t v) {
    LabelImage li(w, h);
    std::fill(li.labels.begin(), li.labels.end(), v);
    return li;
}

CameraFrame simple_frame(int w, int h) {
    CameraFrame f;
    f.origin_x = 0;
    f.origin_y = 0;
    f.resolution = 10.0;
    f.width = w;
    f.height = h;
    return f;
}

}  // namespace

TEST_CASE("back_project: constant map labels every in-frame point") {
    CameraFrame f = simple_frame(10, 10);
    PointCloud c;
    c.points = {{0.05, 0.05, 0}, {0.55, 0.95, 1}, {5.0, 5.0, 0}};  // last is out of frame
    auto map = [](std::int32_t) -> std::optional<SegmentLabel> {
        return SegmentLabel::ground();
    };
    PointCloud out = back_project(c, constant_labels(10, 10, 1), f, map);
    REQUIRE(out.labels.has_value());
    CHECK((*out.labels)[0] == SegmentLabel::ground());
    CHECK((*out.labels)[1] == SegmentLabel::ground());
    CHECK((*out.labels)[2] == SegmentLabel::unassigned());
}

TEST_CASE("back_project: empty map leaves everything unassigned") {
    CameraFrame f = simple_frame(10, 10);
    PointCloud c;
    c.points = {{0.5, 0.5, 0}};
    auto map = [](std::int32_t) -> std::optional<SegmentLabel> { return std::nullopt; };
    PointCloud out = back_project(c, constant_labels(10, 10, 3), f, map);
    CHECK((*out.labels)[0] == SegmentLabel::unassigned());
}

TEST_CASE("back_project rejects dimension mismatch") {
    CameraFrame f = simple_frame(10, 10);
    PointCloud c;
    c.points = {{0.5, 0.5, 0}};
    auto map = [](std::int32_t) -> std::optional<SegmentLabel> { return std::nullopt; };
    CHECK_THROWS_AS(back_project(c, LabelImage(9, 10), f, map), DimensionMismatch);
}

TEST_CASE("back_project labels one box artifact exactly; same-pixel points agree") {
    // label image marks a box footprint; oracle is a brute-force point-in-box test
    CameraFrame f = simple_frame(40, 40);  // 4 m x 4 m at 10 px/m
    LabelImage li(40, 40);
    const double bx0 = 1.0, bx1 = 2.0, by0 = 1.5, by1 = 2.6;
    for (int j = 0; j < 40; ++j)
        for (int i = 0; i < 40; ++i) {
            double cx = f.center_x(i), cy = f.center_y(j);
            if (cx > bx0 && cx < bx1 && cy > by0 && cy < by1) li.at(i, j) = 7;
        }
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    PointCloud c;
    for (int k = 0; k < 4000; ++k) c.points.push_back({u(rng), u(rng), 0.0});
    auto map = [](std::int32_t r) -> std::optional<SegmentLabel> {
        if (r == 7) return SegmentLabel::artifact(1);
        return SegmentLabel::ground();
    };
    PointCloud out = back_project(c, li, f, map);
    for (std::size_t k = 0; k < c.size(); ++k) {
        auto px = f.pixel_of(c.points[k].x, c.points[k].y);
        REQUIRE(px.has_value());
        bool in_box = li.at(px->first, px->second) == 7;
        REQUIRE((*out.labels)[k] ==
                (in_box ? SegmentLabel::artifact(1) : SegmentLabel::ground()));
    }
    // idempotence for a fixed map and frame
    PointCloud out2 = back_project(out, li, f, map);
    CHECK(*out2.labels == *out.labels);
}

TEST_CASE("parse of a large generated stream preserves order") {
    std::ostringstream big;
    const int n = 200000;
    for (int k = 0; k < n; ++k) big << k << " 0 1\n";
    std::istringstream in(big.str());
    PointCloud c = parse_cloud(in);
    REQUIRE(c.size() == static_cast<std::size_t>(n));
    CHECK(c.points[12345].x == 12345.0);
    CHECK(c.points[n - 1].x == n - 1.0);
}
