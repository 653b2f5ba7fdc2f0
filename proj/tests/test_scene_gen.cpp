#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "streetmorph/scene_gen.hpp"

using namespace streetmorph;

TEST_CASE("ground-only scene: point budget and labels") {
    SceneSpec spec;
    spec.length = 10;
    spec.width = 5;
    spec.facade_height = 0;
    spec.density = 400;
    GeneratedScene s = generate_scene(spec);
    CHECK(s.cloud.size() >= 19600);
    CHECK(s.cloud.size() <= 20400);
    for (std::size_t k = 0; k < s.cloud.size(); ++k) {
        REQUIRE(s.classes[k] == GtClass::Ground);
        REQUIRE(s.instance[k] == 0);
    }
}

TEST_CASE("same seed twice gives byte-identical clouds") {
    SceneSpec spec;
    spec.length = 20;
    spec.width = 10;
    spec.slope = 0.02;
    spec.seed = 77;
    spec.occlusion = true;
    spec.instances = {SceneSpec::car(5, 3), SceneSpec::lamppost(12, 6),
                      SceneSpec::pedestrian(16, 4)};
    GeneratedScene a = generate_scene(spec);
    GeneratedScene b = generate_scene(spec);
    std::ostringstream oa, ob;
    write_cloud(a.cloud, oa);
    write_cloud(b.cloud, ob);
    CHECK(oa.str() == ob.str());
    CHECK(a.classes == b.classes);
    CHECK(a.instance == b.instance);

    spec.seed = 78;
    GeneratedScene c = generate_scene(spec);
    std::ostringstream oc;
    write_cloud(c.cloud, oc);
    CHECK(oa.str() != oc.str());
}

TEST_CASE("ground truth partitions the cloud and tracks instances") {
    SceneSpec spec;
    spec.length = 30;
    spec.width = 12;
    spec.facade_height = 6;
    spec.instances = {SceneSpec::car(8, 4), SceneSpec::pedestrian(20, 6)};
    GeneratedScene s = generate_scene(spec);
    REQUIRE(s.classes.size() == s.cloud.size());
    REQUIRE(s.instance.size() == s.cloud.size());
    std::size_t car_n = 0, ped_n = 0;
    for (std::size_t k = 0; k < s.cloud.size(); ++k) {
        switch (s.classes[k]) {
            case GtClass::Car:
                REQUIRE(s.instance[k] == 1);
                ++car_n;
                break;
            case GtClass::Pedestrian:
                REQUIRE(s.instance[k] == 2);
                ++ped_n;
                break;
            default:
                REQUIRE(s.instance[k] == 0);
        }
        // car points sit on the box surface
        if (s.classes[k] == GtClass::Car) {
            const Point3& p = s.cloud.points[k];
            CHECK(p.x >= 8 - 2.1 - 1e-9);
            CHECK(p.x <= 8 + 2.1 + 1e-9);
            CHECK(p.z <= 1.5 + 1e-9);
        }
    }
    CHECK(car_n > 1000);
    CHECK(ped_n > 100);
}

TEST_CASE("occlusion: no ground points inside the analytic shadow band") {
    // flat ground, sensor line at y = 10 h = 2.2, car top at 1.5 spanning
    // y in [7.1, 8.9]. A ray grazing the near-top edge (7.1, 1.5) reaches the
    // ground at y = (2.2 * 7.1 - 10 * 1.5) / (2.2 - 1.5), so the shadow band is
    // [0.886, 7.1) within the car's x footprint.
    SceneSpec spec;
    spec.length = 20;
    spec.width = 9.5;
    spec.sensor_y = 10.0;
    spec.sensor_height = 2.2;
    spec.occlusion = true;
    spec.facade_height = 0;
    spec.instances = {SceneSpec::car(10, 8)};
    GeneratedScene s = generate_scene(spec);
    const double y_shadow = (2.2 * 7.1 - 10.0 * 1.5) / (2.2 - 1.5);
    std::size_t in_band = 0, near_outside = 0;
    for (std::size_t k = 0; k < s.cloud.size(); ++k) {
        if (s.classes[k] != GtClass::Ground) continue;
        const Point3& p = s.cloud.points[k];
        if (p.x < 10 - 2.1 || p.x > 10 + 2.1) continue;
        if (p.y > y_shadow + 0.01 && p.y < 7.1) ++in_band;
        if (p.y < y_shadow - 0.01) ++near_outside;
    }
    CHECK(in_band == 0);
    CHECK(near_outside > 100);  // shadow does not spill past its analytic edge
}

TEST_CASE("shadow grows with obstacle height") {
    std::size_t prev = 0;
    for (double hz : {0.5, 1.0, 1.5, 2.0}) {
        SceneSpec spec;
        spec.length = 12;
        spec.width = 9.5;
        spec.sensor_y = 10.0;
        spec.occlusion = true;
        spec.facade_height = 0;
        spec.instances = {SceneSpec::rest(6, 8, 2, 1, hz)};
        SceneGenerator gen(spec);
        std::size_t shadowed = 0;
        for (double x = 5.05; x < 7.0; x += 0.1)
            for (double y = 0.05; y < 7.5; y += 0.1)
                if (gen.occluded(x, y, 0.0)) ++shadowed;
        CHECK(shadowed >= prev);
        prev = shadowed;
    }
    CHECK(prev > 0);
}

TEST_CASE("spec validation rejects bad layouts") {
    SceneSpec out_of_bounds;
    out_of_bounds.length = 10;
    out_of_bounds.width = 5;
    out_of_bounds.instances = {SceneSpec::car(1, 2)};  // box sticks out at x < 0
    CHECK_THROWS_AS(generate_scene(out_of_bounds), Error);

    SceneSpec overlap;
    overlap.length = 20;
    overlap.width = 10;
    overlap.instances = {SceneSpec::car(5, 5), SceneSpec::pedestrian(5.5, 5.2)};
    CHECK_THROWS_AS(generate_scene(overlap), Error);

    SceneSpec bad;
    bad.density = -1;
    CHECK_THROWS_AS(generate_scene(bad), Error);
}

TEST_CASE("scene config parsing") {
    std::istringstream in(
        "# a street\n"
        "length 40\n"
        "width 15\n"
        "slope 0.03\n"
        "facade 12\n"
        "density 350\n"
        "seed 9\n"
        "occlusion 1\n"
        "sensor 7.5 2.0\n"
        "wall 0 18\n"
        "wall 22 40\n"
        "car 10 4\n"
        "lamppost 20 5\n"
        "pedestrian 30 6\n"
        "rest 35 3 1 1 0.8\n");
    SceneSpec spec = parse_scene_spec(in);
    CHECK(spec.length == 40);
    CHECK(spec.width == 15);
    CHECK(spec.slope == 0.03);
    CHECK(spec.facade_height == 12);
    CHECK(spec.density == 350);
    CHECK(spec.seed == 9);
    CHECK(spec.occlusion);
    CHECK(spec.sensor_y == 7.5);
    CHECK(spec.sensor_height == 2.0);
    REQUIRE(spec.wall_segments.size() == 2);
    CHECK(spec.wall_segments[1].first == 22);
    REQUIRE(spec.instances.size() == 4);
    CHECK(spec.instances[0].cls == GtClass::Car);
    CHECK(spec.instances[3].sz == 0.8);

    std::istringstream bad("lenght 40\n");
    CHECK_THROWS_AS(parse_scene_spec(bad), ParseError);
    std::istringstream truncated("car 10\n");
    CHECK_THROWS_AS(parse_scene_spec(truncated), ParseError);
}

TEST_CASE("ground truth CSV format") {
    SceneSpec spec;
    spec.length = 4;
    spec.width = 4;
    spec.density = 10;
    spec.facade_height = 0;
    spec.instances = {SceneSpec::pedestrian(2, 2)};
    GeneratedScene s = generate_scene(spec);
    std::ostringstream out;
    write_ground_truth_csv(s, out);
    std::istringstream back(out.str());
    std::string line;
    REQUIRE(std::getline(back, line));
    CHECK(line == "point_index,class,instance_id");
    std::size_t rows = 0;
    while (std::getline(back, line)) {
        if (rows == 0) CHECK(line.substr(0, 2) == "0,");
        ++rows;
    }
    CHECK(rows == s.cloud.size());
}
