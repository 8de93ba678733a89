#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fovstream/geometry.hpp"
#include "fovstream/source.hpp"

using namespace fovstream;

TEST_CASE("symmetric FoV centers the gaze") {
    FovSpec fov{45, 45, 45, 45};
    ScreenPoint p = project_gaze_to_screen({0, 0, 0}, fov, 1000, 800);
    CHECK(p.x == doctest::Approx(500.0).epsilon(1e-12));
    CHECK(p.y == doctest::Approx(400.0).epsilon(1e-12));
}

TEST_CASE("gaze at the FoV edges maps to the frame edges") {
    FovSpec fov{45, 45, 45, 45};
    CHECK(project_gaze_to_screen({45, 0, 0}, fov, 1000, 800).x == doctest::Approx(0.0));
    CHECK(project_gaze_to_screen({-45, 0, 0}, fov, 1000, 800).x == doctest::Approx(1000.0));
    CHECK(project_gaze_to_screen({0, 45, 0}, fov, 1000, 800).y == doctest::Approx(0.0));
    CHECK(project_gaze_to_screen({0, -45, 0}, fov, 1000, 800).y == doctest::Approx(800.0));
}

TEST_CASE("asymmetric FoV projection matches the trig closed form") {
    FovSpec fov{52, 42, 45, 45};
    ScreenPoint p = project_gaze_to_screen({10, 0, 0}, fov, 3712, 2016);
    // Independent recomputation of the projection.
    const double tl = std::tan(52 * std::numbers::pi / 180);
    const double tr = std::tan(42 * std::numbers::pi / 180);
    const double expected = (tl - std::tan(10 * std::numbers::pi / 180)) * 3712 / (tl + tr);
    CHECK(p.x == doctest::Approx(expected).epsilon(1e-12));
    CHECK(p.x == doctest::Approx(1878.9).epsilon(1e-4));
}

TEST_CASE("projection is strictly decreasing in yaw") {
    FovSpec fov{50, 40, 45, 45};
    double prev = 1e300;
    for (double yaw = -39.0; yaw <= 49.0; yaw += 0.7) {
        double x = project_gaze_to_screen({yaw, 0, 0}, fov, 2000, 2000).x;
        CHECK(x < prev);
        prev = x;
    }
}

TEST_CASE("gaze beyond the FoV clamps to the frame") {
    FovSpec fov{45, 45, 45, 45};
    CHECK(project_gaze_to_screen({60, 0, 0}, fov, 1000, 800).x == 0.0);
    CHECK(project_gaze_to_screen({-60, 0, 0}, fov, 1000, 800).x == 1000.0);
}

TEST_CASE("FoV angles of 90 degrees or more are rejected") {
    CHECK_THROWS_AS(project_gaze_to_screen({0, 0, 0}, FovSpec{90, 45, 45, 45}, 100, 100),
                    std::invalid_argument);
    CHECK_THROWS_AS(project_gaze_to_screen({0, 0, 0}, FovSpec{45, 45, 45, 120}, 100, 100),
                    std::invalid_argument);
    CHECK_THROWS_AS(project_gaze_to_screen({0, 0, 0}, FovSpec{}, 0, 100), std::invalid_argument);
}

TEST_CASE("macroblock indexing is 0-based floor division") {
    CHECK(point_to_macroblock({33, 0}) == MacroblockCoord{2, 0});
    CHECK(point_to_macroblock({0, 0}) == MacroblockCoord{0, 0});
    CHECK(point_to_macroblock({16, 16}) == MacroblockCoord{1, 1});
    CHECK(point_to_macroblock({15.999, 31.5}) == MacroblockCoord{0, 1});
}

TEST_CASE("macroblock index is constant across each aligned 16-px block") {
    uint64_t rng = 99;
    for (int trial = 0; trial < 200; ++trial) {
        const int block = static_cast<int>(splitmix64(rng) % 20);
        const double frac = static_cast<double>(splitmix64(rng) % 16000) / 1000.0;
        MacroblockCoord a = point_to_macroblock({block * 16.0, 0});
        MacroblockCoord b = point_to_macroblock({block * 16.0 + frac, 0});
        CHECK(a.mx == b.mx);
    }
}

TEST_CASE("macroblock index clamps at the far frame edge") {
    MacroblockCoord mb = point_to_macroblock({2176, 1056}, 2176, 1056);
    CHECK(mb.mx == 2176 / 16 - 1);
    CHECK(mb.my == 1056 / 16 - 1);
}
