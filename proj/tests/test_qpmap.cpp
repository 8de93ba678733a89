#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fovstream/codec.hpp"
#include "fovstream/qpmap.hpp"
#include "fovstream/source.hpp"

using namespace fovstream;

TEST_CASE("offset is zero at the gaze block") {
    CHECK(quantization_offset(0, 6, FoveationConfig{}) == 0.0);
    CHECK(quantization_offset(0, 120, FoveationConfig{}) == 0.0);
}

TEST_CASE("half maximum at d = c * sqrt(2 ln 2)") {
    const FoveationConfig cfg;
    for (double c : {6.0, 17.5, 120.0}) {
        const double d = c * std::sqrt(2.0 * std::log(2.0));
        CHECK(quantization_offset(d, c, cfg) ==
              doctest::Approx(cfg.qo_max() / 2.0).epsilon(1e-12));
    }
    CHECK(quantization_offset(6 * std::sqrt(2 * std::log(2.0)), 6, cfg) ==
          doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("narrow controller saturates quickly") {
    // QO(30, c=6) = 40*(1 - exp(-12.5))
    const double expected = 40.0 * (1.0 - std::exp(-12.5));
    CHECK(quantization_offset(30, 6, FoveationConfig{}) == doctest::Approx(expected));
    CHECK(quantization_offset(30, 6, FoveationConfig{}) == doctest::Approx(39.99985).epsilon(1e-6));
}

TEST_CASE("invalid controller and config are rejected") {
    CHECK_THROWS_AS(quantization_offset(1, 0, FoveationConfig{}), std::invalid_argument);
    CHECK_THROWS_AS(quantization_offset(1, -3, FoveationConfig{}), std::invalid_argument);
    FoveationConfig bad;
    bad.qp_const = 52;
    CHECK_THROWS_AS(quantization_offset(1, 6, bad), std::invalid_argument);
    CHECK_THROWS_AS(build_qp_map(256, 256, {100, 0}, 6, FoveationConfig{}),
                    std::invalid_argument);
}

TEST_CASE("gaze macroblock keeps qp_const") {
    QpMap m = build_qp_map(2176, 1056, {68, 33}, 6, FoveationConfig{});
    CHECK(m.at(68, 33) == 11);
    CHECK(m.min_qp() == 11);
    CHECK(m.max_qp() <= 51);
}

TEST_CASE("wide controller keeps the whole grid near qp_const") {
    // QO at 48 blocks with C=120 is 40*(1-exp(-48^2/28800)) ~ 3.08.
    QpMap m = build_qp_map(2176, 1056, {68, 33}, 120, FoveationConfig{});
    for (int j = 0; j < m.height_mb; ++j)
        for (int i = 0; i < m.width_mb; ++i)
            if (std::hypot(i - 68.0, j - 33.0) <= 48.0) CHECK(m.at(i, j) <= 15);
}

TEST_CASE("c=6 keeps the 5-block fovea at or below QP 23") {
    QpMap m = build_qp_map(2176, 1056, {68, 33}, 6, FoveationConfig{});
    for (int j = 0; j < m.height_mb; ++j)
        for (int i = 0; i < m.width_mb; ++i)
            if (std::hypot(i - 68.0, j - 33.0) <= 5.0) CHECK(m.at(i, j) <= 23);
    // Closed-form threshold: QO reaches 12 at d = 6*sqrt(2 ln(40/28)).
    const double d_thresh = 6.0 * std::sqrt(2.0 * std::log(40.0 / 28.0));
    CHECK(d_thresh == doctest::Approx(5.07).epsilon(1e-2));
}

TEST_CASE("QP rises monotonically with distance from the gaze") {
    QpMap m = build_qp_map(320, 320, {10, 10}, 8, FoveationConfig{});
    std::vector<std::pair<double, int>> cells;
    for (int j = 0; j < m.height_mb; ++j)
        for (int i = 0; i < m.width_mb; ++i)
            cells.emplace_back(std::hypot(i - 10.0, j - 10.0), m.at(i, j));
    for (size_t a = 0; a < cells.size(); ++a)
        for (size_t b = 0; b < cells.size(); ++b)
            if (cells[a].first <= cells[b].first) CHECK(cells[a].second <= cells[b].second);
}

TEST_CASE("raising C never raises any block's QP") {
    uint64_t s = 3;
    for (int trial = 0; trial < 20; ++trial) {
        const double c1 = 6.0 + static_cast<double>(splitmix64(s) % 500) / 10.0;
        const double c2 = c1 + 1.0 + static_cast<double>(splitmix64(s) % 500) / 10.0;
        QpMap m1 = build_qp_map(512, 256, {5, 5}, c1, FoveationConfig{});
        QpMap m2 = build_qp_map(512, 256, {5, 5}, c2, FoveationConfig{});
        for (size_t i = 0; i < m1.qp.size(); ++i) CHECK(m1.qp[i] >= m2.qp[i]);
    }
}

TEST_CASE("map image: uniform map, darkest gaze, C ordering") {
    QpMap uni = uniform_qp_map(256, 256, 30);
    Frame img = qp_map_to_image(uni);
    for (uint8_t v : img.data) CHECK(v == img.data[0]);

    QpMap m = build_qp_map(512, 512, {16, 16}, 10, FoveationConfig{});
    Frame fm = qp_map_to_image(m);
    const uint8_t at_gaze = fm.at(16, 16);
    for (uint8_t v : fm.data) CHECK(v >= at_gaze);

    QpMap narrow = build_qp_map(512, 512, {16, 16}, 8, FoveationConfig{});
    QpMap wide = build_qp_map(512, 512, {16, 16}, 40, FoveationConfig{});
    Frame fn = qp_map_to_image(narrow);
    Frame fw = qp_map_to_image(wide);
    for (size_t i = 0; i < fn.data.size(); ++i) CHECK(fn.data[i] >= fw.data[i]);
}

TEST_CASE("csv dump has one row per macroblock row") {
    QpMap m = build_qp_map(160, 96, {2, 2}, 6, FoveationConfig{});
    const std::string csv = qp_map_to_csv(m);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == m.height_mb);
    CHECK(std::count(csv.begin(), csv.end(), ',') ==
          static_cast<long>(m.height_mb) * (m.width_mb - 1));
}

TEST_CASE("degrees map to macroblocks through the FoV span") {
    // 2176 px across 104 degrees: ~20.9 px/deg, ~6.5 MB for 5 deg.
    const double mb = degrees_to_macroblocks(5.0, 104.0, 2176);
    CHECK(mb == doctest::Approx(5.0 * 2176.0 / 104.0 / 16.0));
    CHECK_THROWS_AS(degrees_to_macroblocks(5.0, 0.0, 2176), std::invalid_argument);
}

TEST_CASE("smaller C never grows the encoded frame (statistical)") {
    uint64_t seed = 70;
    int ok = 0, total = 0;
    for (int trial = 0; trial < 20; ++trial) {
        SyntheticSource src(SourceKind::noise, seed + trial, 160, 128, 1);
        Frame f = src.frame(trial);
        size_t prev = 0;
        bool first = true;
        for (double c : {120.0, 30.0, 6.0}) {
            QpMap m = build_qp_map(f.width, f.height, {5, 4}, c, FoveationConfig{});
            const size_t sz = encode_frame(f, m).size_bytes();
            if (!first) {
                ++total;
                if (sz <= prev) ++ok;
            }
            prev = sz;
            first = false;
        }
    }
    CHECK(ok >= total * 95 / 100);
}
