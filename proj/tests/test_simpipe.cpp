#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fovstream/simpipe.hpp"

using namespace fovstream;

namespace {

std::vector<TraceRecord> const_trace(double kbps, double until_ms) {
    return {{0.0, kbps}, {until_ms, kbps}};
}

std::vector<TraceRecord> step_trace(double kbps_a, double kbps_b, double step_ms,
                                    double until_ms) {
    return {{0.0, kbps_a}, {step_ms, kbps_b}, {until_ms, kbps_b}};
}

std::vector<GazeAngles> center_gaze() { return {GazeAngles{0.0, 0.0, 0.0}}; }

SimConfig small_config() {
    SimConfig cfg;
    cfg.width = 128;
    cfg.height = 128;
    cfg.planes = 1;
    cfg.frames = 120;
    cfg.source = "noise";
    return cfg;
}

}  // namespace

TEST_CASE("fluid link service times") {
    FluidLink link(const_trace(10000.0, 1e7), 5.0);  // 10 Mb/s
    SUBCASE("zero bytes costs only propagation") {
        CHECK(link.enqueue(0, 40.0) == doctest::Approx(45.0));
    }
    SUBCASE("125000 bytes at 10 Mb/s is 100 ms of service") {
        CHECK(link.enqueue(125000, 40.0) == doctest::Approx(145.0).epsilon(1e-12));
    }
    SUBCASE("back-to-back frames keep FIFO order") {
        uint64_t s = 3;
        double prev = 0.0;
        double t = 0.0;
        for (int i = 0; i < 200; ++i) {
            const auto arr = link.enqueue(splitmix64(s) % 50000, t);
            REQUIRE(arr.has_value());
            CHECK(*arr >= prev);
            prev = *arr;
            t += 5.0;
        }
    }
}

TEST_CASE("fluid link integrates across rate changes") {
    // 1 Mb/s for 100 ms then 10 Mb/s: 50000 bytes = 400 kbit takes
    // 100 ms (100 kbit) plus 30 ms (300 kbit).
    FluidLink link({{0, 1000.0}, {100.0, 10000.0}, {100000.0, 10000.0}}, 0.0);
    CHECK(link.enqueue(50000, 0.0) == doctest::Approx(130.0).epsilon(1e-9));
}

TEST_CASE("an exhausted trace stops the link cleanly") {
    FluidLink link(const_trace(1000.0, 1000.0), 5.0);
    // 1600 kbit at 1 Mb/s needs 1.6 s; the trace covers 1 s.
    CHECK(link.enqueue(200000, 0.0) == std::nullopt);
    CHECK(link.enqueue(10, 0.0) == std::nullopt);  // dead once exhausted
    CHECK_THROWS_AS(FluidLink(const_trace(1000.0, 1e6), 0.0).enqueue(10, -5.0),
                    std::invalid_argument);
}

TEST_CASE("simulation is deterministic") {
    SimConfig cfg = small_config();
    cfg.frames = 40;
    const auto bw = const_trace(20000.0, 1e7);
    const auto gaze = center_gaze();
    const auto src = make_frame_source(cfg);
    SimResult a = run_simulation(cfg, bw, gaze, *src);
    SimResult b = run_simulation(cfg, bw, gaze, *src);
    CHECK(frames_csv(a) == frames_csv(b));
    CHECK(summary_csv(a) == summary_csv(b));
    CHECK(netmon_csv(a) == netmon_csv(b));
    CHECK(controller_csv(a) == controller_csv(b));
}

TEST_CASE("conservation: receiving rate never beats the link") {
    SimConfig cfg = small_config();
    cfg.frames = 80;
    const double kbps = 3000.0;
    const auto src = make_frame_source(cfg);
    SimResult res = run_simulation(cfg, const_trace(kbps, 1e7), center_gaze(), *src);
    REQUIRE(res.records.size() > 10);
    uint64_t total = 0;
    for (size_t i = 0; i < res.records.size(); ++i) {
        total += res.records[i].bytes;
        if (i > 0) {
            const double window_ms =
                res.records[i].t_arr_ms - res.records[i - 1].t_arr_ms;
            CHECK(8.0 * static_cast<double>(res.records[i].bytes) <=
                  kbps * window_ms * (1.0 + 1e-9));
        }
    }
    CHECK(res.summary.bytes_sent == total);
}

TEST_CASE("frozen controller above capacity grows the queue monotonically") {
    SimConfig cfg = small_config();
    cfg.frames = 150;
    cfg.controller_frozen = true;
    cfg.controller.c = 120.0;
    const auto src = make_frame_source(cfg);
    // Capacity far below demand at C_max.
    SimResult res = run_simulation(cfg, const_trace(800.0, 1e7), center_gaze(), *src);
    REQUIRE(static_cast<int>(res.records.size()) == cfg.frames);
    for (size_t i = 20; i < res.records.size(); ++i)
        CHECK(res.records[i].latency_ms > res.records[i - 1].latency_ms);
}

TEST_CASE("active controller keeps long-run delay bounded") {
    SimConfig cfg = small_config();
    cfg.frames = 250;
    cfg.controller.c = 120.0;
    const auto src = make_frame_source(cfg);
    const auto bw = const_trace(1200.0, 1e7);
    SimResult active = run_simulation(cfg, bw, center_gaze(), *src);
    SimConfig frozen_cfg = cfg;
    frozen_cfg.controller_frozen = true;
    SimResult frozen = run_simulation(frozen_cfg, bw, center_gaze(), *src);
    CHECK(active.summary.mean_queue_wait_ms < frozen.summary.mean_queue_wait_ms);
    CHECK(active.summary.final_c < 120.0);
}

TEST_CASE("abundant bandwidth holds the controller steady at Normal") {
    SimConfig cfg = small_config();
    cfg.frames = 150;
    cfg.controller.c = 60.0;
    const auto src = make_frame_source(cfg);
    SimResult res = run_simulation(cfg, const_trace(50000.0, 1e7), center_gaze(), *src);
    CHECK(res.summary.final_c == 60.0);
    const int classified = res.summary.count_overuse + res.summary.count_normal +
                           res.summary.count_underuse + res.summary.count_timeout;
    REQUIRE(classified > 50);
    CHECK(res.summary.count_normal >= classified * 95 / 100);
}

TEST_CASE("congestion then recovery walks C down and back up") {
    SimConfig cfg = small_config();
    cfg.frames = 300;
    cfg.controller.c = 120.0;
    const auto src = make_frame_source(cfg);
    // Squeeze hard for 1.5 s, then plenty of room: the drain after the
    // squeeze must produce underuse events that ramp C back up by alpha
    // per event.
    SimResult res = run_simulation(cfg, step_trace(700.0, 20000.0, 1500.0, 1e7),
                                   center_gaze(), *src);
    double c_low = 1e9;
    for (const SimRecord& r : res.records) c_low = std::min(c_low, r.c);
    CHECK(c_low < 120.0);
    CHECK(res.summary.count_overuse + res.summary.count_timeout > 0);
    CHECK(res.summary.count_underuse > 0);
    CHECK(res.summary.final_c > c_low);
    // Every increase in the trajectory is exactly one alpha step.
    for (const ControllerRow& row : res.controller_rows)
        if (row.event == NetState::underuse && row.c_after > row.c_before)
            CHECK(row.c_after - row.c_before == doctest::Approx(0.2).epsilon(1e-9));
}

TEST_CASE("suppressed feedback triggers timeout decreases") {
    SimConfig cfg = small_config();
    cfg.frames = 200;
    cfg.controller.c = 100.0;
    cfg.feedback_drop_start_ms = 300.0;
    cfg.feedback_drop_end_ms = 1400.0;
    const auto src = make_frame_source(cfg);
    SimResult res = run_simulation(cfg, const_trace(50000.0, 1e7), center_gaze(), *src);
    CHECK(res.summary.count_timeout >= 3);
    double c_low = 1e9;
    for (const SimRecord& r : res.records) c_low = std::min(c_low, r.c);
    // Three beta_timeout hits from 100.
    CHECK(c_low <= 100.0 * 0.85 * 0.85 * 0.85 * (1 + 1e-12));
}

TEST_CASE("a truncated trace ends the run with partial records") {
    SimConfig cfg = small_config();
    cfg.frames = 500;
    const auto src = make_frame_source(cfg);
    SimResult res = run_simulation(cfg, const_trace(2000.0, 900.0), center_gaze(), *src);
    CHECK(res.summary.trace_exhausted);
    CHECK(res.summary.frames_completed < 500);
    CHECK(res.records.size() == static_cast<size_t>(res.summary.frames_completed));
}

TEST_CASE("fve_only sends strictly larger frames than the full pipeline") {
    SimConfig cfg = small_config();
    cfg.frames = 30;
    const auto src = make_frame_source(cfg);
    const auto bw = const_trace(100000.0, 1e7);
    SimResult full = run_simulation(cfg, bw, center_gaze(), *src);
    SimConfig cfg2 = cfg;
    cfg2.mode = SimMode::fve_only;
    SimResult fve = run_simulation(cfg2, bw, center_gaze(), *src);
    CHECK(fve.summary.mean_encoded_bytes > full.summary.mean_encoded_bytes);
}

TEST_CASE("fsc_only encodes with a uniform qp_const map") {
    SimConfig cfg = small_config();
    cfg.frames = 5;
    cfg.mode = SimMode::fsc_only;
    const auto src = make_frame_source(cfg);
    SimResult res = run_simulation(cfg, const_trace(100000.0, 1e7), center_gaze(), *src);
    for (const SimRecord& r : res.records) {
        CHECK(r.qp_min == 11);
        CHECK(r.qp_max == 11);
    }
}

TEST_CASE("synthetic sources are reproducible and ranked by entropy") {
    SyntheticSource a(SourceKind::noise, 5, 64, 64, 1);
    SyntheticSource b(SourceKind::noise, 5, 64, 64, 1);
    CHECK(a.frame(3).data == b.frame(3).data);
    CHECK(a.frame(3).data != a.frame(4).data);  // scrolling content moves

    SyntheticSource grad(SourceKind::gradient, 5, 64, 64, 1);
    CHECK(grad.frame(0).data == grad.frame(9).data);  // static

    const QpMap m = uniform_qp_map(64, 64, 11);
    CHECK(encode_frame(a.frame(0), m).size_bytes() >
          encode_frame(grad.frame(0), m).size_bytes());
}

TEST_CASE("config inconsistencies are rejected before frame 0") {
    SimConfig cfg = small_config();
    cfg.fps = 0.0;
    const auto src = make_frame_source(small_config());
    CHECK_THROWS_AS(run_simulation(cfg, const_trace(1000.0, 1e6), center_gaze(), *src),
                    std::invalid_argument);
    SimConfig tiny = small_config();
    tiny.width = 24;  // FSC extent would fall below 32
    CHECK_THROWS_AS(tiny.validate(), std::invalid_argument);
    SimConfig mismatch = small_config();
    mismatch.width = 256;
    CHECK_THROWS_AS(run_simulation(mismatch, const_trace(1000.0, 1e6), center_gaze(), *src),
                    std::invalid_argument);
}

TEST_CASE("per-frame records carry the sidecar gaze and QP stats") {
    SimConfig cfg = small_config();
    cfg.frames = 10;
    cfg.controller.c = 10.0;
    const auto src = make_frame_source(cfg);
    SimResult res = run_simulation(cfg, const_trace(50000.0, 1e7), center_gaze(), *src);
    for (const SimRecord& r : res.records) {
        CHECK(r.gaze_x == 64);  // centered gaze on a 128-px frame
        CHECK(r.gaze_y == 64);
        CHECK(r.qp_min == 11);
        CHECK(r.qp_max <= 51);
        CHECK(r.qp_mean >= r.qp_min);
        CHECK(r.qp_mean <= r.qp_max);
        CHECK(r.bytes > 0);
    }
    const std::string csv = frames_csv(res);
    CHECK(csv.find("frame_id,t_send_ms") == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);  // header + 10 rows
}
