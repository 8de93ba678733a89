#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fovstream/ratectl.hpp"
#include "fovstream/source.hpp"

using namespace fovstream;

namespace {

ControllerState at_c(double c) {
    ControllerState s;
    s.c = c;
    return s;
}

}  // namespace

TEST_CASE("single transitions use the published constants") {
    CHECK(step(at_c(100), NetState::underuse).c == doctest::Approx(100.2).epsilon(1e-14));
    CHECK(step(at_c(100), NetState::overuse).c == doctest::Approx(90.0).epsilon(1e-14));
    CHECK(step(at_c(100), NetState::timeout).c == doctest::Approx(85.0).epsilon(1e-14));
    CHECK(step(at_c(100), NetState::normal).c == 100.0);
}

TEST_CASE("transitions clamp at the range ends") {
    CHECK(step(at_c(6), NetState::overuse).c == 6.0);
    CHECK(step(at_c(6), NetState::timeout).c == 6.0);
    CHECK(step(at_c(120), NetState::underuse).c == 120.0);
    CHECK(step(at_c(119.9), NetState::underuse).c == 120.0);
}

TEST_CASE("additive ramp reaches the closed form") {
    std::vector<NetState> events(100, NetState::underuse);
    auto traj = run_schedule(at_c(6), events);
    CHECK(traj.back() == doctest::Approx(26.0).epsilon(1e-13));
    // Saturation: enough steps pin at c_max.
    std::vector<NetState> more(600, NetState::underuse);
    CHECK(run_schedule(at_c(6), more).back() == 120.0);
}

TEST_CASE("multiplicative decay follows the geometric closed form") {
    for (int k : {1, 5, 17, 40}) {
        std::vector<NetState> events(static_cast<size_t>(k), NetState::overuse);
        auto traj = run_schedule(at_c(120), events);
        const double expected = std::max(6.0, 120.0 * std::pow(0.9, k));
        CHECK(traj.back() == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("all-normal schedules hold") {
    std::vector<NetState> events(50, NetState::normal);
    auto traj = run_schedule(at_c(42), events);
    for (double c : traj) CHECK(c == 42.0);
}

TEST_CASE("one decrease after n increases lands strictly below the ramp") {
    for (int n : {1, 10, 50}) {
        std::vector<NetState> events(static_cast<size_t>(n), NetState::underuse);
        events.push_back(NetState::overuse);
        auto traj = run_schedule(at_c(60), events);
        const double ramp_top = 60.0 + n * 0.2;
        CHECK(traj.back() == doctest::Approx(0.9 * ramp_top).epsilon(1e-12));
        CHECK(traj.back() < ramp_top);
    }
}

TEST_CASE("c stays inside the range under random schedules") {
    uint64_t s = 41;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<NetState> events;
        for (int i = 0; i < 300; ++i)
            events.push_back(static_cast<NetState>(splitmix64(s) % 4));
        auto traj = run_schedule(at_c(6 + static_cast<double>(splitmix64(s) % 114)), events);
        for (double c : traj) {
            CHECK(c >= 6.0);
            CHECK(c <= 120.0);
        }
    }
}

TEST_CASE("identical schedules give identical trajectories") {
    uint64_t s = 43;
    std::vector<NetState> events;
    for (int i = 0; i < 200; ++i) events.push_back(static_cast<NetState>(splitmix64(s) % 4));
    CHECK(run_schedule(at_c(50), events) == run_schedule(at_c(50), events));
}

TEST_CASE("invalid controller configurations are rejected") {
    const std::vector<NetState> empty;
    ControllerState s;
    s.c = 200;
    CHECK_THROWS_AS(run_schedule(s, empty), std::invalid_argument);
    ControllerState bad;
    bad.beta_timeout = 0.95;  // above beta
    CHECK_THROWS_AS(run_schedule(bad, empty), std::invalid_argument);
}
