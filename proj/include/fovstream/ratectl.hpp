#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

#include "fovstream/netmon.hpp"

namespace fovstream {

// Foveation controller state: c is the Gaussian width of the QP model,
// adapted additively upward and multiplicatively downward within
// [c_min, c_max].
struct ControllerState {
    double c = 6.0;
    double c_min = 6.0;
    double c_max = 120.0;
    double alpha = 0.2;
    double beta = 0.9;
    double beta_timeout = 0.85;

    void validate() const {
        if (!(c_min > 0.0 && c_min <= c_max))
            throw std::invalid_argument("ControllerState: need 0 < c_min <= c_max");
        if (!(c >= c_min && c <= c_max))
            throw std::invalid_argument("ControllerState: c outside [c_min, c_max]");
        if (!(alpha > 0.0))
            throw std::invalid_argument("ControllerState: alpha must be positive");
        if (!(beta_timeout <= beta && beta < 1.0 && beta_timeout > 0.0))
            throw std::invalid_argument("ControllerState: need 0 < beta_timeout <= beta < 1");
    }
};

// One AIMD transition. Underuse grows the foveation region additively,
// overuse shrinks it multiplicatively, a feedback timeout shrinks it
// harder, normal holds.
inline ControllerState step(const ControllerState& s, NetState event) {
    ControllerState next = s;
    switch (event) {
        case NetState::underuse:
            next.c = std::min(s.c_max, s.c + s.alpha);
            break;
        case NetState::normal:
            break;
        case NetState::overuse:
            next.c = std::max(s.c_min, s.beta * s.c);
            break;
        case NetState::timeout:
            next.c = std::max(s.c_min, s.beta_timeout * s.c);
            break;
    }
    return next;
}

// Folds step over an event sequence; returns c after each event.
inline std::vector<double> run_schedule(ControllerState s, std::span<const NetState> events) {
    s.validate();
    std::vector<double> trajectory;
    trajectory.reserve(events.size());
    for (NetState e : events) {
        s = step(s, e);
        trajectory.push_back(s.c);
    }
    return trajectory;
}

}  // namespace fovstream
