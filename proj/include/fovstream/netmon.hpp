#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fovstream {

struct FrameTiming {
    int64_t frame_id = 0;
    double t_send_ms = 0.0;
    double t_arr_ms = 0.0;
    size_t bytes = 0;
};

enum class NetState { overuse, normal, underuse, timeout };

inline const char* to_string(NetState s) {
    switch (s) {
        case NetState::overuse: return "overuse";
        case NetState::normal: return "normal";
        case NetState::underuse: return "underuse";
        case NetState::timeout: return "timeout";
    }
    return "?";
}

class InsufficientData : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DegenerateWindow : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Per-frame queuing delay: growth of inter-arrival spacing over
// inter-send spacing. Negative while the bottleneck queue drains.
inline double queuing_delay(const FrameTiming& prev, const FrameTiming& cur) {
    if (cur.frame_id != prev.frame_id + 1)
        throw std::invalid_argument("queuing_delay: frames must be consecutive");
    return (cur.t_arr_ms - prev.t_arr_ms) - (cur.t_send_ms - prev.t_send_ms);
}

// FIFO ring of the last 8 (arrival time, queuing delay) samples.
class DelayWindow {
public:
    static constexpr size_t kCapacity = 8;

    void push(double t_ms, double delay_ms) {
        if (count_ > 0 && t_ms < newest().t_ms)
            throw std::invalid_argument("DelayWindow: arrival times must not decrease");
        ring_[(head_ + count_) % kCapacity] = {t_ms, delay_ms};
        if (count_ < kCapacity)
            ++count_;
        else
            head_ = (head_ + 1) % kCapacity;
    }

    size_t size() const { return count_; }

    struct Point {
        double t_ms = 0.0;
        double delay_ms = 0.0;
    };

    Point at(size_t i) const { return ring_[(head_ + i) % kCapacity]; }  // 0 = oldest
    Point newest() const { return at(count_ - 1); }

private:
    std::array<Point, kCapacity> ring_{};
    size_t head_ = 0;
    size_t count_ = 0;
};

// Ordinary least-squares slope of queuing delay against arrival time,
// in milliseconds of delay per second of time.
inline double delay_gradient(const DelayWindow& w) {
    if (w.size() < 2) throw InsufficientData("delay_gradient: need at least 2 points");
    const size_t n = w.size();
    // Anchor x at the oldest sample: conditioning does not depend on
    // absolute timestamps.
    const double t0 = w.at(0).t_ms;
    double mean_t = 0.0, mean_d = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mean_t += (w.at(i).t_ms - t0) / 1000.0;
        mean_d += w.at(i).delay_ms;
    }
    mean_t /= static_cast<double>(n);
    mean_d /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double dt = (w.at(i).t_ms - t0) / 1000.0 - mean_t;
        sxx += dt * dt;
        sxy += dt * (w.at(i).delay_ms - mean_d);
    }
    if (sxx == 0.0) throw DegenerateWindow("delay_gradient: all arrival times equal");
    return sxy / sxx;
}

// Threshold classification; gamma and slope must share units.
inline NetState classify(double slope, double gamma_delay) {
    if (!(gamma_delay > 0.0)) throw std::invalid_argument("classify: gamma must be positive");
    if (slope > gamma_delay) return NetState::overuse;
    if (slope < -gamma_delay) return NetState::underuse;
    return NetState::normal;
}

// Severe-congestion signal: feedback silence longer than gamma_fd.
inline bool feedback_timed_out(double t_now_ms, double t_last_feedback_ms, double gamma_fd_ms) {
    if (t_now_ms < t_last_feedback_ms)
        throw std::invalid_argument("feedback_timed_out: time went backwards");
    return (t_now_ms - t_last_feedback_ms) > gamma_fd_ms;
}

}  // namespace fovstream
