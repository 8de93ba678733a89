#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "fovstream/frame.hpp"
#include "fovstream/geometry.hpp"

namespace fovstream {

// Quantization configuration. qp_const is the floor applied at the gaze
// macroblock; qp_max is the codec ceiling (51, the H.264 QP maximum).
struct FoveationConfig {
    int qp_const = 11;
    int qp_max = 51;

    int qo_max() const { return qp_max - qp_const; }

    void validate() const {
        if (!(1 <= qp_const && qp_const < qp_max && qp_max <= 51))
            throw std::invalid_argument("FoveationConfig: need 1 <= qp_const < qp_max <= 51");
    }
};

// Gaussian quantization offset at a given macroblock distance from the
// gaze block. c is the foveation controller (the Gaussian's standard
// deviation in macroblock units): larger c widens the high-quality
// region.
inline double quantization_offset(double distance_mb, double c, const FoveationConfig& cfg) {
    cfg.validate();
    if (!(c > 0.0)) throw std::invalid_argument("quantization_offset: c must be positive");
    if (distance_mb < 0.0) throw std::invalid_argument("quantization_offset: negative distance");
    return cfg.qo_max() * (1.0 - std::exp(-(distance_mb * distance_mb) / (2.0 * c * c)));
}

// Per-macroblock quantization parameters for one frame.
struct QpMap {
    int width_mb = 0;
    int height_mb = 0;
    std::vector<int> qp;

    int at(int mx, int my) const { return qp[static_cast<size_t>(my) * width_mb + mx]; }
    int& at(int mx, int my) { return qp[static_cast<size_t>(my) * width_mb + mx]; }

    int min_qp() const { return *std::min_element(qp.begin(), qp.end()); }
    int max_qp() const { return *std::max_element(qp.begin(), qp.end()); }
    double mean_qp() const {
        double s = 0.0;
        for (int v : qp) s += v;
        return s / static_cast<double>(qp.size());
    }
};

inline int mb_count(int pixels) { return (pixels + kMacroblockSize - 1) / kMacroblockSize; }

inline QpMap uniform_qp_map(int frame_w, int frame_h, int qp) {
    QpMap m;
    m.width_mb = mb_count(frame_w);
    m.height_mb = mb_count(frame_h);
    m.qp.assign(static_cast<size_t>(m.width_mb) * m.height_mb, qp);
    return m;
}

// Builds the frame's QP map: qp_const at the gaze macroblock, rising
// with Euclidean macroblock distance along the Gaussian offset curve.
inline QpMap build_qp_map(int frame_w, int frame_h, const MacroblockCoord& gaze_mb,
                          double c, const FoveationConfig& cfg) {
    cfg.validate();
    if (!(c > 0.0)) throw std::invalid_argument("build_qp_map: c must be positive");
    QpMap m;
    m.width_mb = mb_count(frame_w);
    m.height_mb = mb_count(frame_h);
    if (gaze_mb.mx < 0 || gaze_mb.mx >= m.width_mb || gaze_mb.my < 0 || gaze_mb.my >= m.height_mb)
        throw std::invalid_argument("build_qp_map: gaze macroblock outside grid");
    m.qp.resize(static_cast<size_t>(m.width_mb) * m.height_mb);
    for (int j = 0; j < m.height_mb; ++j) {
        for (int i = 0; i < m.width_mb; ++i) {
            const double dx = i - gaze_mb.mx;
            const double dy = j - gaze_mb.my;
            const double qo = quantization_offset(std::hypot(dx, dy), c, cfg);
            m.at(i, j) = cfg.qp_const + static_cast<int>(std::lround(qo));
        }
    }
    return m;
}

// Grayscale visualization, QP scaled over the full codec range [0, 51]
// so images with different controller values stay comparable.
inline Frame qp_map_to_image(const QpMap& m) {
    if (m.qp.empty()) throw std::invalid_argument("qp_map_to_image: empty map");
    Frame f(m.width_mb, m.height_mb, 1);
    for (int y = 0; y < m.height_mb; ++y)
        for (int x = 0; x < m.width_mb; ++x)
            f.at(x, y) = clamp_pixel(m.at(x, y) * 255.0 / 51.0);
    return f;
}

inline std::string qp_map_to_csv(const QpMap& m) {
    std::string out;
    for (int y = 0; y < m.height_mb; ++y) {
        for (int x = 0; x < m.width_mb; ++x) {
            if (x) out += ',';
            out += std::to_string(m.at(x, y));
        }
        out += '\n';
    }
    return out;
}

// Visual degrees to macroblock units, from the horizontal FoV span and
// the FSC frame width. Used to relate the controller range to the
// angular size of the fovea; the QP model itself works in macroblock
// distances.
inline double degrees_to_macroblocks(double degrees, double fov_span_deg, int fsc_width) {
    if (!(fov_span_deg > 0.0)) throw std::invalid_argument("degrees_to_macroblocks: bad FoV span");
    return degrees * (fsc_width / fov_span_deg) / kMacroblockSize;
}

}  // namespace fovstream
