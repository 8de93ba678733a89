#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fovstream/frame.hpp"
#include "fovstream/geometry.hpp"

namespace fovstream {

inline constexpr double kPsnrCapDb = 99.0;

// Gaze-centered Gaussian pixel weights, evaluated lazily: 1 at the gaze
// point, radially non-increasing, never zero.
class WeightMap {
public:
    static WeightMap gaussian(int width, int height, const ScreenPoint& gaze, double sigma_px) {
        if (!(sigma_px > 0.0)) throw std::invalid_argument("WeightMap: sigma must be positive");
        WeightMap w;
        w.width_ = width;
        w.height_ = height;
        w.gaze_ = gaze;
        w.sigma_ = sigma_px;
        return w;
    }

    static WeightMap uniform(int width, int height) {
        WeightMap w;
        w.width_ = width;
        w.height_ = height;
        w.uniform_ = true;
        return w;
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool is_uniform() const { return uniform_; }

    double at(double x, double y) const {
        if (uniform_) return 1.0;
        const double dx = x - gaze_.x;
        const double dy = y - gaze_.y;
        return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma_ * sigma_));
    }

private:
    int width_ = 0;
    int height_ = 0;
    ScreenPoint gaze_{};
    double sigma_ = 1.0;
    bool uniform_ = false;
};

inline WeightMap foveation_weights(int width, int height, const ScreenPoint& gaze,
                                   double sigma_px) {
    return WeightMap::gaussian(width, height, gaze, sigma_px);
}

// Default weight falloff: sigma covering half of a 5-degree foveal span,
// using the linear pixels-per-degree of the horizontal FoV.
inline double default_sigma_px(double fov_left_deg, double fov_right_deg, int frame_width) {
    const double span = fov_left_deg + fov_right_deg;
    if (!(span > 0.0)) throw std::invalid_argument("default_sigma_px: bad FoV span");
    return 0.5 * 5.0 * frame_width / span;
}

namespace metrics_detail {

inline void require_same_shape(const Frame& a, const Frame& b, const WeightMap& w) {
    if (!a.same_shape(b)) throw std::invalid_argument("metrics: frame dimensions differ");
    if (w.width() != a.width || w.height() != a.height)
        throw std::invalid_argument("metrics: weight map dimensions differ");
}

}  // namespace metrics_detail

// Eye-weighted PSNR over luma: 10*log10(255^2 / weighted MSE), capped
// at 99 dB (identical frames report the cap).
inline double ewpsnr(const Frame& ref, const Frame& test, const WeightMap& w) {
    metrics_detail::require_same_shape(ref, test, w);
    const auto lr = ref.luma();
    const auto lt = test.luma();
    double num = 0.0, den = 0.0;
    for (int y = 0; y < ref.height; ++y) {
        for (int x = 0; x < ref.width; ++x) {
            const double wv = w.at(x, y);
            const double d = lr[static_cast<size_t>(y) * ref.width + x] -
                             lt[static_cast<size_t>(y) * ref.width + x];
            num += wv * d * d;
            den += wv;
        }
    }
    const double wmse = num / den;
    if (wmse <= 0.0) return kPsnrCapDb;
    return std::min(kPsnrCapDb, 10.0 * std::log10(255.0 * 255.0 / wmse));
}

inline double psnr(const Frame& ref, const Frame& test) {
    return ewpsnr(ref, test, WeightMap::uniform(ref.width, ref.height));
}

// Eye-weighted SSIM over luma: the standard SSIM index map on sliding
// 8x8 windows (C1 = (0.01*255)^2, C2 = (0.03*255)^2), averaged with
// weights sampled at window centers.
inline double ewssim(const Frame& ref, const Frame& test, const WeightMap& w) {
    metrics_detail::require_same_shape(ref, test, w);
    constexpr int kWin = 8;
    if (ref.width < kWin || ref.height < kWin)
        throw std::invalid_argument("ewssim: frames smaller than the 8x8 window");
    const auto lr = ref.luma();
    const auto lt = test.luma();
    const int W = ref.width, H = ref.height;

    // Summed-area tables over x, y, x^2, y^2, xy.
    const size_t stride = static_cast<size_t>(W) + 1;
    std::vector<double> sx(stride * (H + 1), 0.0), sy(sx), sxx(sx), syy(sx), sxy(sx);
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            const size_t i = static_cast<size_t>(y) * W + x;
            const size_t o = static_cast<size_t>(y + 1) * stride + (x + 1);
            const size_t up = o - stride, left = o - 1, diag = up - 1;
            sx[o] = lr[i] + sx[up] + sx[left] - sx[diag];
            sy[o] = lt[i] + sy[up] + sy[left] - sy[diag];
            sxx[o] = lr[i] * lr[i] + sxx[up] + sxx[left] - sxx[diag];
            syy[o] = lt[i] * lt[i] + syy[up] + syy[left] - syy[diag];
            sxy[o] = lr[i] * lt[i] + sxy[up] + sxy[left] - sxy[diag];
        }
    }
    auto box = [&](const std::vector<double>& t, int x0, int y0) {
        const size_t a = static_cast<size_t>(y0) * stride + x0;
        const size_t b = static_cast<size_t>(y0 + kWin) * stride + x0 + kWin;
        return t[b] - t[static_cast<size_t>(y0) * stride + x0 + kWin] -
               t[static_cast<size_t>(y0 + kWin) * stride + x0] + t[a];
    };

    constexpr double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    constexpr double c2 = (0.03 * 255.0) * (0.03 * 255.0);
    constexpr double n = kWin * kWin;
    double acc = 0.0, wacc = 0.0;
    for (int y0 = 0; y0 + kWin <= H; ++y0) {
        for (int x0 = 0; x0 + kWin <= W; ++x0) {
            const double mx = box(sx, x0, y0) / n;
            const double my = box(sy, x0, y0) / n;
            const double vx = box(sxx, x0, y0) / n - mx * mx;
            const double vy = box(syy, x0, y0) / n - my * my;
            const double cov = box(sxy, x0, y0) / n - mx * my;
            const double s = ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
                             ((mx * mx + my * my + c1) * (vx + vy + c2));
            const double wv = w.at(x0 + (kWin - 1) / 2.0, y0 + (kWin - 1) / 2.0);
            acc += wv * s;
            wacc += wv;
        }
    }
    return acc / wacc;
}

inline double ssim(const Frame& ref, const Frame& test) {
    return ewssim(ref, test, WeightMap::uniform(ref.width, ref.height));
}

struct QualityScores {
    double ewpsnr_db = 0.0;
    double ewssim = 0.0;
    double psnr_db = 0.0;
    double ssim = 0.0;
};

// All four scores in one pass, sharing the luma conversion and window
// statistics between the weighted and uniform variants.
inline QualityScores quality_scores(const Frame& ref, const Frame& test, const WeightMap& w) {
    metrics_detail::require_same_shape(ref, test, w);
    constexpr int kWin = 8;
    if (ref.width < kWin || ref.height < kWin)
        throw std::invalid_argument("quality_scores: frames smaller than the 8x8 window");
    const auto lr = ref.luma();
    const auto lt = test.luma();
    const int W = ref.width, H = ref.height;

    QualityScores q;
    {
        double wn = 0.0, wd = 0.0, un = 0.0;
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                const size_t i = static_cast<size_t>(y) * W + x;
                const double d = lr[i] - lt[i];
                const double wv = w.at(x, y);
                wn += wv * d * d;
                wd += wv;
                un += d * d;
            }
        }
        auto to_db = [](double mse) {
            return mse <= 0.0 ? kPsnrCapDb
                              : std::min(kPsnrCapDb, 10.0 * std::log10(255.0 * 255.0 / mse));
        };
        q.ewpsnr_db = to_db(wn / wd);
        q.psnr_db = to_db(un / (static_cast<double>(W) * H));
    }

    const size_t stride = static_cast<size_t>(W) + 1;
    std::vector<double> sx(stride * (H + 1), 0.0), sy(sx), sxx(sx), syy(sx), sxy(sx);
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            const size_t i = static_cast<size_t>(y) * W + x;
            const size_t o = static_cast<size_t>(y + 1) * stride + (x + 1);
            const size_t up = o - stride, left = o - 1, diag = up - 1;
            sx[o] = lr[i] + sx[up] + sx[left] - sx[diag];
            sy[o] = lt[i] + sy[up] + sy[left] - sy[diag];
            sxx[o] = lr[i] * lr[i] + sxx[up] + sxx[left] - sxx[diag];
            syy[o] = lt[i] * lt[i] + syy[up] + syy[left] - syy[diag];
            sxy[o] = lr[i] * lt[i] + sxy[up] + sxy[left] - sxy[diag];
        }
    }
    auto box = [&](const std::vector<double>& t, int x0, int y0) {
        const size_t a = static_cast<size_t>(y0) * stride + x0;
        const size_t b = static_cast<size_t>(y0 + kWin) * stride + x0 + kWin;
        return t[b] - t[static_cast<size_t>(y0) * stride + x0 + kWin] -
               t[static_cast<size_t>(y0 + kWin) * stride + x0] + t[a];
    };
    constexpr double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    constexpr double c2 = (0.03 * 255.0) * (0.03 * 255.0);
    constexpr double n = kWin * kWin;
    double acc = 0.0, wacc = 0.0, uacc = 0.0;
    size_t windows = 0;
    for (int y0 = 0; y0 + kWin <= H; ++y0) {
        for (int x0 = 0; x0 + kWin <= W; ++x0) {
            const double mx = box(sx, x0, y0) / n;
            const double my = box(sy, x0, y0) / n;
            const double vx = box(sxx, x0, y0) / n - mx * mx;
            const double vy = box(syy, x0, y0) / n - my * my;
            const double cov = box(sxy, x0, y0) / n - mx * my;
            const double s = ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
                             ((mx * mx + my * my + c1) * (vx + vy + c2));
            const double wv = w.at(x0 + (kWin - 1) / 2.0, y0 + (kWin - 1) / 2.0);
            acc += wv * s;
            wacc += wv;
            uacc += s;
            ++windows;
        }
    }
    q.ewssim = acc / wacc;
    q.ssim = uacc / static_cast<double>(windows);
    return q;
}

}  // namespace fovstream
