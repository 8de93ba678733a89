#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "fovstream/frame.hpp"

namespace fovstream {

// Deterministic 64-bit mix (splitmix64). Used instead of <random>
// distributions so streams are identical across standard libraries.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline uint64_t hash_coords(uint64_t seed, int64_t x, int64_t y, int64_t k) {
    uint64_t s = seed ^ (0x632be59bd9b4e019ull + static_cast<uint64_t>(x) * 0x9e3779b97f4a7c15ull +
                         static_cast<uint64_t>(y) * 0xc2b2ae3d27d4eb4full +
                         static_cast<uint64_t>(k) * 0x165667b19e3779f9ull);
    return splitmix64(s);
}

inline double lattice_value(uint64_t seed, int64_t x, int64_t y, int64_t plane) {
    return static_cast<double>(hash_coords(seed, x, y, plane) >> 11) * 0x1.0p-53;  // [0, 1)
}

enum class SourceKind { gradient, checkerboard, noise };

inline SourceKind parse_source_kind(const std::string& s) {
    if (s == "gradient") return SourceKind::gradient;
    if (s == "checkerboard") return SourceKind::checkerboard;
    if (s == "noise") return SourceKind::noise;
    throw std::invalid_argument("unknown frame source '" + s + "'");
}

// Stream of frames for the simulator; index-addressed so any frame can
// be regenerated cheaply.
class FrameSource {
public:
    virtual ~FrameSource() = default;
    virtual Frame frame(int index) const = 0;
    virtual int width() const = 0;
    virtual int height() const = 0;
    virtual int planes() const = 0;
};

// Deterministic generators. gradient and checkerboard are static;
// noise is a scrolling two-octave value-noise texture, so consecutive
// frames differ but any frame is reproducible from (seed, index).
class SyntheticSource final : public FrameSource {
public:
    SyntheticSource(SourceKind kind, uint64_t seed, int w, int h, int planes)
        : kind_(kind), seed_(seed), w_(w), h_(h), planes_(planes) {
        if (w <= 0 || h <= 0 || (planes != 1 && planes != 3))
            throw std::invalid_argument("SyntheticSource: bad dimensions");
    }

    Frame frame(int index) const override {
        Frame f(w_, h_, planes_);
        switch (kind_) {
            case SourceKind::gradient:
                for (int p = 0; p < planes_; ++p)
                    for (int y = 0; y < h_; ++y)
                        for (int x = 0; x < w_; ++x)
                            f.at(x, y, p) = static_cast<uint8_t>(
                                ((x + (p + 1) * y) * 255) / (w_ + planes_ * h_));
                break;
            case SourceKind::checkerboard:
                for (int p = 0; p < planes_; ++p)
                    for (int y = 0; y < h_; ++y)
                        for (int x = 0; x < w_; ++x)
                            f.at(x, y, p) = ((x / 8 + y / 8) % 2) ? 255 : 0;
                break;
            case SourceKind::noise:
                fill_noise(f, index);
                break;
        }
        return f;
    }

    int width() const override { return w_; }
    int height() const override { return h_; }
    int planes() const override { return planes_; }

private:
    // Bilinear value noise at the given lattice scale.
    double octave(double x, double y, int p, int scale) const {
        const double gx = x / scale, gy = y / scale;
        const int64_t x0 = static_cast<int64_t>(std::floor(gx));
        const int64_t y0 = static_cast<int64_t>(std::floor(gy));
        const double fx = gx - static_cast<double>(x0);
        const double fy = gy - static_cast<double>(y0);
        const double v00 = lattice_value(seed_, x0, y0, p);
        const double v10 = lattice_value(seed_, x0 + 1, y0, p);
        const double v01 = lattice_value(seed_, x0, y0 + 1, p);
        const double v11 = lattice_value(seed_, x0 + 1, y0 + 1, p);
        return (1 - fy) * ((1 - fx) * v00 + fx * v10) + fy * ((1 - fx) * v01 + fx * v11);
    }

    void fill_noise(Frame& f, int index) const {
        // Scroll 3 px right, 1 px down per frame. Smooth base texture
        // plus per-pixel grain: the grain carries the rate that coarse
        // quantization strips away.
        const int ox = 3 * index;
        const int oy = 1 * index;
        for (int p = 0; p < planes_; ++p) {
            for (int y = 0; y < h_; ++y) {
                for (int x = 0; x < w_; ++x) {
                    const double base = octave(x + ox, y + oy, p, 16);
                    double v = 88.0 + 96.0 * base;
                    // Grain rides on a sparse block gate so fine detail
                    // (and with it the bitrate) concentrates in patches.
                    if (lattice_value(seed_, (x + ox) / 8, (y + oy) / 8, p + 24) < 0.25)
                        v += 7.0 * (lattice_value(seed_, x + ox, y + oy, p + 16) - 0.5);
                    f.at(x, y, p) = clamp_pixel(v);
                }
            }
        }
    }

    SourceKind kind_;
    uint64_t seed_;
    int w_, h_, planes_;
};

// Frames read from numbered PGM/PPM files in a directory, sorted by
// name.
class DirectorySource final : public FrameSource {
public:
    explicit DirectorySource(const std::string& dir) {
        namespace fs = std::filesystem;
        if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
        for (const auto& e : fs::directory_iterator(dir)) {
            const auto ext = e.path().extension().string();
            if (ext == ".pgm" || ext == ".ppm") paths_.push_back(e.path().string());
        }
        std::sort(paths_.begin(), paths_.end());
        if (paths_.empty()) throw IoError("no .pgm/.ppm files in " + dir);
        Frame first = load_pnm(paths_[0]);
        w_ = first.width;
        h_ = first.height;
        planes_ = first.planes;
    }

    Frame frame(int index) const override {
        if (index < 0 || static_cast<size_t>(index) >= paths_.size())
            throw std::out_of_range("DirectorySource: frame index out of range");
        Frame f = load_pnm(paths_[static_cast<size_t>(index)]);
        if (f.width != w_ || f.height != h_ || f.planes != planes_)
            throw IoError(paths_[static_cast<size_t>(index)] + ": dimensions differ from first frame");
        return f;
    }

    size_t count() const { return paths_.size(); }
    int width() const override { return w_; }
    int height() const override { return h_; }
    int planes() const override { return planes_; }

private:
    std::vector<std::string> paths_;
    int w_ = 0, h_ = 0, planes_ = 0;
};

}  // namespace fovstream
