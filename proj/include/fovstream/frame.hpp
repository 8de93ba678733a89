#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fovstream {

// Raised on malformed or unreadable image files / streams.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Planar 8-bit image buffer. Plane p occupies data[p*w*h .. (p+1)*w*h).
// planes == 1 is luma-only, planes == 3 is RGB.
struct Frame {
    int width = 0;
    int height = 0;
    int planes = 1;
    std::vector<uint8_t> data;

    Frame() = default;
    Frame(int w, int h, int p, uint8_t fill = 0)
        : width(w), height(h), planes(p),
          data(static_cast<size_t>(w) * h * p, fill) {
        if (w <= 0 || h <= 0 || (p != 1 && p != 3))
            throw std::invalid_argument("Frame: bad dimensions");
    }

    size_t plane_size() const { return static_cast<size_t>(width) * height; }

    uint8_t at(int x, int y, int p = 0) const {
        return data[static_cast<size_t>(p) * plane_size() +
                    static_cast<size_t>(y) * width + x];
    }
    uint8_t& at(int x, int y, int p = 0) {
        return data[static_cast<size_t>(p) * plane_size() +
                    static_cast<size_t>(y) * width + x];
    }

    // Bilinear sample at a fractional position, clamped to the frame.
    double sample(double x, double y, int p = 0) const {
        x = std::clamp(x, 0.0, static_cast<double>(width - 1));
        y = std::clamp(y, 0.0, static_cast<double>(height - 1));
        int x0 = static_cast<int>(x);
        int y0 = static_cast<int>(y);
        int x1 = std::min(x0 + 1, width - 1);
        int y1 = std::min(y0 + 1, height - 1);
        double fx = x - x0;
        double fy = y - y0;
        double top = (1.0 - fx) * at(x0, y0, p) + fx * at(x1, y0, p);
        double bot = (1.0 - fx) * at(x0, y1, p) + fx * at(x1, y1, p);
        return (1.0 - fy) * top + fy * bot;
    }

    bool same_shape(const Frame& o) const {
        return width == o.width && height == o.height && planes == o.planes;
    }

    // BT.601 luma as doubles; identity for single-plane frames.
    std::vector<double> luma() const {
        std::vector<double> out(plane_size());
        if (planes == 1) {
            for (size_t i = 0; i < out.size(); ++i) out[i] = data[i];
        } else {
            const size_t n = plane_size();
            for (size_t i = 0; i < n; ++i)
                out[i] = 0.299 * data[i] + 0.587 * data[n + i] + 0.114 * data[2 * n + i];
        }
        return out;
    }
};

inline uint8_t clamp_pixel(double v) {
    return static_cast<uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

namespace detail {

inline int read_pnm_token(std::istream& in) {
    // Skips whitespace and '#' comments between header fields.
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
        } else if (!std::isspace(c)) {
            int value = 0;
            bool any = false;
            while (c != EOF && std::isdigit(c)) {
                value = value * 10 + (c - '0');
                any = true;
                c = in.get();
            }
            if (!any) throw IoError("pnm: malformed header");
            return value;
        }
    }
    throw IoError("pnm: truncated header");
}

}  // namespace detail

// Reads a binary PGM (P5) or PPM (P6) file with maxval 255.
inline Frame load_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    char p, kind;
    in.get(p);
    in.get(kind);
    if (p != 'P' || (kind != '5' && kind != '6'))
        throw IoError(path + ": not a binary PGM/PPM file");
    int w = detail::read_pnm_token(in);
    int h = detail::read_pnm_token(in);
    int maxval = detail::read_pnm_token(in);
    if (maxval != 255) throw IoError(path + ": only maxval 255 supported");
    if (w <= 0 || h <= 0) throw IoError(path + ": bad dimensions");
    const int planes = (kind == '6') ? 3 : 1;
    Frame f(w, h, planes);
    std::vector<uint8_t> raw(static_cast<size_t>(w) * h * planes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
        throw IoError(path + ": truncated pixel data");
    if (planes == 1) {
        f.data = std::move(raw);
    } else {
        // PPM interleaves RGB; we store planar.
        const size_t n = f.plane_size();
        for (size_t i = 0; i < n; ++i) {
            f.data[i] = raw[3 * i];
            f.data[n + i] = raw[3 * i + 1];
            f.data[2 * n + i] = raw[3 * i + 2];
        }
    }
    return f;
}

inline void save_pnm(const Frame& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    char header[64];
    std::snprintf(header, sizeof(header), "P%c\n%d %d\n255\n",
                  f.planes == 3 ? '6' : '5', f.width, f.height);
    out << header;
    if (f.planes == 1) {
        out.write(reinterpret_cast<const char*>(f.data.data()),
                  static_cast<std::streamsize>(f.data.size()));
    } else {
        const size_t n = f.plane_size();
        std::vector<uint8_t> raw(n * 3);
        for (size_t i = 0; i < n; ++i) {
            raw[3 * i] = f.data[i];
            raw[3 * i + 1] = f.data[n + i];
            raw[3 * i + 2] = f.data[2 * n + i];
        }
        out.write(reinterpret_cast<const char*>(raw.data()),
                  static_cast<std::streamsize>(raw.size()));
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace fovstream
