#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "fovstream/frame.hpp"
#include "fovstream/geometry.hpp"

namespace fovstream {

// Foveated spatial compression parameters. size is the fraction of the
// frame kept at full pixel density around the gaze point; comp is the
// peripheral compression ratio.
struct FscParams {
    double x_size = 0.45;
    double y_size = 0.4;
    double x_comp = 4.0;
    double y_comp = 5.0;

    void validate() const {
        if (!(x_size > 0.0 && x_size <= 1.0 && y_size > 0.0 && y_size <= 1.0))
            throw std::invalid_argument("FscParams: size must be in (0, 1]");
        if (!(x_comp >= 1.0 && y_comp >= 1.0))
            throw std::invalid_argument("FscParams: comp must be >= 1");
    }
};

inline double fsc_raw_extent(double full, double size, double comp) {
    return full * (size + (1.0 - size) / comp);
}

// FSC frame dimensions: the raw extents rounded to the nearest multiple
// of 32 for codec macroblock alignment.
inline std::pair<int, int> fsc_dimensions(int game_w, int game_h, const FscParams& p) {
    p.validate();
    if (game_w <= 0 || game_h <= 0)
        throw std::invalid_argument("fsc_dimensions: dimensions must be positive");
    auto align32 = [](double raw) {
        long n = std::lround(raw / 32.0) * 32;
        if (n < 32) throw std::invalid_argument("fsc_dimensions: result below 32 px");
        return static_cast<int>(n);
    };
    return {align32(fsc_raw_extent(game_w, p.x_size, p.x_comp)),
            align32(fsc_raw_extent(game_h, p.y_size, p.y_comp))};
}

// Fovea bounds of the per-axis FSC map, in FSC pixels. Derived from
// continuity of the three piecewise-linear segments: the peripheral
// line comp*i and the fovea line i + shift must meet at bound_left,
// which forces bound_left = (1-size)*gaze/comp. bound_right follows at
// bound_left + size*full.
inline std::pair<double, double> fsc_axis_bounds(double full, double gaze,
                                                 double size, double comp) {
    const double bl = (1.0 - size) * gaze / comp;
    return {bl, bl + size * full};
}

// One axis of the piecewise-linear warp. Positions are pixel indices in
// the frame the map reads from: FSC pixels for the compression map,
// game pixels for the decompression map. The fovea span has slope
// exactly 1; both peripheries have slope comp (or 1/comp inverted).
struct AxisMapSpec {
    double full_extent = 0.0;     // game-frame extent
    double fsc_extent_raw = 0.0;  // unaligned FSC extent
    double gaze = 0.0;            // gaze coordinate, game pixels
    double size = 1.0;
    double comp = 1.0;
    double shift = 0.0;          // fovea offset c_f * full_extent
    double bound_left = 0.0;     // FSC px, fovea start
    double bound_right = 0.0;    // FSC px, fovea end
    double game_bound_left = 0.0;   // game px, fovea start
    double game_bound_right = 0.0;  // game px, fovea end
};

// snap_shift quantizes the fovea offset to whole pixels so the fovea
// path is a pure integer shift (lossless through compress/decompress);
// bounds are re-derived from the snapped shift, preserving continuity.
// With snap_shift = false the spec is the exact closed form.
inline AxisMapSpec make_axis_spec(double full, double gaze, double size, double comp,
                                  bool snap_shift) {
    if (!(gaze >= 0.0 && gaze <= full))
        throw std::invalid_argument("make_axis_spec: gaze outside frame");
    AxisMapSpec s;
    s.full_extent = full;
    s.fsc_extent_raw = fsc_raw_extent(full, size, comp);
    s.gaze = gaze;
    s.size = size;
    s.comp = comp;
    const double exact = (comp - 1.0) / comp * (1.0 - size) * gaze;
    s.shift = snap_shift ? std::round(exact) : exact;
    if (comp > 1.0) {
        s.bound_left = s.shift / (comp - 1.0);
        s.game_bound_left = comp * s.bound_left;
    } else {
        s.bound_left = (1.0 - size) * gaze;
        s.game_bound_left = s.bound_left;
    }
    s.bound_right = s.bound_left + size * full;
    s.game_bound_right = s.game_bound_left + size * full;
    return s;
}

// FSC sampling map: source game coordinate for FSC pixel i. The map is
// piecewise linear; a smoother rate transition would replace the two
// periphery lines here with an ease curve meeting the fovea span at the
// same bounds.
inline double fsc_map_axis(double i, const AxisMapSpec& s) {
    if (i < s.bound_left) return s.comp * i;
    if (i > s.bound_right) return s.comp * i + s.full_extent * (1.0 - s.comp) * s.size;
    return i + s.shift;
}

// FSD sampling map: source FSC coordinate for game pixel i. Exact
// piecewise inverse of fsc_map_axis for the same spec.
inline double fsd_map_axis(double i, const AxisMapSpec& s) {
    if (i < s.game_bound_left) return i / s.comp;
    if (i > s.game_bound_right) return (i - s.full_extent) / s.comp + s.fsc_extent_raw;
    return i - s.shift;
}

// Full warp geometry for one frame: both axis maps plus the stored
// (32-aligned) FSC dimensions.
struct WarpGeometry {
    AxisMapSpec x;
    AxisMapSpec y;
    int game_w = 0;
    int game_h = 0;
    int fsc_w = 0;
    int fsc_h = 0;
};

inline WarpGeometry make_warp_geometry(int game_w, int game_h, const FscParams& p,
                                       const ScreenPoint& gaze, bool snap_shift = true) {
    auto [fw, fh] = fsc_dimensions(game_w, game_h, p);
    WarpGeometry g;
    g.x = make_axis_spec(game_w, gaze.x, p.x_size, p.x_comp, snap_shift);
    g.y = make_axis_spec(game_h, gaze.y, p.y_size, p.y_comp, snap_shift);
    g.game_w = game_w;
    g.game_h = game_h;
    g.fsc_w = fw;
    g.fsc_h = fh;
    return g;
}

// Maps a game-frame point into FSC-frame coordinates (the per-axis FSD
// mapping), used to relocate the gaze for the QP map.
inline FscPoint screen_to_fsc_point(const ScreenPoint& p, const WarpGeometry& g) {
    return {fsd_map_axis(p.x, g.x), fsd_map_axis(p.y, g.y)};
}

enum class Prefilter {
    none,  // bilinear at the mapped coordinate
    box,   // comp-wide box average before sampling, peripheral axes only
};

namespace detail {

// Box-prefiltered sample: midpoint-rule average of ceil(width) bilinear
// taps across [x - width/2, x + width/2] per axis. width = 1 collapses
// to a single bilinear tap.
inline double box_sample(const Frame& f, double x, double y, int p,
                         double wx, double wy) {
    const int nx = std::max(1, static_cast<int>(std::ceil(wx)));
    const int ny = std::max(1, static_cast<int>(std::ceil(wy)));
    double acc = 0.0;
    for (int ky = 0; ky < ny; ++ky) {
        const double sy = y + ((ky + 0.5) / ny - 0.5) * wy;
        for (int kx = 0; kx < nx; ++kx) {
            const double sx = x + ((kx + 0.5) / nx - 0.5) * wx;
            acc += f.sample(sx, sy, p);
        }
    }
    return acc / (nx * ny);
}

}  // namespace detail

// Warps a game frame into its FSC frame: every output pixel is sampled
// from the game frame at the per-axis mapped coordinate.
inline Frame compress_frame(const Frame& frame, const WarpGeometry& g,
                            Prefilter filter = Prefilter::none) {
    if (frame.width != g.game_w || frame.height != g.game_h)
        throw std::invalid_argument("compress_frame: frame does not match geometry");
    Frame out(g.fsc_w, g.fsc_h, frame.planes);
    for (int p = 0; p < frame.planes; ++p) {
        for (int y = 0; y < g.fsc_h; ++y) {
            const double sy = fsc_map_axis(y, g.y);
            const bool fovea_y = y >= g.y.bound_left && y <= g.y.bound_right;
            for (int x = 0; x < g.fsc_w; ++x) {
                const double sx = fsc_map_axis(x, g.x);
                double v;
                if (filter == Prefilter::box) {
                    const bool fovea_x = x >= g.x.bound_left && x <= g.x.bound_right;
                    v = detail::box_sample(frame, sx, sy, p, fovea_x ? 1.0 : g.x.comp,
                                           fovea_y ? 1.0 : g.y.comp);
                } else {
                    v = frame.sample(sx, sy, p);
                }
                out.at(x, y, p) = clamp_pixel(v);
            }
        }
    }
    return out;
}

inline Frame compress_frame(const Frame& frame, const FscParams& p, const ScreenPoint& gaze,
                            Prefilter filter = Prefilter::none) {
    return compress_frame(frame, make_warp_geometry(frame.width, frame.height, p, gaze), filter);
}

// Expands an FSC frame back to game dimensions with the inverse map.
// Fovea pixels are recovered exactly; peripheral pixels interpolate.
inline Frame decompress_frame(const Frame& fsc, const WarpGeometry& g) {
    if (fsc.width != g.fsc_w || fsc.height != g.fsc_h)
        throw std::invalid_argument("decompress_frame: frame does not match geometry");
    Frame out(g.game_w, g.game_h, fsc.planes);
    for (int p = 0; p < fsc.planes; ++p) {
        for (int y = 0; y < g.game_h; ++y) {
            const double sy = fsd_map_axis(y, g.y);
            for (int x = 0; x < g.game_w; ++x) {
                out.at(x, y, p) = clamp_pixel(fsc.sample(fsd_map_axis(x, g.x), sy, p));
            }
        }
    }
    return out;
}

inline Frame decompress_frame(const Frame& fsc, const FscParams& p, const ScreenPoint& gaze,
                              int game_w, int game_h) {
    WarpGeometry g = make_warp_geometry(game_w, game_h, p, gaze);
    return decompress_frame(fsc, g);
}

// Integer game-frame rectangle whose pixels survive the round trip
// bit-exactly: the fovea span clipped to what the 32-aligned FSC frame
// actually stores (alignment may trim the raw extent at the far edge).
struct PixelRect {
    int x0 = 0, y0 = 0, x1 = -1, y1 = -1;  // inclusive; empty if x1 < x0
    bool empty() const { return x1 < x0 || y1 < y0; }
};

inline PixelRect exact_fovea_rect(const WarpGeometry& g) {
    auto axis = [](const AxisMapSpec& s, int fsc_extent, int game_extent) {
        const int lo = static_cast<int>(std::ceil(s.game_bound_left));
        int hi = static_cast<int>(std::floor(s.game_bound_right));
        hi = std::min(hi, fsc_extent - 1 + static_cast<int>(s.shift));
        hi = std::min(hi, game_extent - 1);
        return std::pair<int, int>{lo, hi};
    };
    auto [x0, x1] = axis(g.x, g.fsc_w, g.game_w);
    auto [y0, y1] = axis(g.y, g.fsc_h, g.game_h);
    return {x0, y0, x1, y1};
}

// Side-by-side stereo: each half-frame is warped independently with the
// same per-eye gaze given in half-frame coordinates.
inline Frame compress_frame_stereo(const Frame& frame, const FscParams& p,
                                   const ScreenPoint& eye_gaze,
                                   Prefilter filter = Prefilter::none) {
    if (frame.width % 2 != 0)
        throw std::invalid_argument("compress_frame_stereo: width must be even");
    const int half_w = frame.width / 2;
    WarpGeometry g = make_warp_geometry(half_w, frame.height, p, eye_gaze);
    Frame out(2 * g.fsc_w, g.fsc_h, frame.planes);
    for (int eye = 0; eye < 2; ++eye) {
        Frame half(half_w, frame.height, frame.planes);
        for (int pl = 0; pl < frame.planes; ++pl)
            for (int y = 0; y < frame.height; ++y)
                for (int x = 0; x < half_w; ++x)
                    half.at(x, y, pl) = frame.at(eye * half_w + x, y, pl);
        Frame warped = compress_frame(half, g, filter);
        for (int pl = 0; pl < frame.planes; ++pl)
            for (int y = 0; y < warped.height; ++y)
                for (int x = 0; x < warped.width; ++x)
                    out.at(eye * g.fsc_w + x, y, pl) = warped.at(x, y, pl);
    }
    return out;
}

inline Frame decompress_frame_stereo(const Frame& fsc, const FscParams& p,
                                     const ScreenPoint& eye_gaze, int game_w, int game_h) {
    if (fsc.width % 2 != 0 || game_w % 2 != 0)
        throw std::invalid_argument("decompress_frame_stereo: widths must be even");
    const int half_w = game_w / 2;
    WarpGeometry g = make_warp_geometry(half_w, game_h, p, eye_gaze);
    Frame out(game_w, game_h, fsc.planes);
    for (int eye = 0; eye < 2; ++eye) {
        Frame half(g.fsc_w, g.fsc_h, fsc.planes);
        for (int pl = 0; pl < fsc.planes; ++pl)
            for (int y = 0; y < g.fsc_h; ++y)
                for (int x = 0; x < g.fsc_w; ++x)
                    half.at(x, y, pl) = fsc.at(eye * g.fsc_w + x, y, pl);
        Frame restored = decompress_frame(half, g);
        for (int pl = 0; pl < fsc.planes; ++pl)
            for (int y = 0; y < game_h; ++y)
                for (int x = 0; x < half_w; ++x)
                    out.at(eye * half_w + x, y, pl) = restored.at(x, y, pl);
    }
    return out;
}

}  // namespace fovstream
