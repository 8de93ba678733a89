#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fovstream/frame.hpp"
#include "fovstream/qpmap.hpp"
#include "fovstream/version.hpp"

namespace fovstream {

class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// H.264 quantization step law, so QP values keep their conventional
// meaning: step doubles every 6 QP.
inline double qp_to_qstep(int qp) { return std::exp2((qp - 4) / 6.0); }

namespace codec_detail {

inline constexpr int kBlock = 8;  // transform sub-block, four per macroblock side

inline const std::array<std::array<double, 8>, 8>& dct_basis() {
    static const auto basis = [] {
        std::array<std::array<double, 8>, 8> b{};
        for (int u = 0; u < 8; ++u) {
            const double a = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
            for (int x = 0; x < 8; ++x)
                b[u][x] = a * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
        }
        return b;
    }();
    return basis;
}

inline const std::array<int, 64>& zigzag_order() {
    static const auto order = [] {
        std::array<int, 64> z{};
        int idx = 0;
        for (int s = 0; s < 15; ++s) {
            if (s % 2 == 0) {  // up-right
                for (int y = std::min(s, 7); y >= std::max(0, s - 7); --y) z[idx++] = y * 8 + (s - y);
            } else {
                for (int x = std::min(s, 7); x >= std::max(0, s - 7); --x) z[idx++] = (s - x) * 8 + x;
            }
        }
        return z;
    }();
    return order;
}

inline void fdct8x8(const double in[8][8], double out[8][8]) {
    const auto& c = dct_basis();
    double tmp[8][8];
    for (int u = 0; u < 8; ++u)
        for (int x = 0; x < 8; ++x) {
            double s = 0.0;
            for (int k = 0; k < 8; ++k) s += c[u][k] * in[x][k];
            tmp[x][u] = s;
        }
    for (int v = 0; v < 8; ++v)
        for (int u = 0; u < 8; ++u) {
            double s = 0.0;
            for (int k = 0; k < 8; ++k) s += c[v][k] * tmp[k][u];
            out[v][u] = s;
        }
}

inline void idct8x8(const double in[8][8], double out[8][8]) {
    const auto& c = dct_basis();
    double tmp[8][8];
    for (int x = 0; x < 8; ++x)
        for (int v = 0; v < 8; ++v) {
            double s = 0.0;
            for (int k = 0; k < 8; ++k) s += c[k][x] * in[v][k];
            tmp[v][x] = s;
        }
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            double s = 0.0;
            for (int k = 0; k < 8; ++k) s += c[k][y] * tmp[k][x];
            out[y][x] = s;
        }
}

inline void put_u32(std::vector<uint8_t>& v, uint32_t x) {
    v.push_back(static_cast<uint8_t>(x));
    v.push_back(static_cast<uint8_t>(x >> 8));
    v.push_back(static_cast<uint8_t>(x >> 16));
    v.push_back(static_cast<uint8_t>(x >> 24));
}

inline void put_u16(std::vector<uint8_t>& v, uint16_t x) {
    v.push_back(static_cast<uint8_t>(x));
    v.push_back(static_cast<uint8_t>(x >> 8));
}

// Zigzag-signed LEB128.
inline void put_varint(std::vector<uint8_t>& v, long n) {
    unsigned long u = (static_cast<unsigned long>(n) << 1) ^ static_cast<unsigned long>(n >> 63);
    do {
        uint8_t b = u & 0x7f;
        u >>= 7;
        if (u) b |= 0x80;
        v.push_back(b);
    } while (u);
}

struct Reader {
    const uint8_t* p;
    const uint8_t* end;

    uint8_t u8() {
        if (p >= end) throw DecodeError("bitstream truncated");
        return *p++;
    }
    uint16_t u16() {
        uint16_t lo = u8();
        return static_cast<uint16_t>(lo | (u8() << 8));
    }
    uint32_t u32() {
        uint32_t x = u16();
        return x | (static_cast<uint32_t>(u16()) << 16);
    }
    long varint() {
        unsigned long u = 0;
        int sh = 0;
        while (true) {
            uint8_t b = u8();
            u |= static_cast<unsigned long>(b & 0x7f) << sh;
            if (!(b & 0x80)) break;
            sh += 7;
            if (sh > 63) throw DecodeError("varint overflow");
        }
        return static_cast<long>(u >> 1) ^ -static_cast<long>(u & 1);
    }
};

inline constexpr uint8_t kEob = 0xff;

}  // namespace codec_detail

// Encoded frame. Self-contained: the decoder needs nothing beyond these
// bytes (per-macroblock QP travels inside the stream, not as a side
// channel).
struct Bitstream {
    std::vector<uint8_t> bytes;

    size_t size_bytes() const { return bytes.size(); }
};

struct BitstreamHeader {
    uint32_t width = 0;
    uint32_t height = 0;
    uint8_t planes = 0;
    uint16_t gaze_x = 0;
    uint16_t gaze_y = 0;
    uint32_t frame_id = 0;
    uint8_t qp_const = 0;
};

inline constexpr size_t kHeaderBytes = 22;

// Container layout (little-endian):
//   0   magic "FVB1"
//   4   u32 width, u32 height
//   12  u8 planes
//   13  u16 gaze_x, u16 gaze_y
//   17  u32 frame_id
//   21  u8 qp_const
//   22  per plane, per macroblock row: u32 row payload length, payload.
// Row payload, per macroblock: u8 qp, then four 8x8 sub-blocks
// (top-left, top-right, bottom-left, bottom-right), each coded as
// varint(DC), (run u8, varint AC)*, 0xff.
inline Bitstream encode_frame(const Frame& frame, const QpMap& map, uint32_t frame_id = 0,
                              int gaze_x = 0, int gaze_y = 0, int qp_const_seed = 11) {
    using namespace codec_detail;
    if (map.width_mb != mb_count(frame.width) || map.height_mb != mb_count(frame.height))
        throw std::invalid_argument("encode_frame: QP map grid does not match frame");
    Bitstream bs;
    bs.bytes.reserve(frame.data.size() / 2 + kHeaderBytes);
    bs.bytes.insert(bs.bytes.end(), kBitstreamMagic, kBitstreamMagic + 4);
    put_u32(bs.bytes, static_cast<uint32_t>(frame.width));
    put_u32(bs.bytes, static_cast<uint32_t>(frame.height));
    bs.bytes.push_back(static_cast<uint8_t>(frame.planes));
    put_u16(bs.bytes, static_cast<uint16_t>(std::clamp(gaze_x, 0, 65535)));
    put_u16(bs.bytes, static_cast<uint16_t>(std::clamp(gaze_y, 0, 65535)));
    put_u32(bs.bytes, frame_id);
    bs.bytes.push_back(static_cast<uint8_t>(qp_const_seed));

    const auto& zz = zigzag_order();
    std::vector<uint8_t> row;
    for (int p = 0; p < frame.planes; ++p) {
        for (int my = 0; my < map.height_mb; ++my) {
            row.clear();
            for (int mx = 0; mx < map.width_mb; ++mx) {
                const int qp = map.at(mx, my);
                if (qp < 1 || qp > 51) throw std::invalid_argument("encode_frame: QP out of range");
                const double qstep = qp_to_qstep(qp);
                row.push_back(static_cast<uint8_t>(qp));
                for (int sub = 0; sub < 4; ++sub) {
                    const int bx = mx * kMacroblockSize + (sub % 2) * kBlock;
                    const int by = my * kMacroblockSize + (sub / 2) * kBlock;
                    double block[8][8];
                    for (int y = 0; y < 8; ++y) {
                        const int sy = std::min(by + y, frame.height - 1);
                        for (int x = 0; x < 8; ++x) {
                            const int sx = std::min(bx + x, frame.width - 1);
                            block[y][x] = frame.at(sx, sy, p) - 128.0;
                        }
                    }
                    double coef[8][8];
                    fdct8x8(block, coef);
                    long q[64];
                    for (int i = 0; i < 64; ++i)
                        q[i] = std::lround(coef[zz[i] / 8][zz[i] % 8] / qstep);
                    put_varint(row, q[0]);
                    int run = 0;
                    for (int i = 1; i < 64; ++i) {
                        if (q[i] == 0) {
                            ++run;
                            continue;
                        }
                        row.push_back(static_cast<uint8_t>(run));
                        put_varint(row, q[i]);
                        run = 0;
                    }
                    row.push_back(kEob);
                }
            }
            put_u32(bs.bytes, static_cast<uint32_t>(row.size()));
            bs.bytes.insert(bs.bytes.end(), row.begin(), row.end());
        }
    }
    return bs;
}

inline BitstreamHeader parse_header(const Bitstream& bs) {
    using namespace codec_detail;
    if (bs.bytes.size() < kHeaderBytes || std::memcmp(bs.bytes.data(), kBitstreamMagic, 4) != 0)
        throw DecodeError("bad magic");
    Reader r{bs.bytes.data() + 4, bs.bytes.data() + bs.bytes.size()};
    BitstreamHeader h;
    h.width = r.u32();
    h.height = r.u32();
    h.planes = r.u8();
    h.gaze_x = r.u16();
    h.gaze_y = r.u16();
    h.frame_id = r.u32();
    h.qp_const = r.u8();
    if (h.width == 0 || h.height == 0 || (h.planes != 1 && h.planes != 3))
        throw DecodeError("bad header fields");
    return h;
}

inline Frame decode_frame(const Bitstream& bs) {
    using namespace codec_detail;
    const BitstreamHeader h = parse_header(bs);
    Frame frame(static_cast<int>(h.width), static_cast<int>(h.height), h.planes);
    const int wmb = mb_count(frame.width);
    const int hmb = mb_count(frame.height);
    const auto& zz = zigzag_order();
    Reader r{bs.bytes.data() + kHeaderBytes, bs.bytes.data() + bs.bytes.size()};
    for (int p = 0; p < frame.planes; ++p) {
        for (int my = 0; my < hmb; ++my) {
            const uint32_t row_len = r.u32();
            if (row_len > static_cast<size_t>(r.end - r.p))
                throw DecodeError("row length exceeds stream");
            const uint8_t* row_end = r.p + row_len;
            for (int mx = 0; mx < wmb; ++mx) {
                const int qp = r.u8();
                if (qp < 1 || qp > 51) throw DecodeError("QP out of range");
                const double qstep = qp_to_qstep(qp);
                for (int sub = 0; sub < 4; ++sub) {
                    long q[64] = {};
                    q[0] = r.varint();
                    int pos = 0;
                    while (true) {
                        const uint8_t tok = r.u8();
                        if (tok == kEob) break;
                        pos += tok + 1;
                        if (pos > 63) throw DecodeError("coefficient index overflow");
                        q[pos] = r.varint();
                    }
                    double coef[8][8] = {};
                    for (int i = 0; i < 64; ++i)
                        coef[zz[i] / 8][zz[i] % 8] = static_cast<double>(q[i]) * qstep;
                    double block[8][8];
                    idct8x8(coef, block);
                    const int bx = mx * kMacroblockSize + (sub % 2) * kBlock;
                    const int by = my * kMacroblockSize + (sub / 2) * kBlock;
                    for (int y = 0; y < 8; ++y) {
                        if (by + y >= frame.height) break;
                        for (int x = 0; x < 8; ++x) {
                            if (bx + x >= frame.width) break;
                            frame.at(bx + x, by + y, p) = clamp_pixel(block[y][x] + 128.0);
                        }
                    }
                }
            }
            if (r.p != row_end) throw DecodeError("row payload length mismatch");
        }
    }
    if (r.p != r.end) throw DecodeError("trailing bytes after frame");
    return frame;
}

// Bits per second if every frame were this size at the given rate.
inline double frame_bitrate(const Bitstream& bs, double fps) {
    if (!(fps > 0.0)) throw std::invalid_argument("frame_bitrate: fps must be positive");
    return 8.0 * static_cast<double>(bs.size_bytes()) * fps;
}

}  // namespace fovstream
