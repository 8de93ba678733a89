#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fovstream/frame.hpp"
#include "fovstream/geometry.hpp"

namespace fovstream {

// One bandwidth trace row: link throughput valid from timestamp_ms
// until the next row.
struct TraceRecord {
    double timestamp_ms = 0.0;
    double throughput_kbps = 0.0;
};

namespace trace_detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& s, const std::string& context) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw IoError(context + ": bad number '" + s + "'");
    }
}

}  // namespace trace_detail

// `timestamp_ms,throughput_kbps`, header row required, timestamps
// strictly increasing, throughput positive.
inline std::vector<TraceRecord> load_bandwidth_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty trace");
    std::vector<TraceRecord> out;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto cols = trace_detail::split_csv_line(line);
        if (cols.size() != 2)
            throw IoError(path + ":" + std::to_string(lineno) + ": expected 2 columns");
        TraceRecord r;
        r.timestamp_ms = trace_detail::parse_double(cols[0], path);
        r.throughput_kbps = trace_detail::parse_double(cols[1], path);
        if (!(r.throughput_kbps > 0.0))
            throw IoError(path + ":" + std::to_string(lineno) + ": throughput must be positive");
        if (!out.empty() && r.timestamp_ms <= out.back().timestamp_ms)
            throw IoError(path + ":" + std::to_string(lineno) +
                          ": timestamps must be strictly increasing");
        out.push_back(r);
    }
    if (out.size() < 2) throw IoError(path + ": trace needs at least 2 rows");
    return out;
}

// `timestamp_ms,yaw_deg,pitch_deg`, header row required, timestamps
// monotone non-decreasing.
inline std::vector<GazeAngles> load_gaze_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty trace");
    std::vector<GazeAngles> out;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto cols = trace_detail::split_csv_line(line);
        if (cols.size() != 3)
            throw IoError(path + ":" + std::to_string(lineno) + ": expected 3 columns");
        GazeAngles g;
        g.timestamp_ms = trace_detail::parse_double(cols[0], path);
        g.yaw_deg = trace_detail::parse_double(cols[1], path);
        g.pitch_deg = trace_detail::parse_double(cols[2], path);
        if (!out.empty() && g.timestamp_ms < out.back().timestamp_ms)
            throw IoError(path + ":" + std::to_string(lineno) +
                          ": timestamps must be non-decreasing");
        out.push_back(g);
    }
    if (out.empty()) throw IoError(path + ": no gaze samples");
    return out;
}

// Latest sample with timestamp <= t; the first sample before the trace
// starts.
inline const GazeAngles& sample_gaze(const std::vector<GazeAngles>& trace, double t_ms) {
    size_t lo = 0, hi = trace.size();
    while (hi - lo > 1) {
        const size_t mid = (lo + hi) / 2;
        if (trace[mid].timestamp_ms <= t_ms)
            lo = mid;
        else
            hi = mid;
    }
    return trace[lo];
}

}  // namespace fovstream
