#pragma once

#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fovstream/codec.hpp"
#include "fovstream/fovea_warp.hpp"
#include "fovstream/frame.hpp"
#include "fovstream/geometry.hpp"
#include "fovstream/metrics.hpp"
#include "fovstream/netmon.hpp"
#include "fovstream/qpmap.hpp"
#include "fovstream/ratectl.hpp"
#include "fovstream/source.hpp"
#include "fovstream/trace.hpp"

namespace fovstream {

// Single FIFO fluid queue shaped by a bandwidth trace: a frame has
// fully arrived once the integral of trace throughput, starting when
// the queue head reaches it, covers its bytes. A fixed one-way
// propagation delay is added on top.
class FluidLink {
public:
    FluidLink(std::vector<TraceRecord> trace, double propagation_ms)
        : trace_(std::move(trace)), propagation_ms_(propagation_ms) {
        if (trace_.size() < 2) throw std::invalid_argument("FluidLink: trace needs >= 2 rows");
    }

    // Arrival time of the frame's last byte, or nullopt once the trace
    // can no longer cover the transmission.
    std::optional<double> enqueue(size_t bytes, double t_send_ms) {
        if (exhausted_) return std::nullopt;
        if (t_send_ms < trace_.front().timestamp_ms)
            throw std::invalid_argument("FluidLink: send time precedes trace start");
        double t = std::max(t_send_ms, next_free_ms_);
        double bits = 8.0 * static_cast<double>(bytes);
        while (bits > 0.0) {
            if (t >= trace_.back().timestamp_ms) {
                exhausted_ = true;
                return std::nullopt;
            }
            while (cursor_ + 1 < trace_.size() && trace_[cursor_ + 1].timestamp_ms <= t) ++cursor_;
            const double seg_end = trace_[cursor_ + 1].timestamp_ms;
            const double kbps = trace_[cursor_].throughput_kbps;
            const double seg_bits = kbps * (seg_end - t);  // kbit/s * ms = bits
            if (seg_bits >= bits) {
                t += bits / kbps;
                bits = 0.0;
            } else {
                bits -= seg_bits;
                t = seg_end;
            }
        }
        next_free_ms_ = t;
        return t + propagation_ms_;
    }

    double propagation_ms() const { return propagation_ms_; }

private:
    std::vector<TraceRecord> trace_;
    double propagation_ms_;
    double next_free_ms_ = 0.0;
    size_t cursor_ = 0;
    bool exhausted_ = false;
};

enum class SimMode { full, fve_only, fsc_only };

inline const char* to_string(SimMode m) {
    switch (m) {
        case SimMode::full: return "full";
        case SimMode::fve_only: return "fve_only";
        case SimMode::fsc_only: return "fsc_only";
    }
    return "?";
}

inline SimMode parse_sim_mode(const std::string& s) {
    if (s == "full") return SimMode::full;
    if (s == "fve_only") return SimMode::fve_only;
    if (s == "fsc_only") return SimMode::fsc_only;
    throw std::invalid_argument("unknown mode '" + s + "' (full|fve_only|fsc_only)");
}

struct SimConfig {
    SimMode mode = SimMode::full;
    double fps = 72.0;
    int frames = 600;
    int width = 256;
    int height = 256;
    int planes = 3;
    std::string source = "noise";  // gradient | checkerboard | noise | dir:<path>
    uint64_t seed = 1;

    FscParams fsc;
    FoveationConfig fve;
    FovSpec fov;
    ControllerState controller;

    double gamma_delay = 0.1;  // queue growth rate threshold, ms of delay per ms of time
    double gamma_feedback_ms = 300.0;
    double propagation_ms = 5.0;
    double display_deadline_ms = 150.0;
    double metrics_sigma_px = 0.0;  // 0 derives from FoV and width
    bool prefilter_box = false;
    bool controller_frozen = false;
    bool compute_metrics = true;  // decode/display/quality per frame

    // Feedback whose return lands in [start, end) is dropped, to
    // exercise the timeout path.
    double feedback_drop_start_ms = -1.0;
    double feedback_drop_end_ms = -1.0;

    void validate() const {
        if (!(fps > 0.0)) throw std::invalid_argument("SimConfig: fps must be positive");
        if (frames <= 0) throw std::invalid_argument("SimConfig: frames must be positive");
        if (planes != 1 && planes != 3) throw std::invalid_argument("SimConfig: planes must be 1 or 3");
        if (width < 32 || height < 32)
            throw std::invalid_argument("SimConfig: frames must be at least 32x32");
        fsc.validate();
        fve.validate();
        fov.validate();
        controller.validate();
        if (!(gamma_delay > 0.0) || !(gamma_feedback_ms > 0.0))
            throw std::invalid_argument("SimConfig: thresholds must be positive");
        if (propagation_ms < 0.0 || display_deadline_ms < 0.0)
            throw std::invalid_argument("SimConfig: delays must be non-negative");
        if (mode != SimMode::fve_only)
            fsc_dimensions(width, height, fsc);  // throws if unrepresentable
    }
};

inline std::unique_ptr<FrameSource> make_frame_source(const SimConfig& cfg) {
    if (cfg.source.rfind("dir:", 0) == 0)
        return std::make_unique<DirectorySource>(cfg.source.substr(4));
    return std::make_unique<SyntheticSource>(parse_source_kind(cfg.source), cfg.seed, cfg.width,
                                             cfg.height, cfg.planes);
}

struct SimRecord {
    int frame_id = 0;
    double t_send_ms = 0.0;
    double t_arr_ms = 0.0;
    size_t bytes = 0;
    int gaze_x = 0;  // screen-space gaze carried alongside the FSC frame
    int gaze_y = 0;
    double send_bitrate_kbps = 0.0;
    double recv_bitrate_kbps = 0.0;
    double latency_ms = 0.0;  // t_arr - t_send
    double queuing_delay_ms = std::numeric_limits<double>::quiet_NaN();
    double gradient_ms_per_s = std::numeric_limits<double>::quiet_NaN();
    int state_code = -1;  // NetState once this frame's feedback was evaluated
    double c = 0.0;       // controller value used to encode this frame
    int qp_min = 0;
    int qp_max = 0;
    double qp_mean = 0.0;
    int displayed_frame = -1;
    double ewpsnr_db = 0.0;
    double ewssim = 0.0;
    double psnr_db = 0.0;
    double ssim = 0.0;
};

struct FeedbackRow {
    int frame_id = 0;
    double t_send_ms = 0.0;
    double t_arr_ms = 0.0;
    double queuing_delay_ms = std::numeric_limits<double>::quiet_NaN();
    double gradient_ms_per_s = std::numeric_limits<double>::quiet_NaN();
    NetState state = NetState::normal;
};

struct ControllerRow {
    int event_idx = 0;
    NetState event = NetState::normal;
    double c_before = 0.0;
    double c_after = 0.0;
    double t_ms = 0.0;  // server time the event was applied (not in the CSV)
};

struct SimSummary {
    int frames_completed = 0;
    bool trace_exhausted = false;
    uint64_t bytes_sent = 0;
    double mean_send_bitrate_kbps = 0.0;
    double mean_recv_bitrate_kbps = 0.0;
    double bitrate_imbalance_kbps = 0.0;  // mean(sending - receiving)
    double mean_latency_ms = 0.0;
    double mean_queue_wait_ms = 0.0;  // latency minus propagation
    double max_latency_ms = 0.0;
    double mean_ewpsnr_db = 0.0;
    double mean_ewssim = 0.0;
    double mean_psnr_db = 0.0;
    double mean_ssim = 0.0;
    double mean_encoded_bytes = 0.0;
    double final_c = 0.0;
    double mean_c = 0.0;
    int count_overuse = 0;
    int count_normal = 0;
    int count_underuse = 0;
    int count_timeout = 0;
};

struct SimResult {
    std::vector<SimRecord> records;
    std::vector<FeedbackRow> feedback_rows;
    std::vector<ControllerRow> controller_rows;
    SimSummary summary;
};

// Runs the closed loop: capture -> gaze projection -> FSC -> QP map ->
// encode -> fluid link -> feedback (delay gradient, AIMD step) ->
// decode -> FSD -> eye-weighted metrics against the pristine frame.
// The client displays, for each capture slot, the newest frame that
// arrived within the display deadline; under congestion stale frames
// are scored against the current reference, which is how late delivery
// degrades measured quality here.
inline SimResult run_simulation(const SimConfig& cfg, const std::vector<TraceRecord>& bw_trace,
                                const std::vector<GazeAngles>& gaze_trace,
                                const FrameSource& source) {
    cfg.validate();
    if (gaze_trace.empty()) throw std::invalid_argument("run_simulation: empty gaze trace");
    if (source.width() != cfg.width || source.height() != cfg.height ||
        source.planes() != cfg.planes)
        throw std::invalid_argument("run_simulation: source dimensions do not match config");

    const int W = cfg.width, H = cfg.height;
    const double sigma = cfg.metrics_sigma_px > 0.0
                             ? cfg.metrics_sigma_px
                             : default_sigma_px(cfg.fov.left_deg, cfg.fov.right_deg, W);
    const double gamma_slope = cfg.gamma_delay * 1000.0;  // ms/ms -> ms/s

    FluidLink link(bw_trace, cfg.propagation_ms);
    ControllerState ctrl = cfg.controller;
    DelayWindow window;

    struct Feedback {
        int frame;
        double t_arr;
        double t_fb;
    };
    std::deque<Feedback> fbq;

    SimResult res;
    res.records.reserve(static_cast<size_t>(cfg.frames));

    double last_fb_time = 0.0;
    double silence_base = 0.0;
    int last_fb_frame = -1;
    FrameTiming prev_timing;

    std::map<int, Bitstream> in_flight;
    int displayed = -1;
    Frame display_buf(W, H, cfg.planes);  // black until the first frame lands
    double prev_arr = std::numeric_limits<double>::quiet_NaN();

    const double frame_interval_ms = 1000.0 / cfg.fps;

    for (int k = 0; k < cfg.frames; ++k) {
        const double t_k = k * frame_interval_ms;

        // Feedback processing: per received frame, evaluate timeout
        // first, otherwise classify the delay gradient, then step C.
        bool processed_any = false;
        while (!fbq.empty() && fbq.front().t_fb <= t_k) {
            const Feedback fb = fbq.front();
            fbq.pop_front();
            processed_any = true;

            SimRecord& rec = res.records[static_cast<size_t>(fb.frame)];
            FrameTiming cur{fb.frame, rec.t_send_ms, fb.t_arr, rec.bytes};
            double d = std::numeric_limits<double>::quiet_NaN();
            if (last_fb_frame >= 0 && fb.frame == last_fb_frame + 1)
                d = queuing_delay(prev_timing, cur);
            // The regression runs over the accumulated queuing delay
            // (the one-way delay, whose per-frame increment is D_i):
            // its slope is the queue growth rate gamma_delay compares
            // against. Regressing the raw increments would measure the
            // second derivative, which is zero in steady congestion.
            window.push(fb.t_arr, fb.t_arr - rec.t_send_ms);
            double slope = std::numeric_limits<double>::quiet_NaN();
            if (window.size() >= 2) slope = delay_gradient(window);

            NetState event;
            if (feedback_timed_out(fb.t_fb, last_fb_time, cfg.gamma_feedback_ms))
                event = NetState::timeout;
            else if (std::isfinite(slope))
                event = classify(slope, gamma_slope);
            else
                event = NetState::normal;

            if (!cfg.controller_frozen) {
                const double before = ctrl.c;
                ctrl = step(ctrl, event);
                res.controller_rows.push_back(
                    {static_cast<int>(res.controller_rows.size()), event, before, ctrl.c, t_k});
            }
            res.feedback_rows.push_back({fb.frame, rec.t_send_ms, fb.t_arr, d, slope, event});
            rec.queuing_delay_ms = d;
            rec.gradient_ms_per_s = slope;
            rec.state_code = static_cast<int>(event);
            switch (event) {
                case NetState::overuse: ++res.summary.count_overuse; break;
                case NetState::normal: ++res.summary.count_normal; break;
                case NetState::underuse: ++res.summary.count_underuse; break;
                case NetState::timeout: ++res.summary.count_timeout; break;
            }

            last_fb_time = fb.t_fb;
            silence_base = fb.t_fb;
            last_fb_frame = fb.frame;
            prev_timing = cur;
        }
        if (!processed_any) {
            // Feedback silence also signals severe congestion, once per
            // elapsed timeout interval.
            const double base = std::max(last_fb_time, silence_base);
            if (feedback_timed_out(t_k, base, cfg.gamma_feedback_ms)) {
                silence_base = t_k;
                ++res.summary.count_timeout;
                if (!cfg.controller_frozen) {
                    const double before = ctrl.c;
                    ctrl = step(ctrl, NetState::timeout);
                    res.controller_rows.push_back({static_cast<int>(res.controller_rows.size()),
                                                   NetState::timeout, before, ctrl.c, t_k});
                }
            }
        }

        // Capture and encode.
        const GazeAngles& ga = sample_gaze(gaze_trace, t_k);
        ScreenPoint sp = project_gaze_to_screen(ga, cfg.fov, W, H);
        // Whole-pixel gaze: the packet header carries it as u16.
        sp.x = std::min(std::round(sp.x), static_cast<double>(W));
        sp.y = std::min(std::round(sp.y), static_cast<double>(H));

        const Frame src = source.frame(k);
        Frame enc_input;
        FscPoint enc_gaze{sp.x, sp.y};
        if (cfg.mode != SimMode::fve_only) {
            WarpGeometry geom = make_warp_geometry(W, H, cfg.fsc, sp);
            enc_input = compress_frame(src, geom,
                                       cfg.prefilter_box ? Prefilter::box : Prefilter::none);
            enc_gaze = screen_to_fsc_point(sp, geom);
        } else {
            enc_input = src;
        }

        QpMap map = cfg.mode == SimMode::fsc_only
                        ? uniform_qp_map(enc_input.width, enc_input.height, cfg.fve.qp_const)
                        : build_qp_map(enc_input.width, enc_input.height,
                                       point_to_macroblock(enc_gaze, enc_input.width,
                                                           enc_input.height),
                                       ctrl.c, cfg.fve);

        Bitstream bs = encode_frame(enc_input, map, static_cast<uint32_t>(k),
                                    static_cast<int>(sp.x), static_cast<int>(sp.y),
                                    cfg.fve.qp_const);

        const auto arr = link.enqueue(bs.size_bytes(), t_k);
        if (!arr) {
            res.summary.trace_exhausted = true;
            break;
        }

        SimRecord rec;
        rec.frame_id = k;
        rec.t_send_ms = t_k;
        rec.t_arr_ms = *arr;
        rec.bytes = bs.size_bytes();
        rec.gaze_x = static_cast<int>(sp.x);
        rec.gaze_y = static_cast<int>(sp.y);
        rec.send_bitrate_kbps = frame_bitrate(bs, cfg.fps) / 1000.0;
        rec.recv_bitrate_kbps = 8.0 * static_cast<double>(bs.size_bytes()) /
                                (std::isnan(prev_arr) ? (*arr - t_k) : (*arr - prev_arr));
        rec.latency_ms = *arr - t_k;
        rec.c = ctrl.c;
        rec.qp_min = map.min_qp();
        rec.qp_max = map.max_qp();
        rec.qp_mean = map.mean_qp();
        prev_arr = *arr;

        const double t_fb = *arr + cfg.propagation_ms;
        const bool dropped = cfg.feedback_drop_start_ms >= 0.0 &&
                             t_fb >= cfg.feedback_drop_start_ms &&
                             t_fb < cfg.feedback_drop_end_ms;
        if (!dropped) fbq.push_back({k, *arr, t_fb});

        res.records.push_back(rec);
        if (!cfg.compute_metrics) continue;
        in_flight.emplace(k, std::move(bs));

        // Client display: newest arrival within the deadline.
        const double display_by = t_k + cfg.display_deadline_ms;
        int next_display = displayed;
        for (int j = displayed + 1; j <= k; ++j) {
            if (res.records[static_cast<size_t>(j)].t_arr_ms <= display_by)
                next_display = j;
            else
                break;
        }
        if (next_display != displayed) {
            displayed = next_display;
            const Bitstream& shown = in_flight.at(displayed);
            const BitstreamHeader h = parse_header(shown);
            Frame decoded = decode_frame(shown);
            if (cfg.mode != SimMode::fve_only) {
                WarpGeometry geom = make_warp_geometry(
                    W, H, cfg.fsc, ScreenPoint{static_cast<double>(h.gaze_x),
                                               static_cast<double>(h.gaze_y)});
                display_buf = decompress_frame(decoded, geom);
            } else {
                display_buf = std::move(decoded);
            }
            in_flight.erase(in_flight.begin(), in_flight.upper_bound(displayed));
        }

        SimRecord& out = res.records.back();
        out.displayed_frame = displayed;
        if (displayed >= 0) {
            const QualityScores q =
                quality_scores(src, display_buf, foveation_weights(W, H, sp, sigma));
            out.ewpsnr_db = q.ewpsnr_db;
            out.ewssim = q.ewssim;
            out.psnr_db = q.psnr_db;
            out.ssim = q.ssim;
        }
    }

    // Summary.
    SimSummary& s = res.summary;
    s.frames_completed = static_cast<int>(res.records.size());
    s.final_c = ctrl.c;
    if (!res.records.empty()) {
        double send = 0, recv = 0, lat = 0, ewp = 0, ews = 0, pp = 0, ss = 0, cc = 0, by = 0;
        for (const SimRecord& r : res.records) {
            s.bytes_sent += r.bytes;
            send += r.send_bitrate_kbps;
            recv += r.recv_bitrate_kbps;
            lat += r.latency_ms;
            s.max_latency_ms = std::max(s.max_latency_ms, r.latency_ms);
            ewp += r.ewpsnr_db;
            ews += r.ewssim;
            pp += r.psnr_db;
            ss += r.ssim;
            cc += r.c;
            by += static_cast<double>(r.bytes);
        }
        const double n = static_cast<double>(res.records.size());
        s.mean_send_bitrate_kbps = send / n;
        s.mean_recv_bitrate_kbps = recv / n;
        s.bitrate_imbalance_kbps = (send - recv) / n;
        s.mean_latency_ms = lat / n;
        s.mean_queue_wait_ms = s.mean_latency_ms - cfg.propagation_ms;
        s.mean_ewpsnr_db = ewp / n;
        s.mean_ewssim = ews / n;
        s.mean_psnr_db = pp / n;
        s.mean_ssim = ss / n;
        s.mean_c = cc / n;
        s.mean_encoded_bytes = by / n;
    }
    return res;
}

// --- CSV output ------------------------------------------------------

namespace sim_detail {

inline void append_num(std::string& out, double v, const char* fmt = "%.6f") {
    if (std::isnan(v)) return;  // empty field
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    out += buf;
}

}  // namespace sim_detail

inline std::string frames_csv(const SimResult& res) {
    std::string out =
        "frame_id,t_send_ms,t_arr_ms,bytes,gaze_x,gaze_y,send_kbps,recv_kbps,latency_ms,"
        "queuing_delay_ms,gradient_ms_per_s,state,c,qp_min,qp_max,qp_mean,displayed_frame,"
        "ewpsnr_db,ewssim,psnr_db,ssim\n";
    for (const SimRecord& r : res.records) {
        out += std::to_string(r.frame_id) + ',';
        sim_detail::append_num(out, r.t_send_ms);
        out += ',';
        sim_detail::append_num(out, r.t_arr_ms);
        out += ',';
        out += std::to_string(r.bytes) + ',';
        out += std::to_string(r.gaze_x) + ',' + std::to_string(r.gaze_y) + ',';
        sim_detail::append_num(out, r.send_bitrate_kbps);
        out += ',';
        sim_detail::append_num(out, r.recv_bitrate_kbps);
        out += ',';
        sim_detail::append_num(out, r.latency_ms);
        out += ',';
        sim_detail::append_num(out, r.queuing_delay_ms);
        out += ',';
        sim_detail::append_num(out, r.gradient_ms_per_s);
        out += ',';
        if (r.state_code >= 0) out += to_string(static_cast<NetState>(r.state_code));
        out += ',';
        sim_detail::append_num(out, r.c);
        out += ',';
        out += std::to_string(r.qp_min) + ',' + std::to_string(r.qp_max) + ',';
        sim_detail::append_num(out, r.qp_mean);
        out += ',';
        out += std::to_string(r.displayed_frame) + ',';
        sim_detail::append_num(out, r.ewpsnr_db);
        out += ',';
        sim_detail::append_num(out, r.ewssim);
        out += ',';
        sim_detail::append_num(out, r.psnr_db);
        out += ',';
        sim_detail::append_num(out, r.ssim);
        out += '\n';
    }
    return out;
}

inline std::string netmon_csv(const SimResult& res) {
    std::string out = "frame_id,t_send,t_arr,D,slope,state\n";
    for (const FeedbackRow& r : res.feedback_rows) {
        out += std::to_string(r.frame_id) + ',';
        sim_detail::append_num(out, r.t_send_ms);
        out += ',';
        sim_detail::append_num(out, r.t_arr_ms);
        out += ',';
        sim_detail::append_num(out, r.queuing_delay_ms);
        out += ',';
        sim_detail::append_num(out, r.gradient_ms_per_s);
        out += ',';
        out += to_string(r.state);
        out += '\n';
    }
    return out;
}

inline std::string controller_csv(const SimResult& res) {
    std::string out = "event_idx,event,c_before,c_after\n";
    for (const ControllerRow& r : res.controller_rows) {
        out += std::to_string(r.event_idx) + ',';
        out += to_string(r.event);
        out += ',';
        sim_detail::append_num(out, r.c_before);
        out += ',';
        sim_detail::append_num(out, r.c_after);
        out += '\n';
    }
    return out;
}

inline std::string summary_csv(const SimResult& res) {
    const SimSummary& s = res.summary;
    std::string out = "key,value\n";
    auto kv = [&out](const char* key, double v, const char* fmt = "%.6f") {
        out += key;
        out += ',';
        sim_detail::append_num(out, v, fmt);
        out += '\n';
    };
    kv("frames_completed", s.frames_completed, "%.0f");
    kv("trace_exhausted", s.trace_exhausted ? 1 : 0, "%.0f");
    kv("bytes_sent", static_cast<double>(s.bytes_sent), "%.0f");
    kv("mean_encoded_bytes", s.mean_encoded_bytes);
    kv("mean_send_bitrate_kbps", s.mean_send_bitrate_kbps);
    kv("mean_recv_bitrate_kbps", s.mean_recv_bitrate_kbps);
    kv("bitrate_imbalance_kbps", s.bitrate_imbalance_kbps);
    kv("mean_latency_ms", s.mean_latency_ms);
    kv("mean_queue_wait_ms", s.mean_queue_wait_ms);
    kv("max_latency_ms", s.max_latency_ms);
    kv("mean_ewpsnr_db", s.mean_ewpsnr_db);
    kv("mean_ewssim", s.mean_ewssim);
    kv("mean_psnr_db", s.mean_psnr_db);
    kv("mean_ssim", s.mean_ssim);
    kv("final_c", s.final_c);
    kv("mean_c", s.mean_c);
    kv("count_overuse", s.count_overuse, "%.0f");
    kv("count_normal", s.count_normal, "%.0f");
    kv("count_underuse", s.count_underuse, "%.0f");
    kv("count_timeout", s.count_timeout, "%.0f");
    return out;
}

}  // namespace fovstream
