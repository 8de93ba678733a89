// Command-line front end: warp / unwarp / qpmap / simulate / metrics.
// Exit codes: 0 success, 1 runtime failure, 2 usage or input error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fovstream/fovstream.hpp"

namespace {

using namespace fovstream;

ScreenPoint parse_gaze(const std::string& s) {
    const size_t comma = s.find(',');
    if (comma == std::string::npos)
        throw CLI::ValidationError("--gaze", "expected X,Y");
    try {
        return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
    } catch (const std::exception&) {
        throw CLI::ValidationError("--gaze", "expected numeric X,Y");
    }
}

std::pair<int, int> parse_size(const std::string& s, const std::string& flag) {
    const size_t x = s.find('x');
    if (x == std::string::npos) throw CLI::ValidationError(flag, "expected WIDTHxHEIGHT");
    try {
        return {std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
    } catch (const std::exception&) {
        throw CLI::ValidationError(flag, "expected numeric WIDTHxHEIGHT");
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

struct WarpArgs {
    std::string in, out, gaze;
    FscParams params;
    bool prefilter = false;
    bool stereo = false;
    std::string game_size;  // unwarp only
};

void add_fsc_flags(CLI::App* cmd, FscParams& p) {
    cmd->add_option("--x-size", p.x_size, "Fovea width fraction")->capture_default_str();
    cmd->add_option("--y-size", p.y_size, "Fovea height fraction")->capture_default_str();
    cmd->add_option("--x-comp", p.x_comp, "Horizontal peripheral compression ratio")
        ->capture_default_str();
    cmd->add_option("--y-comp", p.y_comp, "Vertical peripheral compression ratio")
        ->capture_default_str();
}

int run_warp(const WarpArgs& a, bool inverse) {
    const ScreenPoint gaze = parse_gaze(a.gaze);
    const Frame in = load_pnm(a.in);
    Frame out;
    if (inverse) {
        auto [gw, gh] = parse_size(a.game_size, "--game-size");
        out = a.stereo ? decompress_frame_stereo(in, a.params, gaze, gw, gh)
                       : decompress_frame(in, a.params, gaze, gw, gh);
    } else {
        const Prefilter f = a.prefilter ? Prefilter::box : Prefilter::none;
        out = a.stereo ? compress_frame_stereo(in, a.params, gaze, f)
                       : compress_frame(in, a.params, gaze, f);
    }
    save_pnm(out, a.out);
    std::printf("%dx%d\n", out.width, out.height);
    return 0;
}

SimConfig config_from_file(const std::string& path) {
    SimConfig cfg;
    if (path.empty()) return cfg;
    const ConfigFile f = ConfigFile::load(path);
    cfg.mode = parse_sim_mode(f.get("sim.mode", to_string(cfg.mode)));
    cfg.fps = f.get_double("sim.fps", cfg.fps);
    cfg.frames = f.get_int("sim.frames", cfg.frames);
    cfg.width = f.get_int("sim.width", cfg.width);
    cfg.height = f.get_int("sim.height", cfg.height);
    cfg.planes = f.get_int("sim.planes", cfg.planes);
    cfg.source = f.get("sim.source", cfg.source);
    cfg.seed = static_cast<uint64_t>(f.get_int("sim.seed", static_cast<int>(cfg.seed)));
    cfg.display_deadline_ms = f.get_double("sim.display_deadline_ms", cfg.display_deadline_ms);
    cfg.prefilter_box = f.get_bool("sim.prefilter", cfg.prefilter_box);
    cfg.controller_frozen = f.get_bool("sim.frozen", cfg.controller_frozen);
    cfg.compute_metrics = f.get_bool("sim.metrics", cfg.compute_metrics);
    cfg.fsc.x_size = f.get_double("fsc.x_size", cfg.fsc.x_size);
    cfg.fsc.y_size = f.get_double("fsc.y_size", cfg.fsc.y_size);
    cfg.fsc.x_comp = f.get_double("fsc.x_comp", cfg.fsc.x_comp);
    cfg.fsc.y_comp = f.get_double("fsc.y_comp", cfg.fsc.y_comp);
    cfg.fve.qp_const = f.get_int("fve.qp_const", cfg.fve.qp_const);
    cfg.fve.qp_max = f.get_int("fve.qp_max", cfg.fve.qp_max);
    cfg.fov.left_deg = f.get_double("fov.left", cfg.fov.left_deg);
    cfg.fov.right_deg = f.get_double("fov.right", cfg.fov.right_deg);
    cfg.fov.up_deg = f.get_double("fov.up", cfg.fov.up_deg);
    cfg.fov.down_deg = f.get_double("fov.down", cfg.fov.down_deg);
    cfg.gamma_delay = f.get_double("netmon.gamma_delay", cfg.gamma_delay);
    cfg.gamma_feedback_ms = f.get_double("netmon.gamma_feedback_ms", cfg.gamma_feedback_ms);
    cfg.controller.c = f.get_double("controller.c_init", cfg.controller.c);
    cfg.controller.c_min = f.get_double("controller.c_min", cfg.controller.c_min);
    cfg.controller.c_max = f.get_double("controller.c_max", cfg.controller.c_max);
    cfg.controller.alpha = f.get_double("controller.alpha", cfg.controller.alpha);
    cfg.controller.beta = f.get_double("controller.beta", cfg.controller.beta);
    cfg.controller.beta_timeout = f.get_double("controller.beta_timeout", cfg.controller.beta_timeout);
    cfg.propagation_ms = f.get_double("net.propagation_ms", cfg.propagation_ms);
    cfg.feedback_drop_start_ms = f.get_double("net.feedback_drop_start_ms", cfg.feedback_drop_start_ms);
    cfg.feedback_drop_end_ms = f.get_double("net.feedback_drop_end_ms", cfg.feedback_drop_end_ms);
    cfg.metrics_sigma_px = f.get_double("metrics.sigma_px", cfg.metrics_sigma_px);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaze-contingent foveated streaming pipeline"};
    app.set_version_flag("--version", fovstream::version_string());
    app.require_subcommand(1);

    // warp / unwarp
    WarpArgs warp_args, unwarp_args;
    CLI::App* warp = app.add_subcommand("warp", "Foveated spatial compression of a PGM/PPM frame");
    warp->add_option("--in", warp_args.in, "Input game frame (PGM/PPM)")->required();
    warp->add_option("--out", warp_args.out, "Output FSC frame")->required();
    warp->add_option("--gaze", warp_args.gaze, "Gaze point X,Y in game-frame pixels")->required();
    add_fsc_flags(warp, warp_args.params);
    warp->add_flag("--prefilter", warp_args.prefilter, "Box prefilter in the periphery");
    warp->add_flag("--stereo", warp_args.stereo,
                   "Treat the frame as side-by-side stereo halves (gaze in half coords)");

    CLI::App* unwarp = app.add_subcommand("unwarp", "Foveated spatial decompression");
    unwarp->add_option("--in", unwarp_args.in, "Input FSC frame")->required();
    unwarp->add_option("--out", unwarp_args.out, "Output reconstructed game frame")->required();
    unwarp->add_option("--gaze", unwarp_args.gaze, "Gaze point X,Y in game-frame pixels")->required();
    unwarp->add_option("--game-size", unwarp_args.game_size, "Game frame size WIDTHxHEIGHT")
        ->required();
    add_fsc_flags(unwarp, unwarp_args.params);
    unwarp->add_flag("--stereo", unwarp_args.stereo, "Side-by-side stereo mode");

    // qpmap
    std::string qp_size, qp_gaze, qp_out_pgm, qp_out_csv;
    double qp_c = 6.0;
    fovstream::FoveationConfig qp_cfg;
    CLI::App* qpmap = app.add_subcommand("qpmap", "Macroblock QP map for a frame size and gaze");
    qpmap->add_option("--size", qp_size, "FSC frame size WIDTHxHEIGHT")->required();
    qpmap->add_option("--gaze", qp_gaze, "Gaze point X,Y in FSC-frame pixels")->required();
    qpmap->add_option("--c", qp_c, "Foveation controller value")->required();
    qpmap->add_option("--qp-const", qp_cfg.qp_const, "QP at the gaze macroblock")
        ->capture_default_str();
    qpmap->add_option("--qp-max", qp_cfg.qp_max, "QP ceiling")->capture_default_str();
    qpmap->add_option("--out-pgm", qp_out_pgm, "Grayscale visualization output");
    qpmap->add_option("--out-csv", qp_out_csv, "CSV grid output");

    // simulate
    std::string sim_config_path, sim_bw, sim_gaze, sim_out_dir = "simout";
    std::string sim_mode, sim_source;
    int sim_frames = -1, sim_seed = -1;
    double sim_fps = -1.0;
    std::string sim_size;
    CLI::App* simulate = app.add_subcommand("simulate", "Trace-driven closed-loop simulation");
    simulate->add_option("--config", sim_config_path, "Config file (key = value with [sections])");
    simulate->add_option("--bw-trace", sim_bw, "Bandwidth trace CSV (timestamp_ms,throughput_kbps)")
        ->required();
    simulate->add_option("--gaze-trace", sim_gaze,
                         "Gaze trace CSV (timestamp_ms,yaw_deg,pitch_deg); default fixed center");
    simulate->add_option("--out-dir", sim_out_dir, "Output directory")->capture_default_str();
    simulate->add_option("--mode", sim_mode, "full | fve_only | fsc_only");
    simulate->add_option("--frames", sim_frames, "Frame count");
    simulate->add_option("--fps", sim_fps, "Target frame rate");
    simulate->add_option("--seed", sim_seed, "Frame source seed");
    simulate->add_option("--source", sim_source, "gradient | checkerboard | noise | dir:<path>");
    simulate->add_option("--size", sim_size, "Game frame size WIDTHxHEIGHT");

    // metrics
    std::string m_ref, m_test, m_gaze;
    double m_sigma = 0.0;
    bool m_uniform = false;
    CLI::App* metrics = app.add_subcommand("metrics", "Eye-weighted quality of a frame pair");
    metrics->add_option("--ref", m_ref, "Reference frame")->required();
    metrics->add_option("--test", m_test, "Test frame")->required();
    metrics->add_option("--gaze", m_gaze, "Gaze point X,Y in frame pixels");
    metrics->add_option("--sigma", m_sigma, "Weight falloff sigma in pixels (default 5 deg span)");
    metrics->add_flag("--uniform", m_uniform, "Uniform weights (plain PSNR/SSIM)");

    try {
        app.parse(argc, argv);

        if (*warp) return run_warp(warp_args, false);
        if (*unwarp) return run_warp(unwarp_args, true);

        if (*qpmap) {
            auto [w, h] = parse_size(qp_size, "--size");
            const ScreenPoint g = parse_gaze(qp_gaze);
            const fovstream::MacroblockCoord mb{
                static_cast<int>(std::floor(g.x / fovstream::kMacroblockSize)),
                static_cast<int>(std::floor(g.y / fovstream::kMacroblockSize))};
            const fovstream::QpMap map = fovstream::build_qp_map(w, h, mb, qp_c, qp_cfg);
            if (!qp_out_pgm.empty()) save_pnm(fovstream::qp_map_to_image(map), qp_out_pgm);
            if (!qp_out_csv.empty()) write_text(qp_out_csv, fovstream::qp_map_to_csv(map));
            std::printf("%dx%d macroblocks, qp %d..%d\n", map.width_mb, map.height_mb,
                        map.min_qp(), map.max_qp());
            return 0;
        }

        if (*simulate) {
            SimConfig cfg = config_from_file(sim_config_path);
            if (simulate->count("--mode")) cfg.mode = parse_sim_mode(sim_mode);
            if (simulate->count("--frames")) cfg.frames = sim_frames;
            if (simulate->count("--fps")) cfg.fps = sim_fps;
            if (simulate->count("--seed")) cfg.seed = static_cast<uint64_t>(sim_seed);
            if (simulate->count("--source")) cfg.source = sim_source;
            if (simulate->count("--size")) {
                auto [w, h] = parse_size(sim_size, "--size");
                cfg.width = w;
                cfg.height = h;
            }
            const auto bw = load_bandwidth_trace(sim_bw);
            std::vector<GazeAngles> gaze;
            if (!sim_gaze.empty())
                gaze = load_gaze_trace(sim_gaze);
            else
                gaze.push_back(GazeAngles{});  // fixed center
            const auto source = make_frame_source(cfg);
            const SimResult res = run_simulation(cfg, bw, gaze, *source);

            std::filesystem::create_directories(sim_out_dir);
            write_text(sim_out_dir + "/frames.csv", frames_csv(res));
            write_text(sim_out_dir + "/summary.csv", summary_csv(res));
            write_text(sim_out_dir + "/netmon.csv", netmon_csv(res));
            write_text(sim_out_dir + "/controller.csv", controller_csv(res));
            std::printf("%d frames (%s), mean EWPSNR %.2f dB, mean EWSSIM %.4f, final C %.1f%s\n",
                        res.summary.frames_completed, to_string(cfg.mode),
                        res.summary.mean_ewpsnr_db, res.summary.mean_ewssim, res.summary.final_c,
                        res.summary.trace_exhausted ? " (trace exhausted)" : "");
            return 0;
        }

        if (*metrics) {
            const Frame ref = load_pnm(m_ref);
            const Frame test = load_pnm(m_test);
            WeightMap wm = WeightMap::uniform(ref.width, ref.height);
            if (!m_uniform) {
                ScreenPoint g{ref.width / 2.0, ref.height / 2.0};
                if (!m_gaze.empty()) g = parse_gaze(m_gaze);
                const double sigma =
                    m_sigma > 0.0 ? m_sigma : default_sigma_px(45.0, 45.0, ref.width);
                wm = foveation_weights(ref.width, ref.height, g, sigma);
            }
            std::printf("frame_id,ewpsnr_db,ewssim,psnr_db,ssim\n");
            std::printf("0,%.6f,%.6f,%.6f,%.6f\n", ewpsnr(ref, test, wm), ewssim(ref, test, wm),
                        psnr(ref, test), ssim(ref, test));
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return 2;
    } catch (const fovstream::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const fovstream::DecodeError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::out_of_range& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return 1;
    }
    return 2;
}
