// Runs one frame through the whole pipeline and writes each stage to
// the working directory: game frame, FSC frame, QP map, decoded frame,
// reconstructed frame.

#include <cstdio>

#include "fovstream/fovstream.hpp"

int main() {
    using namespace fovstream;

    const int w = 512, h = 512;
    SyntheticSource source(SourceKind::noise, /*seed=*/7, w, h, /*planes=*/3);
    const Frame game = source.frame(0);
    save_pnm(game, "demo_game.ppm");

    const ScreenPoint gaze{300.0, 200.0};
    const FscParams params;
    const WarpGeometry geom = make_warp_geometry(w, h, params, gaze);
    const Frame fsc = compress_frame(game, geom);
    save_pnm(fsc, "demo_fsc.ppm");
    std::printf("game %dx%d -> fsc %dx%d\n", w, h, fsc.width, fsc.height);

    const FscPoint fsc_gaze = screen_to_fsc_point(gaze, geom);
    const FoveationConfig fve;
    const QpMap map = build_qp_map(fsc.width, fsc.height,
                                   point_to_macroblock(fsc_gaze, fsc.width, fsc.height),
                                   /*c=*/6.0, fve);
    save_pnm(qp_map_to_image(map), "demo_qpmap.pgm");

    const Bitstream bs = encode_frame(fsc, map, 0, static_cast<int>(gaze.x),
                                      static_cast<int>(gaze.y), fve.qp_const);
    std::printf("encoded %zu bytes (%.2f Mb/s at 72 fps)\n", bs.size_bytes(),
                frame_bitrate(bs, 72.0) / 1e6);

    const Frame decoded = decode_frame(bs);
    const Frame restored = decompress_frame(decoded, geom);
    save_pnm(restored, "demo_restored.ppm");

    const WeightMap wm = foveation_weights(w, h, gaze, default_sigma_px(45.0, 45.0, w));
    std::printf("ewpsnr %.2f dB, ewssim %.4f, psnr %.2f dB, ssim %.4f\n",
                ewpsnr(game, restored, wm), ewssim(game, restored, wm), psnr(game, restored),
                ssim(game, restored));
    return 0;
}
