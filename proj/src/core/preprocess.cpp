#include "core/preprocess.hpp"

#include <cmath>

#include "core/error.hpp"

namespace hop {

namespace {

// Snap near-exact trig values so quarter turns stay pure permutations and
// yaw=0 keeps the canvas size unchanged.
double snap_trig(double v) {
    if (std::fabs(v) < 1e-12) return 0.0;
    if (std::fabs(v - 1.0) < 1e-12) return 1.0;
    if (std::fabs(v + 1.0) < 1e-12) return -1.0;
    return v;
}

}  // namespace

Image8 rotate_to_north(const Image8& image, double yaw) {
    if (!std::isfinite(yaw)) fail_usage("yaw must be finite");
    double c = snap_trig(std::cos(yaw));
    double s = snap_trig(std::sin(yaw));

    int w = image.width, h = image.height;
    int out_w = int(std::ceil(w * std::fabs(c) + h * std::fabs(s)));
    int out_h = int(std::ceil(w * std::fabs(s) + h * std::fabs(c)));

    Image8 out(out_w, out_h, 0);
    double cx_in = (w - 1) / 2.0, cy_in = (h - 1) / 2.0;
    double cx_out = (out_w - 1) / 2.0, cy_out = (out_h - 1) / 2.0;

    // De-rotation by -yaw: output pixel p' samples the input at R(-yaw) p'
    // relative to the centers, with R(t) = [[cos t, -sin t], [sin t, cos t]]
    // in (x east-ward, y south-ward) axes.
    for (int y = 0; y < out_h; ++y) {
        double ry = y - cy_out;
        for (int x = 0; x < out_w; ++x) {
            double rx = x - cx_out;
            double sx = c * rx + s * ry + cx_in;
            double sy = -s * rx + c * ry + cy_in;
            out.at(x, y) = quantize_intensity(bilinear_zero(image, sx, sy));
        }
    }
    return out;
}

Image8 rescale_to_map(const Image8& image, double altitude_m, double focal_px,
                      double map_px_per_m) {
    if (!(altitude_m > 0)) fail_usage("altitude must be > 0");
    if (!(focal_px > 0)) fail_usage("focal length must be > 0");
    double scale = (altitude_m / focal_px) * map_px_per_m;
    if (!(scale > 0) || !std::isfinite(scale)) fail_usage("rescale factor must be positive and finite");
    int out_w = std::max<int>(1, int(std::lround(image.width * scale)));
    int out_h = std::max<int>(1, int(std::lround(image.height * scale)));
    if (out_w == image.width && out_h == image.height) return image;
    return resize_bilinear(image, out_w, out_h);
}

Image8 center_crop(const Image8& image, int window_px) {
    if (window_px <= 0) fail_usage("window must be positive");
    if (image.width < window_px || image.height < window_px)
        fail_data("image smaller than crop window");
    int x0 = (image.width - window_px) / 2;
    int y0 = (image.height - window_px) / 2;
    return crop(image, x0, y0, window_px, window_px);
}

PreprocessedFrame preprocess_frame(const FrameRecord& frame, const GeoMap& map, int window_px) {
    Image8 north = rotate_to_north(frame.image, frame.yaw);
    Image8 scaled = rescale_to_map(north, frame.altitude, frame.focal_px, map.px_per_m);
    if (scaled.width < window_px || scaled.height < window_px)
        fail_data("frame " + std::to_string(frame.index) +
                  " smaller than matching window after rescale (" +
                  std::to_string(scaled.width) + "x" + std::to_string(scaled.height) + ")");
    PreprocessedFrame out;
    out.image = center_crop(scaled, window_px);
    out.source_index = frame.index;
    out.gsd_m_per_px = 1.0 / map.px_per_m;
    return out;
}

}  // namespace hop
