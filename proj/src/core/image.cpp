#include "core/image.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace hop {

ImageF to_float(const Image8& img) {
    ImageF out(img.width, img.height);
    for (size_t i = 0; i < img.px.size(); ++i) out.px[i] = float(img.px[i]);
    return out;
}

namespace {

template <typename Img>
double bilinear_clamped_impl(const Img& img, double x, double y) {
    if (x < 0) x = 0;
    if (y < 0) y = 0;
    if (x > img.width - 1) x = img.width - 1;
    if (y > img.height - 1) y = img.height - 1;
    int x0 = int(x);
    int y0 = int(y);
    int x1 = std::min(x0 + 1, img.width - 1);
    int y1 = std::min(y0 + 1, img.height - 1);
    double fx = x - x0, fy = y - y0;
    double v00 = img.at(x0, y0), v10 = img.at(x1, y0);
    double v01 = img.at(x0, y1), v11 = img.at(x1, y1);
    return (1 - fy) * ((1 - fx) * v00 + fx * v10) + fy * ((1 - fx) * v01 + fx * v11);
}

}  // namespace

double bilinear_clamped(const Image8& img, double x, double y) {
    return bilinear_clamped_impl(img, x, y);
}

double bilinear_clamped(const ImageF& img, double x, double y) {
    return bilinear_clamped_impl(img, x, y);
}

double bilinear_zero(const Image8& img, double x, double y) {
    int x0 = int(std::floor(x));
    int y0 = int(std::floor(y));
    double fx = x - x0, fy = y - y0;
    auto tap = [&](int xi, int yi) -> double {
        if (xi < 0 || yi < 0 || xi >= img.width || yi >= img.height) return 0.0;
        return img.at(xi, yi);
    };
    return (1 - fy) * ((1 - fx) * tap(x0, y0) + fx * tap(x0 + 1, y0)) +
           fy * ((1 - fx) * tap(x0, y0 + 1) + fx * tap(x0 + 1, y0 + 1));
}

uint8_t quantize_intensity(double v) {
    long r = std::lround(v);
    if (r < 0) r = 0;
    if (r > 255) r = 255;
    return uint8_t(r);
}

Image8 resize_bilinear(const Image8& img, int out_w, int out_h) {
    if (out_w <= 0 || out_h <= 0) fail_usage("resize target must be positive");
    Image8 out(out_w, out_h);
    double sx = double(img.width) / out_w;
    double sy = double(img.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
        double srcy = (y + 0.5) * sy - 0.5;
        for (int x = 0; x < out_w; ++x) {
            double srcx = (x + 0.5) * sx - 0.5;
            out.at(x, y) = quantize_intensity(bilinear_clamped(img, srcx, srcy));
        }
    }
    return out;
}

Image8 crop(const Image8& img, int x0, int y0, int w, int h) {
    if (x0 < 0 || y0 < 0 || x0 + w > img.width || y0 + h > img.height)
        fail_usage("crop window out of bounds");
    Image8 out(w, h);
    for (int y = 0; y < h; ++y)
        std::copy_n(&img.px[size_t(y0 + y) * img.width + x0], w,
                    &out.px[size_t(y) * w]);
    return out;
}

}  // namespace hop
