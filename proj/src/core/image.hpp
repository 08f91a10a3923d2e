#pragma once

#include <cstdint>
#include <vector>

namespace hop {

/// 8-bit grayscale raster, row-major, origin at top-left.
struct Image8 {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> px;

    Image8() = default;
    Image8(int w, int h, uint8_t fill = 0)
        : width(w), height(h), px(size_t(w) * h, fill) {}

    uint8_t at(int x, int y) const { return px[size_t(y) * width + x]; }
    uint8_t& at(int x, int y) { return px[size_t(y) * width + x]; }
    bool empty() const { return width == 0 || height == 0; }
};

/// Single-precision raster for pyramids and gradients.
struct ImageF {
    int width = 0;
    int height = 0;
    std::vector<float> px;

    ImageF() = default;
    ImageF(int w, int h, float fill = 0.f)
        : width(w), height(h), px(size_t(w) * h, fill) {}

    float at(int x, int y) const { return px[size_t(y) * width + x]; }
    float& at(int x, int y) { return px[size_t(y) * width + x]; }
};

ImageF to_float(const Image8& img);

/// Bilinear sample with replicate border. (x, y) in pixel coordinates.
double bilinear_clamped(const Image8& img, double x, double y);
double bilinear_clamped(const ImageF& img, double x, double y);

/// Bilinear sample where out-of-bounds taps contribute 0.
double bilinear_zero(const Image8& img, double x, double y);

uint8_t quantize_intensity(double v);

/// Resample to (out_w, out_h) with bilinear interpolation, replicate border.
Image8 resize_bilinear(const Image8& img, int out_w, int out_h);

Image8 crop(const Image8& img, int x0, int y0, int w, int h);

}  // namespace hop
