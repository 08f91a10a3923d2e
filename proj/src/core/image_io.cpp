#include "core/image_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include "core/error.hpp"

namespace hop {

namespace {

struct FileCloser {
    void operator()(FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

}  // namespace

Image8 read_png_gray(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail_data("cannot open image: " + path);

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
        fail_data("not a PNG file: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail_data("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail_data("libpng init failed");
    }
    std::vector<png_bytep> row_ptrs;
    Image8 img;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail_data("PNG decode error: " + path);
    }
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int color = png_get_color_type(png, info);
    int depth = png_get_bit_depth(png, info);

    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    int channels = png_get_channels(png, info);
    std::vector<uint8_t> raw(size_t(w) * h * channels);
    row_ptrs.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) row_ptrs[y] = &raw[size_t(y) * w * channels];
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    img = Image8(int(w), int(h));
    if (channels == 1) {
        img.px.assign(raw.begin(), raw.end());
    } else if (channels == 3) {
        for (size_t i = 0, n = size_t(w) * h; i < n; ++i) {
            double y601 = 0.299 * raw[i * 3] + 0.587 * raw[i * 3 + 1] + 0.114 * raw[i * 3 + 2];
            img.px[i] = quantize_intensity(y601);
        }
    } else {
        fail_data("unsupported PNG channel count in " + path);
    }
    return img;
}

void write_png_gray(const std::string& path, const Image8& img) {
    if (img.empty()) fail_usage("refusing to write empty image");
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) fail_data("cannot write image: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail_data("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail_data("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail_data("PNG encode error: " + path);
    }
    png_init_io(png, fp.get());
    // fixed settings keep outputs byte-reproducible run to run
    png_set_compression_level(png, 6);
    png_set_filter(png, 0, PNG_FILTER_SUB);
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < img.height; ++y)
        png_write_row(png, const_cast<png_bytep>(&img.px[size_t(y) * img.width]));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void write_pgm(const std::string& path, const Image8& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_data("cannot write PGM: " + path);
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.px.data()), std::streamsize(img.px.size()));
    if (!out) fail_data("short write: " + path);
}

Image8 scores_to_image(const std::vector<double>& scores, int w, int h) {
    Image8 img(w, h);
    double lo = scores.empty() ? 0 : scores[0];
    double hi = lo;
    for (double s : scores) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    double span = hi - lo;
    for (size_t i = 0; i < scores.size(); ++i)
        img.px[i] = span > 0 ? quantize_intensity(255.0 * (scores[i] - lo) / span) : 0;
    return img;
}

}  // namespace hop
