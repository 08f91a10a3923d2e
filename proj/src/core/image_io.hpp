#pragma once

#include <string>
#include <vector>

#include "core/image.hpp"

namespace hop {

/// Decode a PNG file to 8-bit grayscale. Color inputs are converted with
/// BT.601 luma weights; palette and alpha are expanded/stripped.
Image8 read_png_gray(const std::string& path);

/// Write an 8-bit grayscale PNG.
void write_png_gray(const std::string& path, const Image8& img);

/// Binary (P5) PGM writer, used for confidence-map dumps.
void write_pgm(const std::string& path, const Image8& img);

/// Normalize an arbitrary score field to 0..255 for visualization.
Image8 scores_to_image(const std::vector<double>& scores, int w, int h);

}  // namespace hop
