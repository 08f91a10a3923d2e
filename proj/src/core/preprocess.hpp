#pragma once

#include "core/geodata.hpp"
#include "core/image.hpp"

namespace hop {

/// Onboard frame brought to map orientation and scale, cropped to the
/// matching window.
struct PreprocessedFrame {
    Image8 image;            // window_px x window_px
    int source_index = 0;
    double gsd_m_per_px = 0; // ground sampling distance after rescale
};

/// Rotate the frame about its center by -yaw so image "up" points at map
/// north. Canvas grows to hold the rotated footprint; uncovered pixels
/// are zero.
Image8 rotate_to_north(const Image8& image, double yaw);

/// Resample so one output pixel spans 1/map_px_per_m meters, assuming a
/// flat ground plane seen by a nadir pinhole camera (GSD before rescale
/// is altitude/focal_px).
Image8 rescale_to_map(const Image8& image, double altitude_m, double focal_px,
                      double map_px_per_m);

/// Centered window; floor convention when sizes differ in parity.
Image8 center_crop(const Image8& image, int window_px);

/// rotate -> rescale -> crop in that order.
PreprocessedFrame preprocess_frame(const FrameRecord& frame, const GeoMap& map, int window_px);

}  // namespace hop
