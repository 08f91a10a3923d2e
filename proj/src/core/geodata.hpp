#pragma once

#include <string>
#include <vector>

#include "core/image.hpp"
#include "core/matrix.hpp"

namespace hop {

/// Position in the reference-map pixel frame: origin at the top-left
/// corner, x grows east (columns), y grows south (rows). Real-valued;
/// rounding to the raster happens only where a window is extracted.
struct MapPoint {
    double x = 0;
    double y = 0;
    MapPoint() = default;
    MapPoint(double x_, double y_) : x(x_), y(y_) {}
};

/// Reference raster with a metric scale. The fixed frame for every
/// position estimate the toolkit produces.
struct GeoMap {
    Image8 raster;
    double px_per_m = 0;
    std::string origin_label;

    int width() const { return raster.width; }
    int height() const { return raster.height; }
};

/// One onboard frame plus the avionics samples logged with it.
struct FrameRecord {
    Image8 image;
    int index = 0;
    double t = 0;            // seconds
    double yaw = 0;          // radians, heading clockwise from map north
    double roll = 0;         // radians
    double pitch = 0;        // radians
    Vec3 omega;              // angular rate, rad/s
    double altitude = 0;     // meters above ground
    double focal_px = 0;     // focal length in pixels
};

enum class EstimateSource { Registered, Predicted, Reinit };

const char* to_string(EstimateSource s);
EstimateSource source_from_string(const std::string& s);

/// Per-frame output of the localization pipeline. `position` is in map
/// pixels; trajectory rows store the reported UAV position (window
/// center), while the tracker works internally on window top-left corners.
struct PositionEstimate {
    MapPoint position;
    EstimateSource source = EstimateSource::Predicted;
    double min_distance = 0;  // best descriptor distance of the frame (nan if none)
    double psr = 0;           // peak-to-sidelobe ratio of the particle set (nan if none)
};

struct Trajectory {
    struct Entry {
        int frame_index = 0;
        PositionEstimate estimate;
    };
    std::vector<Entry> entries;
};

GeoMap load_map(const std::string& image_path, const std::string& meta_path);

/// Validate an already-assembled map (used by the simulator as well).
void validate_map(const GeoMap& map, int min_window);

std::vector<FrameRecord> load_dataset(const std::string& dir_path);

double meters_to_px(double d_m, const GeoMap& map);
double px_to_meters(double d_px, const GeoMap& map);

void write_trajectory(const Trajectory& traj, const GeoMap& map, const std::string& path);
Trajectory read_trajectory(const std::string& path);

}  // namespace hop
