#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/geodata.hpp"

namespace hop {

/// Synthetic flight description. Distances are meters in the map frame
/// (same axes as map pixels / px_per_m).
struct SimConfig {
    enum class Path { Lawnmower, Waypoints };
    enum class YawMode { PathTangent, Fixed };

    Path path = Path::Lawnmower;
    int lawnmower_rows = 3;
    double lawnmower_spacing_m = 12;
    std::vector<std::pair<double, double>> waypoints_m;

    double speed_m_s = 2.0;
    double frame_rate_hz = 5.0;
    double altitude_m = 80;
    double focal_px = 400;
    int frame_size = 416;
    double duration_s = 0;  // 0 = fly the whole path

    YawMode yaw_mode = YawMode::PathTangent;
    double fixed_yaw_rad = 0;

    double gamma_lo = 1, gamma_hi = 1;
    double brightness_lo = 0, brightness_hi = 0;
    double noise_sigma = 0;

    int patch_count = 0;
    int patch_size_px = 40;

    double yaw_sigma_rad = 0;
    double altitude_sigma_m = 0;
    double omega_sigma = 0;

    int segment_start = -1, segment_end = -1;
    double segment_gamma = 1, segment_brightness = 0;

    int jump_frame = -1;
    double jump_dx_m = 0, jump_dy_m = 0;

    uint64_t seed = 1;

    static SimConfig from_config(const Config& cfg);
    void validate() const;
};

struct GroundTruth {
    struct Pose {
        double x_m = 0;   // true UAV position (window center), map meters
        double y_m = 0;
        double yaw = 0;
        double altitude = 0;
    };
    std::vector<Pose> poses;
};

/// Map-pixel margin a pose must keep from the borders so the rendered
/// camera footprint stays inside the raster at any heading.
int render_margin_px(const SimConfig& cfg, const GeoMap& map);

GroundTruth generate_trajectory(const SimConfig& cfg, const GeoMap& map);

FrameRecord render_frame(const GeoMap& map, const GroundTruth::Pose& pose,
                         const SimConfig& cfg, int frame_index);

/// Write the dataset (frame_%06d.png + metadata.jsonl) and
/// groundtruth.csv. Fully reproducible from cfg.seed.
size_t emit_dataset(const SimConfig& cfg, const GeoMap& map, const std::string& out_dir);

GroundTruth read_groundtruth(const std::string& path);
void write_groundtruth(const GroundTruth& gt, const std::string& path);

/// Multi-octave value noise plus rectangles and road-like strokes; a
/// gradient-rich stand-in for a real reference map.
GeoMap synth_map(int width, int height, double px_per_m, uint64_t seed);

}  // namespace hop
