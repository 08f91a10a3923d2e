#pragma once

#include <cstdint>
#include <vector>

#include "core/descriptor.hpp"
#include "core/geodata.hpp"
#include "core/preprocess.hpp"
#include "core/rng.hpp"

namespace hop {

/// Candidate map window. (x, y) is the window top-left pixel on the
/// search lattice; (hx, hy) the window size; w the normalized weight and
/// d the descriptor distance to the current frame.
struct Particle {
    int x = 0;
    int y = 0;
    int hx = 0;
    int hy = 0;
    double w = 0;
    double d = 0;
};

struct SearchParams {
    int particles = 50;        // N
    int coarse_area = 40;      // s_c
    int coarse_interval = 4;   // delta_c
    int fine_area = 20;        // s_f
    int fine_interval = 1;     // delta_f
    double sigma_w = 0.01;
    double tau_d = 0.75;
    double reinit_dist_px = 80;
    double min_peak = 0.3;     // confidence floor for global (re)initialization

    void validate() const;
};

/// Minimum distance vs sidelobe statistics of a particle set; theta is
/// (d_min - mu) / sigma with the sidelobe excluding particles within
/// 5 px of the minimum position.
struct OutlierStats {
    double d_min = 0;
    double mu = 0;
    double sigma_s = 0;
    double theta = 0;
    bool degenerate = false;
};

/// Lattice candidates covering an area_side x area_side square centered
/// at `center`, spaced `interval` px, clamped to valid window offsets.
/// If the lattice has at most `count` points all of them are returned;
/// otherwise `count` distinct points are sampled without replacement.
std::vector<Particle> draw_particles(const MapPoint& center, int area_side, int interval,
                                     int count, const GeoMap& map, int window_px, Rng& rng);

struct WeighResult {
    double min_d = 0;
    size_t argmin = 0;
    bool flat_likelihood = false;
};

/// Gaussian likelihood of the descriptor distances, normalized to sum
/// to one. If every raw weight underflows to zero the set is flagged and
/// weights fall back to uniform.
WeighResult weigh_particles(std::vector<Particle>& particles, const HogDescriptor& frame_desc,
                            const HogTable& table, double sigma_w);

/// Raw (unnormalized) Gaussian weight of a single distance.
double gaussian_weight(double d, double sigma_w);

/// Weighted mean of the particle positions.
MapPoint estimate_state(const std::vector<Particle>& particles);

OutlierStats compute_psr(const std::vector<Particle>& particles);

struct TrackerState {
    MapPoint prev_top_left;
    bool initialized = false;
};

/// One frame of the localization state machine:
///   predict -> (reinit if the predicted motion is implausible) ->
///   coarse search -> fine search -> fall back to the prediction.
/// Returned position is the window top-left in map pixels.
PositionEstimate track_step(TrackerState& state, const PreprocessedFrame& frame,
                            const HogDescriptor& frame_desc, const HogTable& table,
                            const GeoMap& map, const SearchParams& params,
                            const Vec3& translation_m, double yaw, Rng& coarse_rng,
                            Rng& fine_rng);

enum class RunMode { Hop, HopNoOf, OfOnly };

RunMode run_mode_from_string(const std::string& s);
const char* to_string(RunMode m);

struct MotionParams {
    std::string estimator = "motion_field";  // motion_field | homography
    int max_features = 200;
    double quality = 0.01;
    double min_dist_px = 8;
    int levels = 3;
    int window_px = 21;
    int max_iters = 30;
    double eps = 0.01;
    double residual_max = 25.0;
    int min_matches = 6;
    double ransac_thresh_px = 2.0;
    int ransac_iters = 300;
    double flow_noise_px = 0;  // per-feature jitter sigma
    double flow_bias_px = 0;   // per-run constant bias sigma
};

struct PipelineOptions {
    SearchParams search;
    MotionParams motion;
    RunMode mode = RunMode::Hop;
    uint64_t seed = 1;
    /// When set, confidence maps of global (re)initializations are kept.
    std::vector<std::pair<int, Image8>>* confidence_dumps = nullptr;
};

/// Full per-dataset loop: global initialization on the first confident
/// frame, then optical-flow prediction plus coarse-to-fine registration
/// (mode hop), registration without prediction (hop_no_of), or pure
/// dead reckoning (of_only). Trajectory positions are reported window
/// centers.
Trajectory run_pipeline(const std::vector<FrameRecord>& dataset, const GeoMap& map,
                        const HogTable& table, const PipelineOptions& options);

}  // namespace hop
