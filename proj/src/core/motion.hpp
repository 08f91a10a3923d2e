#pragma once

#include <cstdint>
#include <vector>

#include "core/geodata.hpp"
#include "core/image.hpp"
#include "core/matrix.hpp"

namespace hop {

/// Sparse feature correspondences between two consecutive frames.
/// Flow in px/frame is (p_curr - p_prev); frame_dt scales rate inputs.
struct FlowField {
    struct Match {
        Vec2 p_prev;
        Vec2 p_curr;
    };
    std::vector<Match> matches;
    double frame_dt = 1.0;
};

struct LkParams {
    int levels = 3;
    int window_px = 21;
    int max_iters = 30;
    double eps = 0.01;          // px, per-iteration step threshold
    double residual_max = 25;   // mean |I_prev - I_curr| gate for keeping a track
};

/// Homography plus the sensor-side quantities entering T = h (H - R) N.
struct HomographyEstimate {
    Mat3 H = Mat3::identity();  // normalized so H(2,2) = 1
    Mat3 R = Mat3::identity();  // inter-frame rotation from avionics deltas
    Vec3 N{0, 0, 1};            // ground-plane normal, unit
    double h = 1;               // altitude in meters
    int inlier_count = 0;
};

/// Shi-Tomasi corners: minimum eigenvalue of the structure tensor,
/// thresholded at quality * global max, greedy non-maximum suppression at
/// min_dist_px, strongest first, at most max_count points.
std::vector<Vec2> select_features(const Image8& image, int max_count, double quality,
                                  double min_dist_px);

/// Iterative pyramidal Lucas-Kanade. Points that leave the frame, sit on
/// degenerate texture, or end with a high photometric residual are dropped.
FlowField track_flow(const Image8& prev_image, const Image8& curr_image,
                     const std::vector<Vec2>& points, const LkParams& params,
                     double frame_dt = 1.0);

/// Least-squares translation from the motion-field equations: for a point
/// at (x, y) relative to the principal point, with flow (vx, vy) in
/// px/frame and rotation rate omega (rad/s, scaled by frame_dt inside),
///   (vx - bx) Z = Tz x - Tx f
///   (vy - by) Z = Tz y - Ty f
/// where (bx, by) is the rotational field. Robustified with three rounds
/// of 2-sigma residual trimming. Returns T in meters per frame interval.
Vec3 solve_translation_motion_field(const FlowField& flow, const Vec3& omega_rad_s,
                                    double depth_m, double focal_px,
                                    const Vec2& principal_point = Vec2(0, 0));

/// Normalized DLT inside RANSAC; H maps p_prev to p_curr, scaled so
/// H(2,2) = 1. Deterministic for fixed inputs and seed.
struct HomographyFit {
    Mat3 H;
    int inlier_count = 0;
};
HomographyFit estimate_homography(const FlowField& flow, double ransac_thresh_px,
                                  int max_iters, uint64_t seed = 0x9E3779B97F4A7C15ULL);

/// T = h (H - R) N, meters in the camera frame.
Vec3 decompose_translation(const HomographyEstimate& est);

/// Advance a window top-left position by a camera-frame translation
/// rotated into the map frame by yaw; clamped to the valid window lattice.
MapPoint predict_position(const MapPoint& prev, const Vec3& translation_m, double yaw,
                          const GeoMap& map, int window_px);

}  // namespace hop
