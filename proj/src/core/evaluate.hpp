#pragma once

#include <string>
#include <vector>

#include "core/geodata.hpp"

namespace hop {

struct EvalResult {
    size_t frames = 0;
    double rmse_m = 0;
    double mean_err_m = 0;
    double max_err_m = 0;
    double registered_fraction = 0;
    double predicted_fraction = 0;
    size_t reinit_count = 0;
    double registered_rmse_m = 0;   // rmse over registered rows (0 if none)
    double fallback_rmse_m = 0;     // rmse over predicted/reinit rows (0 if none)
    struct FrameError {
        int frame_index;
        double err_m;
        EstimateSource source;
    };
    std::vector<FrameError> series;
};

/// Position error of a trajectory CSV against a ground-truth CSV, joined
/// on frame index (meter columns compared directly). Every trajectory
/// frame must exist in the ground truth.
EvalResult evaluate_files(const std::string& trajectory_csv, const std::string& groundtruth_csv);

void write_errors_csv(const EvalResult& result, const std::string& path);

}  // namespace hop
