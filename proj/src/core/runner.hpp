#pragma once

#include <string>

#include "core/config.hpp"
#include "core/descriptor.hpp"
#include "core/evaluate.hpp"
#include "core/geodata.hpp"
#include "core/simulator.hpp"
#include "core/tracker.hpp"

namespace hop {

HogParams hog_params_from_config(const Config& cfg);
SearchParams search_params_from_config(const Config& cfg);
MotionParams motion_params_from_config(const Config& cfg);

struct RunSummary {
    size_t frames = 0;
    double registered_fraction = 0;
    double predicted_fraction = 0;
    size_t reinit_count = 0;
    double wall_s = 0;
    double hz = 0;
};

/// Generate a dataset per the sim.* keys. Returns the frame count.
size_t run_simulate(const GeoMap& map, const Config& cfg, const std::string& out_dir);

/// Build the descriptor table per the hog.*/table.* keys.
HogTable run_build_table(const GeoMap& map, const Config& cfg);

/// Localize a dataset; writes trajectory.csv and metrics.json into
/// out_dir (plus confidence_*.pgm when run.emit_confidence_maps is set).
RunSummary run_localize(const GeoMap& map, const HogTable& table,
                        const std::string& dataset_dir, const Config& cfg,
                        const std::string& out_dir);

/// Compare a trajectory with ground truth; writes metrics.json and
/// errors.csv into out_dir if non-empty. run_metrics_json, when given,
/// contributes the wall_s/hz fields of the final metrics file.
EvalResult run_evaluate(const std::string& trajectory_csv, const std::string& groundtruth_csv,
                        const std::string& run_metrics_json, const std::string& out_dir);

struct CalibrationReport {
    size_t frames = 0;
    double match_median = 0;
    double match_p99 = 0;
    double nonmatch_median = 0;
    double nonmatch_p01 = 0;
    double suggested_tau_d = 0;
};

/// Distance histograms of in-register vs displaced windows over a dataset
/// with ground truth; suggests a rejection threshold between the two
/// populations. Writes calibration.csv and calibration.json into out_dir.
CalibrationReport run_calibrate(const GeoMap& map, const HogTable& table,
                                const std::string& dataset_dir,
                                const std::string& groundtruth_csv, const Config& cfg,
                                const std::string& out_dir);

void write_run_metrics(const RunSummary& s, const std::string& path);

}  // namespace hop
