#include "core/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "core/error.hpp"
#include "core/image_io.hpp"
#include "core/preprocess.hpp"
#include "core/rng.hpp"

namespace fs = std::filesystem;

namespace hop {

HogParams hog_params_from_config(const Config& cfg) {
    HogParams p;
    p.cell = int(cfg.get_int("hog.cell"));
    p.block = int(cfg.get_int("hog.block"));
    p.block_stride = int(cfg.get_int("hog.block_stride"));
    p.bins = int(cfg.get_int("hog.bins"));
    p.window = int(cfg.get_int("hog.window"));
    p.validate();
    return p;
}

SearchParams search_params_from_config(const Config& cfg) {
    SearchParams s;
    s.particles = int(cfg.get_int("search.particles"));
    s.coarse_area = int(cfg.get_int("search.coarse_area"));
    s.coarse_interval = int(cfg.get_int("search.coarse_interval"));
    s.fine_area = int(cfg.get_int("search.fine_area"));
    s.fine_interval = int(cfg.get_int("search.fine_interval"));
    s.sigma_w = cfg.get_double("search.sigma_w");
    s.tau_d = cfg.get_double("search.tau_d");
    s.reinit_dist_px = cfg.get_double("search.reinit_dist_px");
    s.min_peak = cfg.get_double("global.min_peak");
    s.validate();
    return s;
}

MotionParams motion_params_from_config(const Config& cfg) {
    MotionParams m;
    m.estimator = cfg.get_string("motion.estimator");
    if (m.estimator != "motion_field" && m.estimator != "homography")
        fail_usage("motion.estimator must be motion_field or homography");
    m.max_features = int(cfg.get_int("motion.max_features"));
    m.quality = cfg.get_double("motion.quality");
    m.min_dist_px = cfg.get_double("motion.min_dist_px");
    m.levels = int(cfg.get_int("motion.levels"));
    m.window_px = int(cfg.get_int("motion.window_px"));
    m.max_iters = int(cfg.get_int("motion.max_iters"));
    m.eps = cfg.get_double("motion.eps");
    m.residual_max = cfg.get_double("motion.residual_max");
    m.min_matches = int(cfg.get_int("motion.min_matches"));
    m.ransac_thresh_px = cfg.get_double("motion.ransac_thresh_px");
    m.ransac_iters = int(cfg.get_int("motion.ransac_iters"));
    m.flow_noise_px = cfg.get_double("motion.flow_noise_px");
    m.flow_bias_px = cfg.get_double("motion.flow_bias_px");
    return m;
}

size_t run_simulate(const GeoMap& map, const Config& cfg, const std::string& out_dir) {
    SimConfig sim = SimConfig::from_config(cfg);
    return emit_dataset(sim, map, out_dir);
}

HogTable run_build_table(const GeoMap& map, const Config& cfg) {
    HogParams params = hog_params_from_config(cfg);
    int stride = int(cfg.get_int("table.lattice_stride"));
    validate_map(map, params.window / 2);
    return build_table(map, params, stride);
}

RunSummary run_localize(const GeoMap& map, const HogTable& table,
                        const std::string& dataset_dir, const Config& cfg,
                        const std::string& out_dir) {
    validate_map(map, table.params().window);  // needs room for several windows
    auto dataset = load_dataset(dataset_dir);
    if (dataset.empty()) fail_data("dataset is empty: " + dataset_dir);

    PipelineOptions opt;
    opt.search = search_params_from_config(cfg);
    opt.motion = motion_params_from_config(cfg);
    opt.mode = run_mode_from_string(cfg.get_string("run.mode"));
    opt.seed = cfg.get_u64("run.seed");

    std::vector<std::pair<int, Image8>> dumps;
    if (cfg.get_bool("run.emit_confidence_maps")) opt.confidence_dumps = &dumps;

    fs::create_directories(out_dir);
    auto t0 = std::chrono::steady_clock::now();
    Trajectory traj = run_pipeline(dataset, map, table, opt);
    auto t1 = std::chrono::steady_clock::now();

    write_trajectory(traj, map, (fs::path(out_dir) / "trajectory.csv").string());
    for (const auto& [index, img] : dumps) {
        char name[40];
        std::snprintf(name, sizeof(name), "confidence_%06d.pgm", index);
        write_pgm((fs::path(out_dir) / name).string(), img);
    }

    RunSummary s;
    s.frames = traj.entries.size();
    for (const auto& e : traj.entries) {
        switch (e.estimate.source) {
            case EstimateSource::Registered: s.registered_fraction += 1; break;
            case EstimateSource::Predicted: s.predicted_fraction += 1; break;
            case EstimateSource::Reinit: s.reinit_count += 1; break;
        }
    }
    if (s.frames) {
        s.registered_fraction /= double(s.frames);
        s.predicted_fraction /= double(s.frames);
    }
    s.wall_s = std::chrono::duration<double>(t1 - t0).count();
    s.hz = s.wall_s > 0 ? double(dataset.size()) / s.wall_s : 0;
    write_run_metrics(s, (fs::path(out_dir) / "metrics.json").string());
    return s;
}

void write_run_metrics(const RunSummary& s, const std::string& path) {
    nlohmann::ordered_json j;
    j["frames"] = s.frames;
    j["registered_fraction"] = s.registered_fraction;
    j["predicted_fraction"] = s.predicted_fraction;
    j["reinit_count"] = s.reinit_count;
    j["wall_s"] = s.wall_s;
    j["hz"] = s.hz;
    std::ofstream out(path);
    if (!out) fail_data("cannot write metrics: " + path);
    out << j.dump(2) << '\n';
}

EvalResult run_evaluate(const std::string& trajectory_csv, const std::string& groundtruth_csv,
                        const std::string& run_metrics_json, const std::string& out_dir) {
    EvalResult r = evaluate_files(trajectory_csv, groundtruth_csv);

    double wall_s = 0, hz = 0;
    if (!run_metrics_json.empty()) {
        std::ifstream in(run_metrics_json);
        if (!in) fail_data("cannot open run metrics: " + run_metrics_json);
        nlohmann::json j;
        in >> j;
        wall_s = j.value("wall_s", 0.0);
        hz = j.value("hz", 0.0);
    }

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        nlohmann::ordered_json j;
        j["rmse_m"] = r.rmse_m;
        j["registered_fraction"] = r.registered_fraction;
        j["predicted_fraction"] = r.predicted_fraction;
        j["reinit_count"] = r.reinit_count;
        j["frames"] = r.frames;
        j["wall_s"] = wall_s;
        j["hz"] = hz;
        j["mean_err_m"] = r.mean_err_m;
        j["max_err_m"] = r.max_err_m;
        j["registered_rmse_m"] = r.registered_rmse_m;
        j["fallback_rmse_m"] = r.fallback_rmse_m;
        std::ofstream out(fs::path(out_dir) / "metrics.json");
        if (!out) fail_data("cannot write metrics.json in " + out_dir);
        out << j.dump(2) << '\n';
        write_errors_csv(r, (fs::path(out_dir) / "errors.csv").string());
    }
    return r;
}

CalibrationReport run_calibrate(const GeoMap& map, const HogTable& table,
                                const std::string& dataset_dir,
                                const std::string& groundtruth_csv, const Config& cfg,
                                const std::string& out_dir) {
    auto dataset = load_dataset(dataset_dir);
    GroundTruth gt = read_groundtruth(groundtruth_csv);
    if (dataset.size() > gt.poses.size()) fail_data("ground truth shorter than dataset");
    const HogParams& params = table.params();
    const double half = params.window / 2.0;
    uint64_t seed = cfg.get_u64("run.seed");

    std::vector<double> match_d, nonmatch_d;
    for (size_t k = 0; k < dataset.size(); ++k) {
        const FrameRecord& rec = dataset[k];
        PreprocessedFrame frame = preprocess_frame(rec, map, params.window);
        HogDescriptor desc = compute_hog(frame.image, params);
        const auto& pose = gt.poses[size_t(rec.index)];
        double tlx = std::clamp(meters_to_px(pose.x_m, map) - half, 0.0,
                                double(map.width() - params.window));
        double tly = std::clamp(meters_to_px(pose.y_m, map) - half, 0.0,
                                double(map.height() - params.window));
        match_d.push_back(hog_distance(desc, table.lookup(tlx, tly)));

        Rng rng = derive_rng(seed, 0xCA1B, k);
        for (int probe = 0; probe < 8; ++probe) {
            double rx, ry;
            do {
                rx = rng.uniform() * (map.width() - params.window);
                ry = rng.uniform() * (map.height() - params.window);
            } while (std::hypot(rx - tlx, ry - tly) < 50.0);
            nonmatch_d.push_back(hog_distance(desc, table.lookup(rx, ry)));
        }
    }
    std::sort(match_d.begin(), match_d.end());
    std::sort(nonmatch_d.begin(), nonmatch_d.end());
    auto quantile = [](const std::vector<double>& v, double q) {
        if (v.empty()) return 0.0;
        double idx = q * double(v.size() - 1);
        size_t lo = size_t(idx);
        size_t hi = std::min(lo + 1, v.size() - 1);
        double f = idx - double(lo);
        return v[lo] * (1 - f) + v[hi] * f;
    };

    CalibrationReport rep;
    rep.frames = dataset.size();
    rep.match_median = quantile(match_d, 0.5);
    rep.match_p99 = quantile(match_d, 0.99);
    rep.nonmatch_median = quantile(nonmatch_d, 0.5);
    rep.nonmatch_p01 = quantile(nonmatch_d, 0.01);
    rep.suggested_tau_d = 0.5 * (rep.match_p99 + rep.nonmatch_p01);

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream csv(fs::path(out_dir) / "calibration.csv");
        if (!csv) fail_data("cannot write calibration.csv");
        csv << "kind,distance\n";
        char buf[64];
        for (double d : match_d) {
            std::snprintf(buf, sizeof(buf), "match,%.6f\n", d);
            csv << buf;
        }
        for (double d : nonmatch_d) {
            std::snprintf(buf, sizeof(buf), "nonmatch,%.6f\n", d);
            csv << buf;
        }
        nlohmann::ordered_json j;
        j["frames"] = rep.frames;
        j["match_median"] = rep.match_median;
        j["match_p99"] = rep.match_p99;
        j["nonmatch_median"] = rep.nonmatch_median;
        j["nonmatch_p01"] = rep.nonmatch_p01;
        j["suggested_tau_d"] = rep.suggested_tau_d;
        std::ofstream out(fs::path(out_dir) / "calibration.json");
        out << j.dump(2) << '\n';
    }
    return rep;
}

}  // namespace hop
