#include "core/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"
#include "core/globalinit.hpp"
#include "core/image_io.hpp"
#include "core/motion.hpp"

namespace hop {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kPsrExclusionRadiusPx = 5.0;
}

void SearchParams::validate() const {
    if (particles < 1) fail_usage("particle count must be >= 1");
    if (coarse_area <= 0 || fine_area <= 0 || coarse_interval <= 0 || fine_interval <= 0)
        fail_usage("search areas and intervals must be positive");
    if (fine_area > coarse_area) fail_usage("fine area must not exceed coarse area");
    if (fine_interval > coarse_interval) fail_usage("fine interval must not exceed coarse interval");
    if (!(sigma_w > 0)) fail_usage("sigma_w must be positive");
    if (!(reinit_dist_px > 0)) fail_usage("reinit distance must be positive");
}

RunMode run_mode_from_string(const std::string& s) {
    if (s == "hop") return RunMode::Hop;
    if (s == "hop_no_of") return RunMode::HopNoOf;
    if (s == "of_only") return RunMode::OfOnly;
    fail_usage("unknown mode: " + s + " (expected hop | hop_no_of | of_only)");
}

const char* to_string(RunMode m) {
    switch (m) {
        case RunMode::Hop: return "hop";
        case RunMode::HopNoOf: return "hop_no_of";
        case RunMode::OfOnly: return "of_only";
    }
    return "?";
}

std::vector<Particle> draw_particles(const MapPoint& center, int area_side, int interval,
                                     int count, const GeoMap& map, int window_px, Rng& rng) {
    if (area_side < interval) fail_usage("search area smaller than its interval");
    if (count < 1) fail_usage("particle count must be >= 1");

    const int max_x = map.width() - window_px;
    const int max_y = map.height() - window_px;
    if (max_x < 0 || max_y < 0) fail_usage("window larger than map");

    const int cx = int(std::lround(center.x));
    const int cy = int(std::lround(center.y));
    const int m = area_side / (2 * interval);

    std::vector<std::pair<int, int>> lattice;
    lattice.reserve(size_t(2 * m + 1) * (2 * m + 1));
    for (int j = -m; j <= m; ++j)
        for (int i = -m; i <= m; ++i) {
            int x = std::clamp(cx + i * interval, 0, max_x);
            int y = std::clamp(cy + j * interval, 0, max_y);
            lattice.emplace_back(x, y);
        }
    std::sort(lattice.begin(), lattice.end(),
              [](const auto& a, const auto& b) {
                  return a.second != b.second ? a.second < b.second : a.first < b.first;
              });
    lattice.erase(std::unique(lattice.begin(), lattice.end()), lattice.end());

    // sample without replacement only when the lattice is larger than N
    if (int(lattice.size()) > count) {
        for (int i = 0; i < count; ++i) {
            size_t j = i + rng.uniform_u64(lattice.size() - i);
            std::swap(lattice[i], lattice[j]);
        }
        lattice.resize(count);
        std::sort(lattice.begin(), lattice.end(),
                  [](const auto& a, const auto& b) {
                      return a.second != b.second ? a.second < b.second : a.first < b.first;
                  });
    }

    std::vector<Particle> particles(lattice.size());
    for (size_t i = 0; i < lattice.size(); ++i) {
        particles[i].x = lattice[i].first;
        particles[i].y = lattice[i].second;
        particles[i].hx = window_px;
        particles[i].hy = window_px;
        particles[i].w = 1.0 / double(lattice.size());
    }
    return particles;
}

double gaussian_weight(double d, double sigma_w) {
    return std::exp(-d * d / (2.0 * sigma_w * sigma_w)) /
           std::sqrt(2.0 * 3.14159265358979323846 * sigma_w * sigma_w);
}

WeighResult weigh_particles(std::vector<Particle>& particles, const HogDescriptor& frame_desc,
                            const HogTable& table, double sigma_w) {
    if (particles.empty()) fail_usage("cannot weigh an empty particle set");
    WeighResult res;
    res.min_d = std::numeric_limits<double>::infinity();

    HogDescriptor window_desc;
    double wsum = 0;
    for (size_t i = 0; i < particles.size(); ++i) {
        Particle& p = particles[i];
        const float* entry = table.lookup_ptr(p.x, p.y);
        window_desc.values.assign(entry, entry + table.params().descriptor_len());
        p.d = hog_distance(frame_desc, window_desc);
        p.w = gaussian_weight(p.d, sigma_w);
        wsum += p.w;
        if (p.d < res.min_d) {
            res.min_d = p.d;
            res.argmin = i;
        }
    }
    if (wsum <= 0) {
        res.flat_likelihood = true;
        double u = 1.0 / double(particles.size());
        for (Particle& p : particles) p.w = u;
    } else {
        for (Particle& p : particles) p.w /= wsum;
    }
    return res;
}

MapPoint estimate_state(const std::vector<Particle>& particles) {
    MapPoint mean(0, 0);
    for (const Particle& p : particles) {
        mean.x += p.w * p.x;
        mean.y += p.w * p.y;
    }
    return mean;
}

OutlierStats compute_psr(const std::vector<Particle>& particles) {
    OutlierStats s;
    if (particles.empty()) {
        s.degenerate = true;
        s.theta = kNan;
        return s;
    }
    size_t arg = 0;
    for (size_t i = 1; i < particles.size(); ++i)
        if (particles[i].d < particles[arg].d) arg = i;
    s.d_min = particles[arg].d;

    double sum = 0, sum2 = 0;
    int n = 0;
    for (const Particle& p : particles) {
        double dx = p.x - particles[arg].x;
        double dy = p.y - particles[arg].y;
        if (std::sqrt(dx * dx + dy * dy) <= kPsrExclusionRadiusPx) continue;
        sum += p.d;
        sum2 += p.d * p.d;
        ++n;
    }
    if (n < 2) {
        s.degenerate = true;
        s.theta = kNan;
        return s;
    }
    s.mu = sum / n;
    double var = sum2 / n - s.mu * s.mu;
    s.sigma_s = var > 0 ? std::sqrt(var) : 0.0;
    if (s.sigma_s <= 0) {
        s.degenerate = true;
        s.theta = kNan;
        return s;
    }
    s.theta = (s.d_min - s.mu) / s.sigma_s;
    return s;
}

PositionEstimate track_step(TrackerState& state, const PreprocessedFrame& frame,
                            const HogDescriptor& frame_desc, const HogTable& table,
                            const GeoMap& map, const SearchParams& params,
                            const Vec3& translation_m, double yaw, Rng& coarse_rng,
                            Rng& fine_rng) {
    params.validate();
    if (!state.initialized) fail_usage("track_step before initialization");
    const int window = table.params().window;

    MapPoint predicted = predict_position(state.prev_top_left, translation_m, yaw, map, window);

    PositionEstimate est;
    double jump = std::hypot(predicted.x - state.prev_top_left.x,
                             predicted.y - state.prev_top_left.y);
    if (jump > params.reinit_dist_px) {
        // prediction implausible; search the whole map again
        auto fix = global_localize(frame.image, map, params.min_peak);
        MapPoint pos = fix.value_or(predicted);
        est.position = pos;
        est.source = EstimateSource::Reinit;
        HogDescriptor at_pos = table.lookup(pos.x, pos.y);
        est.min_distance = hog_distance(frame_desc, at_pos);
        est.psr = kNan;
        state.prev_top_left = pos;
        return est;
    }

    auto coarse = draw_particles(predicted, params.coarse_area, params.coarse_interval,
                                 params.particles, map, window, coarse_rng);
    WeighResult wc = weigh_particles(coarse, frame_desc, table, params.sigma_w);
    if (wc.min_d <= params.tau_d) {
        est.position = estimate_state(coarse);
        est.source = EstimateSource::Registered;
        est.min_distance = wc.min_d;
        est.psr = compute_psr(coarse).theta;
        state.prev_top_left = est.position;
        return est;
    }

    // fine pass still centers at the prediction; the coarse result is dropped
    auto fine = draw_particles(predicted, params.fine_area, params.fine_interval,
                               params.particles, map, window, fine_rng);
    WeighResult wf = weigh_particles(fine, frame_desc, table, params.sigma_w);
    if (wf.min_d <= params.tau_d) {
        est.position = estimate_state(fine);
        est.source = EstimateSource::Registered;
        est.min_distance = wf.min_d;
        est.psr = compute_psr(fine).theta;
        state.prev_top_left = est.position;
        return est;
    }

    // both searches rejected: keep the dead-reckoned prediction
    est.position = predicted;
    est.source = EstimateSource::Predicted;
    est.min_distance = wf.min_d;
    est.psr = compute_psr(fine).theta;
    state.prev_top_left = predicted;
    return est;
}

namespace {

Vec3 estimate_translation(const FrameRecord& prev, const FrameRecord& curr,
                          const MotionParams& mp, uint64_t seed, int frame_index) {
    double dt = curr.t - prev.t;
    if (!(dt > 0)) fail_data("non-increasing timestamps in motion estimation");

    auto features = select_features(prev.image, mp.max_features, mp.quality, mp.min_dist_px);
    LkParams lk;
    lk.levels = mp.levels;
    lk.window_px = mp.window_px;
    lk.max_iters = mp.max_iters;
    lk.eps = mp.eps;
    lk.residual_max = mp.residual_max;
    FlowField flow = track_flow(prev.image, curr.image, features, lk, dt);

    if (mp.flow_noise_px > 0 || mp.flow_bias_px > 0) {
        // The constant bias is drawn once per run and held fixed in the map
        // frame, modeling the systematic component of dead-reckoning error;
        // it is rotated into the camera frame of each pair before injection.
        Rng bias_rng = derive_rng(seed, 0xB1A5, 0);
        double bmx = bias_rng.normal(mp.flow_bias_px);
        double bmy = bias_rng.normal(mp.flow_bias_px);
        double c = std::cos(prev.yaw), s = std::sin(prev.yaw);
        double bx = c * bmx + s * bmy;
        double by = -s * bmx + c * bmy;
        Rng jitter = derive_rng(seed, 0xF10A, uint64_t(frame_index));
        for (auto& m : flow.matches) {
            m.p_curr.x += bx + jitter.normal(mp.flow_noise_px);
            m.p_curr.y += by + jitter.normal(mp.flow_noise_px);
        }
    }

    if (int(flow.matches.size()) < std::max(mp.min_matches, 2)) return Vec3(0, 0, 0);

    Vec2 principal(prev.image.width / 2.0, prev.image.height / 2.0);
    if (mp.estimator == "homography") {
        if (int(flow.matches.size()) < std::max(mp.min_matches, 4)) return Vec3(0, 0, 0);
        // fit current -> previous in normalized camera coordinates so that
        // T = h (H - R) N yields the camera displacement in the previous frame
        FlowField norm_flow;
        norm_flow.frame_dt = flow.frame_dt;
        norm_flow.matches.reserve(flow.matches.size());
        for (const auto& m : flow.matches) {
            FlowField::Match nm;
            nm.p_prev = Vec2((m.p_curr.x - principal.x) / curr.focal_px,
                             (m.p_curr.y - principal.y) / curr.focal_px);
            nm.p_curr = Vec2((m.p_prev.x - principal.x) / prev.focal_px,
                             (m.p_prev.y - principal.y) / prev.focal_px);
            norm_flow.matches.push_back(nm);
        }
        double thresh_norm = mp.ransac_thresh_px / prev.focal_px;
        HomographyFit fit;
        try {
            fit = estimate_homography(norm_flow, thresh_norm, mp.ransac_iters,
                                      derive_rng(seed, 0x40C, uint64_t(frame_index)).next_u64());
        } catch (const Error&) {
            return Vec3(0, 0, 0);
        }
        if (fit.inlier_count < mp.min_matches) return Vec3(0, 0, 0);
        HomographyEstimate est;
        est.H = fit.H;
        est.R = rot_z(curr.yaw - prev.yaw);  // maps current-frame axes to previous-frame axes
        est.N = Vec3(0, 0, 1);
        est.h = curr.altitude;
        est.inlier_count = fit.inlier_count;
        return decompose_translation(est);
    }

    try {
        return solve_translation_motion_field(flow, curr.omega, curr.altitude,
                                              curr.focal_px, principal);
    } catch (const Error&) {
        return Vec3(0, 0, 0);
    }
}

}  // namespace

Trajectory run_pipeline(const std::vector<FrameRecord>& dataset, const GeoMap& map,
                        const HogTable& table, const PipelineOptions& options) {
    options.search.validate();
    const int window = table.params().window;
    const double half_window = window / 2.0;

    Trajectory traj;
    TrackerState state;
    const FrameRecord* prev_record = nullptr;

    auto report = [&](int frame_index, const PositionEstimate& tl_estimate) {
        // reporting boundary: window top-left -> window center
        PositionEstimate e = tl_estimate;
        e.position.x += half_window;
        e.position.y += half_window;
        traj.entries.push_back({frame_index, e});
    };

    int global_failures = 0;
    for (size_t fi = 0; fi < dataset.size(); ++fi) {
        const FrameRecord& rec = dataset[fi];
        PreprocessedFrame frame = preprocess_frame(rec, map, window);

        if (!state.initialized) {
            ConfidenceMap cm = correlate(frame.image, map);
            if (options.confidence_dumps)
                options.confidence_dumps->emplace_back(
                    rec.index, scores_to_image(cm.scores, cm.width, cm.height));
            if (cm.degenerate || cm.peak_score < options.search.min_peak) {
                if (++global_failures >= 10)
                    fail_abort("no confident global fix in the first 10 frames");
                prev_record = &rec;
                continue;
            }
            state.prev_top_left = cm.peak;
            state.initialized = true;

            PositionEstimate est;
            est.position = cm.peak;
            if (options.mode == RunMode::OfOnly) {
                est.source = EstimateSource::Predicted;
                est.min_distance = kNan;
                est.psr = kNan;
            } else {
                HogDescriptor desc = compute_hog(frame.image, table.params());
                est.min_distance = hog_distance(desc, table.lookup(cm.peak.x, cm.peak.y));
                est.source = est.min_distance <= options.search.tau_d
                                 ? EstimateSource::Registered
                                 : EstimateSource::Reinit;
                est.psr = kNan;
            }
            report(rec.index, est);
            prev_record = &rec;
            continue;
        }

        Vec3 translation(0, 0, 0);
        if (options.mode != RunMode::HopNoOf)
            translation = estimate_translation(*prev_record, rec, options.motion,
                                               options.seed, int(fi));

        if (options.mode == RunMode::OfOnly) {
            MapPoint predicted = predict_position(state.prev_top_left, translation,
                                                  prev_record->yaw, map, window);
            state.prev_top_left = predicted;
            PositionEstimate est;
            est.position = predicted;
            est.source = EstimateSource::Predicted;
            est.min_distance = kNan;
            est.psr = kNan;
            report(rec.index, est);
            prev_record = &rec;
            continue;
        }

        HogDescriptor desc = compute_hog(frame.image, table.params());
        Rng coarse_rng = derive_rng(options.seed, uint64_t(fi), 1);
        Rng fine_rng = derive_rng(options.seed, uint64_t(fi), 2);
        PositionEstimate est = track_step(state, frame, desc, table, map, options.search,
                                          translation, prev_record->yaw, coarse_rng, fine_rng);
        report(rec.index, est);
        prev_record = &rec;
    }
    return traj;
}

}  // namespace hop
