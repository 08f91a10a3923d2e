// Acceptance suite: one pass/fail line per criterion, nonzero exit when
// anything fails. End-to-end scenarios run through the public C API; the
// numeric criteria drive the core directly against independent oracles.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "core/descriptor.hpp"
#include "core/evaluate.hpp"
#include "core/geodata.hpp"
#include "core/globalinit.hpp"
#include "core/image_io.hpp"
#include "core/motion.hpp"
#include "core/rng.hpp"
#include "core/simulator.hpp"
#include "core/tracker.hpp"
#include "hop/hop.h"

namespace fs = std::filesystem;
using namespace hop;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion,
                what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void report_extra(bool pass, const std::string& what, const std::string& detail) {
    std::printf("[%s] extra:        %s (%s)\n", pass ? "PASS" : "FAIL", what.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

struct Ctx {
    fs::path root;
    hop_map* map = nullptr;      // shared 850x500 reference map
    hop_table* table = nullptr;  // stride-1 descriptor table of the map
    GeoMap core_map;             // same map through the core interface

    std::string p(const std::string& child) const { return (root / child).string(); }
};

[[noreturn]] void die(const char* where) {
    std::fprintf(stderr, "acceptance setup failed at %s: %s\n", where, hop_last_error());
    std::exit(2);
}

hop_config* make_config(std::initializer_list<std::pair<const char*, std::string>> kv) {
    hop_config* cfg = nullptr;
    if (hop_config_create(&cfg) != HOP_OK) die("config");
    for (const auto& [k, v] : kv)
        if (hop_config_set(cfg, k, v.c_str()) != HOP_OK) die(k);
    return cfg;
}

// the seeded flight shared by criteria 1 and 2
hop_config* flight_config(uint64_t seed) {
    return make_config({{"sim.duration_s", "180"},
                        {"sim.lawnmower.rows", "3"},
                        {"sim.lawnmower.spacing_m", "12"},
                        {"sim.photometric.gamma_range", "0.9,1.1"},
                        {"sim.photometric.noise_sigma", "4"},
                        {"sim.sensor_noise.yaw_sigma_rad", "0.008726646"},
                        {"sim.seed", std::to_string(seed)},
                        {"run.seed", std::to_string(seed)}});
}

bool same_bytes(const std::string& a, const std::string& b) {
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    if (!fa || !fb) return false;
    std::string sa((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
    return sa == sb;
}

// strip the timing fields, which are legitimately run-dependent
bool same_json_ignoring_timing(const std::string& a, const std::string& b) {
    auto load = [](const std::string& path) {
        std::ifstream in(path);
        std::string out, line;
        while (std::getline(in, line)) {
            if (line.find("\"wall_s\"") != std::string::npos) continue;
            if (line.find("\"hz\"") != std::string::npos) continue;
            out += line;
            out += '\n';
        }
        return out;
    };
    return load(a) == load(b);
}

// ----------------------------------------------------------------- 1 + 2

void criterion_1_and_2(Ctx& ctx) {
    const uint64_t seed = 101;
    hop_config* cfg = flight_config(seed);

    uint64_t frames = 0;
    if (hop_simulate(ctx.map, cfg, ctx.p("flight").c_str(), &frames) != HOP_OK) die("simulate");

    hop_run_summary run{};
    if (hop_localize(ctx.map, ctx.table, ctx.p("flight").c_str(), cfg, ctx.p("run_hop").c_str(),
                     &run) != HOP_OK)
        die("localize");
    hop_eval_summary eval{};
    if (hop_evaluate(ctx.p("run_hop/trajectory.csv").c_str(),
                     ctx.p("flight/groundtruth.csv").c_str(),
                     ctx.p("run_hop/metrics.json").c_str(), ctx.p("eval_hop").c_str(),
                     &eval) != HOP_OK)
        die("evaluate");

    bool pass = frames == 900 && eval.rmse_m <= 2.0 && run.registered_fraction >= 0.93 &&
                run.wall_s <= 120.0;
    report(1, pass, "synthetic end-to-end accuracy",
           fmt("frames=%llu rmse=%.3f m registered=%.1f%% wall=%.1f s",
               (unsigned long long)frames, eval.rmse_m, 100.0 * run.registered_fraction,
               run.wall_s));

    // --- criterion 2: dead-reckoning drift on the same flight
    if (hop_config_set(cfg, "motion.flow_noise_px", "0.2") != HOP_OK ||
        hop_config_set(cfg, "motion.flow_bias_px", "0.2") != HOP_OK)
        die("flow noise");

    hop_run_summary run_noisy{};
    if (hop_localize(ctx.map, ctx.table, ctx.p("flight").c_str(), cfg,
                     ctx.p("run_hop_noisy").c_str(), &run_noisy) != HOP_OK)
        die("localize noisy");
    if (hop_config_set(cfg, "run.mode", "of_only") != HOP_OK) die("mode");
    hop_run_summary run_of{};
    if (hop_localize(ctx.map, ctx.table, ctx.p("flight").c_str(), cfg, ctx.p("run_of").c_str(),
                     &run_of) != HOP_OK)
        die("localize of_only");

    EvalResult hop_eval =
        evaluate_files(ctx.p("run_hop_noisy/trajectory.csv"), ctx.p("flight/groundtruth.csv"));
    EvalResult of_eval =
        evaluate_files(ctx.p("run_of/trajectory.csv"), ctx.p("flight/groundtruth.csv"));

    double err10 = -1, err_final = -1;
    for (const auto& e : of_eval.series) {
        if (e.frame_index == 10) err10 = e.err_m;
        err_final = e.err_m;
    }
    bool drift_ratio = of_eval.rmse_m >= 10.0 * hop_eval.rmse_m;
    bool drift_monotone = err10 > 0 && err_final >= 5.0 * err10;
    report(2, drift_ratio && drift_monotone, "dead-reckoning drift ablation",
           fmt("of_only rmse=%.2f m vs hop rmse=%.2f m (x%.1f); err(final)=%.2f vs err(10)=%.2f "
               "(x%.1f)",
               of_eval.rmse_m, hop_eval.rmse_m,
               hop_eval.rmse_m > 0 ? of_eval.rmse_m / hop_eval.rmse_m : 0, err_final, err10,
               err10 > 0 ? err_final / err10 : 0));
    hop_config_free(cfg);
}

// --------------------------------------------------------------------- 3

void criterion_3(Ctx& ctx) {
    const char* jump_m = "19.047619";  // 60 px at 3.15 px/m
    hop_config* cfg = make_config({{"sim.trajectory", "waypoints"},
                                   {"sim.waypoints", "70,95; 200,95"},
                                   {"sim.duration_s", "24"},
                                   {"sim.photometric.noise_sigma", "3"},
                                   {"sim.jump.frame", "40"},
                                   {"sim.jump.dx_m", jump_m},
                                   {"sim.jump.dy_m", "0"},
                                   {"sim.seed", "21"},
                                   {"run.seed", "21"},
                                   {"search.tau_d", "0.26"},
                                   {"motion.estimator", "homography"},
                                   {"motion.levels", "4"}});
    uint64_t frames = 0;
    if (hop_simulate(ctx.map, cfg, ctx.p("jumpdata").c_str(), &frames) != HOP_OK)
        die("simulate jump");

    hop_run_summary run{};
    if (hop_localize(ctx.map, ctx.table, ctx.p("jumpdata").c_str(), cfg,
                     ctx.p("run_jump_hop").c_str(), &run) != HOP_OK)
        die("localize jump hop");
    if (hop_config_set(cfg, "run.mode", "hop_no_of") != HOP_OK) die("mode");
    if (hop_localize(ctx.map, ctx.table, ctx.p("jumpdata").c_str(), cfg,
                     ctx.p("run_jump_noof").c_str(), &run) != HOP_OK)
        die("localize jump noof");

    Trajectory hop_traj = read_trajectory(ctx.p("run_jump_hop/trajectory.csv"));
    EvalResult hop_eval =
        evaluate_files(ctx.p("run_jump_hop/trajectory.csv"), ctx.p("jumpdata/groundtruth.csv"));
    EvalResult noof_eval =
        evaluate_files(ctx.p("run_jump_noof/trajectory.csv"), ctx.p("jumpdata/groundtruth.csv"));

    // hop: a registered frame with a small error within 5 frames of the jump
    int recovered_at = -1;
    for (size_t i = 0; i < hop_traj.entries.size(); ++i) {
        const auto& e = hop_traj.entries[i];
        if (e.frame_index < 40 || e.frame_index > 44) continue;
        if (e.estimate.source == EstimateSource::Registered &&
            hop_eval.series[i].err_m <= 10.0 / 3.15) {
            recovered_at = e.frame_index;
            break;
        }
    }
    // hop_no_of: at least 30 px (9.52 m) off for at least 20 frames after the jump
    int stuck = 0;
    for (const auto& e : noof_eval.series)
        if (e.frame_index >= 40 && e.frame_index < 60 && e.err_m >= 30.0 / 3.15) ++stuck;

    bool pass = recovered_at >= 40 && recovered_at <= 44 && stuck >= 20;
    report(3, pass, "optical-flow prediction ablation (60 px jump)",
           fmt("hop registered again at frame %d, hop_no_of >=30px off for %d/20 frames",
               recovered_at, stuck));
    hop_config_free(cfg);
}

// --------------------------------------------------------------------- 4

void criterion_4() {
    auto t0 = std::chrono::steady_clock::now();
    Rng rng(4001);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Vec3 T(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-1, 1));
        Vec3 om(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.5, 0.5));
        double Z = rng.uniform(20, 120);
        double f = rng.uniform(200, 800);
        FlowField flow;
        flow.frame_dt = 1.0;
        for (int i = 0; i < 30; ++i) {
            double x = rng.uniform(-150, 150), y = rng.uniform(-150, 150);
            double bx = -om.y * f + om.z * y + om.x * x * y / f - om.y * x * x / f;
            double by = -om.x * f + om.z * x + om.y * x * y / f - om.x * y * y / f;
            double vx = bx + (T.z * x - T.x * f) / Z;
            double vy = by + (T.z * y - T.y * f) / Z;
            flow.matches.push_back({Vec2(x, y), Vec2(x + vx, y + vy)});
        }
        Vec3 est = solve_translation_motion_field(flow, om, Z, f);
        worst = std::max(worst, (est - T).norm());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(4, worst <= 1e-9 && secs < 1.0, "motion-field inversion is exact",
           fmt("max error %.2e m over 100 trials in %.3f s", worst, secs));
}

// --------------------------------------------------------------------- 5

void criterion_5() {
    Rng rng(5001);
    double worst_decomp = 0;
    for (int trial = 0; trial < 100; ++trial) {
        double h = rng.uniform(30, 120);
        Vec3 C(rng.uniform(-2, 2), rng.uniform(-2, 2), 0.0);  // level flight
        Mat3 R = rot_z(rng.uniform(-0.3, 0.3));               // heading change only

        FlowField flow;  // current -> previous, normalized coordinates
        for (int i = 0; i < 40; ++i) {
            Vec3 P(rng.uniform(-30, 30), rng.uniform(-30, 30), h);
            Vec3 Pc = R.transposed() * (P - C);
            flow.matches.push_back({Vec2(Pc.x / Pc.z, Pc.y / Pc.z), Vec2(P.x / P.z, P.y / P.z)});
        }
        HomographyFit fit = estimate_homography(flow, 1e-6, 300);
        HomographyEstimate est;
        est.H = fit.H;
        est.R = R;
        est.h = h;
        worst_decomp = std::max(worst_decomp, (decompose_translation(est) - C).norm());
    }

    double worst_agree = 0;
    for (int trial = 0; trial < 100; ++trial) {
        double h = rng.uniform(40, 100);
        double f = rng.uniform(300, 600);
        Vec3 C(rng.uniform(-2, 2), rng.uniform(-2, 2), 0.0);
        FlowField px_flow, norm_flow;
        for (int i = 0; i < 40; ++i) {
            Vec3 P(rng.uniform(-20, 20), rng.uniform(-20, 20), h);
            Vec3 Pc = P - C;
            Vec2 prev(f * P.x / P.z, f * P.y / P.z);
            Vec2 curr(f * Pc.x / Pc.z, f * Pc.y / Pc.z);
            px_flow.matches.push_back({prev, curr});
            norm_flow.matches.push_back(
                {Vec2(curr.x / f, curr.y / f), Vec2(prev.x / f, prev.y / f)});
        }
        Vec3 T_mf = solve_translation_motion_field(px_flow, Vec3(0, 0, 0), h, f);
        HomographyFit fit = estimate_homography(norm_flow, 1e-6, 300);
        HomographyEstimate est;
        est.H = fit.H;
        est.h = h;
        Vec3 T_h = decompose_translation(est);
        worst_agree = std::max(worst_agree, std::hypot(T_mf.x - T_h.x, T_mf.y - T_h.y));
    }
    report(5, worst_decomp <= 1e-6 && worst_agree <= 1e-6,
           "homography decomposition recovers translation",
           fmt("max decomposition error %.2e m, max cross-estimator gap %.2e m", worst_decomp,
               worst_agree));
}

// --------------------------------------------------------------------- 6

double spatial_zncc(const Image8& frame, const Image8& map, int u, int v) {
    const size_t n = size_t(frame.width) * frame.height;
    double fmean = 0, wmean = 0;
    for (int y = 0; y < frame.height; ++y)
        for (int x = 0; x < frame.width; ++x) {
            fmean += frame.at(x, y);
            wmean += map.at(u + x, v + y);
        }
    fmean /= double(n);
    wmean /= double(n);
    double num = 0, fn = 0, wn = 0;
    for (int y = 0; y < frame.height; ++y)
        for (int x = 0; x < frame.width; ++x) {
            double fd = frame.at(x, y) - fmean;
            double wd = map.at(u + x, v + y) - wmean;
            num += fd * wd;
            fn += fd * fd;
            wn += wd * wd;
        }
    if (fn <= 0 || wn <= 0) return 0.0;
    return num / std::sqrt(fn * wn);
}

void criterion_6(Ctx& ctx) {
    double worst = 0;
    for (int trial = 0; trial < 10; ++trial) {
        GeoMap map = synth_map(128, 128, 3.15, 600 + trial);
        Image8 frame = synth_map(48, 48, 3.15, 700 + trial).raster;
        ConfidenceMap cm = correlate(frame, map);
        for (int v = 0; v < cm.height; ++v)
            for (int u = 0; u < cm.width; ++u)
                worst = std::max(worst,
                                 std::fabs(cm.at(u, v) - spatial_zncc(frame, map.raster, u, v)));
    }

    Rng rng(6001);
    int exact = 0;
    for (int trial = 0; trial < 50; ++trial) {
        int tx = int(rng.uniform_u64(850 - 180 + 1));
        int ty = int(rng.uniform_u64(500 - 180 + 1));
        Image8 frame = crop(ctx.core_map.raster, tx, ty, 180, 180);
        ConfidenceMap cm = correlate(frame, ctx.core_map);
        if (int(cm.peak.x) == tx && int(cm.peak.y) == ty) ++exact;
    }
    report(6, worst <= 1e-6 && exact == 50, "correlation matches the spatial oracle",
           fmt("max |fft - direct| = %.2e; exact placement %d/50", worst, exact));
}

// --------------------------------------------------------------------- 7

void criterion_7(Ctx& ctx) {
    HogParams params;  // defaults: window 180
    HogTable table = build_table(ctx.core_map, params, 1);
    SearchParams sp;  // defaults: N=50, s_c=40, delta_c=4, tau_d=0.75

    Rng rng(7001);
    int argmin_equal = 0, mean_close = 0, registered = 0;
    for (int trial = 0; trial < 50; ++trial) {
        int tx = int(10 + rng.uniform_u64(850 - 180 - 20));
        int ty = int(10 + rng.uniform_u64(500 - 180 - 20));
        Image8 win = crop(ctx.core_map.raster, tx, ty, 180, 180);
        HogDescriptor desc = compute_hog(win, params);

        MapPoint center(tx + double(rng.uniform_u64(9)) - 4, ty + double(rng.uniform_u64(9)) - 4);
        Rng draw_rng = derive_rng(7002, trial, 0);
        auto ps = draw_particles(center, sp.coarse_area, sp.coarse_interval, 121, ctx.core_map,
                                 params.window, draw_rng);
        WeighResult r = weigh_particles(ps, desc, table, sp.sigma_w);

        double best_d = 1e300;
        size_t best = 0;
        for (size_t i = 0; i < ps.size(); ++i) {
            Image8 cand = crop(ctx.core_map.raster, ps[i].x, ps[i].y, 180, 180);
            double d = hog_distance(desc, compute_hog(cand, params));
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        if (best == r.argmin && best_d == r.min_d) ++argmin_equal;
        if (r.min_d <= sp.tau_d) {
            ++registered;
            MapPoint est = estimate_state(ps);
            if (std::fabs(est.x - tx) <= 4.0 && std::fabs(est.y - ty) <= 4.0) ++mean_close;
        }
    }
    report(7, argmin_equal == 50 && registered == 50 && mean_close == registered,
           "particle search equals brute force on the exhaustive lattice",
           fmt("argmin equal %d/50, weighted mean within 4 px %d/%d", argmin_equal, mean_close,
               registered));
}

// --------------------------------------------------------------------- 8

void criterion_8() {
    HogParams params;  // defaults
    GeoMap map = synth_map(300, 300, 3.15, 808);
    HogTable table = build_table(map, params, 1);
    auto [nx, ny] = lattice_dims(300, 300, 180, 1);

    bool len_ok = params.descriptor_len() == 576 && table.params().descriptor_len() == 576;
    size_t mismatches = 0;
    for (int row = 0; row < ny; ++row)
        for (int col = 0; col < nx; ++col) {
            Image8 win = crop(map.raster, col, row, 180, 180);
            HogDescriptor direct = compute_hog(win, params);
            const float* entry = table.lookup_ptr(col, row);
            if (std::memcmp(direct.values.data(), entry, 576 * sizeof(float)) != 0) ++mismatches;
        }
    report(8, len_ok && mismatches == 0, "descriptor table is bit-exact",
           fmt("descriptor_len=%zu, %dx%d lattice, %zu mismatches", params.descriptor_len(), nx,
               ny, mismatches));
}

// --------------------------------------------------------------------- 9

void criterion_9(Ctx& ctx) {
    // closed-form likelihood values
    double w0 = gaussian_weight(0.0, 0.01);
    double w2 = gaussian_weight(0.02, 0.01);
    bool weights_ok = std::fabs(w0 - 39.8942280401) <= 1e-6 &&
                      std::fabs(w2 - w0 * std::exp(-2.0)) <= 1e-9;

    // hand-computed peak-to-sidelobe ratio
    std::vector<Particle> ps(3);
    ps[0] = {0, 0, 180, 180, 0, 0.2};
    ps[1] = {20, 0, 180, 180, 0, 0.5};
    ps[2] = {40, 0, 180, 180, 0, 0.7};
    OutlierStats stats = compute_psr(ps);
    bool psr_ok = !stats.degenerate && std::fabs(stats.mu - 0.6) <= 1e-12 &&
                  std::fabs(stats.sigma_s - 0.1) <= 1e-12 &&
                  std::fabs(stats.theta + 4.0) <= 1e-9;

    // illumination-change interval: the match statistic must flag exactly
    // the perturbed frames
    hop_config* cfg = make_config({{"sim.duration_s", "30"},
                                   {"sim.photometric.gamma_range", "0.9,1.1"},
                                   {"sim.photometric.noise_sigma", "4"},
                                   {"sim.sensor_noise.yaw_sigma_rad", "0.008726646"},
                                   {"sim.segment.start", "60"},
                                   {"sim.segment.end", "90"},
                                   {"sim.segment.gamma", "0.3"},
                                   {"sim.segment.brightness", "40"},
                                   {"sim.seed", "7"},
                                   {"run.seed", "7"},
                                   {"search.tau_d", "0.26"}});
    uint64_t frames = 0;
    if (hop_simulate(ctx.map, cfg, ctx.p("segdata").c_str(), &frames) != HOP_OK)
        die("simulate segment");
    hop_run_summary run{};
    if (hop_localize(ctx.map, ctx.table, ctx.p("segdata").c_str(), cfg, ctx.p("run_seg").c_str(),
                     &run) != HOP_OK)
        die("localize segment");

    Trajectory traj = read_trajectory(ctx.p("run_seg/trajectory.csv"));
    int inside_above = 0, inside_total = 0, outside_below = 0, outside_total = 0;
    int psr_values = 0;
    for (const auto& e : traj.entries) {
        bool inside = e.frame_index >= 60 && e.frame_index < 90;
        if (inside) {
            ++inside_total;
            if (e.estimate.min_distance > 0.26) ++inside_above;
        } else {
            ++outside_total;
            if (e.estimate.min_distance <= 0.26) ++outside_below;
        }
        if (std::isfinite(e.estimate.psr)) ++psr_values;
    }
    bool series_ok = inside_total == 30 && inside_above == inside_total &&
                     outside_below == outside_total && psr_values > int(frames) / 2;

    report(9, weights_ok && psr_ok && series_ok, "outlier statistics",
           fmt("w(0)=%.6f, theta=%.3f; MD>tau inside %d/%d, MD<=tau outside %d/%d, psr series %d",
               w0, stats.theta, inside_above, inside_total, outside_below, outside_total,
               psr_values));
    hop_config_free(cfg);
}

// -------------------------------------------------------------------- 10

void criterion_10(Ctx& ctx) {
    hop_config* cfg = make_config({{"sim.duration_s", "4"},
                                   {"sim.photometric.noise_sigma", "3"},
                                   {"sim.photometric.gamma_range", "0.95,1.05"},
                                   {"sim.sensor_noise.yaw_sigma_rad", "0.005"},
                                   {"sim.seed", "4242"},
                                   {"run.seed", "4242"},
                                   {"table.lattice_stride", "2"}});

    bool ok = true;
    std::string detail;
    for (int pass = 0; pass < 2; ++pass) {
        std::string tag = pass == 0 ? "det_a" : "det_b";
        uint64_t frames = 0;
        if (hop_simulate(ctx.map, cfg, ctx.p(tag + "/data").c_str(), &frames) != HOP_OK)
            die("simulate det");
        hop_table* table = nullptr;
        if (hop_table_build(ctx.map, cfg, &table) != HOP_OK) die("table det");
        if (hop_table_save(table, ctx.p(tag + "/table.hoptbl").c_str()) != HOP_OK)
            die("save det");
        hop_run_summary run{};
        if (hop_localize(ctx.map, table, ctx.p(tag + "/data").c_str(), cfg,
                         ctx.p(tag + "/run").c_str(), &run) != HOP_OK)
            die("localize det");
        hop_eval_summary eval{};
        if (hop_evaluate(ctx.p(tag + "/run/trajectory.csv").c_str(),
                         ctx.p(tag + "/data/groundtruth.csv").c_str(), nullptr,
                         ctx.p(tag + "/eval").c_str(), &eval) != HOP_OK)
            die("evaluate det");
        hop_table_free(table);
    }

    auto cmp = [&](const std::string& rel, bool strip_timing = false) {
        bool same = strip_timing
                        ? same_json_ignoring_timing(ctx.p("det_a/" + rel), ctx.p("det_b/" + rel))
                        : same_bytes(ctx.p("det_a/" + rel), ctx.p("det_b/" + rel));
        if (!same) {
            ok = false;
            detail += rel + " differs; ";
        }
    };
    cmp("data/metadata.jsonl");
    cmp("data/groundtruth.csv");
    cmp("data/frame_000000.png");
    cmp("data/frame_000019.png");
    cmp("table.hoptbl");
    cmp("run/trajectory.csv");
    cmp("run/metrics.json", true);  // wall-clock fields excluded
    cmp("eval/metrics.json");
    cmp("eval/errors.csv");
    if (detail.empty()) detail = "dataset, table cache, trajectory, metrics all byte-identical";
    report(10, ok, "seeded pipeline is reproducible", detail);
    hop_config_free(cfg);
}

// -------------------------------------------------- extra: sensitivity

void extra_sensitivity(Ctx& ctx) {
    // Probe the regime the coarse area exists for: position prediction off
    // by ~13 px per frame (low logging rate, no flow prediction). The wide
    // search keeps re-acquiring; the narrow one cannot reach the target.
    hop_config* cfg = make_config({{"sim.trajectory", "waypoints"},
                                   {"sim.waypoints", "70,95; 210,95"},
                                   {"sim.frame_rate_hz", "0.5"},
                                   {"sim.duration_s", "70"},
                                   {"sim.photometric.noise_sigma", "4"},
                                   {"sim.seed", "31"},
                                   {"run.seed", "31"},
                                   {"run.mode", "hop_no_of"},
                                   {"search.tau_d", "0.26"}});
    uint64_t frames = 0;
    if (hop_simulate(ctx.map, cfg, ctx.p("sens_data").c_str(), &frames) != HOP_OK)
        die("simulate sens");
    hop_run_summary run{};
    if (hop_localize(ctx.map, ctx.table, ctx.p("sens_data").c_str(), cfg,
                     ctx.p("sens_full").c_str(), &run) != HOP_OK)
        die("localize sens full");
    if (hop_config_set(cfg, "search.particles", "20") != HOP_OK ||
        hop_config_set(cfg, "search.coarse_area", "20") != HOP_OK)
        die("sens cfg");
    if (hop_localize(ctx.map, ctx.table, ctx.p("sens_data").c_str(), cfg,
                     ctx.p("sens_small").c_str(), &run) != HOP_OK)
        die("localize sens small");

    EvalResult full =
        evaluate_files(ctx.p("sens_full/trajectory.csv"), ctx.p("sens_data/groundtruth.csv"));
    EvalResult small =
        evaluate_files(ctx.p("sens_small/trajectory.csv"), ctx.p("sens_data/groundtruth.csv"));
    report_extra(full.rmse_m <= small.rmse_m, "N=50/s_c=40 beats N=20/s_c=20",
                 fmt("rmse %.3f m <= %.3f m", full.rmse_m, small.rmse_m));
    hop_config_free(cfg);
}

}  // namespace

int main() {
    Ctx ctx;
    ctx.root = fs::temp_directory_path() / ("hop_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(ctx.root);

    if (hop_map_synth(850, 500, 3.15, 7, ctx.p("map.png").c_str(), ctx.p("map.json").c_str()) !=
        HOP_OK)
        die("map synth");
    if (hop_map_load(ctx.p("map.png").c_str(), ctx.p("map.json").c_str(), &ctx.map) != HOP_OK)
        die("map load");
    ctx.core_map = load_map(ctx.p("map.png"), ctx.p("map.json"));

    hop_config* table_cfg = make_config({});
    if (hop_table_build(ctx.map, table_cfg, &ctx.table) != HOP_OK) die("table build");
    hop_config_free(table_cfg);

    criterion_1_and_2(ctx);
    criterion_3(ctx);
    criterion_4();
    criterion_5();
    criterion_6(ctx);
    criterion_7(ctx);
    criterion_8();
    criterion_9(ctx);
    criterion_10(ctx);
    extra_sensitivity(ctx);

    hop_table_free(ctx.table);
    hop_map_free(ctx.map);

    std::error_code ec;
    fs::remove_all(ctx.root, ec);

    if (g_failures == 0) {
        std::printf("acceptance: all criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
    return 1;
}
