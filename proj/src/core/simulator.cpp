#include "core/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"
#include "core/image_io.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace fs = std::filesystem;

namespace hop {

namespace {

double snap_trig(double v) {
    if (std::fabs(v) < 1e-12) return 0.0;
    if (std::fabs(v - 1.0) < 1e-12) return 1.0;
    if (std::fabs(v + 1.0) < 1e-12) return -1.0;
    return v;
}

std::string fmt6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

SimConfig SimConfig::from_config(const Config& cfg) {
    SimConfig s;
    std::string path = cfg.get_string("sim.trajectory");
    if (path == "lawnmower")
        s.path = Path::Lawnmower;
    else if (path == "waypoints")
        s.path = Path::Waypoints;
    else
        fail_usage("sim.trajectory must be lawnmower or waypoints");
    s.lawnmower_rows = int(cfg.get_int("sim.lawnmower.rows"));
    s.lawnmower_spacing_m = cfg.get_double("sim.lawnmower.spacing_m");
    s.waypoints_m = cfg.get_points("sim.waypoints");
    s.speed_m_s = cfg.get_double("sim.speed_m_s");
    s.frame_rate_hz = cfg.get_double("sim.frame_rate_hz");
    s.altitude_m = cfg.get_double("sim.altitude_m");
    s.focal_px = cfg.get_double("sim.focal_px");
    s.frame_size = int(cfg.get_int("sim.frame_size"));
    s.duration_s = cfg.get_double("sim.duration_s");
    std::string ym = cfg.get_string("sim.yaw_mode");
    if (ym == "path_tangent")
        s.yaw_mode = YawMode::PathTangent;
    else if (ym == "fixed")
        s.yaw_mode = YawMode::Fixed;
    else
        fail_usage("sim.yaw_mode must be path_tangent or fixed");
    s.fixed_yaw_rad = cfg.get_double("sim.fixed_yaw_rad");
    auto g = cfg.get_range("sim.photometric.gamma_range");
    s.gamma_lo = g.first;
    s.gamma_hi = g.second;
    auto b = cfg.get_range("sim.photometric.brightness_range");
    s.brightness_lo = b.first;
    s.brightness_hi = b.second;
    s.noise_sigma = cfg.get_double("sim.photometric.noise_sigma");
    s.patch_count = int(cfg.get_int("sim.scene_change.patch_count"));
    s.patch_size_px = int(cfg.get_int("sim.scene_change.patch_size_px"));
    s.yaw_sigma_rad = cfg.get_double("sim.sensor_noise.yaw_sigma_rad");
    s.altitude_sigma_m = cfg.get_double("sim.sensor_noise.altitude_sigma_m");
    s.omega_sigma = cfg.get_double("sim.sensor_noise.omega_sigma");
    s.segment_start = int(cfg.get_int("sim.segment.start"));
    s.segment_end = int(cfg.get_int("sim.segment.end"));
    s.segment_gamma = cfg.get_double("sim.segment.gamma");
    s.segment_brightness = cfg.get_double("sim.segment.brightness");
    s.jump_frame = int(cfg.get_int("sim.jump.frame"));
    s.jump_dx_m = cfg.get_double("sim.jump.dx_m");
    s.jump_dy_m = cfg.get_double("sim.jump.dy_m");
    s.seed = cfg.get_u64("sim.seed");
    s.validate();
    return s;
}

void SimConfig::validate() const {
    if (!(speed_m_s > 0)) fail_usage("sim.speed_m_s must be positive");
    if (!(frame_rate_hz > 0)) fail_usage("sim.frame_rate_hz must be positive");
    if (!(altitude_m > 0)) fail_usage("sim.altitude_m must be positive");
    if (!(focal_px > 0)) fail_usage("sim.focal_px must be positive");
    if (frame_size < 8) fail_usage("sim.frame_size too small");
    if (gamma_hi < gamma_lo || brightness_hi < brightness_lo)
        fail_usage("sim photometric ranges are reversed");
    if (path == Path::Lawnmower && lawnmower_rows < 1)
        fail_usage("sim.lawnmower.rows must be >= 1");
    if (path == Path::Waypoints && waypoints_m.empty())
        fail_usage("sim.waypoints is empty");
}

int render_margin_px(const SimConfig& cfg, const GeoMap& map) {
    double scale = (cfg.altitude_m / cfg.focal_px) * map.px_per_m;  // map px per frame px
    double half_diag = cfg.frame_size * scale * std::sqrt(2.0) / 2.0;
    return int(std::ceil(half_diag)) + 2;
}

namespace {

struct Polyline {
    std::vector<std::pair<double, double>> pts;  // meters
    std::vector<double> cum;                     // cumulative length

    double total() const { return cum.empty() ? 0.0 : cum.back(); }

    void build(const std::vector<std::pair<double, double>>& p) {
        pts = p;
        cum.assign(pts.size(), 0.0);
        for (size_t i = 1; i < pts.size(); ++i) {
            double dx = pts[i].first - pts[i - 1].first;
            double dy = pts[i].second - pts[i - 1].second;
            cum[i] = cum[i - 1] + std::hypot(dx, dy);
        }
    }

    /// Position and segment tangent at arc length s.
    void sample(double s, double& x, double& y, double& tx, double& ty) const {
        if (pts.size() == 1) {
            x = pts[0].first;
            y = pts[0].second;
            tx = 0;
            ty = -1;  // arbitrary: face north while hovering
            return;
        }
        size_t seg = 1;
        while (seg + 1 < pts.size() && cum[seg] < s) ++seg;
        double s0 = cum[seg - 1], s1 = cum[seg];
        double t = s1 > s0 ? std::clamp((s - s0) / (s1 - s0), 0.0, 1.0) : 0.0;
        x = pts[seg - 1].first + t * (pts[seg].first - pts[seg - 1].first);
        y = pts[seg - 1].second + t * (pts[seg].second - pts[seg - 1].second);
        double dx = pts[seg].first - pts[seg - 1].first;
        double dy = pts[seg].second - pts[seg - 1].second;
        double len = std::hypot(dx, dy);
        tx = len > 0 ? dx / len : 0;
        ty = len > 0 ? dy / len : -1;
    }
};

}  // namespace

GroundTruth generate_trajectory(const SimConfig& cfg, const GeoMap& map) {
    cfg.validate();
    int margin = render_margin_px(cfg, map);
    double lo_x = px_to_meters(margin, map);
    double hi_x = px_to_meters(map.width() - margin, map);
    double lo_y = px_to_meters(margin, map);
    double hi_y = px_to_meters(map.height() - margin, map);
    if (hi_x <= lo_x || hi_y <= lo_y)
        fail_data("map too small for the configured camera footprint");

    std::vector<std::pair<double, double>> wp;
    if (cfg.path == SimConfig::Path::Waypoints) {
        wp = cfg.waypoints_m;
    } else {
        // east-west legs centered vertically in the safe interior
        double span = (cfg.lawnmower_rows - 1) * cfg.lawnmower_spacing_m;
        double y0 = (lo_y + hi_y - span) / 2.0;
        if (y0 < lo_y || y0 + span > hi_y)
            fail_data("lawnmower rows do not fit inside the map margin");
        for (int r = 0; r < cfg.lawnmower_rows; ++r) {
            double y = y0 + r * cfg.lawnmower_spacing_m;
            if (r % 2 == 0) {
                wp.emplace_back(lo_x, y);
                wp.emplace_back(hi_x, y);
            } else {
                wp.emplace_back(hi_x, y);
                wp.emplace_back(lo_x, y);
            }
        }
    }

    Polyline path;
    path.build(wp);

    double step = cfg.speed_m_s / cfg.frame_rate_hz;
    size_t frames;
    if (path.total() <= 0) {
        frames = cfg.duration_s > 0 ? size_t(std::floor(cfg.duration_s * cfg.frame_rate_hz)) : 1;
        if (frames == 0) frames = 1;
    } else {
        size_t by_path = size_t(std::floor(path.total() / step)) + 1;
        frames = by_path;
        if (cfg.duration_s > 0) {
            size_t by_time = size_t(std::floor(cfg.duration_s * cfg.frame_rate_hz));
            if (by_time > by_path)
                fail_data("path too short for the requested duration");
            frames = by_time;
        }
    }

    GroundTruth gt;
    gt.poses.resize(frames);
    for (size_t k = 0; k < frames; ++k) {
        double x, y, tx, ty;
        path.sample(double(k) * step, x, y, tx, ty);
        if (cfg.jump_frame >= 0 && int(k) >= cfg.jump_frame) {
            x += cfg.jump_dx_m;
            y += cfg.jump_dy_m;
        }
        GroundTruth::Pose& p = gt.poses[k];
        p.x_m = x;
        p.y_m = y;
        p.altitude = cfg.altitude_m;
        // heading is the compass angle whose forward axis is (sin, -cos)
        p.yaw = cfg.yaw_mode == SimConfig::YawMode::Fixed ? cfg.fixed_yaw_rad
                                                          : std::atan2(tx, -ty);
        double px = meters_to_px(p.x_m, map);
        double py = meters_to_px(p.y_m, map);
        if (px < margin || px > map.width() - margin || py < margin ||
            py > map.height() - margin)
            fail_data("path exits map margin at frame " + std::to_string(k));
    }
    return gt;
}

FrameRecord render_frame(const GeoMap& map, const GroundTruth::Pose& pose,
                         const SimConfig& cfg, int frame_index) {
    const int F = cfg.frame_size;
    double scale = (pose.altitude / cfg.focal_px) * map.px_per_m;
    double c = snap_trig(std::cos(pose.yaw));
    double s = snap_trig(std::sin(pose.yaw));
    double cx = meters_to_px(pose.x_m, map);
    double cy = meters_to_px(pose.y_m, map);
    double half = (F - 1) / 2.0;

    Rng rng = derive_rng(cfg.seed, uint64_t(frame_index), 0xF);

    std::vector<double> buf(size_t(F) * F);
    for (int v = 0; v < F; ++v) {
        double ry = v - half;
        for (int u = 0; u < F; ++u) {
            double rx = u - half;
            // frame pixel (u, v) sees the map at center + scale * R(yaw) (u, v)
            double mx = cx + scale * (c * rx - s * ry);
            double my = cy + scale * (s * rx + c * ry);
            buf[size_t(v) * F + u] = bilinear_clamped(map.raster, mx, my);
        }
    }

    // scene change: stale-map patches exist only in the live frame
    for (int p = 0; p < cfg.patch_count; ++p) {
        int pw = cfg.patch_size_px;
        int px0 = int(rng.uniform_u64(uint64_t(std::max(1, F - pw))));
        int py0 = int(rng.uniform_u64(uint64_t(std::max(1, F - pw))));
        for (int y = py0; y < std::min(F, py0 + pw); ++y)
            for (int x = px0; x < std::min(F, px0 + pw); ++x)
                buf[size_t(y) * F + x] = 128.0;
    }

    bool in_segment = cfg.segment_start >= 0 && frame_index >= cfg.segment_start &&
                      frame_index < cfg.segment_end;
    double gamma = in_segment ? cfg.segment_gamma : rng.uniform(cfg.gamma_lo, cfg.gamma_hi);
    double brightness =
        in_segment ? cfg.segment_brightness : rng.uniform(cfg.brightness_lo, cfg.brightness_hi);

    FrameRecord rec;
    rec.image = Image8(F, F);
    bool unity_photo = gamma == 1.0 && brightness == 0.0;
    for (size_t i = 0; i < buf.size(); ++i) {
        double val = buf[i];
        if (!unity_photo) val = 255.0 * std::pow(std::max(val, 0.0) / 255.0, gamma) + brightness;
        if (cfg.noise_sigma > 0) val += rng.normal(cfg.noise_sigma);
        rec.image.px[i] = quantize_intensity(val);
    }

    rec.index = frame_index;
    rec.t = double(frame_index) / cfg.frame_rate_hz;
    rec.yaw = pose.yaw + rng.normal(cfg.yaw_sigma_rad);
    rec.roll = 0;
    rec.pitch = 0;
    rec.altitude = pose.altitude + rng.normal(cfg.altitude_sigma_m);
    rec.focal_px = cfg.focal_px;
    rec.omega = Vec3(rng.normal(cfg.omega_sigma), rng.normal(cfg.omega_sigma),
                     rng.normal(cfg.omega_sigma));
    return rec;
}

size_t emit_dataset(const SimConfig& cfg, const GeoMap& map, const std::string& out_dir) {
    GroundTruth gt = generate_trajectory(cfg, map);
    fs::create_directories(out_dir);

    const double dt = 1.0 / cfg.frame_rate_hz;
    std::vector<FrameRecord> records(gt.poses.size());
    parallel_for(0, gt.poses.size(), [&](size_t k) {
        records[k] = render_frame(map, gt.poses[k], cfg, int(k));
        // true angular rate about the vertical axis from the yaw delta
        if (k > 0) {
            double dyaw = gt.poses[k].yaw - gt.poses[k - 1].yaw;
            while (dyaw > 3.14159265358979323846) dyaw -= 2 * 3.14159265358979323846;
            while (dyaw < -3.14159265358979323846) dyaw += 2 * 3.14159265358979323846;
            records[k].omega.z += dyaw / dt;
        }
    });

    std::ofstream meta(fs::path(out_dir) / "metadata.jsonl");
    if (!meta) fail_data("cannot write metadata.jsonl in " + out_dir);
    for (size_t k = 0; k < records.size(); ++k) {
        const FrameRecord& r = records[k];
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%06d.png", r.index);
        write_png_gray((fs::path(out_dir) / name).string(), r.image);

        nlohmann::ordered_json j;
        j["index"] = r.index;
        j["t"] = r.t;
        j["yaw"] = r.yaw;
        j["roll"] = r.roll;
        j["pitch"] = r.pitch;
        j["omega"] = {r.omega.x, r.omega.y, r.omega.z};
        j["altitude"] = r.altitude;
        j["focal_px"] = r.focal_px;
        meta << j.dump() << '\n';
    }
    meta.close();
    if (!meta) fail_data("short write: metadata.jsonl");

    write_groundtruth(gt, (fs::path(out_dir) / "groundtruth.csv").string());
    return records.size();
}

void write_groundtruth(const GroundTruth& gt, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail_data("cannot write groundtruth: " + path);
    out << "frame_index,x_m,y_m,yaw_rad,altitude_m\n";
    for (size_t k = 0; k < gt.poses.size(); ++k) {
        const auto& p = gt.poses[k];
        out << k << ',' << fmt6(p.x_m) << ',' << fmt6(p.y_m) << ',' << fmt6(p.yaw) << ','
            << fmt6(p.altitude) << '\n';
    }
    if (!out) fail_data("short write: " + path);
}

GroundTruth read_groundtruth(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_data("cannot open groundtruth: " + path);
    std::string line;
    if (!std::getline(in, line)) fail_data("empty groundtruth file: " + path);
    GroundTruth gt;
    size_t expect = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string f;
        std::vector<std::string> fields;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() != 5) fail_data("groundtruth row needs 5 columns: " + path);
        if (size_t(std::stoul(fields[0])) != expect)
            fail_data("groundtruth frame indices must be 0..n-1 contiguous");
        GroundTruth::Pose p;
        p.x_m = std::stod(fields[1]);
        p.y_m = std::stod(fields[2]);
        p.yaw = std::stod(fields[3]);
        p.altitude = std::stod(fields[4]);
        gt.poses.push_back(p);
        ++expect;
    }
    return gt;
}

GeoMap synth_map(int width, int height, double px_per_m, uint64_t seed) {
    if (width < 16 || height < 16) fail_usage("synthetic map too small");
    std::vector<double> acc(size_t(width) * height, 0.0);

    const int cells[3] = {64, 32, 16};
    const double weights[3] = {0.55, 0.3, 0.15};
    for (int oct = 0; oct < 3; ++oct) {
        int cs = cells[oct];
        int gw = width / cs + 2, gh = height / cs + 2;
        Rng rng = derive_rng(seed, 0x9A9, uint64_t(oct));
        std::vector<double> grid(size_t(gw) * gh);
        for (double& g : grid) g = rng.uniform();
        for (int y = 0; y < height; ++y) {
            double gy = double(y) / cs;
            int y0 = int(gy);
            double fy = gy - y0;
            for (int x = 0; x < width; ++x) {
                double gx = double(x) / cs;
                int x0 = int(gx);
                double fx = gx - x0;
                double v00 = grid[size_t(y0) * gw + x0];
                double v10 = grid[size_t(y0) * gw + x0 + 1];
                double v01 = grid[size_t(y0 + 1) * gw + x0];
                double v11 = grid[size_t(y0 + 1) * gw + x0 + 1];
                double v = (1 - fy) * ((1 - fx) * v00 + fx * v10) +
                           fy * ((1 - fx) * v01 + fx * v11);
                acc[size_t(y) * width + x] += weights[oct] * v;
            }
        }
    }

    GeoMap map;
    map.px_per_m = px_per_m;
    map.raster = Image8(width, height);
    for (size_t i = 0; i < acc.size(); ++i)
        map.raster.px[i] = quantize_intensity(40.0 + 175.0 * acc[i]);

    // blocky structures and road-like strokes give HOG crisp edges
    Rng rng = derive_rng(seed, 0xB0B, 7);
    int nrect = std::max(6, width * height / 12000);
    for (int r = 0; r < nrect; ++r) {
        int rw = 8 + int(rng.uniform_u64(32));
        int rh = 8 + int(rng.uniform_u64(32));
        int x0 = int(rng.uniform_u64(uint64_t(std::max(1, width - rw))));
        int y0 = int(rng.uniform_u64(uint64_t(std::max(1, height - rh))));
        double delta = rng.uniform() < 0.5 ? -65.0 : 65.0;
        for (int y = y0; y < y0 + rh; ++y)
            for (int x = x0; x < x0 + rw; ++x) {
                double v = map.raster.at(x, y) + delta;
                map.raster.at(x, y) = quantize_intensity(v);
            }
    }
    int nroad = std::max(4, (width + height) / 120);
    for (int r = 0; r < nroad; ++r) {
        bool horizontal = rng.uniform() < 0.5;
        int thickness = 2 + int(rng.uniform_u64(3));
        int len = 60 + int(rng.uniform_u64(140));
        int x0 = int(rng.uniform_u64(uint64_t(width)));
        int y0 = int(rng.uniform_u64(uint64_t(height)));
        double shade = rng.uniform() < 0.5 ? 30.0 : 225.0;
        for (int t = 0; t < len; ++t)
            for (int k = 0; k < thickness; ++k) {
                int x = horizontal ? x0 + t : x0 + k;
                int y = horizontal ? y0 + k : y0 + t;
                if (x >= 0 && x < width && y >= 0 && y < height)
                    map.raster.at(x, y) = quantize_intensity(shade);
            }
    }
    return map;
}

}  // namespace hop
