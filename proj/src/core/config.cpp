#include "core/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace hop {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(uint8_t(s[b]))) ++b;
    while (e > b && std::isspace(uint8_t(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

const std::map<std::string, std::string>& Config::defaults() {
    static const std::map<std::string, std::string> d = {
        // file locations (resolved by subcommands; empty = not set)
        {"paths.map_image", ""},
        {"paths.map_meta", ""},
        {"paths.dataset", ""},
        {"paths.table", ""},
        {"paths.out", "."},

        // holistic descriptor
        {"hog.cell", "32"},
        {"hog.block", "64"},
        {"hog.block_stride", "32"},
        {"hog.bins", "9"},
        {"hog.window", "180"},
        {"table.lattice_stride", "1"},

        // coarse-to-fine particle search
        {"search.particles", "50"},
        {"search.coarse_area", "40"},
        {"search.coarse_interval", "4"},
        {"search.fine_area", "20"},
        {"search.fine_interval", "1"},
        {"search.sigma_w", "0.01"},
        {"search.tau_d", "0.75"},
        {"search.reinit_dist_px", "80"},

        // whole-map correlation
        {"global.min_peak", "0.3"},

        // optical-flow motion estimation
        {"motion.estimator", "motion_field"},  // motion_field | homography
        {"motion.max_features", "200"},
        {"motion.quality", "0.01"},
        {"motion.min_dist_px", "8"},
        {"motion.levels", "3"},
        {"motion.window_px", "21"},
        {"motion.max_iters", "30"},
        {"motion.eps", "0.01"},
        {"motion.residual_max", "25.0"},
        {"motion.min_matches", "6"},
        {"motion.ransac_thresh_px", "2.0"},
        {"motion.ransac_iters", "300"},
        // fault injection for dead-reckoning studies: per-feature jitter and
        // a per-run constant bias, both sampled with the given sigma (px)
        {"motion.flow_noise_px", "0"},
        {"motion.flow_bias_px", "0"},

        // run control
        {"run.mode", "hop"},  // hop | hop_no_of | of_only
        {"run.seed", "1"},
        {"run.emit_confidence_maps", "false"},

        // synthetic flight generator
        {"sim.trajectory", "lawnmower"},  // lawnmower | waypoints
        {"sim.lawnmower.rows", "3"},
        {"sim.lawnmower.spacing_m", "12"},
        {"sim.waypoints", ""},
        {"sim.speed_m_s", "2.0"},
        {"sim.frame_rate_hz", "5.0"},
        {"sim.altitude_m", "80"},
        {"sim.focal_px", "400"},
        {"sim.frame_size", "416"},
        {"sim.duration_s", "180"},  // 0 = fly the whole path
        {"sim.yaw_mode", "path_tangent"},  // path_tangent | fixed
        {"sim.fixed_yaw_rad", "0"},
        {"sim.seed", "1"},
        {"sim.photometric.gamma_range", "1,1"},
        {"sim.photometric.brightness_range", "0,0"},
        {"sim.photometric.noise_sigma", "0"},
        {"sim.scene_change.patch_count", "0"},
        {"sim.scene_change.patch_size_px", "40"},
        {"sim.sensor_noise.yaw_sigma_rad", "0"},
        {"sim.sensor_noise.altitude_sigma_m", "0"},
        {"sim.sensor_noise.omega_sigma", "0"},
        // photometric disturbance confined to a frame interval [start, end)
        {"sim.segment.start", "-1"},
        {"sim.segment.end", "-1"},
        {"sim.segment.gamma", "1"},
        {"sim.segment.brightness", "0"},
        // optional instantaneous position jump at a given frame
        {"sim.jump.frame", "-1"},
        {"sim.jump.dx_m", "0"},
        {"sim.jump.dy_m", "0"},
        // synthesize the reference map if the configured image is absent
        {"sim.synth_map", ""},  // "WxH" in pixels
        {"sim.synth_map.px_per_m", "3.15"},
    };
    return d;
}

Config Config::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_data("cannot open config: " + path);
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        cfg.parse_line(line, path + ":" + std::to_string(lineno));
    }
    return cfg;
}

void Config::parse_line(const std::string& line, const std::string& where) {
    std::string s = line;
    size_t hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) return;
    size_t eq = s.find('=');
    if (eq == std::string::npos) fail_usage("config line without '=' at " + where);
    set(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value) {
    if (key.empty()) fail_usage("empty config key");
    if (!defaults().count(key)) fail_usage("unknown config key: " + key);
    values_[key] = value;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it != values_.end()) return it->second;
    auto dit = defaults().find(key);
    if (dit == defaults().end()) fail_usage("unknown config key: " + key);
    return dit->second;
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

double Config::get_double(const std::string& key) const {
    const std::string v = raw(key);
    char* end = nullptr;
    double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0') fail_usage("config key " + key + " is not a number: " + v);
    return d;
}

int64_t Config::get_int(const std::string& key) const {
    const std::string v = raw(key);
    char* end = nullptr;
    long long i = std::strtoll(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0') fail_usage("config key " + key + " is not an integer: " + v);
    return i;
}

uint64_t Config::get_u64(const std::string& key) const {
    const std::string v = raw(key);
    char* end = nullptr;
    unsigned long long i = std::strtoull(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0') fail_usage("config key " + key + " is not an integer: " + v);
    return i;
}

bool Config::get_bool(const std::string& key) const {
    std::string v = raw(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail_usage("config key " + key + " is not a boolean: " + v);
}

std::pair<double, double> Config::get_range(const std::string& key) const {
    const std::string v = raw(key);
    size_t comma = v.find(',');
    if (comma == std::string::npos) fail_usage("config key " + key + " needs 'lo,hi': " + v);
    try {
        double lo = std::stod(v.substr(0, comma));
        double hi = std::stod(v.substr(comma + 1));
        if (hi < lo) fail_usage("config key " + key + " range is reversed: " + v);
        return {lo, hi};
    } catch (const Error&) {
        throw;
    } catch (...) {
        fail_usage("config key " + key + " needs 'lo,hi': " + v);
    }
}

std::vector<std::pair<double, double>> Config::get_points(const std::string& key) const {
    const std::string v = raw(key);
    std::vector<std::pair<double, double>> pts;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ';')) {
        item = trim(item);
        if (item.empty()) continue;
        size_t comma = item.find(',');
        if (comma == std::string::npos) fail_usage("config key " + key + ": point needs 'x,y'");
        try {
            pts.emplace_back(std::stod(item.substr(0, comma)), std::stod(item.substr(comma + 1)));
        } catch (...) {
            fail_usage("config key " + key + ": bad point '" + item + "'");
        }
    }
    return pts;
}

std::vector<std::pair<std::string, std::string>> Config::entries() const {
    return {values_.begin(), values_.end()};
}

}  // namespace hop
