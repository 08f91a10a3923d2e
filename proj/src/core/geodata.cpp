#include "core/geodata.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"
#include "core/image_io.hpp"

namespace fs = std::filesystem;

namespace hop {

const char* to_string(EstimateSource s) {
    switch (s) {
        case EstimateSource::Registered: return "registered";
        case EstimateSource::Predicted: return "predicted";
        case EstimateSource::Reinit: return "reinit";
    }
    return "?";
}

EstimateSource source_from_string(const std::string& s) {
    if (s == "registered") return EstimateSource::Registered;
    if (s == "predicted") return EstimateSource::Predicted;
    if (s == "reinit") return EstimateSource::Reinit;
    fail_data("unknown estimate source: " + s);
}

GeoMap load_map(const std::string& image_path, const std::string& meta_path) {
    GeoMap map;
    map.raster = read_png_gray(image_path);

    std::ifstream in(meta_path);
    if (!in) fail_data("cannot open map meta: " + meta_path);
    nlohmann::json meta;
    try {
        in >> meta;
    } catch (const std::exception& e) {
        fail_data("bad map meta JSON (" + meta_path + "): " + e.what());
    }
    if (!meta.contains("px_per_m")) fail_data("map meta missing px_per_m: " + meta_path);
    map.px_per_m = meta["px_per_m"].get<double>();
    if (meta.contains("origin_label")) map.origin_label = meta["origin_label"].get<std::string>();

    validate_map(map, 0);
    return map;
}

void validate_map(const GeoMap& map, int min_window) {
    if (map.raster.empty()) fail_data("map raster is empty");
    if (!(map.px_per_m > 0) || !std::isfinite(map.px_per_m))
        fail_data("map px_per_m must be positive and finite");
    if (min_window > 0 &&
        (map.width() < 2 * min_window || map.height() < 2 * min_window))
        fail_data("map smaller than twice the matching window (" +
                  std::to_string(map.width()) + "x" + std::to_string(map.height()) + ")");
}

std::vector<FrameRecord> load_dataset(const std::string& dir_path) {
    fs::path dir(dir_path);
    fs::path meta_path = dir / "metadata.jsonl";
    std::ifstream in(meta_path);
    if (!in) fail_data("cannot open dataset metadata: " + meta_path.string());

    std::vector<FrameRecord> records;
    std::set<int> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const std::exception& e) {
            fail_data("bad metadata line " + std::to_string(lineno) + ": " + e.what());
        }
        FrameRecord rec;
        try {
            rec.index = j.at("index").get<int>();
            rec.t = j.at("t").get<double>();
            rec.yaw = j.at("yaw").get<double>();
            rec.roll = j.at("roll").get<double>();
            rec.pitch = j.at("pitch").get<double>();
            auto om = j.at("omega");
            rec.omega = Vec3(om.at(0).get<double>(), om.at(1).get<double>(), om.at(2).get<double>());
            rec.altitude = j.at("altitude").get<double>();
            rec.focal_px = j.at("focal_px").get<double>();
        } catch (const std::exception& e) {
            fail_data("metadata line " + std::to_string(lineno) + " missing field: " + e.what());
        }
        if (!(rec.altitude > 0)) fail_data("frame " + std::to_string(rec.index) + ": altitude must be > 0");
        if (!(rec.focal_px > 0)) fail_data("frame " + std::to_string(rec.index) + ": focal_px must be > 0");
        if (!seen.insert(rec.index).second)
            fail_data("duplicate frame index " + std::to_string(rec.index));

        char name[32];
        std::snprintf(name, sizeof(name), "frame_%06d.png", rec.index);
        fs::path img_path = dir / name;
        if (!fs::exists(img_path))
            fail_data("metadata references missing image: " + img_path.string());
        rec.image = read_png_gray(img_path.string());
        records.push_back(std::move(rec));
    }

    // every frame image must be accounted for by a metadata line
    for (const auto& e : fs::directory_iterator(dir)) {
        std::string n = e.path().filename().string();
        int idx;
        if (std::sscanf(n.c_str(), "frame_%d.png", &idx) == 1 && !seen.count(idx))
            fail_data("image without metadata line: " + n);
    }

    std::stable_sort(records.begin(), records.end(),
                     [](const FrameRecord& a, const FrameRecord& b) { return a.t < b.t; });
    for (size_t i = 1; i < records.size(); ++i)
        if (!(records[i].t > records[i - 1].t))
            fail_data("timestamps not strictly increasing at frame " +
                      std::to_string(records[i].index));
    return records;
}

double meters_to_px(double d_m, const GeoMap& map) { return d_m * map.px_per_m; }
double px_to_meters(double d_px, const GeoMap& map) { return d_px / map.px_per_m; }

namespace {

std::string fmt6(double v) {
    if (std::isnan(v)) return "nan";
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

void write_trajectory(const Trajectory& traj, const GeoMap& map, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail_data("cannot write trajectory: " + path);
    out << "frame_index,x_px,y_px,x_m,y_m,source,min_distance,psr\n";
    for (const auto& e : traj.entries) {
        const auto& est = e.estimate;
        out << e.frame_index << ',' << fmt6(est.position.x) << ',' << fmt6(est.position.y)
            << ',' << fmt6(px_to_meters(est.position.x, map))
            << ',' << fmt6(px_to_meters(est.position.y, map))
            << ',' << to_string(est.source)
            << ',' << fmt6(est.min_distance) << ',' << fmt6(est.psr) << '\n';
    }
    if (!out) fail_data("short write: " + path);
}

Trajectory read_trajectory(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_data("cannot open trajectory: " + path);
    std::string line;
    if (!std::getline(in, line)) fail_data("empty trajectory file: " + path);
    Trajectory traj;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 8)
            fail_data(path + ":" + std::to_string(lineno) + ": expected 8 columns");
        Trajectory::Entry e;
        try {
            e.frame_index = std::stoi(fields[0]);
            e.estimate.position = MapPoint(std::stod(fields[1]), std::stod(fields[2]));
            e.estimate.source = source_from_string(fields[5]);
            e.estimate.min_distance = std::stod(fields[6]);
            e.estimate.psr = std::stod(fields[7]);
        } catch (const Error&) {
            throw;
        } catch (...) {
            fail_data(path + ":" + std::to_string(lineno) + ": unparsable row");
        }
        if (!traj.entries.empty() && e.frame_index <= traj.entries.back().frame_index)
            fail_data(path + ": frame indices must be strictly increasing");
        traj.entries.push_back(e);
    }
    return traj;
}

}  // namespace hop
