#include "core/evaluate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "core/error.hpp"
#include "core/simulator.hpp"

namespace hop {

namespace {

struct Row {
    int frame_index;
    double x_m, y_m;
    EstimateSource source;
};

std::vector<Row> read_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_data("cannot open trajectory: " + path);
    std::string header;
    if (!std::getline(in, header)) fail_data("empty trajectory: " + path);

    // accepts the localization output or a ground-truth file (so a ground
    // truth evaluated against itself reports zero error)
    bool traj_format = header.rfind("frame_index,x_px", 0) == 0;
    bool gt_format = header.rfind("frame_index,x_m,y_m", 0) == 0;
    if (!traj_format && !gt_format) fail_data("unrecognized trajectory header in " + path);

    std::vector<Row> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        size_t pos = 0;
        while (true) {
            size_t comma = line.find(',', pos);
            f.push_back(line.substr(pos, comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        Row r;
        if (traj_format) {
            if (f.size() != 8) fail_data("trajectory row needs 8 columns: " + path);
            r.frame_index = std::stoi(f[0]);
            r.x_m = std::stod(f[3]);
            r.y_m = std::stod(f[4]);
            r.source = source_from_string(f[5]);
        } else {
            if (f.size() != 5) fail_data("groundtruth row needs 5 columns: " + path);
            r.frame_index = std::stoi(f[0]);
            r.x_m = std::stod(f[1]);
            r.y_m = std::stod(f[2]);
            r.source = EstimateSource::Registered;
        }
        rows.push_back(r);
    }
    return rows;
}

}  // namespace

EvalResult evaluate_files(const std::string& trajectory_csv,
                          const std::string& groundtruth_csv) {
    std::vector<Row> rows = read_rows(trajectory_csv);
    GroundTruth gt = read_groundtruth(groundtruth_csv);

    EvalResult r;
    r.frames = rows.size();
    double sum2 = 0, sum = 0, reg_sum2 = 0, fb_sum2 = 0;
    size_t reg_n = 0, fb_n = 0;
    for (const Row& row : rows) {
        if (row.frame_index < 0 || size_t(row.frame_index) >= gt.poses.size())
            fail_data("trajectory frame " + std::to_string(row.frame_index) +
                      " missing from ground truth");
        const auto& pose = gt.poses[size_t(row.frame_index)];
        double ex = row.x_m - pose.x_m;
        double ey = row.y_m - pose.y_m;
        double err = std::hypot(ex, ey);
        sum2 += err * err;
        sum += err;
        r.max_err_m = std::max(r.max_err_m, err);
        r.series.push_back({row.frame_index, err, row.source});
        switch (row.source) {
            case EstimateSource::Registered:
                reg_sum2 += err * err;
                ++reg_n;
                break;
            case EstimateSource::Predicted:
                fb_sum2 += err * err;
                ++fb_n;
                break;
            case EstimateSource::Reinit:
                fb_sum2 += err * err;
                ++fb_n;
                ++r.reinit_count;
                break;
        }
    }
    if (!rows.empty()) {
        r.rmse_m = std::sqrt(sum2 / rows.size());
        r.mean_err_m = sum / rows.size();
        r.registered_fraction = double(reg_n) / rows.size();
        r.predicted_fraction = double(fb_n - r.reinit_count) / rows.size();
    }
    if (reg_n) r.registered_rmse_m = std::sqrt(reg_sum2 / reg_n);
    if (fb_n) r.fallback_rmse_m = std::sqrt(fb_sum2 / fb_n);
    return r;
}

void write_errors_csv(const EvalResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail_data("cannot write errors csv: " + path);
    out << "frame_index,err_m,source\n";
    char buf[64];
    for (const auto& e : result.series) {
        std::snprintf(buf, sizeof(buf), "%d,%.6f,%s\n", e.frame_index, e.err_m,
                      to_string(e.source));
        out << buf;
    }
    if (!out) fail_data("short write: " + path);
}

}  // namespace hop
