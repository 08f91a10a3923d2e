#include "core/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/error.hpp"
#include "core/geodata.hpp"

namespace hop {

namespace {

struct PlotRow {
    int frame_index;
    double x_m, y_m;
    std::string source;
    double min_distance, psr;
};

std::vector<PlotRow> read_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_data("cannot open trajectory: " + path);
    std::string line;
    if (!std::getline(in, line)) fail_data("empty trajectory: " + path);
    std::vector<PlotRow> rows;
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
        if (f.size() != 8) fail_data("trajectory row needs 8 columns: " + path);
        rows.push_back({std::stoi(f[0]), std::stod(f[3]), std::stod(f[4]), f[5],
                        std::stod(f[6]), std::stod(f[7])});
    }
    return rows;
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

const char* kPalette[] = {"#2ca02c", "#8c5a2b", "#9467bd", "#e377c2", "#17becf"};

}  // namespace

void plot_svg(const std::vector<std::string>& trajectory_csvs,
              const std::string& groundtruth_csv, const std::string& out_svg_path) {
    if (trajectory_csvs.empty()) fail_usage("plot needs at least one trajectory");

    std::vector<std::vector<PlotRow>> trajs;
    for (const auto& p : trajectory_csvs) trajs.push_back(read_rows(p));

    std::vector<std::pair<double, double>> gt_pts;
    if (!groundtruth_csv.empty()) {
        std::ifstream in(groundtruth_csv);
        if (!in) fail_data("cannot open groundtruth: " + groundtruth_csv);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::stringstream ss(line);
            std::string f;
            std::vector<std::string> fields;
            while (std::getline(ss, f, ',')) fields.push_back(f);
            if (fields.size() < 3) continue;
            gt_pts.emplace_back(std::stod(fields[1]), std::stod(fields[2]));
        }
    }

    double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
    auto grow = [&](double x, double y) {
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
    };
    for (const auto& t : trajs)
        for (const auto& r : t) grow(r.x_m, r.y_m);
    for (const auto& p : gt_pts) grow(p.first, p.second);
    if (min_x > max_x) fail_data("nothing to plot");
    double span_x = std::max(max_x - min_x, 1e-6);
    double span_y = std::max(max_y - min_y, 1e-6);

    bool have_stats = false;
    for (const auto& t : trajs)
        for (const auto& r : t)
            if (std::isfinite(r.min_distance)) have_stats = true;

    const double W = 900, pad = 50;
    const double path_h = 520;
    const double series_h = have_stats ? 220 : 0;
    const double H = path_h + series_h + (have_stats ? 40 : 0);
    double sc = std::min((W - 2 * pad) / span_x, (path_h - 2 * pad) / span_y);
    auto px = [&](double x) { return pad + (x - min_x) * sc; };
    auto py = [&](double y) { return pad + (y - min_y) * sc; };  // y south = down

    std::ofstream out(out_svg_path);
    if (!out) fail_data("cannot write SVG: " + out_svg_path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";

    if (!gt_pts.empty()) {
        out << "<path fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" d=\"";
        for (size_t i = 0; i < gt_pts.size(); ++i)
            out << (i ? "L" : "M") << fmt(px(gt_pts[i].first)) << " " << fmt(py(gt_pts[i].second));
        out << "\"/>\n";
        out << "<text x=\"" << pad << "\" y=\"20\" fill=\"#d62728\" font-size=\"13\">ground truth</text>\n";
    }

    for (size_t ti = 0; ti < trajs.size(); ++ti) {
        const char* color = kPalette[ti % 5];
        const auto& rows = trajs[ti];
        out << "<path fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" d=\"";
        for (size_t i = 0; i < rows.size(); ++i)
            out << (i ? "L" : "M") << fmt(px(rows[i].x_m)) << " " << fmt(py(rows[i].y_m));
        out << "\"/>\n";

        for (const auto& r : rows) {
            if (!std::isfinite(r.min_distance)) continue;
            double cx = px(r.x_m), cy = py(r.y_m);
            if (r.source == "registered") {
                out << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy)
                    << "\" r=\"1.6\" fill=\"" << color << "\"/>\n";
            } else {
                out << "<line x1=\"" << fmt(cx - 2.4) << "\" y1=\"" << fmt(cy - 2.4)
                    << "\" x2=\"" << fmt(cx + 2.4) << "\" y2=\"" << fmt(cy + 2.4)
                    << "\" stroke=\"#1f77b4\" stroke-width=\"1\"/>\n";
                out << "<line x1=\"" << fmt(cx - 2.4) << "\" y1=\"" << fmt(cy + 2.4)
                    << "\" x2=\"" << fmt(cx + 2.4) << "\" y2=\"" << fmt(cy - 2.4)
                    << "\" stroke=\"#1f77b4\" stroke-width=\"1\"/>\n";
            }
        }
        std::string stem = std::filesystem::path(trajectory_csvs[ti]).stem().string();
        out << "<text x=\"" << pad << "\" y=\"" << 20 + 16 * (ti + 1) << "\" fill=\"" << color
            << "\" font-size=\"13\">" << stem << "</text>\n";
    }

    if (have_stats) {
        double top = path_h + 30;
        out << "<text x=\"" << pad << "\" y=\"" << top - 6
            << "\" fill=\"#333\" font-size=\"13\">match statistics (min distance red, PSR blue; min-max normalized)</text>\n";
        const auto& rows = trajs[0];
        int max_frame = 1;
        for (const auto& r : rows) max_frame = std::max(max_frame, r.frame_index);
        auto sx = [&](int frame) {
            return pad + (W - 2 * pad) * double(frame) / double(max_frame);
        };
        auto emit_series = [&](auto getter, const char* color) {
            double lo = 1e300, hi = -1e300;
            for (const auto& r : rows) {
                double v = getter(r);
                if (!std::isfinite(v)) continue;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (lo > hi) return;
            double span = std::max(hi - lo, 1e-12);
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
            for (const auto& r : rows) {
                double v = getter(r);
                if (!std::isfinite(v)) continue;
                double norm = (v - lo) / span;
                out << fmt(sx(r.frame_index)) << "," << fmt(top + series_h - norm * series_h) << " ";
            }
            out << "\"/>\n";
        };
        emit_series([](const PlotRow& r) { return r.min_distance; }, "#d62728");
        emit_series([](const PlotRow& r) { return r.psr; }, "#1f77b4");
    }

    out << "</svg>\n";
    if (!out) fail_data("short write: " + out_svg_path);
}

}  // namespace hop
