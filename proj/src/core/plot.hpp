#pragma once

#include <string>
#include <vector>

namespace hop {

/// Overlay trajectories and ground truth as an SVG figure, positions in
/// meters. Each trajectory contributes exactly one <path> polyline (the
/// ground truth one more); registered rows are drawn as dots and
/// fallback rows as crosses. When descriptor-distance statistics are
/// present, a second panel shows the min-distance and PSR series
/// min-max normalized to [0, 1].
void plot_svg(const std::vector<std::string>& trajectory_csvs,
              const std::string& groundtruth_csv,  // empty = none
              const std::string& out_svg_path);

}  // namespace hop
