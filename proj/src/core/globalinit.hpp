#pragma once

#include <optional>
#include <vector>

#include "core/geodata.hpp"
#include "core/image.hpp"

namespace hop {

/// Whole-map match surface for one frame. scores[v * width + u] is the
/// zero-mean normalized cross-correlation of the frame against the map
/// window whose top-left pixel is (u, v).
struct ConfidenceMap {
    int width = 0;
    int height = 0;
    std::vector<double> scores;
    MapPoint peak;
    double peak_score = 0;
    bool degenerate = false;  // frame had zero variance

    double at(int u, int v) const { return scores[size_t(v) * width + u]; }
};

/// Frequency-domain ZNCC of a (preprocessed) frame against the full map.
/// Scores are bounded by [-1, 1]; the peak is the row-major-first argmax.
ConfidenceMap correlate(const Image8& frame, const GeoMap& map);

/// Position fix from the confidence peak, or nullopt when the peak is
/// below min_peak (no confident fix; callers may retry on a later frame).
std::optional<MapPoint> global_localize(const Image8& frame, const GeoMap& map,
                                        double min_peak);

}  // namespace hop
