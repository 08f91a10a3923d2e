#include "core/globalinit.hpp"

#include <cmath>
#include <complex>

#include "core/error.hpp"
#include "core/fft.hpp"

namespace hop {

ConfidenceMap correlate(const Image8& frame, const GeoMap& map) {
    const Image8& M = map.raster;
    if (frame.width > M.width || frame.height > M.height)
        fail_usage("frame larger than map");

    const int sw = M.width - frame.width + 1;
    const int sh = M.height - frame.height + 1;
    const size_t fn = size_t(frame.width) * frame.height;

    ConfidenceMap out;
    out.width = sw;
    out.height = sh;
    out.scores.assign(size_t(sw) * sh, 0.0);

    // frame statistics
    double fsum = 0;
    for (uint8_t v : frame.px) fsum += v;
    double fmean = fsum / double(fn);
    double fnorm2 = 0;
    for (uint8_t v : frame.px) {
        double d = v - fmean;
        fnorm2 += d * d;
    }
    double fnorm = std::sqrt(fnorm2);
    if (fnorm <= 1e-9) {
        // flat frame carries no signal; flag instead of dividing by zero
        out.degenerate = true;
        out.peak = MapPoint(0, 0);
        out.peak_score = 0;
        return out;
    }

    double msum = 0;
    for (uint8_t v : M.px) msum += v;
    double mmean = msum / double(size_t(M.width) * M.height);

    // raw correlation with the mean-subtracted frame via the FFT identity
    // G = F . conj(H); zero-mean numerator follows since the frame sums to 0
    const int P = next_pow2(M.width);
    const int Q = next_pow2(M.height);
    std::vector<std::complex<double>> fa(size_t(P) * Q), fb(size_t(P) * Q);
    for (int y = 0; y < M.height; ++y)
        for (int x = 0; x < M.width; ++x)
            fa[size_t(y) * P + x] = double(M.at(x, y)) - mmean;
    for (int y = 0; y < frame.height; ++y)
        for (int x = 0; x < frame.width; ++x)
            fb[size_t(y) * P + x] = double(frame.at(x, y)) - fmean;

    fft_2d(fa, P, Q, false);
    fft_2d(fb, P, Q, false);
    for (size_t i = 0; i < fa.size(); ++i) fa[i] *= std::conj(fb[i]);
    fft_2d(fa, P, Q, true);

    // per-window norms from integer summed-area tables (exact)
    const size_t tw = size_t(M.width) + 1, th = size_t(M.height) + 1;
    std::vector<int64_t> sat(tw * th, 0), sat2(tw * th, 0);
    for (int y = 0; y < M.height; ++y)
        for (int x = 0; x < M.width; ++x) {
            int64_t v = M.at(x, y);
            sat[size_t(y + 1) * tw + x + 1] = v;
            sat2[size_t(y + 1) * tw + x + 1] = v * v;
        }
    for (size_t y = 1; y < th; ++y)
        for (size_t x = 1; x < tw; ++x) {
            sat[y * tw + x] += sat[y * tw + x - 1] + sat[(y - 1) * tw + x] - sat[(y - 1) * tw + x - 1];
            sat2[y * tw + x] += sat2[y * tw + x - 1] + sat2[(y - 1) * tw + x] - sat2[(y - 1) * tw + x - 1];
        }
    auto rect = [&](const std::vector<int64_t>& s, int x0, int y0, int x1, int y1) {
        return s[size_t(y1) * tw + x1] - s[size_t(y0) * tw + x1] - s[size_t(y1) * tw + x0] +
               s[size_t(y0) * tw + x0];
    };

    double best = -2.0;
    size_t best_idx = 0;
    for (int v = 0; v < sh; ++v) {
        for (int u = 0; u < sw; ++u) {
            int64_t wsum = rect(sat, u, v, u + frame.width, v + frame.height);
            int64_t wsum2 = rect(sat2, u, v, u + frame.width, v + frame.height);
            double var_term = double(wsum2) - double(wsum) * double(wsum) / double(fn);
            double wnorm = var_term > 0 ? std::sqrt(var_term) : 0.0;
            double score = 0.0;
            if (wnorm > 1e-9)
                score = fa[size_t(v) * P + u].real() / (wnorm * fnorm);
            size_t idx = size_t(v) * sw + u;
            out.scores[idx] = score;
            if (score > best) {
                best = score;
                best_idx = idx;
            }
        }
    }
    out.peak = MapPoint(double(best_idx % sw), double(best_idx / sw));
    out.peak_score = best;
    return out;
}

std::optional<MapPoint> global_localize(const Image8& frame, const GeoMap& map,
                                        double min_peak) {
    ConfidenceMap cm = correlate(frame, map);
    if (cm.degenerate || cm.peak_score < min_peak) return std::nullopt;
    return cm.peak;
}

}  // namespace hop
