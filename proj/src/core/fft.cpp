#include "core/fft.hpp"

#include <cmath>

#include "core/error.hpp"

namespace hop {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
}

int next_pow2(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft_1d(std::complex<double>* a, int n, bool inverse) {
    if (n <= 1) return;
    if (n & (n - 1)) fail_usage("FFT length must be a power of two");

    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        double ang = kTwoPi / len * (inverse ? 1.0 : -1.0);
        std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (int i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (int k = 0; k < len / 2; ++k) {
                std::complex<double> u = a[i + k];
                std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

void fft_2d(std::vector<std::complex<double>>& data, int w, int h, bool inverse) {
    if (int(data.size()) != w * h) fail_usage("FFT buffer size mismatch");
    for (int y = 0; y < h; ++y) fft_1d(&data[size_t(y) * w], w, inverse);

    std::vector<std::complex<double>> col(h);
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) col[y] = data[size_t(y) * w + x];
        fft_1d(col.data(), h, inverse);
        for (int y = 0; y < h; ++y) data[size_t(y) * w + x] = col[y];
    }
    if (inverse) {
        double scale = 1.0 / (double(w) * h);
        for (auto& v : data) v *= scale;
    }
}

}  // namespace hop
