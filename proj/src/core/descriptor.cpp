#include "core/descriptor.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "core/error.hpp"
#include "core/parallel.hpp"

namespace hop {

namespace {

// Votes are quantized to 1/2^20 so cell sums are exact integers: a direct
// scan of a window and a summed-area-table difference then agree bit for
// bit, and int64 headroom holds far beyond any realistic map size.
constexpr double kVoteScale = double(1 << 20);
constexpr double kRadToDeg = 57.29577951308232087680;
constexpr double kHysClip = 0.2;

struct QuantizedVote {
    int bin0;
    int bin1;
    int64_t v0;
    int64_t v1;
};

inline QuantizedVote quantize_vote(double gx, double gy, int bins) {
    QuantizedVote q{0, 0, 0, 0};
    double mag = std::sqrt(gx * gx + gy * gy);
    if (mag == 0.0) return q;
    double deg = std::atan2(gy, gx) * kRadToDeg;
    if (deg < 0) deg += 180.0;
    if (deg >= 180.0) deg -= 180.0;
    double bin_width = 180.0 / bins;
    double pos = deg / bin_width - 0.5;
    double b0f = std::floor(pos);
    double frac = pos - b0f;
    int b0 = int(b0f);
    b0 = ((b0 % bins) + bins) % bins;
    q.bin0 = b0;
    q.bin1 = (b0 + 1) % bins;
    q.v0 = std::llround(mag * (1.0 - frac) * kVoteScale);
    q.v1 = std::llround(mag * frac * kVoteScale);
    return q;
}

// Shared block normalization: exact int64 cell sums in, float32 out.
// Both the direct path and the table path funnel through here.
void normalize_block(const int64_t* cells, int count, float* out) {
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i) v[i] = double(cells[i]) * (1.0 / kVoteScale);
    double n2 = 0;
    for (double x : v) n2 += x * x;
    if (n2 > 0) {
        double inv = 1.0 / std::sqrt(n2);
        for (double& x : v) {
            x *= inv;
            if (x > kHysClip) x = kHysClip;
        }
        n2 = 0;
        for (double x : v) n2 += x * x;
        if (n2 > 0) {
            double inv2 = 1.0 / std::sqrt(n2);
            for (double& x : v) x *= inv2;
        }
    }
    for (int i = 0; i < count; ++i) out[i] = float(v[i]);
}

}  // namespace

void HogParams::validate() const {
    if (cell <= 0 || block <= 0 || block_stride <= 0 || bins <= 0 || window <= 0)
        fail_usage("descriptor parameters must be positive");
    if (block % cell != 0) fail_usage("block must be a multiple of cell");
    if (block % block_stride != 0) fail_usage("block_stride must divide block");
    if (window < block) fail_usage("window must be at least one block");
}

GradientField compute_gradients(const Image8& image) {
    if (image.width < 3 || image.height < 3) fail_usage("image too small for gradients");
    GradientField g;
    g.magnitude = ImageF(image.width, image.height);
    g.orientation_deg = ImageF(image.width, image.height);
    for (int y = 0; y < image.height; ++y) {
        int ym = std::max(y - 1, 0), yp = std::min(y + 1, image.height - 1);
        for (int x = 0; x < image.width; ++x) {
            int xm = std::max(x - 1, 0), xp = std::min(x + 1, image.width - 1);
            double gx = double(image.at(xp, y)) - double(image.at(xm, y));
            double gy = double(image.at(x, yp)) - double(image.at(x, ym));
            g.magnitude.at(x, y) = float(std::sqrt(gx * gx + gy * gy));
            double deg = 0;
            if (gx != 0 || gy != 0) {
                deg = std::atan2(gy, gx) * kRadToDeg;
                if (deg < 0) deg += 180.0;
                if (deg >= 180.0) deg -= 180.0;
            }
            g.orientation_deg.at(x, y) = float(deg);
        }
    }
    return g;
}

HogDescriptor compute_hog(const Image8& image, const HogParams& params) {
    params.validate();
    if (image.width != params.window || image.height != params.window)
        fail_usage("compute_hog expects a window-sized image");

    const int w = params.window;
    const int bins = params.bins;
    const int nb = params.blocks_per_side();
    const int ncb = params.cells_per_block();

    // Distinct cell origins over all blocks; overlapping blocks share cells.
    std::map<std::pair<int, int>, int> cell_index;
    for (int bj = 0; bj < nb; ++bj)
        for (int bi = 0; bi < nb; ++bi)
            for (int cj = 0; cj < ncb; ++cj)
                for (int ci = 0; ci < ncb; ++ci) {
                    std::pair<int, int> origin{bi * params.block_stride + ci * params.cell,
                                               bj * params.block_stride + cj * params.cell};
                    cell_index.emplace(origin, 0);
                }
    int next = 0;
    for (auto& kv : cell_index) kv.second = next++;

    // Only pixels with full centered-difference support vote; the border
    // ring is excluded so table extraction sees identical integers.
    std::vector<int64_t> cell_hist(size_t(next) * bins, 0);
    for (const auto& kv : cell_index) {
        int cx = kv.first.first, cy = kv.first.second;
        int64_t* hist = &cell_hist[size_t(kv.second) * bins];
        int x0 = std::max(cx, 1), x1 = std::min(cx + params.cell, w - 1);
        int y0 = std::max(cy, 1), y1 = std::min(cy + params.cell, w - 1);
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x) {
                double gx = double(image.at(x + 1, y)) - double(image.at(x - 1, y));
                double gy = double(image.at(x, y + 1)) - double(image.at(x, y - 1));
                QuantizedVote q = quantize_vote(gx, gy, bins);
                hist[q.bin0] += q.v0;
                hist[q.bin1] += q.v1;
            }
    }

    HogDescriptor desc;
    desc.values.resize(params.descriptor_len());
    const int block_len = ncb * ncb * bins;
    std::vector<int64_t> block_cells(block_len);
    size_t off = 0;
    for (int bj = 0; bj < nb; ++bj)
        for (int bi = 0; bi < nb; ++bi) {
            int k = 0;
            for (int cj = 0; cj < ncb; ++cj)
                for (int ci = 0; ci < ncb; ++ci) {
                    std::pair<int, int> origin{bi * params.block_stride + ci * params.cell,
                                               bj * params.block_stride + cj * params.cell};
                    int idx = cell_index.at(origin);
                    for (int b = 0; b < bins; ++b)
                        block_cells[k * bins + b] = cell_hist[size_t(idx) * bins + b];
                    ++k;
                }
            normalize_block(block_cells.data(), block_len, &desc.values[off]);
            off += size_t(block_len);
        }
    return desc;
}

double hog_distance(const HogDescriptor& a, const HogDescriptor& b) {
    if (a.values.size() != b.values.size()) fail_usage("descriptor length mismatch");
    const size_t n = a.values.size();
    double na = 0, nb = 0;
    for (size_t i = 0; i < n; ++i) {
        na += double(a.values[i]) * a.values[i];
        nb += double(b.values[i]) * b.values[i];
    }
    na = std::sqrt(na);
    nb = std::sqrt(nb);
    // a blank window maps to the first basis vector so the metric is total
    double acc = 0;
    for (size_t i = 0; i < n; ++i) {
        double av = na > 0 ? a.values[i] / na : (i == 0 ? 1.0 : 0.0);
        double bv = nb > 0 ? b.values[i] / nb : (i == 0 ? 1.0 : 0.0);
        double d = av - bv;
        acc += d * d;
    }
    return std::sqrt(acc) / 2.0;
}

std::pair<int, int> lattice_dims(int map_w, int map_h, int window, int stride) {
    if (map_w < window || map_h < window) fail_usage("window larger than map");
    if (stride <= 0) fail_usage("lattice stride must be positive");
    return {(map_w - window) / stride + 1, (map_h - window) / stride + 1};
}

HogTable build_table(const GeoMap& map, const HogParams& params, int lattice_stride) {
    params.validate();
    const Image8& img = map.raster;
    auto [nx, ny] = lattice_dims(img.width, img.height, params.window, lattice_stride);

    const int w = img.width, h = img.height;
    const int bins = params.bins;

    // Per-bin summed-area tables of the quantized votes, (w+1) x (h+1).
    const size_t sw = size_t(w) + 1, sh = size_t(h) + 1;
    std::vector<int64_t> sat(size_t(bins) * sw * sh, 0);
    auto S = [&](int b, int x, int y) -> int64_t& {
        return sat[size_t(b) * sw * sh + size_t(y) * sw + x];
    };

    for (int y = 1; y + 1 < h; ++y) {
        for (int x = 1; x + 1 < w; ++x) {
            double gx = double(img.at(x + 1, y)) - double(img.at(x - 1, y));
            double gy = double(img.at(x, y + 1)) - double(img.at(x, y - 1));
            QuantizedVote q = quantize_vote(gx, gy, bins);
            if (q.v0 != 0) S(q.bin0, x + 1, y + 1) += q.v0;
            if (q.v1 != 0) S(q.bin1, x + 1, y + 1) += q.v1;
        }
    }
    for (int b = 0; b < bins; ++b)
        for (size_t y = 1; y < sh; ++y)
            for (size_t x = 1; x < sw; ++x)
                S(b, int(x), int(y)) += S(b, int(x) - 1, int(y)) + S(b, int(x), int(y) - 1) -
                                        S(b, int(x) - 1, int(y) - 1);

    auto rect_sum = [&](int b, int x0, int y0, int x1, int y1) -> int64_t {
        // half-open rect [x0,x1) x [y0,y1), assumed non-empty and in range
        return S(b, x1, y1) - S(b, x0, y1) - S(b, x1, y0) + S(b, x0, y0);
    };

    HogTable table;
    table.params_ = params;
    table.map_w_ = w;
    table.map_h_ = h;
    table.stride_ = lattice_stride;
    table.nx_ = nx;
    table.ny_ = ny;
    const size_t len = params.descriptor_len();
    table.store_.resize(size_t(nx) * ny * len);

    const int nb = params.blocks_per_side();
    const int ncb = params.cells_per_block();
    const int block_len = ncb * ncb * bins;

    parallel_for(0, size_t(ny), [&](size_t row) {
        std::vector<int64_t> block_cells(block_len);
        int ly = int(row) * lattice_stride;
        for (int col = 0; col < nx; ++col) {
            int lx = col * lattice_stride;
            // voting pixels are the window interior [lx+1, lx+window-1) etc.
            int ix0 = lx + 1, ix1 = lx + params.window - 1;
            int iy0 = ly + 1, iy1 = ly + params.window - 1;
            float* out = &table.store_[(size_t(row) * nx + col) * len];
            size_t off = 0;
            for (int bj = 0; bj < nb; ++bj)
                for (int bi = 0; bi < nb; ++bi) {
                    int k = 0;
                    for (int cj = 0; cj < ncb; ++cj)
                        for (int ci = 0; ci < ncb; ++ci) {
                            int cx0 = lx + bi * params.block_stride + ci * params.cell;
                            int cy0 = ly + bj * params.block_stride + cj * params.cell;
                            int x0 = std::max(cx0, ix0), x1 = std::min(cx0 + params.cell, ix1);
                            int y0 = std::max(cy0, iy0), y1 = std::min(cy0 + params.cell, iy1);
                            for (int b = 0; b < bins; ++b)
                                block_cells[k * bins + b] =
                                    (x0 < x1 && y0 < y1) ? rect_sum(b, x0, y0, x1, y1) : 0;
                            ++k;
                        }
                    normalize_block(block_cells.data(), block_len, out + off);
                    off += size_t(block_len);
                }
        }
    });
    return table;
}

const float* HogTable::lookup_ptr(double x, double y) const {
    if (store_.empty()) fail_usage("table not built");
    if (!(x >= 0 && y >= 0 && x <= map_w_ - params_.window && y <= map_h_ - params_.window))
        fail_usage("table lookup out of range (" + std::to_string(x) + ", " + std::to_string(y) + ")");
    int col = int(std::lround(x / stride_));
    int row = int(std::lround(y / stride_));
    col = std::clamp(col, 0, nx_ - 1);
    row = std::clamp(row, 0, ny_ - 1);
    return &store_[(size_t(row) * nx_ + col) * params_.descriptor_len()];
}

HogDescriptor HogTable::lookup(double x, double y) const {
    const float* p = lookup_ptr(x, y);
    HogDescriptor d;
    d.values.assign(p, p + params_.descriptor_len());
    return d;
}

namespace {

constexpr char kTableMagic[8] = {'H', 'O', 'P', 'T', 'B', 'L', '1', '\0'};

template <typename T>
void put(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T take(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

}  // namespace

void HogTable::save(const std::string& path) const {
    static_assert(std::endian::native == std::endian::little, "cache format is little-endian");
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_data("cannot write table cache: " + path);
    out.write(kTableMagic, 8);
    for (int v : {params_.cell, params_.block, params_.block_stride, params_.bins,
                  params_.window, map_w_, map_h_, stride_, nx_, ny_})
        put(out, uint32_t(v));
    put(out, uint64_t(params_.descriptor_len()));
    uint64_t payload_bytes = uint64_t(store_.size()) * sizeof(float);
    put(out, payload_bytes);
    uLong crc = crc32(0L, reinterpret_cast<const Bytef*>(store_.data()), uInt(payload_bytes));
    put(out, uint32_t(crc));
    out.write(reinterpret_cast<const char*>(store_.data()), std::streamsize(payload_bytes));
    if (!out) fail_data("short write: " + path);
}

HogTable HogTable::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_data("cannot open table cache: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kTableMagic, 8) != 0)
        fail_data("not a descriptor table cache: " + path);
    HogTable t;
    t.params_.cell = int(take<uint32_t>(in));
    t.params_.block = int(take<uint32_t>(in));
    t.params_.block_stride = int(take<uint32_t>(in));
    t.params_.bins = int(take<uint32_t>(in));
    t.params_.window = int(take<uint32_t>(in));
    t.map_w_ = int(take<uint32_t>(in));
    t.map_h_ = int(take<uint32_t>(in));
    t.stride_ = int(take<uint32_t>(in));
    t.nx_ = int(take<uint32_t>(in));
    t.ny_ = int(take<uint32_t>(in));
    uint64_t len = take<uint64_t>(in);
    uint64_t payload_bytes = take<uint64_t>(in);
    uint32_t stored_crc = take<uint32_t>(in);
    if (!in) fail_data("truncated table cache header: " + path);
    t.params_.validate();
    if (len != t.params_.descriptor_len()) fail_data("table cache length mismatch: " + path);
    if (payload_bytes != uint64_t(t.nx_) * t.ny_ * len * sizeof(float))
        fail_data("table cache payload size mismatch: " + path);
    t.store_.resize(payload_bytes / sizeof(float));
    in.read(reinterpret_cast<char*>(t.store_.data()), std::streamsize(payload_bytes));
    if (!in) fail_data("truncated table cache payload: " + path);
    uLong crc = crc32(0L, reinterpret_cast<const Bytef*>(t.store_.data()), uInt(payload_bytes));
    if (uint32_t(crc) != stored_crc) fail_data("table cache checksum error: " + path);
    return t;
}

}  // namespace hop
