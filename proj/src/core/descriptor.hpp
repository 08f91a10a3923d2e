#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/geodata.hpp"
#include "core/image.hpp"

namespace hop {

/// Holistic HOG layout. The descriptor covers the whole window: cell
/// histograms grouped into overlapping blocks, L2-Hys normalized per
/// block, concatenated over the block lattice in row-major order.
struct HogParams {
    int cell = 32;
    int block = 64;
    int block_stride = 32;
    int bins = 9;
    int window = 180;

    int blocks_per_side() const { return (window - block) / block_stride + 1; }
    int cells_per_block() const { return block / cell; }
    size_t descriptor_len() const {
        size_t nb = size_t(blocks_per_side());
        size_t nc = size_t(cells_per_block());
        return nb * nb * nc * nc * size_t(bins);
    }
    void validate() const;
    bool operator==(const HogParams&) const = default;
};

struct HogDescriptor {
    std::vector<float> values;
};

/// Per-pixel gradient field: centered differences with replicate border,
/// magnitude and unsigned orientation in [0, 180) degrees.
struct GradientField {
    ImageF magnitude;
    ImageF orientation_deg;
};

GradientField compute_gradients(const Image8& image);

/// Descriptor of a window-sized image. Orientation votes are
/// magnitude-weighted, split linearly between the two nearest bins, and
/// quantized to a fixed-point integer grid so that the table construction
/// below reproduces this function bit for bit.
HogDescriptor compute_hog(const Image8& image, const HogParams& params);

/// Normalized Euclidean distance between unit-normalized descriptors,
/// in [0, 1]. An all-zero descriptor is treated as the first basis vector.
double hog_distance(const HogDescriptor& a, const HogDescriptor& b);

/// Dense store of map-window descriptors addressed by window top-left on
/// a stride lattice. Built once per map via per-bin summed-area tables of
/// the quantized votes; lookups are immutable and thread-safe.
class HogTable {
public:
    HogTable() = default;

    int map_width() const { return map_w_; }
    int map_height() const { return map_h_; }
    int lattice_stride() const { return stride_; }
    const HogParams& params() const { return params_; }
    size_t entry_count() const { return size_t(nx_) * ny_; }
    int lattice_nx() const { return nx_; }
    int lattice_ny() const { return ny_; }

    /// Descriptor of the map window whose top-left is the lattice point
    /// nearest to (x, y). Out-of-range queries are errors.
    HogDescriptor lookup(double x, double y) const;

    /// Zero-copy variant used by the tracker hot path.
    const float* lookup_ptr(double x, double y) const;

    void save(const std::string& path) const;
    static HogTable load(const std::string& path);

    friend HogTable build_table(const GeoMap& map, const HogParams& params, int lattice_stride);

private:
    HogParams params_;
    int map_w_ = 0, map_h_ = 0;
    int stride_ = 1;
    int nx_ = 0, ny_ = 0;
    std::vector<float> store_;
};

HogTable build_table(const GeoMap& map, const HogParams& params, int lattice_stride);

/// Lattice dimensions (nx, ny) for a given map/window/stride. The table
/// has an entry for every lattice point.
std::pair<int, int> lattice_dims(int map_w, int map_h, int window, int stride);

}  // namespace hop
