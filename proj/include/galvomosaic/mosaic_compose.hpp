#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "galvomosaic/image.hpp"
#include "galvomosaic/scan_geometry.hpp"
#include "galvomosaic/tile_correction.hpp"

namespace galvomosaic {

struct TileDims {
    int width = 0;
    int height = 0;
};

/// Integer canvas position of a placement (round half away from zero).
struct PixelOffset {
    int x = 0;
    int y = 0;
};

PixelOffset rasterize(const TilePlacement& p);

enum class ComposeMode { RawOverwrite, Feathered };

/// Global accumulation grid. Finalized intensity is value_sum / weight_sum
/// where weight_sum > 0, and 0 elsewhere.
class MosaicCanvas {
public:
    MosaicCanvas(int width, int height, ComposeMode mode);

    [[nodiscard]] int width() const { return width_; }
    [[nodiscard]] int height() const { return height_; }
    [[nodiscard]] ComposeMode mode() const { return mode_; }

    /// Writes the tile over whatever is there (weight 1).
    void overwrite(const ImageF& tile, PixelOffset at, int tile_index);
    /// Adds weight * tile and weight.
    void accumulate(const ImageF& tile, const ImageF& weights, PixelOffset at, int tile_index);

    [[nodiscard]] const ImageF& value_sum() const { return value_sum_; }
    [[nodiscard]] const ImageF& weight_sum() const { return weight_sum_; }
    /// Number of tiles whose bounds contain each pixel.
    [[nodiscard]] const Image<std::uint16_t>& coverage() const { return coverage_; }
    /// Index of the last tile that touched each pixel, -1 if none.
    [[nodiscard]] const Image<std::int32_t>& last_tile() const { return last_tile_; }

    /// Normalized intensities. Throws std::runtime_error if a covered pixel
    /// has zero total weight.
    [[nodiscard]] ImageF finalize() const;
    /// finalize() quantized to 16-bit storage.
    [[nodiscard]] Image16 finalize_storage() const;

private:
    void check_bounds(const ImageF& tile, PixelOffset at) const;

    int width_;
    int height_;
    ComposeMode mode_;
    ImageF value_sum_;
    ImageF weight_sum_;
    Image<std::uint16_t> coverage_;
    Image<std::int32_t> last_tile_;
};

enum class OverlapAxis {
    Horizontal,  // left/right neighbours (i, j) - (i, j+1); the seam is a vertical line
    Vertical,    // top/bottom neighbours (i, j) - (i+1, j); the seam is a horizontal line
};

std::string_view to_string(OverlapAxis a);

/// Intersection of two grid-adjacent tiles' rasterized bounds, in canvas
/// coordinates. tile_a precedes tile_b in acquisition order.
struct OverlapRegion {
    int tile_a = 0;  // index into the placement list
    int tile_b = 0;
    RectRoi rect;
    OverlapAxis axis = OverlapAxis::Horizontal;
};

enum class SeamOrientation { Horizontal, Vertical };

std::string_view to_string(SeamOrientation o);

/// Overwrite boundary between two tiles. A vertical seam at position x
/// separates canvas columns x-1 and x over rows [extent_begin, extent_end);
/// a horizontal seam at y separates rows y-1 and y over columns in the extent.
struct SeamLine {
    SeamOrientation orientation = SeamOrientation::Vertical;
    int position = 0;
    int extent_begin = 0;
    int extent_end = 0;  // exclusive

    bool operator==(const SeamLine&) const = default;
};

/// (max rounded dx + tile width, max rounded dy + tile height).
std::pair<int, int> canvas_dims(std::span<const TilePlacement> placements, TileDims tile);

/// One region per intersecting grid-adjacent pair, in row-major order of tile_a
/// with the horizontal neighbour before the vertical one.
std::vector<OverlapRegion> compute_overlaps(std::span<const TilePlacement> placements,
                                            TileDims tile);

/// Supplies the (already corrected) normalized frame for placement k.
using TileSource = std::function<ImageF(std::size_t)>;

/// Row-major overwrite: later frames replace earlier ones.
MosaicCanvas compose_raw(const TileSource& tiles, std::span<const TilePlacement> placements,
                         TileDims tile);
MosaicCanvas compose_raw(std::span<const ImageF> tiles, std::span<const TilePlacement> placements);

/// Per-frame seam weight: 1 in the interior, ramping linearly toward 0 across
/// each edge that lies inside one of the given overlaps, over that overlap's
/// width. Ramps are sampled at pixel centres so complementary ramps of two
/// neighbours sum to exactly 1.
ImageF seam_weights(int tile_index, std::span<const TilePlacement> placements,
                    std::span<const OverlapRegion> overlaps, TileDims tile);

/// Normalized weighted accumulation; for a two-frame overlap this is
/// W I_1 + (1 - W) I_2.
MosaicCanvas compose_feathered(const TileSource& tiles, std::span<const TilePlacement> placements,
                               std::span<const OverlapRegion> overlaps, TileDims tile);
MosaicCanvas compose_feathered(std::span<const ImageF> tiles,
                               std::span<const TilePlacement> placements,
                               std::span<const OverlapRegion> overlaps);

/// Geometric seams at every later frame's edge inside an overlap.
std::vector<SeamLine> derive_seams(std::span<const TilePlacement> placements, TileDims tile);

/// Values of both frames over an overlap, paired pixel by pixel (row-major).
template <typename T>
std::pair<std::vector<double>, std::vector<double>> sample_overlap(
    const Image<T>& tile_a, PixelOffset at_a, const Image<T>& tile_b, PixelOffset at_b,
    const RectRoi& rect) {
    std::pair<std::vector<double>, std::vector<double>> out;
    out.first.reserve(static_cast<std::size_t>(rect.area()));
    out.second.reserve(static_cast<std::size_t>(rect.area()));
    for (int y = rect.y0; y < rect.y1(); ++y) {
        const T* ra = tile_a.row(y - at_a.y);
        const T* rb = tile_b.row(y - at_b.y);
        for (int x = rect.x0; x < rect.x1(); ++x) {
            out.first.push_back(static_cast<double>(ra[x - at_a.x]));
            out.second.push_back(static_cast<double>(rb[x - at_b.x]));
        }
    }
    return out;
}

}  // namespace galvomosaic
