#include "galvomosaic/mosaic_compose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace galvomosaic {

namespace {

// Row-major index lookup by (row, col); -1 where the grid has no tile.
class GridIndex {
public:
    explicit GridIndex(std::span<const TilePlacement> placements) {
        for (const auto& p : placements) {
            if (p.row < 0 || p.col < 0) throw std::out_of_range("negative tile index");
            rows_ = std::max(rows_, p.row + 1);
            cols_ = std::max(cols_, p.col + 1);
        }
        index_.assign(static_cast<std::size_t>(rows_) * cols_, -1);
        for (std::size_t k = 0; k < placements.size(); ++k) {
            auto& slot = index_[static_cast<std::size_t>(placements[k].row) * cols_ +
                                placements[k].col];
            if (slot != -1) {
                throw std::invalid_argument("duplicate placement for tile (" +
                                            std::to_string(placements[k].row) + ", " +
                                            std::to_string(placements[k].col) + ")");
            }
            slot = static_cast<int>(k);
        }
    }

    [[nodiscard]] int at(int row, int col) const {
        if (row < 0 || col < 0 || row >= rows_ || col >= cols_) return -1;
        return index_[static_cast<std::size_t>(row) * cols_ + col];
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> index_;
};

std::optional<RectRoi> intersect(PixelOffset a, PixelOffset b, TileDims tile) {
    const int x0 = std::max(a.x, b.x);
    const int y0 = std::max(a.y, b.y);
    const int x1 = std::min(a.x, b.x) + tile.width;
    const int y1 = std::min(a.y, b.y) + tile.height;
    if (x1 <= x0 || y1 <= y0) return std::nullopt;
    return RectRoi{x0, y0, x1 - x0, y1 - y0};
}

void check_tile_count(std::size_t tiles, std::size_t placements) {
    if (tiles != placements) {
        throw std::invalid_argument("tile/placement count mismatch: " + std::to_string(tiles) +
                                    " tiles, " + std::to_string(placements) + " placements");
    }
}

TileDims dims_of(std::span<const ImageF> tiles) {
    if (tiles.empty()) throw std::invalid_argument("no tiles to compose");
    const TileDims d{tiles.front().width(), tiles.front().height()};
    for (const auto& t : tiles) {
        if (t.width() != d.width || t.height() != d.height) {
            throw std::invalid_argument("tiles differ in size");
        }
    }
    return d;
}

}  // namespace

PixelOffset rasterize(const TilePlacement& p) {
    if (!std::isfinite(p.dx) || !std::isfinite(p.dy)) {
        throw std::invalid_argument("non-finite placement");
    }
    return PixelOffset{static_cast<int>(std::round(p.dx)), static_cast<int>(std::round(p.dy))};
}

MosaicCanvas::MosaicCanvas(int width, int height, ComposeMode mode)
    : width_(width),
      height_(height),
      mode_(mode),
      value_sum_(width, height, 0.0),
      weight_sum_(width, height, 0.0),
      coverage_(width, height, 0),
      last_tile_(width, height, -1) {
    if (width < 1 || height < 1) throw std::invalid_argument("canvas must be at least 1x1");
}

void MosaicCanvas::check_bounds(const ImageF& tile, PixelOffset at) const {
    if (at.x < 0 || at.y < 0 || at.x + tile.width() > width_ || at.y + tile.height() > height_) {
        throw std::out_of_range("tile at (" + std::to_string(at.x) + ", " + std::to_string(at.y) +
                                ") leaves the " + std::to_string(width_) + "x" +
                                std::to_string(height_) + " canvas");
    }
}

void MosaicCanvas::overwrite(const ImageF& tile, PixelOffset at, int tile_index) {
    check_bounds(tile, at);
    for (int y = 0; y < tile.height(); ++y) {
        const double* s = tile.row(y);
        double* v = value_sum_.row(at.y + y) + at.x;
        double* w = weight_sum_.row(at.y + y) + at.x;
        std::uint16_t* c = coverage_.row(at.y + y) + at.x;
        std::int32_t* t = last_tile_.row(at.y + y) + at.x;
        for (int x = 0; x < tile.width(); ++x) {
            v[x] = s[x];
            w[x] = 1.0;
            if (c[x] < std::numeric_limits<std::uint16_t>::max()) ++c[x];
            t[x] = tile_index;
        }
    }
}

void MosaicCanvas::accumulate(const ImageF& tile, const ImageF& weights, PixelOffset at,
                              int tile_index) {
    check_bounds(tile, at);
    if (!tile.same_shape(weights)) throw std::invalid_argument("weight map size mismatch");
    for (int y = 0; y < tile.height(); ++y) {
        const double* s = tile.row(y);
        const double* wt = weights.row(y);
        double* v = value_sum_.row(at.y + y) + at.x;
        double* w = weight_sum_.row(at.y + y) + at.x;
        std::uint16_t* c = coverage_.row(at.y + y) + at.x;
        std::int32_t* t = last_tile_.row(at.y + y) + at.x;
        for (int x = 0; x < tile.width(); ++x) {
            v[x] += wt[x] * s[x];
            w[x] += wt[x];
            if (c[x] < std::numeric_limits<std::uint16_t>::max()) ++c[x];
            t[x] = tile_index;
        }
    }
}

ImageF MosaicCanvas::finalize() const {
    ImageF out(width_, height_, 0.0);
    const auto& vs = value_sum_.data();
    const auto& ws = weight_sum_.data();
    const auto& cov = coverage_.data();
    auto& o = out.data();
    for (std::size_t k = 0; k < o.size(); ++k) {
        if (cov[k] == 0) continue;
        if (!(ws[k] > 0.0)) {
            throw std::runtime_error("composition error: covered pixel (" +
                                     std::to_string(k % width_) + ", " +
                                     std::to_string(k / width_) + ") has zero total weight");
        }
        o[k] = mode_ == ComposeMode::RawOverwrite ? vs[k] : vs[k] / ws[k];
    }
    return out;
}

Image16 MosaicCanvas::finalize_storage() const { return to_storage(finalize()); }

std::string_view to_string(OverlapAxis a) {
    return a == OverlapAxis::Horizontal ? "horizontal" : "vertical";
}

std::string_view to_string(SeamOrientation o) {
    return o == SeamOrientation::Horizontal ? "horizontal" : "vertical";
}

std::pair<int, int> canvas_dims(std::span<const TilePlacement> placements, TileDims tile) {
    if (placements.empty()) throw std::invalid_argument("canvas_dims: no placements");
    int max_x = std::numeric_limits<int>::min();
    int max_y = std::numeric_limits<int>::min();
    for (const auto& p : placements) {
        const PixelOffset o = rasterize(p);
        if (o.x < 0 || o.y < 0) {
            throw std::invalid_argument("canvas_dims: placements must be origin-shifted");
        }
        max_x = std::max(max_x, o.x);
        max_y = std::max(max_y, o.y);
    }
    return {max_x + tile.width, max_y + tile.height};
}

std::vector<OverlapRegion> compute_overlaps(std::span<const TilePlacement> placements,
                                            TileDims tile) {
    const GridIndex grid(placements);
    std::vector<OverlapRegion> out;
    for (std::size_t k = 0; k < placements.size(); ++k) {
        const auto& p = placements[k];
        const PixelOffset a = rasterize(p);
        const std::pair<int, OverlapAxis> neighbours[] = {
            {grid.at(p.row, p.col + 1), OverlapAxis::Horizontal},
            {grid.at(p.row + 1, p.col), OverlapAxis::Vertical},
        };
        for (const auto& [nb, axis] : neighbours) {
            if (nb < 0) continue;
            const auto rect = intersect(a, rasterize(placements[nb]), tile);
            if (!rect) continue;
            out.push_back(OverlapRegion{static_cast<int>(k), nb, *rect, axis});
        }
    }
    return out;
}

MosaicCanvas compose_raw(const TileSource& tiles, std::span<const TilePlacement> placements,
                         TileDims tile) {
    const auto [w, h] = canvas_dims(placements, tile);
    MosaicCanvas canvas(w, h, ComposeMode::RawOverwrite);
    for (std::size_t k = 0; k < placements.size(); ++k) {
        const ImageF t = tiles(k);
        if (t.width() != tile.width || t.height() != tile.height) {
            throw std::invalid_argument("tile " + std::to_string(k) + " has unexpected size");
        }
        canvas.overwrite(t, rasterize(placements[k]), static_cast<int>(k));
    }
    return canvas;
}

MosaicCanvas compose_raw(std::span<const ImageF> tiles, std::span<const TilePlacement> placements) {
    check_tile_count(tiles.size(), placements.size());
    return compose_raw([&](std::size_t k) { return tiles[k]; }, placements, dims_of(tiles));
}

ImageF seam_weights(int tile_index, std::span<const TilePlacement> placements,
                    std::span<const OverlapRegion> overlaps, TileDims tile) {
    const PixelOffset self = rasterize(placements[static_cast<std::size_t>(tile_index)]);
    std::vector<double> fx(static_cast<std::size_t>(tile.width), 1.0);
    std::vector<double> fy(static_cast<std::size_t>(tile.height), 1.0);

    // Ramp over `len` pixels at the low (or high) end of an axis, sampled at
    // pixel centres: (d + 0.5) / len for d pixels in from the edge.
    auto ramp = [](std::vector<double>& f, int len, bool low_end) {
        const int n = static_cast<int>(f.size());
        len = std::min(len, n);
        for (int d = 0; d < len; ++d) {
            const double w = (d + 0.5) / len;
            double& slot = f[static_cast<std::size_t>(low_end ? d : n - 1 - d)];
            slot = std::min(slot, w);
        }
    };

    for (const auto& ov : overlaps) {
        if (ov.tile_a != tile_index && ov.tile_b != tile_index) continue;
        const int other_index = ov.tile_a == tile_index ? ov.tile_b : ov.tile_a;
        const PixelOffset other = rasterize(placements[static_cast<std::size_t>(other_index)]);
        if (ov.axis == OverlapAxis::Horizontal) {
            if (other.x != self.x) ramp(fx, ov.rect.width, other.x < self.x);
        } else {
            if (other.y != self.y) ramp(fy, ov.rect.height, other.y < self.y);
        }
    }

    ImageF weights(tile.width, tile.height);
    for (int y = 0; y < tile.height; ++y) {
        double* w = weights.row(y);
        for (int x = 0; x < tile.width; ++x) w[x] = fx[static_cast<std::size_t>(x)] *
                                                   fy[static_cast<std::size_t>(y)];
    }
    return weights;
}

MosaicCanvas compose_feathered(const TileSource& tiles, std::span<const TilePlacement> placements,
                               std::span<const OverlapRegion> overlaps, TileDims tile) {
    const auto [w, h] = canvas_dims(placements, tile);
    MosaicCanvas canvas(w, h, ComposeMode::Feathered);
    for (std::size_t k = 0; k < placements.size(); ++k) {
        const ImageF t = tiles(k);
        if (t.width() != tile.width || t.height() != tile.height) {
            throw std::invalid_argument("tile " + std::to_string(k) + " has unexpected size");
        }
        const ImageF weights = seam_weights(static_cast<int>(k), placements, overlaps, tile);
        canvas.accumulate(t, weights, rasterize(placements[k]), static_cast<int>(k));
    }
    return canvas;
}

MosaicCanvas compose_feathered(std::span<const ImageF> tiles,
                               std::span<const TilePlacement> placements,
                               std::span<const OverlapRegion> overlaps) {
    check_tile_count(tiles.size(), placements.size());
    return compose_feathered([&](std::size_t k) { return tiles[k]; }, placements, overlaps,
                             dims_of(tiles));
}

std::vector<SeamLine> derive_seams(std::span<const TilePlacement> placements, TileDims tile) {
    std::vector<SeamLine> seams;
    for (const auto& ov : compute_overlaps(placements, tile)) {
        const PixelOffset a = rasterize(placements[static_cast<std::size_t>(ov.tile_a)]);
        const PixelOffset b = rasterize(placements[static_cast<std::size_t>(ov.tile_b)]);
        if (ov.axis == OverlapAxis::Horizontal) {
            if (a.x == b.x) continue;
            const int x = b.x > a.x ? b.x : b.x + tile.width;
            seams.push_back(SeamLine{SeamOrientation::Vertical, x, ov.rect.y0, ov.rect.y1()});
        } else {
            if (a.y == b.y) continue;
            const int y = b.y > a.y ? b.y : b.y + tile.height;
            seams.push_back(SeamLine{SeamOrientation::Horizontal, y, ov.rect.x0, ov.rect.x1()});
        }
    }
    return seams;
}

}  // namespace galvomosaic
