#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "galvomosaic/image.hpp"
#include "galvomosaic/metrics.hpp"
#include "galvomosaic/mosaic_compose.hpp"
#include "galvomosaic/scan_geometry.hpp"
#include "galvomosaic/tile_correction.hpp"

namespace galvomosaic::sim {

/// Acquisition non-idealities applied to every simulated frame. The defaults
/// are the identity (no degradation).
struct DegradationSpec {
    double vignette_min = 1.0;   // gain at the frame corners, in (0, 1]
    double corner_offset = 0.0;  // added inside the ROI footprint
    double gain_jitter = 0.0;    // per-frame gain drawn from [1 - j, 1 + j]
    double noise_sigma = 0.0;    // additive Gaussian, normalized units
    std::uint64_t rng_seed = 0;
    double ref_bright_level = 0.8;  // flat bright reference target
    double ref_dark_level = 0.05;   // flat dark reference target
    int reference_frames = 4;       // frames averaged per reference

    /// Throws ConfigError naming the first out-of-range field.
    void validate() const;
    [[nodiscard]] bool is_identity() const;
};

enum class TargetPattern { Uniform, Bars, UsafLike };

std::string_view to_string(TargetPattern p);
TargetPattern parse_target_pattern(std::string_view text);

struct TargetSpec {
    TargetPattern pattern = TargetPattern::UsafLike;
    double value = 0.5;  // Uniform level
    int pitch = 8;       // Bars half-period, px
};

/// Synthetic specimen. Bars is a square wave along x with period 2 * pitch.
/// UsafLike lays out, on a mid-grey field, a bright block, a dark signal
/// block, an unlit dark block and bar groups of decreasing pitch; block sizes
/// are 1400 x 700, 400 x 400 and 700 x 900 px on a 5000 px field and shrink
/// proportionally on smaller ones.
ImageF make_target(int width, int height, const TargetSpec& spec);

/// Measurement regions matching make_target's UsafLike layout.
std::vector<RegionSpec> target_regions(int width, int height);

struct Tile {
    ImageF pixels;
    int row = 0;
    int col = 0;
};

/// Radial gain 1 - (1 - vmin) (r / r_corner)^2 about the frame centre.
ImageF vignette_field(int width, int height, double vignette_min);

/// Seed for one frame, derived from the dataset seed and the frame's indices
/// only, so frames can be generated in any order.
std::uint64_t stream_seed(std::uint64_t base, std::int64_t a, std::int64_t b);

/// Frame for one placement. Integer mode crops at the rounded offset; subpixel
/// mode samples bilinearly at the exact real-valued offset, leaving the
/// stitcher's rounding as a residual misregistration.
Tile extract_tile(const ImageF& truth, const TilePlacement& placement, TileDims dims,
                  bool subpixel = false);

/// One frame per placement of placement_table(cfg). Throws std::out_of_range
/// when the truth image is smaller than the canvas, reporting the required size.
std::vector<Tile> extract_tiles(const ImageF& truth, const ScanConfig& cfg, bool subpixel = false);

/// Applies vignette, jitter, ROI offset and noise to one frame, then clamps.
void degrade_tile(Tile& tile, const DegradationSpec& spec, std::span<const RectRoi> rois,
                  const ImageF& vignette);

struct References {
    ImageF bright;
    ImageF dark;
};

/// Degraded flat references (no jitter), each the mean of
/// spec.reference_frames noisy acquisitions.
References make_references(TileDims dims, const DegradationSpec& spec,
                           std::span<const RectRoi> rois);

struct DegradedDataset {
    std::vector<Tile> tiles;
    References references;
};

DegradedDataset degrade(std::vector<Tile> tiles, const DegradationSpec& spec,
                        std::span<const RectRoi> rois);

/// Total acquisition time in seconds for n_rows * n_cols frames.
double timing_report(const ScanConfig& cfg, double per_frame_ms);

}  // namespace galvomosaic::sim
