#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "galvomosaic/image.hpp"
#include "galvomosaic/mosaic_compose.hpp"
#include "galvomosaic/tile_correction.hpp"

namespace galvomosaic {

/// I_j ~ a * I_i + b.
struct AffineFit {
    double a = 1.0;
    double b = 0.0;
    bool degenerate = false;  // set by the constant-predictor fallback
};

/// Ordinary least squares of samples_j on samples_i. Throws
/// DegenerateFitError when samples_i is constant, std::invalid_argument on
/// length mismatch or fewer than two samples.
AffineFit fit_affine(std::span<const double> samples_i, std::span<const double> samples_j);

/// fit_affine, falling back to a = 1, b = mean(I_j - I_i) for a constant
/// predictor.
AffineFit fit_affine_or_offset(std::span<const double> samples_i,
                               std::span<const double> samples_j);

/// Mean |I_j - (a I_i + b)| after the affine fit. Throws std::invalid_argument
/// for an empty overlap.
double overlap_mae(std::span<const double> samples_i, std::span<const double> samples_j);

enum class RegionKind { Signal, BrightBackground, DarkBackground };

std::string_view to_string(RegionKind k);
/// "signal" / "bright" / "dark"
RegionKind parse_region_kind(std::string_view text);

struct RegionSpec {
    std::string name;
    RectRoi rect;
    RegionKind kind = RegionKind::Signal;

    bool operator==(const RegionSpec&) const = default;
};

struct RegionStats {
    double mean = 0.0;
    double stddev = 0.0;  // population
    long long count = 0;
};

/// Mean and population standard deviation over the region. Throws
/// std::out_of_range when the region leaves the canvas.
RegionStats region_stats(const ImageF& canvas, const RectRoi& rect);

/// Population standard deviation; needs at least two pixels.
double region_std(const ImageF& canvas, const RegionSpec& region);

/// |mu_sig - mu_bg| / sigma_bg. Throws std::domain_error when sigma_bg = 0.
double cnr(const ImageF& canvas, const RegionSpec& signal, const RegionSpec& background);

/// Mean |C(p) - C(q)| over all pixel pairs straddling the seams.
double mean_seam_jump(const ImageF& canvas, std::span<const SeamLine> seams);

struct OverlapMae {
    std::string pair_id;  // "r00c00-r00c01"
    double mae = 0.0;
    bool degenerate_fit = false;
};

std::string pair_id(const TilePlacement& a, const TilePlacement& b);

/// Consistency MAE for every overlap, from per-frame values (unblended).
template <typename T>
std::vector<OverlapMae> overlap_maes(const std::vector<Image<T>>& tiles,
                                     std::span<const TilePlacement> placements,
                                     std::span<const OverlapRegion> overlaps) {
    std::vector<OverlapMae> out;
    out.reserve(overlaps.size());
    for (const auto& ov : overlaps) {
        const auto ia = static_cast<std::size_t>(ov.tile_a);
        const auto ib = static_cast<std::size_t>(ov.tile_b);
        const auto [si, sj] = sample_overlap(tiles[ia], rasterize(placements[ia]), tiles[ib],
                                             rasterize(placements[ib]), ov.rect);
        const AffineFit fit = fit_affine_or_offset(si, sj);
        out.push_back(OverlapMae{pair_id(placements[ia], placements[ib]), overlap_mae(si, sj),
                                 fit.degenerate});
    }
    return out;
}

struct MetricsReport {
    std::vector<OverlapMae> mae_per_overlap;
    std::optional<double> mae_mean;
    std::optional<double> cnr;
    std::optional<double> mu_sig;
    std::optional<double> mu_bg;
    std::optional<double> bright_std;
    std::optional<double> dark_std;
    std::optional<double> mean_seam_jump;
    std::vector<std::string> errors;  // metrics that could not be computed, and why
};

/// Assembles every metric; failures are recorded in report.errors rather
/// than thrown, except for out-of-canvas regions or seams.
MetricsReport evaluate_mosaic(const ImageF& canvas, std::span<const SeamLine> seams,
                              std::span<const RegionSpec> regions,
                              std::vector<OverlapMae> maes);

/// key = value lines, one per field; MAE pairs as mae.<pair id>.
std::string to_key_value(const MetricsReport& r);
std::string to_json(const MetricsReport& r);

}  // namespace galvomosaic
