#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "galvomosaic/image.hpp"
#include "galvomosaic/scan_geometry.hpp"

namespace galvomosaic {

/// Axis-aligned pixel rectangle, top-left anchored.
struct RectRoi {
    int x0 = 0;
    int y0 = 0;
    int width = 1;
    int height = 1;

    [[nodiscard]] int x1() const { return x0 + width; }   // exclusive
    [[nodiscard]] int y1() const { return y0 + height; }  // exclusive
    [[nodiscard]] bool contains(int x, int y) const {
        return x >= x0 && x < x1() && y >= y0 && y < y1();
    }
    [[nodiscard]] bool fits_within(int w, int h) const {
        return x0 >= 0 && y0 >= 0 && width >= 1 && height >= 1 && x1() <= w && y1() <= h;
    }
    [[nodiscard]] long long area() const { return static_cast<long long>(width) * height; }

    bool operator==(const RectRoi&) const = default;
};

/// Throws std::out_of_range unless roi lies inside a w x h image.
void require_within(const RectRoi& roi, int w, int h);

/// Flat-field references: bright frame with its global level, optionally a
/// dark frame with its level.
struct ReferencePair {
    ImageF bright_frame;
    std::optional<ImageF> dark_frame;
    double l_bright = 1.0;
    double l_dark = 0.0;
};

enum class ResponseMode { TwoPoint, BrightOnly };

/// Per-pixel linear response I = gain * L + offset, over one ROI.
struct ResponseModel {
    ImageF gain;
    ImageF offset;
    double epsilon = 1e-6;
    ResponseMode mode = ResponseMode::TwoPoint;

    /// False when any gain entry is <= 0 or non-finite (degenerate references).
    [[nodiscard]] bool has_positive_gain() const;
};

/// Blend weights inside an ROI, 1 in the interior and ramping to 0 toward
/// the selected ROI edges over band_px pixels.
struct WeightField {
    ImageF weights;
    int band_px = 50;
};

inline constexpr double kDefaultEpsilon = 1e-6;
inline constexpr int kDefaultBandPx = 50;

/// Which ROI edges the weight ramp runs toward.
struct RampEdges {
    bool left = true;
    bool right = true;
    bool top = true;
    bool bottom = true;
};

/// Weight ramp for an ROI: w = min(1, d / band_px), d being the pixel
/// distance to the nearest selected edge (0 on that edge's boundary pixels).
WeightField make_roi_weights(const RectRoi& roi, int band_px, RampEdges edges = {});

/// Ramps only toward ROI edges that lie strictly inside a tile_w x tile_h
/// frame; edges flush with the frame border keep full weight.
RampEdges interior_edges(const RectRoi& roi, int tile_w, int tile_h);

/// g = (I_b - I_d) / (L_b - L_d + eps), o = I_d - g L_d over the ROI.
ResponseModel fit_two_point(const ReferencePair& refs, const RectRoi& roi,
                            double eps = kDefaultEpsilon);

/// g = I_b / (L_b + eps), o = 0 over the ROI.
ResponseModel fit_bright_only(const ImageF& bright, double l_bright, const RectRoi& roi,
                              double eps = kDefaultEpsilon);

/// (I - o) / (g + eps) over the ROI; returns an ROI-sized grid.
ImageF correct_roi(const ImageF& tile, const ResponseModel& model, const RectRoi& roi);

/// W * I_corr + (1 - W) * I inside the ROI, clamped to [0, 1]; pixels outside
/// the ROI are copied unchanged.
ImageF feather_roi(const ImageF& tile, const ImageF& corrected, const WeightField& w,
                   const RectRoi& roi);

/// Pixelwise arithmetic mean.
ImageF build_reference(std::span<const ImageF> frames);

/// Mean of the frame over pixels outside every ROI; the global brightness
/// level L of a reference frame.
double reference_level(const ImageF& frame, std::span<const RectRoi> rois);

/// Bench ROIs scaled to the frame size: one 580 x 600 block at the lower-left
/// corner for linear scans, two 200 x 400 blocks at the lower-left and
/// lower-right corners for sinusoidal scans (sizes given for 1000 x 1000).
std::vector<RectRoi> default_rois(ScanStrategy strategy, int tile_w, int tile_h);

enum class CorrectionMode { Off, TwoPoint, BrightOnly };

std::string_view to_string(CorrectionMode m);
/// "off" / "two-point" / "bright-only"
CorrectionMode parse_correction_mode(std::string_view text);

/// Fitted per-ROI models plus blend weights, ready to apply to every frame.
class TileCorrector {
public:
    TileCorrector() = default;  // identity (Off)

    /// Fits one model per ROI from the references. Levels come from
    /// reference_level over the region outside all ROIs.
    TileCorrector(CorrectionMode mode, const ImageF& bright, const std::optional<ImageF>& dark,
                  std::vector<RectRoi> rois, int band_px = kDefaultBandPx,
                  double eps = kDefaultEpsilon);

    [[nodiscard]] CorrectionMode mode() const { return mode_; }
    [[nodiscard]] const std::vector<RectRoi>& rois() const { return rois_; }
    [[nodiscard]] const std::vector<ResponseModel>& models() const { return models_; }

    /// Corrects and feathers every ROI of one normalized frame.
    [[nodiscard]] ImageF apply(const ImageF& tile) const;

private:
    CorrectionMode mode_ = CorrectionMode::Off;
    std::vector<RectRoi> rois_;
    std::vector<ResponseModel> models_;
    std::vector<WeightField> weights_;
    int tile_w_ = 0;
    int tile_h_ = 0;
};

}  // namespace galvomosaic
