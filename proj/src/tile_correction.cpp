#include "galvomosaic/tile_correction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace galvomosaic {

namespace {

std::string describe(const RectRoi& roi) {
    return std::to_string(roi.width) + "x" + std::to_string(roi.height) + "+" +
           std::to_string(roi.x0) + "+" + std::to_string(roi.y0);
}

void require_same_shape(const ImageF& a, const ImageF& b, const char* what) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                                    " vs " + std::to_string(b.width()) + "x" +
                                    std::to_string(b.height()) + ")");
    }
}

}  // namespace

void require_within(const RectRoi& roi, int w, int h) {
    if (!roi.fits_within(w, h)) {
        throw std::out_of_range("ROI " + describe(roi) + " does not fit inside " +
                                std::to_string(w) + "x" + std::to_string(h));
    }
}

bool ResponseModel::has_positive_gain() const {
    return std::all_of(gain.data().begin(), gain.data().end(),
                       [](double g) { return std::isfinite(g) && g > 0.0; });
}

WeightField make_roi_weights(const RectRoi& roi, int band_px, RampEdges edges) {
    if (band_px < 1) throw std::invalid_argument("transition band must be >= 1 pixel");
    if (roi.width < 1 || roi.height < 1) throw std::invalid_argument("empty ROI");
    WeightField field{ImageF(roi.width, roi.height, 1.0), band_px};
    const double band = band_px;
    for (int y = 0; y < roi.height; ++y) {
        double* w = field.weights.row(y);
        int dy = band_px;
        if (edges.top) dy = std::min(dy, y);
        if (edges.bottom) dy = std::min(dy, roi.height - 1 - y);
        for (int x = 0; x < roi.width; ++x) {
            int d = dy;
            if (edges.left) d = std::min(d, x);
            if (edges.right) d = std::min(d, roi.width - 1 - x);
            w[x] = d >= band_px ? 1.0 : d / band;
        }
    }
    return field;
}

RampEdges interior_edges(const RectRoi& roi, int tile_w, int tile_h) {
    return RampEdges{
        .left = roi.x0 > 0,
        .right = roi.x1() < tile_w,
        .top = roi.y0 > 0,
        .bottom = roi.y1() < tile_h,
    };
}

ResponseModel fit_two_point(const ReferencePair& refs, const RectRoi& roi, double eps) {
    if (!refs.dark_frame) throw std::invalid_argument("two-point fit needs a dark reference frame");
    const ImageF& bright = refs.bright_frame;
    const ImageF& dark = *refs.dark_frame;
    require_same_shape(bright, dark, "reference frames");
    require_within(roi, bright.width(), bright.height());
    if (!(refs.l_bright > refs.l_dark)) {
        throw std::invalid_argument("invalid reference: bright level " +
                                    std::to_string(refs.l_bright) +
                                    " must exceed dark level " + std::to_string(refs.l_dark));
    }

    ResponseModel m{ImageF(roi.width, roi.height), ImageF(roi.width, roi.height), eps,
                    ResponseMode::TwoPoint};
    const double denom = refs.l_bright - refs.l_dark + eps;
    for (int y = 0; y < roi.height; ++y) {
        const double* ib = bright.row(roi.y0 + y) + roi.x0;
        const double* id = dark.row(roi.y0 + y) + roi.x0;
        double* g = m.gain.row(y);
        double* o = m.offset.row(y);
        for (int x = 0; x < roi.width; ++x) {
            g[x] = (ib[x] - id[x]) / denom;
            o[x] = id[x] - g[x] * refs.l_dark;
        }
    }
    return m;
}

ResponseModel fit_bright_only(const ImageF& bright, double l_bright, const RectRoi& roi,
                              double eps) {
    require_within(roi, bright.width(), bright.height());
    const double denom = l_bright + eps;
    if (denom == 0.0 || !std::isfinite(denom)) {
        throw std::invalid_argument("invalid reference: bright level + epsilon must be nonzero");
    }
    ResponseModel m{ImageF(roi.width, roi.height), ImageF(roi.width, roi.height, 0.0), eps,
                    ResponseMode::BrightOnly};
    for (int y = 0; y < roi.height; ++y) {
        const double* ib = bright.row(roi.y0 + y) + roi.x0;
        double* g = m.gain.row(y);
        for (int x = 0; x < roi.width; ++x) g[x] = ib[x] / denom;
    }
    return m;
}

ImageF correct_roi(const ImageF& tile, const ResponseModel& model, const RectRoi& roi) {
    require_within(roi, tile.width(), tile.height());
    if (model.gain.width() != roi.width || model.gain.height() != roi.height ||
        !model.gain.same_shape(model.offset)) {
        throw std::invalid_argument("response model does not match ROI " + describe(roi));
    }
    ImageF out(roi.width, roi.height);
    for (int y = 0; y < roi.height; ++y) {
        const double* in = tile.row(roi.y0 + y) + roi.x0;
        const double* g = model.gain.row(y);
        const double* o = model.offset.row(y);
        double* c = out.row(y);
        for (int x = 0; x < roi.width; ++x) c[x] = (in[x] - o[x]) / (g[x] + model.epsilon);
    }
    return out;
}

ImageF feather_roi(const ImageF& tile, const ImageF& corrected, const WeightField& w,
                   const RectRoi& roi) {
    require_within(roi, tile.width(), tile.height());
    if (corrected.width() != roi.width || corrected.height() != roi.height ||
        !corrected.same_shape(w.weights)) {
        throw std::invalid_argument("corrected grid / weight field do not match ROI " +
                                    describe(roi));
    }
    ImageF out = tile;
    for (int y = 0; y < roi.height; ++y) {
        const double* c = corrected.row(y);
        const double* wt = w.weights.row(y);
        double* o = out.row(roi.y0 + y) + roi.x0;
        for (int x = 0; x < roi.width; ++x) {
            const double wx = wt[x];
            if (!(wx >= 0.0 && wx <= 1.0)) {
                throw std::domain_error("ROI weight " + std::to_string(wx) + " outside [0, 1]");
            }
            const double orig = o[x];
            double v;
            if (wx == 1.0) {
                v = c[x];
            } else if (wx == 0.0) {
                v = orig;
            } else {
                // I + W (I_corr - I), pinned to the interval spanned by I and I_corr
                v = orig + wx * (c[x] - orig);
                v = std::clamp(v, std::min(orig, c[x]), std::max(orig, c[x]));
            }
            o[x] = std::clamp(v, 0.0, 1.0);
        }
    }
    return out;
}

ImageF build_reference(std::span<const ImageF> frames) {
    if (frames.empty()) throw std::invalid_argument("build_reference: no frames");
    for (const auto& f : frames) require_same_shape(frames.front(), f, "build_reference");
    if (frames.size() == 1) return frames.front();
    ImageF mean(frames.front().width(), frames.front().height(), 0.0);
    auto& m = mean.data();
    for (const auto& f : frames) {
        const auto& d = f.data();
        for (std::size_t k = 0; k < m.size(); ++k) m[k] += d[k];
    }
    const double n = static_cast<double>(frames.size());
    for (double& v : m) v /= n;
    return mean;
}

double reference_level(const ImageF& frame, std::span<const RectRoi> rois) {
    double sum = 0.0;
    long long count = 0;
    for (int y = 0; y < frame.height(); ++y) {
        const double* r = frame.row(y);
        for (int x = 0; x < frame.width(); ++x) {
            const bool inside = std::any_of(rois.begin(), rois.end(),
                                            [&](const RectRoi& roi) { return roi.contains(x, y); });
            if (inside) continue;
            sum += r[x];
            ++count;
        }
    }
    if (count == 0) {
        throw std::invalid_argument("reference level undefined: ROIs cover the whole frame");
    }
    return sum / static_cast<double>(count);
}

std::vector<RectRoi> default_rois(ScanStrategy strategy, int tile_w, int tile_h) {
    auto scaled = [](int nominal, int dim) {
        const long v = std::lround(nominal * static_cast<double>(dim) / 1000.0);
        return static_cast<int>(std::clamp<long>(v, 1, dim));
    };
    if (strategy == ScanStrategy::Linear) {
        const int w = scaled(580, tile_w);
        const int h = scaled(600, tile_h);
        return {RectRoi{0, tile_h - h, w, h}};
    }
    const int w = scaled(200, tile_w);
    const int h = scaled(400, tile_h);
    return {RectRoi{0, tile_h - h, w, h}, RectRoi{tile_w - w, tile_h - h, w, h}};
}

std::string_view to_string(CorrectionMode m) {
    switch (m) {
        case CorrectionMode::Off: return "off";
        case CorrectionMode::TwoPoint: return "two-point";
        case CorrectionMode::BrightOnly: return "bright-only";
    }
    return "off";
}

CorrectionMode parse_correction_mode(std::string_view text) {
    if (text == "off") return CorrectionMode::Off;
    if (text == "two-point") return CorrectionMode::TwoPoint;
    if (text == "bright-only") return CorrectionMode::BrightOnly;
    throw std::invalid_argument("unknown correction mode '" + std::string(text) + "'");
}

TileCorrector::TileCorrector(CorrectionMode mode, const ImageF& bright,
                             const std::optional<ImageF>& dark, std::vector<RectRoi> rois,
                             int band_px, double eps)
    : mode_(mode), rois_(std::move(rois)), tile_w_(bright.width()), tile_h_(bright.height()) {
    if (mode_ == CorrectionMode::Off) return;
    const double l_bright = reference_level(bright, rois_);
    double l_dark = 0.0;
    if (mode_ == CorrectionMode::TwoPoint) {
        if (!dark) throw std::invalid_argument("two-point correction needs a dark reference");
        l_dark = reference_level(*dark, rois_);
    }
    for (const auto& roi : rois_) {
        ResponseModel model =
            mode_ == CorrectionMode::TwoPoint
                ? fit_two_point(ReferencePair{bright, dark, l_bright, l_dark}, roi, eps)
                : fit_bright_only(bright, l_bright, roi, eps);
        if (!model.has_positive_gain()) {
            throw std::invalid_argument("degenerate references: non-positive gain inside ROI " +
                                        describe(roi));
        }
        models_.push_back(std::move(model));
        weights_.push_back(make_roi_weights(roi, band_px, interior_edges(roi, tile_w_, tile_h_)));
    }
}

ImageF TileCorrector::apply(const ImageF& tile) const {
    if (mode_ == CorrectionMode::Off) return tile;
    if (tile.width() != tile_w_ || tile.height() != tile_h_) {
        throw std::invalid_argument("tile size differs from the reference frames");
    }
    ImageF out = tile;
    for (std::size_t k = 0; k < rois_.size(); ++k) {
        const ImageF corrected = correct_roi(out, models_[k], rois_[k]);
        out = feather_roi(out, corrected, weights_[k], rois_[k]);
    }
    return out;
}

}  // namespace galvomosaic
