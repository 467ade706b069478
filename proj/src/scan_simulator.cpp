#include "galvomosaic/scan_simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "galvomosaic/errors.hpp"

namespace galvomosaic::sim {

namespace {

constexpr double kBackground = 0.45;
constexpr double kBright = 0.85;
constexpr double kSignal = 0.06;
constexpr double kUnlit = 0.015;
constexpr double kBarLow = 0.12;
constexpr double kBarHigh = 0.85;
constexpr double kLayoutSize = 5000.0;

// Layout of the UsafLike target, shared by make_target and target_regions.
struct UsafLayout {
    RectRoi bright;
    RectRoi signal;
    RectRoi unlit;
    double scale = 1.0;
};

UsafLayout usaf_layout(int width, int height) {
    const double s = std::min(1.0, std::min(width, height) / kLayoutSize);
    auto size = [s](double nominal) { return std::max(2, static_cast<int>(std::lround(nominal * s))); };
    auto at = [](double frac, int dim) { return static_cast<int>(std::lround(frac * dim)); };
    UsafLayout l;
    l.scale = s;
    l.bright = RectRoi{at(0.08, width), at(0.08, height), size(1400), size(700)};
    l.signal = RectRoi{at(0.45, width), at(0.10, height), size(400), size(400)};
    l.unlit = RectRoi{at(0.70, width), at(0.06, height), size(700), size(900)};
    return l;
}

void fill(ImageF& img, const RectRoi& r, double v) {
    const int x1 = std::min(r.x1(), img.width());
    const int y1 = std::min(r.y1(), img.height());
    for (int y = std::max(0, r.y0); y < y1; ++y) {
        double* row = img.row(y);
        for (int x = std::max(0, r.x0); x < x1; ++x) row[x] = v;
    }
}

// Groups of five bar periods at decreasing pitch, laid left to right inside
// the band; bars run along x (vertical stripes) or along y.
void bar_groups(ImageF& img, int y0, int y1, double scale, bool stripes_along_x) {
    static constexpr std::array<double, 8> kPitches = {80, 48, 32, 20, 12, 8, 5, 3};
    int x = static_cast<int>(std::lround(0.08 * img.width()));
    const int x_end = static_cast<int>(std::lround(0.92 * img.width()));
    y1 = std::min(y1, img.height());
    for (double nominal : kPitches) {
        const int p = std::max(1, static_cast<int>(std::lround(nominal * scale)));
        const int group_w = 10 * p;
        if (x + group_w > x_end) break;
        for (int y = y0; y < y1; ++y) {
            double* row = img.row(y);
            for (int gx = 0; gx < group_w; ++gx) {
                const int phase = stripes_along_x ? gx / p : (y - y0) / p;
                row[x + gx] = phase % 2 == 0 ? kBarHigh : kBarLow;
            }
        }
        x += group_w + std::max(4 * p, 2);
    }
}

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Portable draws: std::mt19937_64 output is fixed by the standard, the
// library distributions are not.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class GaussianSource {
public:
    explicit GaussianSource(std::mt19937_64& rng) : rng_(rng) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01(rng_);  // (0, 1]
        const double u2 = uniform01(rng_);
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64& rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Shared by tiles and references; gain is the frame's jitter factor.
void apply_degradation(ImageF& img, double gain, const DegradationSpec& spec,
                       std::span<const RectRoi> rois, const ImageF& vignette,
                       std::mt19937_64& rng) {
    if (!img.same_shape(vignette)) throw std::invalid_argument("vignette field size mismatch");
    auto& d = img.data();
    const auto& v = vignette.data();
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = d[k] * v[k] * gain;
    if (spec.corner_offset != 0.0) {
        for (int y = 0; y < img.height(); ++y) {
            double* row = img.row(y);
            for (int x = 0; x < img.width(); ++x) {
                const bool inside = std::any_of(rois.begin(), rois.end(),
                                                [&](const RectRoi& r) { return r.contains(x, y); });
                if (inside) row[x] += spec.corner_offset;
            }
        }
    }
    if (spec.noise_sigma > 0.0) {
        GaussianSource gauss(rng);
        for (double& px : d) px += spec.noise_sigma * gauss.next();
    }
    for (double& px : d) px = std::clamp(px, 0.0, 1.0);
}

}  // namespace

void DegradationSpec::validate() const {
    if (!(vignette_min > 0.0 && vignette_min <= 1.0)) {
        throw ConfigError("vignette_min", "must be in (0, 1]");
    }
    if (!std::isfinite(corner_offset)) throw ConfigError("corner_offset", "must be finite");
    if (!(gain_jitter >= 0.0 && gain_jitter < 1.0)) {
        throw ConfigError("gain_jitter", "must be in [0, 1)");
    }
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
        throw ConfigError("noise_sigma", "must be >= 0");
    }
    if (!(ref_bright_level > 0.0 && ref_bright_level <= 1.0)) {
        throw ConfigError("ref_bright_level", "must be in (0, 1]");
    }
    if (!(ref_dark_level >= 0.0 && ref_dark_level < ref_bright_level)) {
        throw ConfigError("ref_dark_level", "must be in [0, ref_bright_level)");
    }
    if (reference_frames < 1) throw ConfigError("reference_frames", "must be >= 1");
}

bool DegradationSpec::is_identity() const {
    return vignette_min == 1.0 && corner_offset == 0.0 && gain_jitter == 0.0 &&
           noise_sigma == 0.0;
}

std::string_view to_string(TargetPattern p) {
    switch (p) {
        case TargetPattern::Uniform: return "uniform";
        case TargetPattern::Bars: return "bars";
        case TargetPattern::UsafLike: return "usaf";
    }
    return "usaf";
}

TargetPattern parse_target_pattern(std::string_view text) {
    if (text == "uniform") return TargetPattern::Uniform;
    if (text == "bars") return TargetPattern::Bars;
    if (text == "usaf") return TargetPattern::UsafLike;
    throw std::invalid_argument("unknown target pattern '" + std::string(text) + "'");
}

ImageF make_target(int width, int height, const TargetSpec& spec) {
    if (width < 1 || height < 1) throw std::invalid_argument("target dimensions must be positive");
    switch (spec.pattern) {
        case TargetPattern::Uniform:
            return ImageF(width, height, spec.value);
        case TargetPattern::Bars: {
            if (spec.pitch < 1) throw std::invalid_argument("bar pitch must be >= 1");
            ImageF img(width, height);
            for (int y = 0; y < height; ++y) {
                double* row = img.row(y);
                for (int x = 0; x < width; ++x) {
                    row[x] = (x / spec.pitch) % 2 == 0 ? kBarHigh : kBarLow;
                }
            }
            return img;
        }
        case TargetPattern::UsafLike:
            break;
    }
    ImageF img(width, height, kBackground);
    const UsafLayout l = usaf_layout(width, height);
    fill(img, l.bright, kBright);
    fill(img, l.signal, kSignal);
    fill(img, l.unlit, kUnlit);
    bar_groups(img, static_cast<int>(std::lround(0.35 * height)),
               static_cast<int>(std::lround(0.58 * height)), l.scale, true);
    bar_groups(img, static_cast<int>(std::lround(0.65 * height)),
               static_cast<int>(std::lround(0.88 * height)), l.scale, false);
    return img;
}

std::vector<RegionSpec> target_regions(int width, int height) {
    const UsafLayout l = usaf_layout(width, height);
    return {
        RegionSpec{"signal", l.signal, RegionKind::Signal},
        RegionSpec{"bright", l.bright, RegionKind::BrightBackground},
        RegionSpec{"dark", l.unlit, RegionKind::DarkBackground},
    };
}

ImageF vignette_field(int width, int height, double vignette_min) {
    ImageF v(width, height, 1.0);
    if (vignette_min == 1.0) return v;
    const double cx = (width - 1) / 2.0;
    const double cy = (height - 1) / 2.0;
    const double r2_corner = cx * cx + cy * cy;
    if (r2_corner == 0.0) return v;
    for (int y = 0; y < height; ++y) {
        double* row = v.row(y);
        for (int x = 0; x < width; ++x) {
            const double r2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / r2_corner;
            row[x] = 1.0 - (1.0 - vignette_min) * r2;
        }
    }
    return v;
}

std::uint64_t stream_seed(std::uint64_t base, std::int64_t a, std::int64_t b) {
    std::uint64_t h = splitmix64(base);
    h = splitmix64(h ^ static_cast<std::uint64_t>(a));
    return splitmix64(h ^ static_cast<std::uint64_t>(b));
}

Tile extract_tile(const ImageF& truth, const TilePlacement& placement, TileDims dims,
                  bool subpixel) {
    const PixelOffset o = rasterize(placement);
    if (o.x < 0 || o.y < 0 || o.x + dims.width > truth.width() ||
        o.y + dims.height > truth.height()) {
        throw std::out_of_range("tile (" + std::to_string(placement.row) + ", " +
                                std::to_string(placement.col) + ") leaves the " +
                                std::to_string(truth.width()) + "x" +
                                std::to_string(truth.height()) + " truth image");
    }
    Tile t{ImageF(dims.width, dims.height), placement.row, placement.col};
    if (!subpixel) {
        t.pixels = crop(truth, o.x, o.y, dims.width, dims.height);
        return t;
    }
    auto clamp_x = [&](int x) { return std::clamp(x, 0, truth.width() - 1); };
    auto clamp_y = [&](int y) { return std::clamp(y, 0, truth.height() - 1); };
    for (int y = 0; y < dims.height; ++y) {
        const double sy = placement.dy + y;
        const int y0 = static_cast<int>(std::floor(sy));
        const double ty = sy - y0;
        const double* r0 = truth.row(clamp_y(y0));
        const double* r1 = truth.row(clamp_y(y0 + 1));
        double* out = t.pixels.row(y);
        for (int x = 0; x < dims.width; ++x) {
            const double sx = placement.dx + x;
            const int x0 = static_cast<int>(std::floor(sx));
            const double tx = sx - x0;
            const int xa = clamp_x(x0);
            const int xb = clamp_x(x0 + 1);
            const double top = r0[xa] + tx * (r0[xb] - r0[xa]);
            const double bottom = r1[xa] + tx * (r1[xb] - r1[xa]);
            out[x] = top + ty * (bottom - top);
        }
    }
    return t;
}

std::vector<Tile> extract_tiles(const ImageF& truth, const ScanConfig& cfg, bool subpixel) {
    const auto placements = placement_table(cfg);
    const TileDims dims{cfg.tile_width, cfg.tile_height};
    const auto [need_w, need_h] = canvas_dims(placements, dims);
    if (truth.width() < need_w || truth.height() < need_h) {
        throw std::out_of_range("truth image " + std::to_string(truth.width()) + "x" +
                                std::to_string(truth.height()) +
                                " is smaller than the required canvas " + std::to_string(need_w) +
                                "x" + std::to_string(need_h));
    }
    std::vector<Tile> tiles;
    tiles.reserve(placements.size());
    for (const auto& p : placements) tiles.push_back(extract_tile(truth, p, dims, subpixel));
    return tiles;
}

void degrade_tile(Tile& tile, const DegradationSpec& spec, std::span<const RectRoi> rois,
                  const ImageF& vignette) {
    std::mt19937_64 rng(stream_seed(spec.rng_seed, tile.row, tile.col));
    const double gain = 1.0 + spec.gain_jitter * (2.0 * uniform01(rng) - 1.0);
    apply_degradation(tile.pixels, gain, spec, rois, vignette, rng);
}

References make_references(TileDims dims, const DegradationSpec& spec,
                           std::span<const RectRoi> rois) {
    const ImageF vignette = vignette_field(dims.width, dims.height, spec.vignette_min);
    auto acquire = [&](double level, std::int64_t stream) {
        std::vector<ImageF> frames;
        for (int k = 0; k < spec.reference_frames; ++k) {
            ImageF f(dims.width, dims.height, level);
            std::mt19937_64 rng(stream_seed(spec.rng_seed, stream, k));
            apply_degradation(f, 1.0, spec, rois, vignette, rng);
            frames.push_back(std::move(f));
        }
        return build_reference(frames);
    };
    return References{acquire(spec.ref_bright_level, -1), acquire(spec.ref_dark_level, -2)};
}

DegradedDataset degrade(std::vector<Tile> tiles, const DegradationSpec& spec,
                        std::span<const RectRoi> rois) {
    spec.validate();
    if (tiles.empty()) throw std::invalid_argument("degrade: no tiles");
    const TileDims dims{tiles.front().pixels.width(), tiles.front().pixels.height()};
    const ImageF vignette = vignette_field(dims.width, dims.height, spec.vignette_min);
    for (auto& t : tiles) degrade_tile(t, spec, rois, vignette);
    return DegradedDataset{std::move(tiles), make_references(dims, spec, rois)};
}

double timing_report(const ScanConfig& cfg, double per_frame_ms) {
    if (!(per_frame_ms >= cfg.settle_ms)) {
        throw std::invalid_argument("per-frame time " + std::to_string(per_frame_ms) +
                                    " ms is shorter than the settle time " +
                                    std::to_string(cfg.settle_ms) + " ms");
    }
    return static_cast<double>(cfg.n_rows) * cfg.n_cols * per_frame_ms / 1000.0;
}

}  // namespace galvomosaic::sim
