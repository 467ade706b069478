#include "galvomosaic/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "galvomosaic/errors.hpp"

namespace galvomosaic {

namespace {

void require_pairs(std::span<const double> xi, std::span<const double> xj, std::size_t min_n) {
    if (xi.size() != xj.size()) {
        throw std::invalid_argument("sample length mismatch: " + std::to_string(xi.size()) +
                                    " vs " + std::to_string(xj.size()));
    }
    if (xi.size() < min_n) {
        throw std::invalid_argument("need at least " + std::to_string(min_n) + " sample pairs");
    }
}

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Mean of (v - v[0]); constant samples give exactly zero deviations.
double shifted_mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x - v[0];
    return s / static_cast<double>(v.size());
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

AffineFit fit_affine(std::span<const double> samples_i, std::span<const double> samples_j) {
    require_pairs(samples_i, samples_j, 2);
    const double si = samples_i[0];
    const double sj = samples_j[0];
    const double mi = shifted_mean(samples_i);
    const double mj = shifted_mean(samples_j);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t k = 0; k < samples_i.size(); ++k) {
        const double dx = (samples_i[k] - si) - mi;
        sxx += dx * dx;
        sxy += dx * ((samples_j[k] - sj) - mj);
    }
    if (!(sxx > 0.0)) throw DegenerateFitError("affine fit: predictor samples are constant");
    const double a = sxy / sxx;
    return AffineFit{a, (sj + mj) - a * (si + mi), false};
}

AffineFit fit_affine_or_offset(std::span<const double> samples_i,
                               std::span<const double> samples_j) {
    try {
        return fit_affine(samples_i, samples_j);
    } catch (const DegenerateFitError&) {
        return AffineFit{1.0, mean_of(samples_j) - mean_of(samples_i), true};
    }
}

double overlap_mae(std::span<const double> samples_i, std::span<const double> samples_j) {
    if (samples_i.empty()) throw std::invalid_argument("overlap MAE: empty overlap");
    require_pairs(samples_i, samples_j, 1);
    AffineFit fit{1.0, 0.0, true};
    if (samples_i.size() >= 2) {
        fit = fit_affine_or_offset(samples_i, samples_j);
    } else {
        fit.b = samples_j[0] - samples_i[0];
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < samples_i.size(); ++k) {
        sum += std::abs(samples_j[k] - (fit.a * samples_i[k] + fit.b));
    }
    return sum / static_cast<double>(samples_i.size());
}

std::string_view to_string(RegionKind k) {
    switch (k) {
        case RegionKind::Signal: return "signal";
        case RegionKind::BrightBackground: return "bright";
        case RegionKind::DarkBackground: return "dark";
    }
    return "signal";
}

RegionKind parse_region_kind(std::string_view text) {
    if (text == "signal") return RegionKind::Signal;
    if (text == "bright") return RegionKind::BrightBackground;
    if (text == "dark") return RegionKind::DarkBackground;
    throw std::invalid_argument("unknown region kind '" + std::string(text) + "'");
}

RegionStats region_stats(const ImageF& canvas, const RectRoi& rect) {
    require_within(rect, canvas.width(), canvas.height());
    RegionStats st;
    st.count = rect.area();
    const double pivot = canvas(rect.x0, rect.y0);
    double sum = 0.0;
    for (int y = rect.y0; y < rect.y1(); ++y) {
        const double* r = canvas.row(y);
        for (int x = rect.x0; x < rect.x1(); ++x) sum += r[x] - pivot;
    }
    const double shifted = sum / static_cast<double>(st.count);
    st.mean = pivot + shifted;
    double ss = 0.0;
    for (int y = rect.y0; y < rect.y1(); ++y) {
        const double* r = canvas.row(y);
        for (int x = rect.x0; x < rect.x1(); ++x) {
            const double d = (r[x] - pivot) - shifted;
            ss += d * d;
        }
    }
    st.stddev = std::sqrt(ss / static_cast<double>(st.count));
    return st;
}

double region_std(const ImageF& canvas, const RegionSpec& region) {
    if (region.rect.area() < 2) {
        throw std::invalid_argument("region '" + region.name + "' has fewer than 2 pixels");
    }
    return region_stats(canvas, region.rect).stddev;
}

double cnr(const ImageF& canvas, const RegionSpec& signal, const RegionSpec& background) {
    const RegionStats sig = region_stats(canvas, signal.rect);
    const RegionStats bg = region_stats(canvas, background.rect);
    if (!(bg.stddev > 0.0)) {
        throw std::domain_error("CNR undefined: background region '" + background.name +
                                "' has zero standard deviation");
    }
    return std::abs(sig.mean - bg.mean) / bg.stddev;
}

double mean_seam_jump(const ImageF& canvas, std::span<const SeamLine> seams) {
    if (seams.empty()) throw std::invalid_argument("seam jump: no seams");
    double sum = 0.0;
    long long pairs = 0;
    for (const auto& s : seams) {
        const bool vertical = s.orientation == SeamOrientation::Vertical;
        const int across = vertical ? canvas.width() : canvas.height();
        const int along = vertical ? canvas.height() : canvas.width();
        if (s.position < 1 || s.position >= across || s.extent_begin < 0 ||
            s.extent_end > along || s.extent_begin >= s.extent_end) {
            throw std::out_of_range(std::string(to_string(s.orientation)) + " seam at " +
                                    std::to_string(s.position) + " [" +
                                    std::to_string(s.extent_begin) + ", " +
                                    std::to_string(s.extent_end) + ") lies outside the canvas");
        }
        for (int t = s.extent_begin; t < s.extent_end; ++t) {
            const double before = vertical ? canvas(s.position - 1, t) : canvas(t, s.position - 1);
            const double after = vertical ? canvas(s.position, t) : canvas(t, s.position);
            sum += std::abs(after - before);
            ++pairs;
        }
    }
    return sum / static_cast<double>(pairs);
}

std::string pair_id(const TilePlacement& a, const TilePlacement& b) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "r%02dc%02d-r%02dc%02d", a.row, a.col, b.row, b.col);
    return buf;
}

MetricsReport evaluate_mosaic(const ImageF& canvas, std::span<const SeamLine> seams,
                              std::span<const RegionSpec> regions, std::vector<OverlapMae> maes) {
    MetricsReport r;
    r.mae_per_overlap = std::move(maes);
    if (r.mae_per_overlap.empty()) {
        r.errors.emplace_back("mae_mean: no overlap regions");
    } else {
        double s = 0.0;
        for (const auto& m : r.mae_per_overlap) s += m.mae;
        r.mae_mean = s / static_cast<double>(r.mae_per_overlap.size());
    }

    auto find = [&](RegionKind kind) -> const RegionSpec* {
        for (const auto& reg : regions) {
            if (reg.kind == kind) return &reg;
        }
        return nullptr;
    };
    const RegionSpec* sig = find(RegionKind::Signal);
    const RegionSpec* bright = find(RegionKind::BrightBackground);
    const RegionSpec* dark = find(RegionKind::DarkBackground);

    for (const auto& reg : regions) require_within(reg.rect, canvas.width(), canvas.height());

    if (bright) {
        r.bright_std = region_std(canvas, *bright);
        r.mu_bg = region_stats(canvas, bright->rect).mean;
    } else {
        r.errors.emplace_back("bright_std: no bright region");
    }
    if (dark) {
        r.dark_std = region_std(canvas, *dark);
    } else {
        r.errors.emplace_back("dark_std: no dark region");
    }
    if (sig) r.mu_sig = region_stats(canvas, sig->rect).mean;
    if (sig && bright) {
        try {
            r.cnr = cnr(canvas, *sig, *bright);
        } catch (const std::domain_error& e) {
            r.errors.emplace_back(std::string("cnr: ") + e.what());
        }
    } else {
        r.errors.emplace_back("cnr: needs signal and bright regions");
    }

    if (seams.empty()) {
        r.errors.emplace_back("mean_seam_jump: no seams");
    } else {
        r.mean_seam_jump = mean_seam_jump(canvas, seams);
    }
    return r;
}

std::string to_key_value(const MetricsReport& r) {
    std::ostringstream out;
    auto field = [&](const char* key, const std::optional<double>& v) {
        out << key << " = " << (v ? format_real(*v) : std::string("none")) << '\n';
    };
    field("mae_mean", r.mae_mean);
    field("cnr", r.cnr);
    field("mu_sig", r.mu_sig);
    field("mu_bg", r.mu_bg);
    field("bright_std", r.bright_std);
    field("dark_std", r.dark_std);
    field("mean_seam_jump", r.mean_seam_jump);
    for (const auto& m : r.mae_per_overlap) {
        out << "mae." << m.pair_id << " = " << format_real(m.mae)
            << (m.degenerate_fit ? "  # degenerate fit" : "") << '\n';
    }
    for (const auto& e : r.errors) out << "# error: " << e << '\n';
    return out.str();
}

std::string to_json(const MetricsReport& r) {
    using nlohmann::ordered_json;
    ordered_json j;
    auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(); };
    ordered_json pairs = ordered_json::array();
    for (const auto& m : r.mae_per_overlap) {
        pairs.push_back({{"pair", m.pair_id}, {"mae", m.mae}, {"degenerate_fit", m.degenerate_fit}});
    }
    j["mae_per_overlap"] = std::move(pairs);
    j["mae_mean"] = opt(r.mae_mean);
    j["cnr"] = opt(r.cnr);
    j["mu_sig"] = opt(r.mu_sig);
    j["mu_bg"] = opt(r.mu_bg);
    j["bright_std"] = opt(r.bright_std);
    j["dark_std"] = opt(r.dark_std);
    j["mean_seam_jump"] = opt(r.mean_seam_jump);
    j["errors"] = r.errors;
    return j.dump(2) + "\n";
}

}  // namespace galvomosaic
