#include "galvomosaic/scan_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "galvomosaic/errors.hpp"

namespace galvomosaic {

namespace {

void check_indices(const ScanConfig& cfg, int i, int j) {
    if (i < 0 || i >= cfg.n_rows || j < 0 || j >= cfg.n_cols) {
        throw std::out_of_range("tile index (" + std::to_string(i) + ", " + std::to_string(j) +
                                ") outside " + std::to_string(cfg.n_rows) + "x" +
                                std::to_string(cfg.n_cols) + " grid");
    }
}

void require_strategy(const ScanConfig& cfg, ScanStrategy expected) {
    if (cfg.strategy != expected) {
        throw std::invalid_argument("scan config strategy is " +
                                    std::string(to_string(cfg.strategy)) + ", expected " +
                                    std::string(to_string(expected)));
    }
}

}  // namespace

std::string_view to_string(ScanStrategy s) {
    return s == ScanStrategy::Linear ? "linear" : "sinusoidal";
}

ScanStrategy parse_strategy(std::string_view text) {
    if (text == "linear") return ScanStrategy::Linear;
    if (text == "sinusoidal") return ScanStrategy::Sinusoidal;
    throw std::invalid_argument("unknown scan strategy '" + std::string(text) + "'");
}

double ScanConfig::effective_amplitude() const {
    return amplitude.value_or((n_cols - 1) * dv_x / 2.0);
}

double ScanConfig::effective_v0() const {
    return v0.value_or((n_cols - 1) * dv_x / 2.0);
}

void ScanConfig::validate() const {
    if (n_rows < 1) throw ConfigError("n_rows", "must be >= 1");
    if (n_cols < 1) throw ConfigError("n_cols", "must be >= 1");
    if (tile_width < 1) throw ConfigError("tile_width", "must be >= 1");
    if (tile_height < 1) throw ConfigError("tile_height", "must be >= 1");
    if (!(s_x > 0.0) || !std::isfinite(s_x)) throw ConfigError("s_x", "must be > 0");
    if (!(s_y > 0.0) || !std::isfinite(s_y)) throw ConfigError("s_y", "must be > 0");
    if (!std::isfinite(dv_x)) throw ConfigError("dv_x", "must be finite");
    if (!std::isfinite(dv_y)) throw ConfigError("dv_y", "must be finite");
    if (!std::isfinite(alpha_x)) throw ConfigError("alpha_x", "must be finite");
    if (!std::isfinite(alpha_y)) throw ConfigError("alpha_y", "must be finite");
    if (!(settle_ms >= 0.0)) throw ConfigError("settle_ms", "must be >= 0");
    if (strategy == ScanStrategy::Sinusoidal) {
        if (n_cols < 2) {
            throw ConfigError("n_cols",
                              "sinusoidal scanning needs n_cols >= 2 (degenerate grid: the "
                              "phase step divides by n_cols - 1)");
        }
        if (!(effective_amplitude() >= 0.0)) throw ConfigError("amplitude", "must be >= 0");
        if (!std::isfinite(effective_v0())) throw ConfigError("v0", "must be finite");
    }
}

TilePlacement linear_offset(const ScanConfig& cfg, int i, int j) {
    require_strategy(cfg, ScanStrategy::Linear);
    check_indices(cfg, i, j);
    return TilePlacement{
        .row = i,
        .col = j,
        .dx = j * cfg.dv_x * cfg.s_x + cfg.alpha_x * i,
        .dy = i * cfg.dv_y * cfg.s_y + cfg.alpha_y * j,
    };
}

double sinusoidal_voltage(const ScanConfig& cfg, int j) {
    require_strategy(cfg, ScanStrategy::Sinusoidal);
    if (cfg.n_cols < 2) {
        throw std::domain_error("sinusoidal scan needs n_cols >= 2 (degenerate grid)");
    }
    if (j < 0 || j >= cfg.n_cols) {
        throw std::out_of_range("column index " + std::to_string(j) + " outside [0, " +
                                std::to_string(cfg.n_cols) + ")");
    }
    const double phase = j * std::numbers::pi / (cfg.n_cols - 1) - std::numbers::pi / 2.0;
    return cfg.effective_v0() + cfg.effective_amplitude() * std::sin(phase);
}

TilePlacement sinusoidal_offset(const ScanConfig& cfg, int i, int j) {
    require_strategy(cfg, ScanStrategy::Sinusoidal);
    check_indices(cfg, i, j);
    return TilePlacement{
        .row = i,
        .col = j,
        .dx = sinusoidal_voltage(cfg, j) * cfg.s_x + cfg.alpha_x * i,
        .dy = i * cfg.dv_y * cfg.s_y + cfg.alpha_y * j,
    };
}

TilePlacement tile_offset(const ScanConfig& cfg, int i, int j) {
    return cfg.strategy == ScanStrategy::Linear ? linear_offset(cfg, i, j)
                                                : sinusoidal_offset(cfg, i, j);
}

std::vector<TilePlacement> placement_table(const ScanConfig& cfg) {
    std::vector<TilePlacement> out;
    out.reserve(static_cast<std::size_t>(cfg.n_rows) * cfg.n_cols);
    for (int i = 0; i < cfg.n_rows; ++i) {
        for (int j = 0; j < cfg.n_cols; ++j) out.push_back(tile_offset(cfg, i, j));
    }
    double min_x = out.front().dx;
    double min_y = out.front().dy;
    for (const auto& p : out) {
        min_x = std::min(min_x, p.dx);
        min_y = std::min(min_y, p.dy);
    }
    // Skip the subtraction when already anchored so that exact inputs stay exact.
    if (min_x != 0.0 || min_y != 0.0) {
        for (auto& p : out) {
            p.dx -= min_x;
            p.dy -= min_y;
        }
    }
    return out;
}

}  // namespace galvomosaic
