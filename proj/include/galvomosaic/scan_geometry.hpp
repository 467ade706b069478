#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace galvomosaic {

enum class ScanStrategy { Linear, Sinusoidal };

std::string_view to_string(ScanStrategy s);
/// Accepts "linear" / "sinusoidal"; throws std::invalid_argument otherwise.
ScanStrategy parse_strategy(std::string_view text);

/// Calibrated scan parameters. Defaults are the bench calibration: a 10 x 10
/// grid stepped at 1.1 V on both axes, 402 / 468 px per volt, tilt slopes of
/// +16 / -16 px per index, 1000 x 1000 px frames and a 30 ms settle.
struct ScanConfig {
    int n_rows = 10;
    int n_cols = 10;
    double dv_x = 1.1;   // V per column step
    double dv_y = 1.1;   // V per row step
    double s_x = 402.0;  // px / V
    double s_y = 468.0;  // px / V
    double alpha_x = 16.0;   // px of x shift per row index
    double alpha_y = -16.0;  // px of y shift per column index
    ScanStrategy strategy = ScanStrategy::Linear;
    /// Sinusoidal center voltage / amplitude. When unset both default to
    /// (n_cols - 1) * dv_x / 2, so the sweep spans the same voltages as the
    /// linear raster and column 0 sits at 0 V.
    std::optional<double> v0;
    std::optional<double> amplitude;
    int tile_width = 1000;
    int tile_height = 1000;
    double settle_ms = 30.0;

    [[nodiscard]] double effective_v0() const;
    [[nodiscard]] double effective_amplitude() const;

    /// Throws ConfigError naming the first violated field.
    void validate() const;
};

/// Real-valued global offset of tile (row, col) in pixels.
struct TilePlacement {
    int row = 0;
    int col = 0;
    double dx = 0.0;
    double dy = 0.0;

    bool operator==(const TilePlacement&) const = default;
};

TilePlacement linear_offset(const ScanConfig& cfg, int i, int j);

/// Column drive voltage V0 + A sin(j pi / (N - 1) - pi / 2), j 0-based.
/// Throws std::domain_error when n_cols < 2.
double sinusoidal_voltage(const ScanConfig& cfg, int j);

TilePlacement sinusoidal_offset(const ScanConfig& cfg, int i, int j);

/// Dispatches on cfg.strategy.
TilePlacement tile_offset(const ScanConfig& cfg, int i, int j);

/// All placements in row-major order, translated so min dx = min dy = 0.
std::vector<TilePlacement> placement_table(const ScanConfig& cfg);

}  // namespace galvomosaic
