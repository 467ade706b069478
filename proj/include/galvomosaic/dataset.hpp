#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "galvomosaic/kv_config.hpp"
#include "galvomosaic/metrics.hpp"
#include "galvomosaic/scan_geometry.hpp"
#include "galvomosaic/scan_simulator.hpp"
#include "galvomosaic/tile_correction.hpp"

namespace galvomosaic {

/// Everything a run needs, merged from the key-value config file.
struct RunConfig {
    ScanConfig scan;
    std::vector<RectRoi> rois;  // empty: default_rois for the strategy
    int band_px = kDefaultBandPx;
    double epsilon = kDefaultEpsilon;
    sim::DegradationSpec degradation;
    sim::TargetSpec target;
    bool subpixel_sampling = false;
    double per_frame_ms = 60.5;
    std::vector<RegionSpec> regions;  // empty: the target's own regions
    CorrectionMode correction = CorrectionMode::TwoPoint;
    bool feather = true;

    [[nodiscard]] std::vector<RectRoi> effective_rois() const;
    /// Throws ConfigError naming the offending key.
    void validate() const;
};

/// Reads the scan keys (n_rows, n_cols, dv_x, ..., settle_ms) from kv.
ScanConfig parse_scan_config(KeyValueFile& kv);
/// Inverse of parse_scan_config.
std::string to_key_value(const ScanConfig& cfg);

/// Parses and validates a full run config; unknown keys are errors.
RunConfig parse_run_config(KeyValueFile& kv);
RunConfig load_run_config(const std::filesystem::path& path);

RectRoi parse_rect(const std::string& key, const std::string& text);

/// On-disk dataset description written by the simulator.
struct DatasetManifest {
    struct TileEntry {
        int row = 0;
        int col = 0;
        std::string file;
        double dx = 0.0;
        double dy = 0.0;
    };

    ScanConfig scan;
    std::vector<RectRoi> rois;
    int band_px = kDefaultBandPx;
    double epsilon = kDefaultEpsilon;
    sim::DegradationSpec degradation;
    sim::TargetSpec target;
    bool subpixel_sampling = false;
    std::string truth_file = "truth.pgm";
    int truth_width = 0;
    int truth_height = 0;
    std::string ref_bright_file = "ref_bright.pgm";
    std::string ref_dark_file = "ref_dark.pgm";
    std::vector<RegionSpec> regions;
    std::vector<TileEntry> tiles;
    double settle_ms = 0.0;
    double per_frame_ms = 0.0;
    double total_s = 0.0;
    CorrectionMode correction = CorrectionMode::TwoPoint;  // processed-mode defaults
    bool feather = true;

    [[nodiscard]] std::vector<TilePlacement> placements() const;
};

std::string tile_file_name(int row, int col);

std::string manifest_to_json(const DatasetManifest& m);
/// Throws std::runtime_error on malformed documents or a grid with missing or
/// duplicated (row, col) entries.
DatasetManifest manifest_from_json(const std::string& text);

DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& m);

}  // namespace galvomosaic
