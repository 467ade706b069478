#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "galvomosaic/dataset.hpp"
#include "galvomosaic/metrics.hpp"
#include "galvomosaic/sidecar.hpp"

namespace galvomosaic::cli {

namespace fs = std::filesystem;

struct SimulateOptions {
    fs::path config;  // empty: built-in defaults
    fs::path out;
    std::optional<std::uint64_t> seed;
    std::optional<ScanStrategy> strategy;
};

enum class StitchMode { Raw, Processed };

std::string_view to_string(StitchMode m);
StitchMode parse_stitch_mode(std::string_view text);

struct StitchOptions {
    fs::path dataset;
    fs::path out;
    StitchMode mode = StitchMode::Processed;
    std::optional<CorrectionMode> correction;  // default: off for raw, manifest's for processed
    std::optional<bool> feather;               // same
    bool png = false;
};

struct EvaluateOptions {
    fs::path mosaic;
    fs::path sidecar;
    fs::path config;  // optional region.* overrides
    fs::path out;
};

/// Writes truth.pgm, one PGM per tile, both references and manifest.json
/// into opts.out. Throws ConfigError for invalid settings.
DatasetManifest cmd_simulate(const SimulateOptions& opts, std::ostream* log = nullptr);

/// Writes mosaic.pgm (and mosaic.png) plus mosaic.sidecar into opts.out.
/// Throws std::runtime_error listing missing tiles as (i, j).
MosaicSidecar cmd_stitch(const StitchOptions& opts, std::ostream* log = nullptr);

/// Writes report.txt and report.json into opts.out. Metrics that cannot be
/// computed are listed in the returned report's errors.
MetricsReport cmd_evaluate(const EvaluateOptions& opts, std::ostream* log = nullptr);

/// Entry point used by the executable; returns the process exit code.
int run(int argc, char** argv);

}  // namespace galvomosaic::cli
