#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "galvomosaic/metrics.hpp"
#include "galvomosaic/mosaic_compose.hpp"
#include "galvomosaic/scan_geometry.hpp"

namespace galvomosaic {

/// Text record written next to a mosaic: everything evaluate needs besides
/// the pixels.
struct MosaicSidecar {
    int canvas_width = 0;
    int canvas_height = 0;
    TileDims tile;
    std::string mode;        // "raw" or "processed"
    std::string correction;  // CorrectionMode name
    bool feather = false;
    std::vector<TilePlacement> placements;
    std::vector<OverlapRegion> overlaps;
    std::vector<OverlapMae> maes;  // parallel to overlaps
    std::vector<SeamLine> seams;
    std::vector<RegionSpec> regions;

    bool operator==(const MosaicSidecar&) const;
};

std::string to_text(const MosaicSidecar& s);
/// Throws std::runtime_error naming the source and line on malformed input.
MosaicSidecar parse_sidecar(const std::string& text, const std::string& source = "<string>");

MosaicSidecar read_sidecar(const std::filesystem::path& path);
void write_sidecar(const std::filesystem::path& path, const MosaicSidecar& s);

}  // namespace galvomosaic
