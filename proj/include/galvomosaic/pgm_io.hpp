#pragma once

#include <filesystem>

#include "galvomosaic/image.hpp"

namespace galvomosaic::io {

/// Reads a binary (P5) PGM. Samples with maxval < 65535 are rescaled to the
/// full 16-bit range. Throws std::runtime_error on malformed input.
Image16 read_pgm(const std::filesystem::path& path);

/// Writes a P5 PGM with maxval 65535 (big-endian samples).
void write_pgm(const std::filesystem::path& path, const Image16& img);

/// 16-bit grayscale PNG.
void write_png(const std::filesystem::path& path, const Image16& img);

}  // namespace galvomosaic::io
