#include "galvomosaic/pgm_io.hpp"

#include <png.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace galvomosaic::io {

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in, const std::filesystem::path& path) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            if (!tok.empty()) break;
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    if (tok.empty()) throw std::runtime_error(path.string() + ": truncated PGM header");
    return tok;
}

int header_int(std::istream& in, const std::filesystem::path& path, const char* what) {
    const std::string tok = next_token(in, path);
    try {
        std::size_t used = 0;
        const long v = std::stol(tok, &used);
        if (used != tok.size() || v <= 0 || v > std::numeric_limits<int>::max()) throw 0;
        return static_cast<int>(v);
    } catch (...) {
        throw std::runtime_error(path.string() + ": bad PGM " + what + " '" + tok + "'");
    }
}

}  // namespace

Image16 read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
    if (next_token(in, path) != "P5") {
        throw std::runtime_error(path.string() + ": not a binary PGM (P5)");
    }
    const int width = header_int(in, path, "width");
    const int height = header_int(in, path, "height");
    const int maxval = header_int(in, path, "maxval");
    if (maxval > 65535) throw std::runtime_error(path.string() + ": maxval exceeds 65535");

    Image16 img(width, height);
    const bool wide = maxval > 255;
    const std::size_t bytes = img.size() * (wide ? 2 : 1);
    std::vector<unsigned char> raw(bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(in.gcount()) != bytes) {
        throw std::runtime_error(path.string() + ": truncated PGM pixel data");
    }

    auto& d = img.data();
    const double scale = 65535.0 / maxval;
    for (std::size_t k = 0; k < d.size(); ++k) {
        unsigned v = wide ? (unsigned{raw[2 * k]} << 8) | raw[2 * k + 1] : raw[k];
        if (v > static_cast<unsigned>(maxval)) {
            throw std::runtime_error(path.string() + ": sample exceeds maxval");
        }
        if (maxval != 65535) v = static_cast<unsigned>(std::lround(v * scale));
        d[k] = static_cast<std::uint16_t>(v);
    }
    return img;
}

void write_pgm(const std::filesystem::path& path, const Image16& img) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << "P5\n" << img.width() << ' ' << img.height() << "\n65535\n";
    std::vector<unsigned char> raw(img.size() * 2);
    const auto& d = img.data();
    for (std::size_t k = 0; k < d.size(); ++k) {
        raw[2 * k] = static_cast<unsigned char>(d[k] >> 8);
        raw[2 * k + 1] = static_cast<unsigned char>(d[k] & 0xff);
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

void write_png(const std::filesystem::path& path, const Image16& img) {
    std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
    if (!fp) throw std::runtime_error(path.string() + ": cannot open for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error(path.string() + ": PNG encoding failed");
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()),
                 static_cast<png_uint_32>(img.height()), 16, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<unsigned char> row(static_cast<std::size_t>(img.width()) * 2);
    for (int y = 0; y < img.height(); ++y) {
        const std::uint16_t* s = img.row(y);
        for (int x = 0; x < img.width(); ++x) {
            row[2 * x] = static_cast<unsigned char>(s[x] >> 8);
            row[2 * x + 1] = static_cast<unsigned char>(s[x] & 0xff);
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace galvomosaic::io
