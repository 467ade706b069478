#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace galvomosaic {

/// Row-major single-channel raster.
template <typename T>
class Image {
public:
    using value_type = T;

    Image() = default;
    Image(int width, int height, T fill = T{})
        : width_(width), height_(height) {
        if (width < 0 || height < 0) {
            throw std::invalid_argument("image dimensions must be nonnegative");
        }
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    [[nodiscard]] int width() const { return width_; }
    [[nodiscard]] int height() const { return height_; }
    [[nodiscard]] std::size_t size() const { return data_.size(); }
    [[nodiscard]] bool empty() const { return data_.empty(); }

    T& operator()(int x, int y) { return data_[index(x, y)]; }
    const T& operator()(int x, int y) const { return data_[index(x, y)]; }

    T* row(int y) { return data_.data() + static_cast<std::size_t>(y) * width_; }
    const T* row(int y) const { return data_.data() + static_cast<std::size_t>(y) * width_; }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    auto begin() { return data_.begin(); }
    auto end() { return data_.end(); }
    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

    [[nodiscard]] bool same_shape(const Image& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }
    template <typename U>
    [[nodiscard]] bool same_shape(const Image<U>& other) const {
        return width_ == other.width() && height_ == other.height();
    }

    bool operator==(const Image& other) const = default;

private:
    [[nodiscard]] std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

/// Working representation: normalized intensity, nominally in [0, 1].
using ImageF = Image<double>;
/// Storage representation: 16-bit unsigned counts.
using Image16 = Image<std::uint16_t>;

inline constexpr double kStorageMax = 65535.0;

/// counts / 65535.
ImageF to_normalized(const Image16& img);

/// Clamps to [0, 1] and rounds half away from zero onto the 16-bit scale.
Image16 to_storage(const ImageF& img);

std::uint16_t quantize(double normalized);

/// Counts as reals, without normalization.
ImageF to_counts(const Image16& img);

/// Copies the w x h window at (x0, y0); throws std::out_of_range if it leaves the image.
template <typename T>
Image<T> crop(const Image<T>& src, int x0, int y0, int w, int h) {
    if (x0 < 0 || y0 < 0 || w < 0 || h < 0 || x0 + w > src.width() || y0 + h > src.height()) {
        throw std::out_of_range("crop window " + std::to_string(w) + "x" + std::to_string(h) +
                                "+" + std::to_string(x0) + "+" + std::to_string(y0) +
                                " exceeds image " + std::to_string(src.width()) + "x" +
                                std::to_string(src.height()));
    }
    Image<T> out(w, h);
    for (int y = 0; y < h; ++y) {
        const T* s = src.row(y0 + y) + x0;
        T* d = out.row(y);
        for (int x = 0; x < w; ++x) d[x] = s[x];
    }
    return out;
}

}  // namespace galvomosaic
