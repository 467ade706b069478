#include "galvomosaic/image.hpp"

#include <algorithm>
#include <cmath>

namespace galvomosaic {

ImageF to_normalized(const Image16& img) {
    ImageF out(img.width(), img.height());
    auto& d = out.data();
    const auto& s = img.data();
    for (std::size_t k = 0; k < s.size(); ++k) d[k] = static_cast<double>(s[k]) / kStorageMax;
    return out;
}

ImageF to_counts(const Image16& img) {
    ImageF out(img.width(), img.height());
    auto& d = out.data();
    const auto& s = img.data();
    for (std::size_t k = 0; k < s.size(); ++k) d[k] = static_cast<double>(s[k]);
    return out;
}

std::uint16_t quantize(double normalized) {
    if (!(normalized > 0.0)) return 0;  // also maps NaN to 0
    if (normalized >= 1.0) return 65535;
    return static_cast<std::uint16_t>(std::round(normalized * kStorageMax));
}

Image16 to_storage(const ImageF& img) {
    Image16 out(img.width(), img.height());
    auto& d = out.data();
    const auto& s = img.data();
    for (std::size_t k = 0; k < s.size(); ++k) d[k] = quantize(s[k]);
    return out;
}

}  // namespace galvomosaic
