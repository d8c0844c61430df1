#include "uscut/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "uscut/error.hpp"

namespace uscut {

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> data,
                     std::optional<double> spacing_mm)
    : width_(width), height_(height), data_(std::move(data)), spacing_mm_(spacing_mm) {
    if (width_ < 1 || height_ < 1) {
        throw InvalidArgument("image dimensions must be positive, got " + std::to_string(width_) +
                              "x" + std::to_string(height_));
    }
    if (data_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_)) {
        throw InvalidArgument("image data length does not match width*height");
    }
    if (spacing_mm_ && !(*spacing_mm_ > 0.0)) {
        throw InvalidArgument("pixel spacing must be > 0");
    }
}

GrayImage GrayImage::filled(int width, int height, std::uint8_t value) {
    if (width < 1 || height < 1) {
        throw InvalidArgument("image dimensions must be positive");
    }
    return GrayImage(width, height,
                     std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height, value));
}

GrayImage GrayImage::with_spacing(std::optional<double> spacing_mm) const {
    return GrayImage(width_, height_, data_, spacing_mm);
}

BinaryMask::BinaryMask(int width, int height)
    : width_(width), height_(height),
      bits_(static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0)), 0) {
    if (width < 1 || height < 1) {
        throw InvalidArgument("mask dimensions must be positive");
    }
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
    if (width < 1 || height < 1) {
        throw InvalidArgument("mask dimensions must be positive");
    }
    if (bits_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw InvalidArgument("mask data length does not match width*height");
    }
    for (auto& b : bits_) {
        b = b != 0 ? 1 : 0;
    }
}

std::size_t BinaryMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

GrayImage BinaryMask::to_image() const {
    std::vector<std::uint8_t> px(bits_.size());
    std::transform(bits_.begin(), bits_.end(), px.begin(),
                   [](std::uint8_t b) { return b ? std::uint8_t{255} : std::uint8_t{0}; });
    return GrayImage(width_, height_, std::move(px));
}

BinaryMask BinaryMask::from_image(const GrayImage& img) {
    auto d = img.data();
    return BinaryMask(img.width(), img.height(), std::vector<std::uint8_t>(d.begin(), d.end()));
}

BilinearSample sample_bilinear_parts(const GrayImage& img, double x, double y) noexcept {
    const double maxx = img.width() - 1;
    const double maxy = img.height() - 1;
    // NaN falls through to 0 via the clamp ordering below.
    x = x > 0.0 ? std::min(x, maxx) : 0.0;
    y = y > 0.0 ? std::min(y, maxy) : 0.0;

    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, img.width() - 1);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double fx = x - x0;
    const double fy = y - y0;

    const int g00 = img.at(x0, y0);
    const int g10 = img.at(x1, y0);
    const int g01 = img.at(x0, y1);
    const int g11 = img.at(x1, y1);

    BilinearSample s;
    s.anchor = g00;
    s.offset = fx * (g10 - g00) + fy * (g01 - g00) + fx * fy * (g11 - g10 - g01 + g00);
    return s;
}

double sample_bilinear(const GrayImage& img, double x, double y) noexcept {
    return sample_bilinear_parts(img, x, y).value();
}

DiskStats gray_disk_stats(const GrayImage& img, Point2 center, double radius) {
    if (!(radius > 0.0)) {
        throw InvalidArgument("disk radius must be > 0");
    }
    const double r2 = radius * radius;
    const int y_lo = std::max(0, static_cast<int>(std::ceil(center.y - radius)));
    const int y_hi = std::min(img.height() - 1, static_cast<int>(std::floor(center.y + radius)));
    const int x_lo = std::max(0, static_cast<int>(std::ceil(center.x - radius)));
    const int x_hi = std::min(img.width() - 1, static_cast<int>(std::floor(center.x + radius)));

    DiskStats st;
    for (int y = y_lo; y <= y_hi; ++y) {
        const double dy = y - center.y;
        for (int x = x_lo; x <= x_hi; ++x) {
            const double dx = x - center.x;
            if (dx * dx + dy * dy <= r2) {
                st.sum += img.at(x, y);
                ++st.count;
            }
        }
    }
    if (st.count == 0) {
        throw InvalidArgument("averaging disk does not cover any pixel center of the image");
    }
    return st;
}

double mean_gray_disk(const GrayImage& img, Point2 center, double radius) {
    return gray_disk_stats(img, center, radius).mean();
}

} // namespace uscut
