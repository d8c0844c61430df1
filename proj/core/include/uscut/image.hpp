#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace uscut {

/// Sub-pixel image coordinate. Pixel centers sit at integer positions,
/// origin top-left, y pointing down.
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

using SeedPoint = Point2;

/// Immutable 8-bit grayscale raster, row-major.
class GrayImage {
public:
    GrayImage(int width, int height, std::vector<std::uint8_t> data,
              std::optional<double> spacing_mm = std::nullopt);

    /// Constant image.
    static GrayImage filled(int width, int height, std::uint8_t value);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::optional<double> spacing_mm() const noexcept { return spacing_mm_; }
    std::span<const std::uint8_t> data() const noexcept { return data_; }

    std::uint8_t at(int x, int y) const noexcept {
        return data_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                     static_cast<std::size_t>(x)];
    }

    bool contains(Point2 p) const noexcept {
        return p.x >= 0.0 && p.y >= 0.0 && p.x < width_ && p.y < height_;
    }

    GrayImage with_spacing(std::optional<double> spacing_mm) const;

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> data_;
    std::optional<double> spacing_mm_;
};

/// One boolean per pixel, row-major.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height);
    BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    bool get(int x, int y) const noexcept { return bits_[index(x, y)] != 0; }
    void set(int x, int y, bool on = true) noexcept { bits_[index(x, y)] = on ? 1 : 0; }

    /// 0/1 per pixel.
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    std::span<std::uint8_t> bits() noexcept { return bits_; }

    std::size_t count() const noexcept;
    bool empty() const noexcept { return count() == 0; }
    bool same_shape(const BinaryMask& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    /// 0 / 255 gray image, for export.
    GrayImage to_image() const;
    /// Any nonzero pixel is set.
    static BinaryMask from_image(const GrayImage& img);

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Bilinear sample split into an integer anchor pixel and a real offset,
/// so value == anchor + offset. The offset depends only on gray-value
/// differences, which keeps downstream costs exact under gray shifts.
struct BilinearSample {
    int anchor = 0;
    double offset = 0.0;

    double value() const noexcept { return anchor + offset; }
};

BilinearSample sample_bilinear_parts(const GrayImage& img, double x, double y) noexcept;

/// Bilinear interpolation between the four surrounding pixel centers.
/// Coordinates outside the image clamp to the border.
double sample_bilinear(const GrayImage& img, double x, double y) noexcept;

/// Sum and count of the pixels whose centers lie within `radius` of `center`.
struct DiskStats {
    long long sum = 0;
    long long count = 0;

    double mean() const noexcept { return static_cast<double>(sum) / static_cast<double>(count); }
};

DiskStats gray_disk_stats(const GrayImage& img, Point2 center, double radius);

/// Mean gray value over pixel centers within Euclidean distance <= radius.
/// Throws InvalidArgument for radius <= 0 or a disk that misses the image.
double mean_gray_disk(const GrayImage& img, Point2 center, double radius);

} // namespace uscut
