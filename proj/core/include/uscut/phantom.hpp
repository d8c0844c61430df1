#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "uscut/image.hpp"

namespace uscut {

/// Echo patterns of liver lesions relative to the surrounding parenchyma.
enum class EchoPattern : std::uint8_t { hyper, iso, hypo, halo_hyper, halo_iso };

EchoPattern parse_echo_pattern(std::string_view name);
std::string_view to_string(EchoPattern p) noexcept;

struct PhantomSpec {
    int size = 256;
    int background = 120;
    /// Lesion center; defaults to the image center (size/2, size/2).
    std::optional<Point2> center;
    /// Ellipse semi-axes in pixels; equal for a disk.
    double radius_x = 30.0;
    double radius_y = 30.0;
    EchoPattern pattern = EchoPattern::hypo;
    int contrast = 50;
    double halo_width = 4.0;
    int halo_depth = 40;
    /// Multiplicative noise: pixel * (1 + speckle_sigma * eta), eta ~ N(0,1).
    double speckle_sigma = 0.0;
    std::uint64_t rng_seed = 0;

    Point2 lesion_center() const noexcept {
        return center.value_or(Point2{size / 2.0, size / 2.0});
    }
};

struct Phantom {
    GrayImage image;
    /// Pixel centers inside the lesion ellipse; the halo is excluded.
    BinaryMask ground_truth;
};

/// Throws InvalidArgument if the lesion (with its halo) leaves the image or
/// a region gray value falls outside [0, 255].
Phantom generate_phantom(const PhantomSpec& spec);

} // namespace uscut
