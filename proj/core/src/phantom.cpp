#include "uscut/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "uscut/error.hpp"

namespace uscut {

EchoPattern parse_echo_pattern(std::string_view name) {
    if (name == "hyper") return EchoPattern::hyper;
    if (name == "iso") return EchoPattern::iso;
    if (name == "hypo") return EchoPattern::hypo;
    if (name == "halo_hyper") return EchoPattern::halo_hyper;
    if (name == "halo_iso") return EchoPattern::halo_iso;
    throw InvalidArgument("unknown echo pattern '" + std::string(name) + "'");
}

std::string_view to_string(EchoPattern p) noexcept {
    switch (p) {
    case EchoPattern::hyper: return "hyper";
    case EchoPattern::iso: return "iso";
    case EchoPattern::hypo: return "hypo";
    case EchoPattern::halo_hyper: return "halo_hyper";
    case EchoPattern::halo_iso: return "halo_iso";
    }
    return "?";
}

Phantom generate_phantom(const PhantomSpec& spec) {
    if (spec.size < 1) {
        throw InvalidArgument("phantom size must be positive");
    }
    if (!(spec.radius_x > 0.0) || !(spec.radius_y > 0.0)) {
        throw InvalidArgument("lesion radii must be positive");
    }
    if (spec.speckle_sigma < 0.0) {
        throw InvalidArgument("speckle sigma must be >= 0");
    }
    const bool halo = spec.pattern == EchoPattern::halo_hyper || spec.pattern == EchoPattern::halo_iso;
    if (halo && spec.halo_width < 0.0) {
        throw InvalidArgument("halo width must be >= 0");
    }

    int lesion_gray = spec.background;
    switch (spec.pattern) {
    case EchoPattern::hyper:
    case EchoPattern::halo_hyper:
        lesion_gray = spec.background + spec.contrast;
        break;
    case EchoPattern::hypo:
        lesion_gray = spec.background - spec.contrast;
        break;
    case EchoPattern::iso:
    case EchoPattern::halo_iso:
        break;
    }
    const int halo_gray = spec.background - spec.halo_depth;
    auto in_range = [](int g) { return g >= 0 && g <= 255; };
    if (!in_range(spec.background) || !in_range(spec.background + spec.contrast) ||
        !in_range(spec.background - spec.contrast) || (halo && !in_range(halo_gray))) {
        throw InvalidArgument("phantom gray levels leave [0, 255]");
    }

    const Point2 c = spec.lesion_center();
    const double pad = halo ? spec.halo_width : 0.0;
    const double ox = spec.radius_x + pad;
    const double oy = spec.radius_y + pad;
    if (c.x - ox < 0.0 || c.y - oy < 0.0 || c.x + ox > spec.size - 1 || c.y + oy > spec.size - 1) {
        throw InvalidArgument("lesion does not fit inside the image");
    }

    const int n = spec.size;
    std::vector<std::uint8_t> px(static_cast<std::size_t>(n) * n);
    BinaryMask gt(n, n);
    std::mt19937_64 rng(spec.rng_seed);
    std::normal_distribution<double> eta(0.0, 1.0);

    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const double dx = x - c.x;
            const double dy = y - c.y;
            const bool inside = (dx * dx) / (spec.radius_x * spec.radius_x) +
                                    (dy * dy) / (spec.radius_y * spec.radius_y) <=
                                1.0;
            const bool in_halo = halo && !inside && (dx * dx) / (ox * ox) + (dy * dy) / (oy * oy) <= 1.0;

            double g = inside ? lesion_gray : in_halo ? halo_gray : spec.background;
            if (spec.speckle_sigma > 0.0) {
                g *= 1.0 + spec.speckle_sigma * eta(rng);
            }
            px[static_cast<std::size_t>(y) * n + x] =
                static_cast<std::uint8_t>(std::clamp(std::round(g), 0.0, 255.0));
            if (inside) {
                gt.set(x, y);
            }
        }
    }
    return Phantom{GrayImage(n, n, std::move(px)), std::move(gt)};
}

} // namespace uscut
