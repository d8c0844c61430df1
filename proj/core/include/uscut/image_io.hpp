#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "uscut/image.hpp"

namespace uscut {

/// Loads a PGM (P5, maxval <= 255) or PNG file. Color PNGs are converted to
/// luma with Rec.601 weights; 16-bit inputs are rejected rather than truncated.
GrayImage load_gray_image(const std::filesystem::path& path);

/// Same as load_gray_image, from an in-memory buffer. Format is sniffed.
GrayImage decode_gray_image(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_pgm(const GrayImage& img);
std::vector<std::uint8_t> encode_png(const GrayImage& img);

/// Writes PNG when the extension is ".png", PGM otherwise.
void save_gray_image(const GrayImage& img, const std::filesystem::path& path);

/// Masks are stored as 0/255 images.
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);
BinaryMask load_mask(const std::filesystem::path& path);

} // namespace uscut
