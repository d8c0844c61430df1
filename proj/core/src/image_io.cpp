#include "uscut/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "uscut/error.hpp"

namespace uscut {
namespace {

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

bool is_png(std::span<const std::uint8_t> bytes) {
    return bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0;
}

bool is_pgm(std::span<const std::uint8_t> bytes) {
    return bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5';
}

class PgmHeaderReader {
public:
    explicit PgmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes), pos_(2) {}

    long next_int() {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
            throw IoError("PGM: malformed header");
        }
        long v = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            v = v * 10 + (bytes_[pos_] - '0');
            if (v > 1'000'000'000L) {
                throw IoError("PGM: header value out of range");
            }
            ++pos_;
        }
        return v;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t raster_offset() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
            throw IoError("PGM: missing whitespace before raster");
        }
        return pos_ + 1;
    }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') {
                    ++pos_;
                }
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_;
};

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
    PgmHeaderReader rd(bytes);
    const long w = rd.next_int();
    const long h = rd.next_int();
    const long maxval = rd.next_int();
    if (w < 1 || h < 1) {
        throw IoError("PGM: invalid dimensions");
    }
    if (maxval < 1 || maxval > 65535) {
        throw IoError("PGM: invalid maxval " + std::to_string(maxval));
    }
    if (maxval > 255) {
        throw IoError("PGM: unsupported bit depth (maxval " + std::to_string(maxval) +
                      " > 255)");
    }
    const std::size_t off = rd.raster_offset();
    const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    if (bytes.size() < off + n) {
        throw IoError("PGM: truncated raster");
    }
    return GrayImage(static_cast<int>(w), static_cast<int>(h),
                     std::vector<std::uint8_t>(bytes.begin() + off, bytes.begin() + off + n));
}

struct PngReadCursor {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;
};

// libpng reports errors by longjmp; the message is parked here and turned
// into an exception once control is back in C++ frames.
struct PngErrorSink {
    char message[256] = {};
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t len) {
    auto* cur = static_cast<PngReadCursor*>(png_get_io_ptr(png));
    if (cur->pos + len > cur->bytes.size()) {
        png_error(png, "truncated PNG stream");
    }
    std::memcpy(out, cur->bytes.data() + cur->pos, len);
    cur->pos += len;
}

void png_error_longjmp(png_structp png, png_const_charp msg) {
    auto* sink = static_cast<PngErrorSink*>(png_get_error_ptr(png));
    std::snprintf(sink->message, sizeof(sink->message), "%s", msg);
    png_longjmp(png, 1);
}

void png_warning_ignore(png_structp, png_const_charp) {}

std::uint8_t luma(int r, int g, int b) {
    return static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
}

struct PngDecoded {
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    int channels = 0;
    int bit_depth = 0;
};

// Returns false on a libpng error (message in sink). All non-trivial objects
// live in the caller so the longjmp never skips a destructor.
bool png_decode_into(png_structp png, png_infop info, PngReadCursor& cursor, PngDecoded& meta,
                     std::vector<std::uint8_t>& raw, std::vector<png_bytep>& rows) {
    if (setjmp(png_jmpbuf(png))) {
        return false;
    }
    png_set_read_fn(png, &cursor, png_read_from_memory);
    png_read_info(png, info);

    meta.bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);
    if (meta.bit_depth > 8) {
        return true;
    }
    if (color_type == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(png);
    }
    if (color_type == PNG_COLOR_TYPE_GRAY && meta.bit_depth < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
    }
    if (png_get_valid(png, info, PNG_INFO_tRNS)) {
        png_set_tRNS_to_alpha(png);
    }
    png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    meta.width = png_get_image_width(png, info);
    meta.height = png_get_image_height(png, info);
    meta.channels = png_get_channels(png, info);
    const auto rowbytes = png_get_rowbytes(png, info);
    raw.resize(rowbytes * meta.height);
    rows.resize(meta.height);
    for (png_uint_32 y = 0; y < meta.height; ++y) {
        rows[y] = raw.data() + y * rowbytes;
    }
    png_read_image(png, rows.data());
    return true;
}

GrayImage decode_png(std::span<const std::uint8_t> bytes) {
    PngErrorSink sink;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &sink, png_error_longjmp,
                                             png_warning_ignore);
    if (!png) {
        throw IoError("PNG: cannot allocate decoder");
    }
    png_infop info = png_create_info_struct(png);
    struct Guard {
        png_structp* png;
        png_infop* info;
        ~Guard() { png_destroy_read_struct(png, info, nullptr); }
    } guard{&png, &info};
    if (!info) {
        throw IoError("PNG: cannot allocate info struct");
    }

    PngReadCursor cursor{bytes, 0};
    PngDecoded meta;
    std::vector<std::uint8_t> raw;
    std::vector<png_bytep> rows;
    if (!png_decode_into(png, info, cursor, meta, raw, rows)) {
        throw IoError(std::string("PNG: ") + sink.message);
    }
    if (meta.bit_depth > 8) {
        throw IoError("PNG: unsupported bit depth " + std::to_string(meta.bit_depth) + " (> 8)");
    }
    if (meta.channels != 1 && meta.channels != 3) {
        throw IoError("PNG: unexpected channel count " + std::to_string(meta.channels));
    }

    const auto w = meta.width;
    const auto h = meta.height;
    std::vector<std::uint8_t> gray(static_cast<std::size_t>(w) * h);
    for (png_uint_32 y = 0; y < h; ++y) {
        const std::uint8_t* row = rows[y];
        for (png_uint_32 x = 0; x < w; ++x) {
            gray[static_cast<std::size_t>(y) * w + x] =
                meta.channels == 1 ? row[x] : luma(row[3 * x], row[3 * x + 1], row[3 * x + 2]);
        }
    }
    return GrayImage(static_cast<int>(w), static_cast<int>(h), std::move(gray));
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t len) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + len);
}

void png_flush_noop(png_structp) {}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("write failed for '" + path.string() + "'");
    }
}

} // namespace

GrayImage decode_gray_image(std::span<const std::uint8_t> bytes) {
    if (is_png(bytes)) {
        return decode_png(bytes);
    }
    if (is_pgm(bytes)) {
        return decode_pgm(bytes);
    }
    throw IoError("unsupported image format (expected PGM P5 or PNG)");
}

GrayImage load_gray_image(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    try {
        return decode_gray_image(bytes);
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
    const std::string header =
        "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.data().begin(), img.data().end());
    return out;
}

namespace {

bool png_encode_into(png_structp png, png_infop info, const GrayImage& img,
                     std::vector<std::uint8_t>& out, std::vector<png_bytep>& rows) {
    if (setjmp(png_jmpbuf(png))) {
        return false;
    }
    png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()),
                 static_cast<png_uint_32>(img.height()), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    return true;
}

} // namespace

std::vector<std::uint8_t> encode_png(const GrayImage& img) {
    PngErrorSink sink;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &sink, png_error_longjmp,
                                              png_warning_ignore);
    if (!png) {
        throw IoError("PNG: cannot allocate encoder");
    }
    png_infop info = png_create_info_struct(png);
    struct Guard {
        png_structp* png;
        png_infop* info;
        ~Guard() { png_destroy_write_struct(png, info); }
    } guard{&png, &info};
    if (!info) {
        throw IoError("PNG: cannot allocate info struct");
    }

    std::vector<std::uint8_t> out;
    std::vector<png_bytep> rows(static_cast<std::size_t>(img.height()));
    // libpng wants non-const row pointers; it does not write through them here.
    auto* base = const_cast<std::uint8_t*>(img.data().data());
    for (int y = 0; y < img.height(); ++y) {
        rows[static_cast<std::size_t>(y)] = base + static_cast<std::size_t>(y) * img.width();
    }
    if (!png_encode_into(png, info, img, out, rows)) {
        throw IoError(std::string("PNG: ") + sink.message);
    }
    return out;
}

void save_gray_image(const GrayImage& img, const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    write_file(path, ext == ".png" ? encode_png(img) : encode_pgm(img));
}

void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
    save_gray_image(mask.to_image(), path);
}

BinaryMask load_mask(const std::filesystem::path& path) {
    return BinaryMask::from_image(load_gray_image(path));
}

} // namespace uscut
