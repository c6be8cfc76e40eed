#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace histoprompt {

/// Interleaved 8-bit RGB image.
struct RgbImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;  // width * height * 3

    bool empty() const noexcept { return width == 0 || height == 0; }

    static RgbImage filled(std::size_t w, std::size_t h, std::uint8_t r, std::uint8_t g, std::uint8_t b);

    void set(std::size_t x, std::size_t y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        auto* p = &pixels[(y * width + x) * 3];
        p[0] = r;
        p[1] = g;
        p[2] = b;
    }
};

/// Decodes PNG or JPEG (by signature, not extension). Throws DecodeError.
RgbImage read_image(const std::filesystem::path& path);

void write_png(const RgbImage& image, const std::filesystem::path& path);
std::string encode_png(const RgbImage& image);

/// Bilinear resample to the target size.
RgbImage resize_bilinear(const RgbImage& image, std::size_t width, std::size_t height);

}  // namespace histoprompt
