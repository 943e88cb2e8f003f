#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace defect_reasoner {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Decoded image, row-major, one RGB triple per pixel.
struct RasterImage {
    int width = 0;
    int height = 0;
    std::vector<Rgb> pixels;

    const Rgb& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    Rgb& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

RasterImage make_image(int width, int height, Rgb fill = {0, 0, 0});

// Decodes a PNG or JPEG file (detected by magic bytes, not extension).
// Alpha channels are dropped, palette and greyscale images are expanded
// to RGB. Throws IngestError on unreadable files, unsupported formats
// and zero-dimension images.
RasterImage load_image(const std::filesystem::path& path);

void write_png(const RasterImage& image, const std::filesystem::path& path);
void write_jpeg(const RasterImage& image, const std::filesystem::path& path, int quality = 95);

} // namespace defect_reasoner
