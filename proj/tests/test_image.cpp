#include "defect_reasoner/errors.hpp"
#include "defect_reasoner/image.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <png.h>

#include <cstdio>
#include <fstream>

using namespace defect_reasoner;

namespace {

// Writes a PNG with an arbitrary colour type so the decode transforms can
// be exercised (the library writer only emits 8-bit RGB).
void write_png_raw(const std::filesystem::path& path, int width, int height, int color_type,
                   const std::vector<unsigned char>& bytes, int channels) {
    std::FILE* fp = std::fopen(path.string().c_str(), "wb");
    REQUIRE(fp != nullptr);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    REQUIRE(setjmp(png_jmpbuf(png)) == 0);
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 8, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < height; ++y) {
        png_write_row(png, const_cast<png_bytep>(bytes.data() +
                                                 static_cast<std::size_t>(y) * width * channels));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

} // namespace

TEST_CASE("solid-colour PNG round-trips exactly") {
    const auto dir = testutil::fresh_dir("image_png");
    const RasterImage red = make_image(2, 2, {255, 0, 0});
    write_png(red, dir / "red.png");
    const RasterImage loaded = load_image(dir / "red.png");
    CHECK(loaded.width == 2);
    CHECK(loaded.height == 2);
    REQUIRE(loaded.pixels.size() == 4);
    for (const Rgb& p : loaded.pixels) {
        CHECK(p == Rgb{255, 0, 0});
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("1x1 JPEG decodes with the right dimensions") {
    const auto dir = testutil::fresh_dir("image_jpeg");
    const RasterImage dot = make_image(1, 1, {100, 150, 200});
    write_jpeg(dot, dir / "dot.jpg");
    const RasterImage loaded = load_image(dir / "dot.jpg");
    CHECK(loaded.width == 1);
    CHECK(loaded.height == 1);
    // Lossy codec: only sanity-check the colour.
    CHECK(std::abs(int(loaded.pixels[0].g) - 150) < 40);
    std::filesystem::remove_all(dir);
}

TEST_CASE("alpha is discarded and greyscale expands to RGB") {
    const auto dir = testutil::fresh_dir("image_transforms");

    write_png_raw(dir / "rgba.png", 2, 1, PNG_COLOR_TYPE_RGB_ALPHA,
                  {10, 20, 30, 128, 40, 50, 60, 0}, 4);
    const RasterImage rgba = load_image(dir / "rgba.png");
    REQUIRE(rgba.pixels.size() == 2);
    CHECK(rgba.pixels[0] == Rgb{10, 20, 30});
    CHECK(rgba.pixels[1] == Rgb{40, 50, 60});

    write_png_raw(dir / "gray.png", 1, 2, PNG_COLOR_TYPE_GRAY, {77, 200}, 1);
    const RasterImage gray = load_image(dir / "gray.png");
    REQUIRE(gray.pixels.size() == 2);
    CHECK(gray.pixels[0] == Rgb{77, 77, 77});
    CHECK(gray.pixels[1] == Rgb{200, 200, 200});

    std::filesystem::remove_all(dir);
}

TEST_CASE("corrupt and unsupported files raise ingest errors") {
    const auto dir = testutil::fresh_dir("image_errors");

    {
        std::ofstream out(dir / "not_an_image.txt");
        out << "just text\n";
    }
    CHECK_THROWS_AS(load_image(dir / "not_an_image.txt"), IngestError);
    CHECK_THROWS_AS(load_image(dir / "missing.png"), IngestError);

    // Valid PNG magic followed by garbage.
    {
        std::ofstream out(dir / "corrupt.png", std::ios::binary);
        const unsigned char magic[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
        out.write(reinterpret_cast<const char*>(magic), 8);
        out << "garbage garbage garbage";
    }
    CHECK_THROWS_AS(load_image(dir / "corrupt.png"), IngestError);

    // Truncated JPEG.
    {
        const RasterImage img = make_image(20, 20, {9, 9, 9});
        write_jpeg(img, dir / "ok.jpg");
        std::ifstream in(dir / "ok.jpg", std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), {});
        std::ofstream out(dir / "trunc.jpg", std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 3));
    }
    CHECK_THROWS_AS(load_image(dir / "trunc.jpg"), IngestError);

    std::filesystem::remove_all(dir);
}
