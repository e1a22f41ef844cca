#include "fgl/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

namespace fgl::img {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::string& what, const std::string& path) {
    throw std::runtime_error(what + ": " + path);
}

// Decode any PNG into 8-bit RGB rows.
void read_png_rows(const std::string& path, int& width, int& height,
                   std::vector<std::uint8_t>& rgb) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail("cannot open PNG for reading", path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                             nullptr);
    if (!png) fail("png_create_read_struct failed", path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail("png_create_info_struct failed", path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail("corrupt or truncated PNG", path);
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);

    png_set_expand(png);              // palette/low-bit-depth -> 8-bit
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    if (png_get_channels(png, info) != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail("unexpected channel count after PNG expansion", path);
    }

    rgb.assign(static_cast<std::size_t>(width) * height * 3, 0);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
        rows[y] = rgb.data() + static_cast<std::size_t>(y) * width * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
}

void write_png_rows(const std::string& path, int width, int height, int color_type,
                    const std::uint8_t* bytes, int bytes_per_px) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) fail("cannot open PNG for writing", path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                              nullptr);
    if (!png) fail("png_create_write_struct failed", path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail("png_create_info_struct failed", path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail("PNG write failed", path);
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width),
                 static_cast<png_uint_32>(height), 8, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
        rows[y] = const_cast<std::uint8_t*>(bytes) +
                  static_cast<std::size_t>(y) * width * bytes_per_px;
    png_write_image(png, rows.data());
    png_write_end(png, info);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

std::size_t BinaryMask::area() const {
    std::size_t a = 0;
    for (std::uint8_t b : bits) a += b;
    return a;
}

ImageRGB read_png(const std::string& path) {
    ImageRGB im;
    read_png_rows(path, im.width, im.height, im.pixels);
    return im;
}

void write_png(const std::string& path, const ImageRGB& image) {
    write_png_rows(path, image.width, image.height, PNG_COLOR_TYPE_RGB,
                   image.pixels.data(), 3);
}

BinaryMask read_mask_png(const std::string& path) {
    ImageRGB im = read_png(path);
    BinaryMask m(im.width, im.height);
    for (int y = 0; y < im.height; ++y)
        for (int x = 0; x < im.width; ++x)
            m.at(x, y) = im.px(x, y)[0] > 127 ? 1 : 0;
    return m;
}

void write_mask_png(const std::string& path, const BinaryMask& mask) {
    std::vector<std::uint8_t> gray(mask.bits.size());
    for (std::size_t i = 0; i < mask.bits.size(); ++i)
        gray[i] = mask.bits[i] ? 255 : 0;
    write_png_rows(path, mask.width, mask.height, PNG_COLOR_TYPE_GRAY, gray.data(), 1);
}

void write_gray_png(const std::string& path, const std::vector<float>& values, int width,
                    int height) {
    if (values.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("write_gray_png: value count does not match size");
    std::vector<std::uint8_t> gray(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const float v = std::clamp(values[i], 0.0f, 1.0f);
        gray[i] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
    }
    write_png_rows(path, width, height, PNG_COLOR_TYPE_GRAY, gray.data(), 1);
}

float bilinear_sample(const std::vector<float>& plane, int width, int height, float x,
                      float y) {
    const float cx = std::clamp(x, 0.0f, static_cast<float>(width - 1));
    const float cy = std::clamp(y, 0.0f, static_cast<float>(height - 1));
    const int x0 = static_cast<int>(std::floor(cx));
    const int y0 = static_cast<int>(std::floor(cy));
    const int x1 = std::min(x0 + 1, width - 1);
    const int y1 = std::min(y0 + 1, height - 1);
    const float dx = cx - static_cast<float>(x0);
    const float dy = cy - static_cast<float>(y0);

    const float v00 = plane[static_cast<std::size_t>(y0) * width + x0];
    const float v10 = plane[static_cast<std::size_t>(y0) * width + x1];
    const float v01 = plane[static_cast<std::size_t>(y1) * width + x0];
    const float v11 = plane[static_cast<std::size_t>(y1) * width + x1];
    return v00 * (1 - dx) * (1 - dy) + v10 * dx * (1 - dy) + v01 * (1 - dx) * dy +
           v11 * dx * dy;
}

std::vector<float> resize_bilinear_plane(const std::vector<float>& plane, int width,
                                         int height, int out_w, int out_h) {
    if (out_w <= 0 || out_h <= 0)
        throw std::invalid_argument("resize_bilinear: output size must be positive");
    std::vector<float> out(static_cast<std::size_t>(out_w) * out_h);
    const float sx = static_cast<float>(width) / static_cast<float>(out_w);
    const float sy = static_cast<float>(height) / static_cast<float>(out_h);
    for (int y = 0; y < out_h; ++y) {
        const float srcy = (static_cast<float>(y) + 0.5f) * sy - 0.5f;
        for (int x = 0; x < out_w; ++x) {
            const float srcx = (static_cast<float>(x) + 0.5f) * sx - 0.5f;
            out[static_cast<std::size_t>(y) * out_w + x] =
                bilinear_sample(plane, width, height, srcx, srcy);
        }
    }
    return out;
}

ImageRGB resize_bilinear(const ImageRGB& image, int out_w, int out_h) {
    std::vector<float> plane(static_cast<std::size_t>(image.width) * image.height);
    ImageRGB out(out_w, out_h);
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < image.height; ++y)
            for (int x = 0; x < image.width; ++x)
                plane[static_cast<std::size_t>(y) * image.width + x] =
                    static_cast<float>(image.px(x, y)[c]);
        std::vector<float> res = resize_bilinear_plane(plane, image.width, image.height,
                                                       out_w, out_h);
        for (int y = 0; y < out_h; ++y)
            for (int x = 0; x < out_w; ++x) {
                const float v = std::clamp(res[static_cast<std::size_t>(y) * out_w + x],
                                           0.0f, 255.0f);
                out.px(x, y)[c] = static_cast<std::uint8_t>(std::lround(v));
            }
    }
    return out;
}

}  // namespace fgl::img
