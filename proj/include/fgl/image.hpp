#ifndef FGL_IMAGE_HPP
#define FGL_IMAGE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace fgl::img {

/// 8-bit RGB image, row-major, 3 bytes per pixel.
struct ImageRGB {
    int width = 0, height = 0;
    std::vector<std::uint8_t> pixels;  // width*height*3

    ImageRGB() = default;
    ImageRGB(int w, int h)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::size_t offset(int x, int y) const {
        return (static_cast<std::size_t>(y) * width + x) * 3;
    }
    std::uint8_t* px(int x, int y) { return pixels.data() + offset(x, y); }
    const std::uint8_t* px(int x, int y) const { return pixels.data() + offset(x, y); }
};

/// Per-pixel {0,1} mask paired with an image of the same dimensions.
struct BinaryMask {
    int width = 0, height = 0;
    std::vector<std::uint8_t> bits;  // 0 or 1

    BinaryMask() = default;
    BinaryMask(int w, int h)
        : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

    std::uint8_t& at(int x, int y) { return bits[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const {
        return bits[static_cast<std::size_t>(y) * width + x];
    }
    std::size_t area() const;
    bool empty_mask() const { return area() == 0; }
};

// --- PNG I/O (lossless; masks stored as 0/255 grayscale) ---

ImageRGB read_png(const std::string& path);
void write_png(const std::string& path, const ImageRGB& image);

BinaryMask read_mask_png(const std::string& path);
void write_mask_png(const std::string& path, const BinaryMask& mask);

/// 8-bit grayscale PNG from floats in [0,1] (values clamped, rounded).
void write_gray_png(const std::string& path, const std::vector<float>& values, int width,
                    int height);

// --- Sampling ---

/// Bilinear sample of one channel at a fractional position, half-pixel
/// centers, coordinates clamped to the image border.
float bilinear_sample(const std::vector<float>& plane, int width, int height, float x,
                      float y);

/// Bilinear resize with the half-pixel-center convention:
/// src = (dst + 0.5) * (src_size / dst_size) - 0.5, clamped.
ImageRGB resize_bilinear(const ImageRGB& image, int out_w, int out_h);

/// Same convention on a single float plane (shared with heatmap upsampling).
std::vector<float> resize_bilinear_plane(const std::vector<float>& plane, int width,
                                         int height, int out_w, int out_h);

}  // namespace fgl::img

#endif
