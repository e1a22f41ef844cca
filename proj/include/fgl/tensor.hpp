#ifndef FGL_TENSOR_HPP
#define FGL_TENSOR_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fgl {

/// Dense 4-D float tensor in NCHW layout, row-major (w fastest).
/// The currency of all network math in this project.
struct Tensor4 {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<float> data;

    Tensor4() = default;
    Tensor4(int n_, int c_, int h_, int w_);

    std::size_t numel() const { return data.size(); }

    std::size_t index(int in, int ic, int iy, int ix) const {
        return ((static_cast<std::size_t>(in) * c + ic) * h + iy) * w + ix;
    }
    float& at(int in, int ic, int iy, int ix) { return data[index(in, ic, iy, ix)]; }
    float at(int in, int ic, int iy, int ix) const { return data[index(in, ic, iy, ix)]; }

    bool same_shape(const Tensor4& o) const {
        return n == o.n && c == o.c && h == o.h && w == o.w;
    }
    std::string shape_str() const;

    void fill(float v);
    bool all_finite() const;
};

/// 2-D float matrix, row-major. Used by the fully connected layers.
struct Mat {
    int rows = 0, cols = 0;
    std::vector<float> data;

    Mat() = default;
    Mat(int r, int c_) : rows(r), cols(c_), data(static_cast<std::size_t>(r) * c_, 0.0f) {}

    float& at(int r, int c_) { return data[static_cast<std::size_t>(r) * cols + c_]; }
    float at(int r, int c_) const { return data[static_cast<std::size_t>(r) * cols + c_]; }

    std::string shape_str() const;
    bool all_finite() const;
};

/// Flatten (n,c,h,w) -> matrix (n, c*h*w), channel-major within a row.
Mat flatten(const Tensor4& t);

/// Inverse of flatten for a known target shape.
Tensor4 unflatten(const Mat& m, int c, int h, int w);

}  // namespace fgl

#endif
