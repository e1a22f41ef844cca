#include "fgl/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace fgl {

Tensor4::Tensor4(int n_, int c_, int h_, int w_) : n(n_), c(c_), h(h_), w(w_) {
    if (n < 0 || c < 0 || h < 0 || w < 0)
        throw std::invalid_argument("Tensor4: negative dimension in " + shape_str());
    data.assign(static_cast<std::size_t>(n) * c * h * w, 0.0f);
}

std::string Tensor4::shape_str() const {
    return "(" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) +
           "," + std::to_string(w) + ")";
}

void Tensor4::fill(float v) {
    for (auto& x : data) x = v;
}

bool Tensor4::all_finite() const {
    for (float x : data)
        if (!std::isfinite(x)) return false;
    return true;
}

std::string Mat::shape_str() const {
    return "(" + std::to_string(rows) + "x" + std::to_string(cols) + ")";
}

bool Mat::all_finite() const {
    for (float x : data)
        if (!std::isfinite(x)) return false;
    return true;
}

Mat flatten(const Tensor4& t) {
    Mat m(t.n, t.c * t.h * t.w);
    m.data = t.data;  // NCHW row-major flatten is a straight copy
    return m;
}

Tensor4 unflatten(const Mat& m, int c, int h, int w) {
    if (m.cols != c * h * w)
        throw std::invalid_argument("unflatten: " + std::to_string(m.cols) +
                                    " columns cannot reshape to c*h*w = " +
                                    std::to_string(c * h * w));
    Tensor4 t(m.rows, c, h, w);
    t.data = m.data;
    return t;
}

}  // namespace fgl
