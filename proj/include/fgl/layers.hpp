#ifndef FGL_LAYERS_HPP
#define FGL_LAYERS_HPP

#include <cstdint>
#include <vector>

#include "fgl/tensor.hpp"

namespace fgl::nn {

/// 2-D convolution parameters. Kernels are odd-sized (3x3 in this project).
struct ConvParams {
    Tensor4 weights;          // (out_c, in_c, kh, kw)
    std::vector<float> bias;  // length out_c
    int stride = 1;
    int padding = 0;

    int out_c() const { return weights.n; }
    int in_c() const { return weights.c; }
    int kh() const { return weights.h; }
    int kw() const { return weights.w; }
};

/// Spatial output size for one axis: (in + 2*pad - k)/stride + 1.
/// Throws if the division is not exact or the result is not positive.
int conv_out_size(int in, int k, int stride, int padding);

Tensor4 conv2d(const Tensor4& input, const ConvParams& params);

struct ConvGrads {
    Tensor4 grad_input;
    Tensor4 grad_weights;
    std::vector<float> grad_bias;
};

/// Gradients of sum(conv2d(input, params) * upstream) w.r.t. all inputs.
ConvGrads conv2d_backward(const Tensor4& input, const ConvParams& params,
                          const Tensor4& upstream);

struct PoolResult {
    Tensor4 output;
    std::vector<std::int64_t> argmax;  // flat input index per output element
};

/// 2x2 non-overlapping max pool. Ties break to the first position in
/// row-major window order. Requires even h and w.
PoolResult maxpool2(const Tensor4& input);

Tensor4 maxpool2_backward(const std::vector<std::int64_t>& argmax,
                          const Tensor4& upstream, int in_n, int in_c, int in_h,
                          int in_w);

struct BatchNormParams {
    std::vector<float> gamma;
    std::vector<float> beta;
    std::vector<float> running_mean;
    std::vector<float> running_var;
    float momentum = 0.9f;  // weight kept by the old running value
    float epsilon = 1e-5f;

    static BatchNormParams init(int channels);
    int channels() const { return static_cast<int>(gamma.size()); }
};

enum class BnMode { train, infer };

/// Forward cache needed by batchnorm_backward (train mode only).
struct BnCache {
    Tensor4 x_hat;                // normalized input
    std::vector<float> inv_std;   // 1/sqrt(var + eps) per channel
    BnMode mode = BnMode::train;
};

struct BnResult {
    Tensor4 output;
    BnCache cache;
    // Running statistics after the momentum update; callers commit these.
    std::vector<float> new_running_mean;
    std::vector<float> new_running_var;
};

/// Train mode normalizes by biased batch statistics (denominator N) and
/// returns updated running stats; infer mode uses running stats only and
/// leaves them untouched. Train mode requires n*h*w >= 2 per channel.
BnResult batchnorm(const Tensor4& input, const BatchNormParams& params, BnMode mode);

struct BnGrads {
    Tensor4 grad_input;
    std::vector<float> grad_gamma;
    std::vector<float> grad_beta;
};

BnGrads batchnorm_backward(const BnCache& cache, const BatchNormParams& params,
                           const Tensor4& upstream);

Tensor4 relu(const Tensor4& input);
/// Passes upstream where input > 0; the gradient at exactly 0 is 0.
Tensor4 relu_backward(const Tensor4& input, const Tensor4& upstream);

struct LinearParams {
    Mat weights;              // (d, m)
    std::vector<float> bias;  // length m
};

Mat linear(const Mat& input, const LinearParams& params);

struct LinearGrads {
    Mat grad_input;
    Mat grad_weights;
    std::vector<float> grad_bias;
};

LinearGrads linear_backward(const Mat& input, const LinearParams& params,
                            const Mat& upstream);

}  // namespace fgl::nn

#endif
