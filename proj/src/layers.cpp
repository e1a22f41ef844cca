#include "fgl/layers.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fgl::nn {

namespace {

// All three micro-GEMMs accumulate in double: tensors stay f32, but the
// finite-difference gradient gate (1e-3 relative at eps 1e-3) sits below the
// f32 accumulation noise floor for these kernel sizes.

// C[M x N] += A[M x K] * B[K x N]
void gemm_acc(const float* a, const float* b, double* cmat, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        const float* arow = a + static_cast<std::size_t>(i) * k;
        double* crow = cmat + static_cast<std::size_t>(i) * n;
        for (int p = 0; p < k; ++p) {
            const double av = arow[p];
            if (av == 0.0) continue;
            const float* brow = b + static_cast<std::size_t>(p) * n;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

// C[M x N] += A[K x M]^T * B[K x N]
void gemm_at_b_acc(const float* a, const float* b, double* cmat, int m, int k, int n) {
    for (int p = 0; p < k; ++p) {
        const float* arow = a + static_cast<std::size_t>(p) * m;
        const float* brow = b + static_cast<std::size_t>(p) * n;
        for (int i = 0; i < m; ++i) {
            const double av = arow[i];
            if (av == 0.0) continue;
            double* crow = cmat + static_cast<std::size_t>(i) * n;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

// C[M x N] += A[M x K] * B[N x K]^T
void gemm_a_bt_acc(const float* a, const float* b, double* cmat, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        const float* arow = a + static_cast<std::size_t>(i) * k;
        double* crow = cmat + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const float* brow = b + static_cast<std::size_t>(j) * k;
            double acc = 0.0;
            for (int p = 0; p < k; ++p)
                acc += static_cast<double>(arow[p]) * brow[p];
            crow[j] += acc;
        }
    }
}

void round_to_f32(const std::vector<double>& src, float* dst) {
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<float>(src[i]);
}

// Unfold one sample's receptive fields into a (in_c*kh*kw) x (oh*ow) matrix.
// Out-of-bounds taps read as zero (zero padding).
void im2col(const Tensor4& input, int sample, int kh, int kw, int stride, int pad,
            int oh, int ow, std::vector<float>& cols) {
    const int ic = input.c, ih = input.h, iw = input.w;
    cols.assign(static_cast<std::size_t>(ic) * kh * kw * oh * ow, 0.0f);
    std::size_t row = 0;
    for (int c = 0; c < ic; ++c) {
        const float* plane = input.data.data() + input.index(sample, c, 0, 0);
        for (int ky = 0; ky < kh; ++ky) {
            for (int kx = 0; kx < kw; ++kx, ++row) {
                float* dst = cols.data() + row * oh * ow;
                for (int oy = 0; oy < oh; ++oy) {
                    const int iy = oy * stride + ky - pad;
                    if (iy < 0 || iy >= ih) continue;
                    const float* src = plane + static_cast<std::size_t>(iy) * iw;
                    float* drow = dst + static_cast<std::size_t>(oy) * ow;
                    for (int ox = 0; ox < ow; ++ox) {
                        const int ix = ox * stride + kx - pad;
                        if (ix >= 0 && ix < iw) drow[ox] = src[ix];
                    }
                }
            }
        }
    }
}

// Scatter a cols-shaped gradient back onto the input-shaped accumulator.
void col2im_acc(const std::vector<double>& cols, int sample, int in_c, int in_h,
                int in_w, int kh, int kw, int stride, int pad, int oh, int ow,
                std::vector<double>& grad_input) {
    std::size_t row = 0;
    const std::size_t sample_base =
        static_cast<std::size_t>(sample) * in_c * in_h * in_w;
    for (int c = 0; c < in_c; ++c) {
        double* plane = grad_input.data() + sample_base +
                        static_cast<std::size_t>(c) * in_h * in_w;
        for (int ky = 0; ky < kh; ++ky) {
            for (int kx = 0; kx < kw; ++kx, ++row) {
                const double* src = cols.data() + row * oh * ow;
                for (int oy = 0; oy < oh; ++oy) {
                    const int iy = oy * stride + ky - pad;
                    if (iy < 0 || iy >= in_h) continue;
                    double* drow = plane + static_cast<std::size_t>(iy) * in_w;
                    const double* srow = src + static_cast<std::size_t>(oy) * ow;
                    for (int ox = 0; ox < ow; ++ox) {
                        const int ix = ox * stride + kx - pad;
                        if (ix >= 0 && ix < in_w) drow[ix] += srow[ox];
                    }
                }
            }
        }
    }
}

void check_conv_shapes(const Tensor4& input, const ConvParams& params) {
    if (params.kh() % 2 == 0 || params.kw() % 2 == 0)
        throw std::invalid_argument("conv2d: kernel must be odd-sized, got " +
                                    params.weights.shape_str());
    if (params.stride < 1) throw std::invalid_argument("conv2d: stride must be >= 1");
    if (params.padding < 0) throw std::invalid_argument("conv2d: padding must be >= 0");
    if (input.c != params.in_c())
        throw std::invalid_argument("conv2d: input channels " + input.shape_str() +
                                    " do not match weights " + params.weights.shape_str());
    if (static_cast<int>(params.bias.size()) != params.out_c())
        throw std::invalid_argument("conv2d: bias length " +
                                    std::to_string(params.bias.size()) +
                                    " does not match out_c " +
                                    std::to_string(params.out_c()));
}

}  // namespace

int conv_out_size(int in, int k, int stride, int padding) {
    const int span = in + 2 * padding - k;
    if (span < 0)
        throw std::invalid_argument("conv2d: kernel " + std::to_string(k) +
                                    " larger than padded input " +
                                    std::to_string(in + 2 * padding));
    return span / stride + 1;
}

Tensor4 conv2d(const Tensor4& input, const ConvParams& params) {
    check_conv_shapes(input, params);
    const int oh = conv_out_size(input.h, params.kh(), params.stride, params.padding);
    const int ow = conv_out_size(input.w, params.kw(), params.stride, params.padding);
    const int oc = params.out_c();
    const int k = params.in_c() * params.kh() * params.kw();

    Tensor4 out(input.n, oc, oh, ow);
    std::vector<float> cols;
    std::vector<double> acc(static_cast<std::size_t>(oc) * oh * ow);
    for (int s = 0; s < input.n; ++s) {
        im2col(input, s, params.kh(), params.kw(), params.stride, params.padding, oh, ow,
               cols);
        for (int f = 0; f < oc; ++f) {
            const double b = params.bias[f];
            double* row = acc.data() + static_cast<std::size_t>(f) * oh * ow;
            for (int i = 0; i < oh * ow; ++i) row[i] = b;
        }
        gemm_acc(params.weights.data.data(), cols.data(), acc.data(), oc, k, oh * ow);
        round_to_f32(acc, out.data.data() + out.index(s, 0, 0, 0));
    }
    return out;
}

ConvGrads conv2d_backward(const Tensor4& input, const ConvParams& params,
                          const Tensor4& upstream) {
    check_conv_shapes(input, params);
    const int oh = conv_out_size(input.h, params.kh(), params.stride, params.padding);
    const int ow = conv_out_size(input.w, params.kw(), params.stride, params.padding);
    const int oc = params.out_c();
    const int k = params.in_c() * params.kh() * params.kw();
    if (upstream.n != input.n || upstream.c != oc || upstream.h != oh || upstream.w != ow)
        throw std::invalid_argument("conv2d_backward: upstream shape " +
                                    upstream.shape_str() + " does not match output (" +
                                    std::to_string(input.n) + "," + std::to_string(oc) +
                                    "," + std::to_string(oh) + "," + std::to_string(ow) +
                                    ")");

    ConvGrads g;
    g.grad_input = Tensor4(input.n, input.c, input.h, input.w);
    g.grad_weights = Tensor4(oc, params.in_c(), params.kh(), params.kw());
    g.grad_bias.assign(oc, 0.0f);

    std::vector<double> acc_weights(static_cast<std::size_t>(oc) * k, 0.0);
    std::vector<double> acc_bias(oc, 0.0);
    std::vector<double> acc_input(g.grad_input.numel(), 0.0);
    std::vector<float> cols;
    std::vector<double> grad_cols(static_cast<std::size_t>(k) * oh * ow);

    for (int s = 0; s < input.n; ++s) {
        const float* up = upstream.data.data() + upstream.index(s, 0, 0, 0);

        for (int f = 0; f < oc; ++f) {
            const float* row = up + static_cast<std::size_t>(f) * oh * ow;
            double sum = 0.0;
            for (int i = 0; i < oh * ow; ++i) sum += row[i];
            acc_bias[f] += sum;
        }

        im2col(input, s, params.kh(), params.kw(), params.stride, params.padding, oh, ow,
               cols);
        // dW += G * cols^T, where G is (oc x oh*ow) and cols is (k x oh*ow)
        gemm_a_bt_acc(up, cols.data(), acc_weights.data(), oc, oh * ow, k);

        // dcols = W^T * G, then scatter back through the padding map
        std::fill(grad_cols.begin(), grad_cols.end(), 0.0);
        gemm_at_b_acc(params.weights.data.data(), up, grad_cols.data(), k, oc, oh * ow);
        col2im_acc(grad_cols, s, input.c, input.h, input.w, params.kh(), params.kw(),
                   params.stride, params.padding, oh, ow, acc_input);
    }
    round_to_f32(acc_weights, g.grad_weights.data.data());
    round_to_f32(acc_input, g.grad_input.data.data());
    for (int f = 0; f < oc; ++f) g.grad_bias[f] = static_cast<float>(acc_bias[f]);
    return g;
}

PoolResult maxpool2(const Tensor4& input) {
    if (input.h % 2 != 0 || input.w % 2 != 0)
        throw std::invalid_argument("maxpool2: spatial dims must be even, got " +
                                    input.shape_str());
    const int oh = input.h / 2, ow = input.w / 2;
    PoolResult r;
    r.output = Tensor4(input.n, input.c, oh, ow);
    r.argmax.assign(r.output.numel(), 0);

    std::size_t oi = 0;
    for (int s = 0; s < input.n; ++s) {
        for (int c = 0; c < input.c; ++c) {
            for (int oy = 0; oy < oh; ++oy) {
                for (int ox = 0; ox < ow; ++ox, ++oi) {
                    float best = -std::numeric_limits<float>::infinity();
                    std::int64_t best_idx = 0;
                    for (int dy = 0; dy < 2; ++dy) {
                        for (int dx = 0; dx < 2; ++dx) {
                            const std::size_t idx =
                                input.index(s, c, 2 * oy + dy, 2 * ox + dx);
                            const float v = input.data[idx];
                            if (v > best) {  // strict: first index wins ties
                                best = v;
                                best_idx = static_cast<std::int64_t>(idx);
                            }
                        }
                    }
                    r.output.data[oi] = best;
                    r.argmax[oi] = best_idx;
                }
            }
        }
    }
    return r;
}

Tensor4 maxpool2_backward(const std::vector<std::int64_t>& argmax,
                          const Tensor4& upstream, int in_n, int in_c, int in_h,
                          int in_w) {
    if (argmax.size() != upstream.numel())
        throw std::invalid_argument("maxpool2_backward: argmax count " +
                                    std::to_string(argmax.size()) +
                                    " does not match upstream " + upstream.shape_str());
    Tensor4 grad(in_n, in_c, in_h, in_w);
    const std::int64_t limit = static_cast<std::int64_t>(grad.numel());
    for (std::size_t i = 0; i < argmax.size(); ++i) {
        const std::int64_t idx = argmax[i];
        if (idx < 0 || idx >= limit)
            throw std::out_of_range("maxpool2_backward: argmax index " +
                                    std::to_string(idx) +
                                    " out of bounds for input of " +
                                    std::to_string(limit) + " elements");
        grad.data[static_cast<std::size_t>(idx)] += upstream.data[i];
    }
    return grad;
}

BatchNormParams BatchNormParams::init(int channels) {
    BatchNormParams p;
    p.gamma.assign(channels, 1.0f);
    p.beta.assign(channels, 0.0f);
    p.running_mean.assign(channels, 0.0f);
    p.running_var.assign(channels, 1.0f);
    return p;
}

BnResult batchnorm(const Tensor4& input, const BatchNormParams& params, BnMode mode) {
    const int ch = params.channels();
    if (input.c != ch)
        throw std::invalid_argument("batchnorm: input " + input.shape_str() +
                                    " does not match " + std::to_string(ch) +
                                    " channels");
    const std::int64_t m = static_cast<std::int64_t>(input.n) * input.h * input.w;

    BnResult r;
    r.output = Tensor4(input.n, input.c, input.h, input.w);
    r.cache.mode = mode;
    r.new_running_mean = params.running_mean;
    r.new_running_var = params.running_var;

    const int plane = input.h * input.w;
    if (mode == BnMode::infer) {
        for (int c = 0; c < ch; ++c) {
            const double inv =
                1.0 / std::sqrt(static_cast<double>(params.running_var[c]) +
                                params.epsilon);
            const double mu = params.running_mean[c];
            const double gm = params.gamma[c], bt = params.beta[c];
            for (int s = 0; s < input.n; ++s) {
                const float* src = input.data.data() + input.index(s, c, 0, 0);
                float* dst = r.output.data.data() + r.output.index(s, c, 0, 0);
                for (int i = 0; i < plane; ++i)
                    dst[i] = static_cast<float>(gm * (src[i] - mu) * inv + bt);
            }
        }
        return r;
    }

    if (m < 2)
        throw std::invalid_argument(
            "batchnorm: train mode needs n*h*w >= 2 per channel, got " +
            std::to_string(m));

    r.cache.x_hat = Tensor4(input.n, input.c, input.h, input.w);
    r.cache.inv_std.assign(ch, 0.0f);
    for (int c = 0; c < ch; ++c) {
        double sum = 0.0;
        for (int s = 0; s < input.n; ++s) {
            const float* src = input.data.data() + input.index(s, c, 0, 0);
            for (int i = 0; i < plane; ++i) sum += src[i];
        }
        const double mean = sum / static_cast<double>(m);
        double var_sum = 0.0;
        for (int s = 0; s < input.n; ++s) {
            const float* src = input.data.data() + input.index(s, c, 0, 0);
            for (int i = 0; i < plane; ++i) {
                const double d = static_cast<double>(src[i]) - mean;
                var_sum += d * d;
            }
        }
        const double var = var_sum / static_cast<double>(m);  // biased, denominator N
        const double inv = 1.0 / std::sqrt(var + params.epsilon);
        r.cache.inv_std[c] = static_cast<float>(inv);
        const double gm = params.gamma[c], bt = params.beta[c];
        for (int s = 0; s < input.n; ++s) {
            const float* src = input.data.data() + input.index(s, c, 0, 0);
            float* xh = r.cache.x_hat.data.data() + r.cache.x_hat.index(s, c, 0, 0);
            float* dst = r.output.data.data() + r.output.index(s, c, 0, 0);
            for (int i = 0; i < plane; ++i) {
                const double v = (src[i] - mean) * inv;
                xh[i] = static_cast<float>(v);
                dst[i] = static_cast<float>(gm * v + bt);
            }
        }
        const double mom = params.momentum;
        r.new_running_mean[c] = static_cast<float>(
            mom * params.running_mean[c] + (1.0 - mom) * mean);
        r.new_running_var[c] = static_cast<float>(
            mom * params.running_var[c] + (1.0 - mom) * var);
    }
    return r;
}

BnGrads batchnorm_backward(const BnCache& cache, const BatchNormParams& params,
                           const Tensor4& upstream) {
    if (cache.mode != BnMode::train)
        throw std::logic_error("batchnorm_backward: cache was not built in train mode");
    if (!cache.x_hat.same_shape(upstream))
        throw std::invalid_argument("batchnorm_backward: upstream " +
                                    upstream.shape_str() + " does not match cache " +
                                    cache.x_hat.shape_str());

    const int ch = params.channels();
    const int plane = upstream.h * upstream.w;
    const double m = static_cast<double>(upstream.n) * plane;

    BnGrads g;
    g.grad_input = Tensor4(upstream.n, upstream.c, upstream.h, upstream.w);
    g.grad_gamma.assign(ch, 0.0f);
    g.grad_beta.assign(ch, 0.0f);

    for (int c = 0; c < ch; ++c) {
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (int s = 0; s < upstream.n; ++s) {
            const float* dy = upstream.data.data() + upstream.index(s, c, 0, 0);
            const float* xh = cache.x_hat.data.data() + cache.x_hat.index(s, c, 0, 0);
            for (int i = 0; i < plane; ++i) {
                sum_dy += dy[i];
                sum_dy_xhat += static_cast<double>(dy[i]) * xh[i];
            }
        }
        g.grad_beta[c] = static_cast<float>(sum_dy);
        g.grad_gamma[c] = static_cast<float>(sum_dy_xhat);

        const double mean_dy = sum_dy / m;
        const double mean_dy_xhat = sum_dy_xhat / m;
        const double scale = static_cast<double>(params.gamma[c]) * cache.inv_std[c];
        for (int s = 0; s < upstream.n; ++s) {
            const float* dy = upstream.data.data() + upstream.index(s, c, 0, 0);
            const float* xh = cache.x_hat.data.data() + cache.x_hat.index(s, c, 0, 0);
            float* dx = g.grad_input.data.data() + g.grad_input.index(s, c, 0, 0);
            for (int i = 0; i < plane; ++i)
                dx[i] = static_cast<float>(scale *
                                           (dy[i] - mean_dy - xh[i] * mean_dy_xhat));
        }
    }
    return g;
}

Tensor4 relu(const Tensor4& input) {
    Tensor4 out = input;
    for (auto& v : out.data)
        if (v < 0.0f) v = 0.0f;
    return out;
}

Tensor4 relu_backward(const Tensor4& input, const Tensor4& upstream) {
    if (!input.same_shape(upstream))
        throw std::invalid_argument("relu_backward: shapes differ, input " +
                                    input.shape_str() + " vs upstream " +
                                    upstream.shape_str());
    Tensor4 grad(input.n, input.c, input.h, input.w);
    for (std::size_t i = 0; i < input.data.size(); ++i)
        grad.data[i] = input.data[i] > 0.0f ? upstream.data[i] : 0.0f;
    return grad;
}

Mat linear(const Mat& input, const LinearParams& params) {
    if (input.cols != params.weights.rows)
        throw std::invalid_argument("linear: input " + input.shape_str() +
                                    " does not match weights " +
                                    params.weights.shape_str());
    if (static_cast<int>(params.bias.size()) != params.weights.cols)
        throw std::invalid_argument("linear: bias length does not match weight columns");
    Mat out(input.rows, params.weights.cols);
    std::vector<double> acc(out.data.size());
    for (int r = 0; r < out.rows; ++r)
        for (int c = 0; c < out.cols; ++c)
            acc[static_cast<std::size_t>(r) * out.cols + c] = params.bias[c];
    gemm_acc(input.data.data(), params.weights.data.data(), acc.data(), input.rows,
             input.cols, params.weights.cols);
    round_to_f32(acc, out.data.data());
    return out;
}

LinearGrads linear_backward(const Mat& input, const LinearParams& params,
                            const Mat& upstream) {
    if (upstream.rows != input.rows || upstream.cols != params.weights.cols)
        throw std::invalid_argument("linear_backward: upstream " + upstream.shape_str() +
                                    " does not match output (" +
                                    std::to_string(input.rows) + "x" +
                                    std::to_string(params.weights.cols) + ")");
    LinearGrads g;
    g.grad_input = Mat(input.rows, input.cols);
    g.grad_weights = Mat(params.weights.rows, params.weights.cols);
    g.grad_bias.assign(params.weights.cols, 0.0f);

    std::vector<double> acc_in(g.grad_input.data.size(), 0.0);
    std::vector<double> acc_w(g.grad_weights.data.size(), 0.0);
    // dX = G * W^T
    gemm_a_bt_acc(upstream.data.data(), params.weights.data.data(), acc_in.data(),
                  upstream.rows, upstream.cols, input.cols);
    // dW = X^T * G
    gemm_at_b_acc(input.data.data(), upstream.data.data(), acc_w.data(), input.cols,
                  input.rows, upstream.cols);
    round_to_f32(acc_in, g.grad_input.data.data());
    round_to_f32(acc_w, g.grad_weights.data.data());
    for (int c = 0; c < upstream.cols; ++c) {
        double sum = 0.0;
        for (int r = 0; r < upstream.rows; ++r) sum += upstream.at(r, c);
        g.grad_bias[c] = static_cast<float>(sum);
    }
    return g;
}

}  // namespace fgl::nn
