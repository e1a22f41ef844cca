#ifndef FGL_OPTIM_HPP
#define FGL_OPTIM_HPP

#include <vector>

namespace fgl::nn {

/// Per-parameter RMSProp state. The accumulator is a running mean of squared
/// gradients and stays >= 0 elementwise.
struct RmsPropState {
    std::vector<float> s;       // same length as the parameter it tracks
    float decay = 0.9f;         // rho
    float learning_rate = 1e-4f;
    float epsilon = 1e-8f;

    static RmsPropState init(std::size_t size, float lr = 1e-4f, float rho = 0.9f,
                             float eps = 1e-8f);
};

/// s <- rho*s + (1-rho)*g^2;  param <- param - lr * g / (sqrt(s) + eps).
void rmsprop_step(std::vector<float>& param, const std::vector<float>& grad,
                  RmsPropState& state);

}  // namespace fgl::nn

#endif
