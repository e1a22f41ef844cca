#include "fgl/optim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fgl::nn {

RmsPropState RmsPropState::init(std::size_t size, float lr, float rho, float eps) {
    RmsPropState st;
    st.s.assign(size, 0.0f);
    st.learning_rate = lr;
    st.decay = rho;
    st.epsilon = eps;
    return st;
}

void rmsprop_step(std::vector<float>& param, const std::vector<float>& grad,
                  RmsPropState& state) {
    if (param.size() != grad.size() || param.size() != state.s.size())
        throw std::invalid_argument("rmsprop_step: size mismatch, param " +
                                    std::to_string(param.size()) + ", grad " +
                                    std::to_string(grad.size()) + ", state " +
                                    std::to_string(state.s.size()));
    const float rho = state.decay;
    const float lr = state.learning_rate;
    const float eps = state.epsilon;
    for (std::size_t i = 0; i < param.size(); ++i) {
        const float g = grad[i];
        state.s[i] = rho * state.s[i] + (1.0f - rho) * g * g;
        param[i] -= lr * g / (std::sqrt(state.s[i]) + eps);
    }
}

}  // namespace fgl::nn
