#include "fgl/loss.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fgl::nn {

float sigmoid(float z) {
    if (z >= 0.0f) {
        return 1.0f / (1.0f + std::exp(-z));
    }
    const float e = std::exp(z);
    return e / (1.0f + e);
}

LossValue bce_with_logit(const std::vector<float>& logits,
                         const std::vector<float>& labels) {
    if (logits.size() != labels.size() || logits.empty())
        throw std::invalid_argument("bce_with_logit: " + std::to_string(logits.size()) +
                                    " logits vs " + std::to_string(labels.size()) +
                                    " labels");
    const std::size_t n = logits.size();
    LossValue out;
    out.grad_wrt_logit.resize(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const float y = labels[i];
        if (y != 0.0f && y != 1.0f)
            throw std::invalid_argument("bce_with_logit: label must be 0 or 1, got " +
                                        std::to_string(y));
        const double z = logits[i];
        total += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::fabs(z)));
        out.grad_wrt_logit[i] =
            (sigmoid(logits[i]) - y) / static_cast<float>(n);
    }
    out.value = static_cast<float>(total / static_cast<double>(n));
    return out;
}

}  // namespace fgl::nn
