#ifndef FGL_LOSS_HPP
#define FGL_LOSS_HPP

#include <vector>

namespace fgl::nn {

struct LossValue {
    float value = 0.0f;                  // mean BCE over the batch, always >= 0
    std::vector<float> grad_wrt_logit;   // (sigmoid(z) - y) / batch_size, per sample
};

float sigmoid(float z);

/// Binary cross entropy on raw logits, in the log-sum-exp stable form
/// max(z,0) - z*y + log(1 + exp(-|z|)). Labels must be 0 or 1.
LossValue bce_with_logit(const std::vector<float>& logits,
                         const std::vector<float>& labels);

}  // namespace fgl::nn

#endif
