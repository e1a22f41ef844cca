#ifndef FGL_MODEL_HPP
#define FGL_MODEL_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fgl/dataset.hpp"
#include "fgl/layers.hpp"
#include "fgl/tensor.hpp"

namespace fgl::model {

/// Network shape: per-block conv widths (3x3, pad 1, stride 1, each block
/// conv -> batchnorm -> ReLU -> maxpool2) and the fc hidden width.
struct ArchConfig {
    int input_size = 64;
    std::vector<int> conv_channels = {16, 32, 64, 128, 128};
    int fc_hidden = 256;

    int blocks() const { return static_cast<int>(conv_channels.size()); }
    /// The production architecture: exactly 5 blocks, input divisible by 2^5.
    void validate_production() const;
    /// Minimal consistency for any block count (test configurations).
    void validate() const;
};

struct ConvBlock {
    nn::ConvParams conv;
    nn::BatchNormParams bn;
};

struct Model {
    ArchConfig arch;
    std::vector<ConvBlock> blocks;
    nn::LinearParams fc1;  // flatten -> hidden
    nn::LinearParams fc2;  // hidden -> 1 logit

    int final_channels() const { return arch.conv_channels.back(); }
    /// Spatial size of the last block's pre-pool activation.
    int tap_spatial() const { return arch.input_size >> (arch.blocks() - 1); }
    int flat_dim() const {
        const int s = arch.input_size >> arch.blocks();
        return final_channels() * s * s;
    }
};

/// Glorot-uniform weights, zero biases, unit gamma; deterministic per seed.
Model model_init(const ArchConfig& arch, std::uint64_t seed);

struct BlockCache {
    Tensor4 conv_in;
    nn::BnCache bn;
    Tensor4 bn_out;    // pre-ReLU
    Tensor4 relu_out;  // pre-pool; the Grad-CAM tap on the last block
    std::vector<std::int64_t> pool_argmax;
    int pre_pool_h = 0, pre_pool_w = 0;
};

struct ActivationCache {
    std::vector<BlockCache> blocks;
    Mat flat;      // fc1 input
    Mat fc1_out;   // pre-ReLU
    Mat fc1_relu;  // fc2 input
    nn::BnMode mode = nn::BnMode::infer;
};

struct ForwardResult {
    std::vector<float> logits;  // one per sample
    ActivationCache cache;      // filled when want_cache
    // Pending running-stat updates (train mode); commit_running_stats applies.
    std::vector<std::vector<float>> new_running_mean;
    std::vector<std::vector<float>> new_running_var;
};

/// Pure forward pass; the model is untouched. Train mode uses batch
/// statistics and reports updated running stats, infer mode uses the stored
/// running stats so each sample's logit is independent of its batch.
ForwardResult forward(const Model& model, const Tensor4& input, nn::BnMode mode,
                      bool want_cache);

void commit_running_stats(Model& model, const ForwardResult& fr);

/// Tail of the forward pass from the last block's pre-pool activation
/// (pool -> flatten -> fc1 -> ReLU -> fc2). Used by the CAM oracle path.
std::vector<float> head_forward(const Model& model, const Tensor4& final_activation);

struct BlockGrads {
    Tensor4 conv_weight;
    std::vector<float> conv_bias;
    std::vector<float> gamma;
    std::vector<float> beta;
};

struct ModelGrads {
    std::vector<BlockGrads> blocks;
    Mat fc1_weight;
    std::vector<float> fc1_bias;
    Mat fc2_weight;
    std::vector<float> fc2_bias;
};

/// Full backward from d(loss)/d(logit) through every layer. The cache must
/// come from a train-mode forward.
ModelGrads backward(const Model& model, const ActivationCache& cache,
                    const std::vector<float>& grad_logits);

/// Backward from d(score)/d(logit) to the last block's pre-pool activation
/// only (fc2 -> ReLU -> fc1 -> unflatten -> unpool). Works on infer-mode
/// caches; batchnorm is not on this path segment.
Tensor4 backward_to_tap(const Model& model, const ActivationCache& cache,
                        const std::vector<float>& grad_logits);

/// Visit aligned (name, parameter, gradient) triples in a fixed order.
void for_each_param(Model& model, ModelGrads& grads,
                    const std::function<void(const std::string&, std::vector<float>&,
                                             const std::vector<float>&)>& fn);

/// Named views of every learnable parameter and batchnorm running stat,
/// in checkpoint directory order.
struct TensorEntry {
    std::string name;
    std::vector<int> shape;
    std::vector<float>* data;
};
std::vector<TensorEntry> tensor_entries(Model& model);

struct EvalReport {
    double accuracy = 0.0;
    double loss = 0.0;
    long tp = 0, fp = 0, tn = 0, fn = 0;
    // kind -> {count, correct}; kinds: none, copy_move, inpaint
    std::map<std::string, std::pair<long, long>> per_kind;

    long total() const { return tp + fp + tn + fn; }
    double kind_accuracy(const std::string& kind) const;
};

/// Infer-mode evaluation over one split; prediction rule is logit > 0.
EvalReport evaluate(const Model& model, const data::DatasetManifest& manifest,
                    data::Split split, int batch_size = 32,
                    const std::string& base_dir = "");

}  // namespace fgl::model

#endif
