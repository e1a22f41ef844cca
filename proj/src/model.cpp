#include "fgl/model.hpp"

#include <cmath>
#include <stdexcept>

#include "fgl/loss.hpp"
#include "fgl/rng.hpp"

namespace fgl::model {

void ArchConfig::validate() const {
    if (conv_channels.empty())
        throw std::invalid_argument("arch: at least one conv block required");
    for (int c : conv_channels)
        if (c < 1) throw std::invalid_argument("arch: conv widths must be positive");
    if (fc_hidden < 1) throw std::invalid_argument("arch: fc width must be positive");
    const int div = 1 << blocks();
    if (input_size < div || input_size % div != 0)
        throw std::invalid_argument("arch: input size " + std::to_string(input_size) +
                                    " must be divisible by 2^" +
                                    std::to_string(blocks()));
}

void ArchConfig::validate_production() const {
    validate();
    if (blocks() != 5)
        throw std::invalid_argument("arch: the classifier uses exactly 5 conv blocks");
}

Model model_init(const ArchConfig& arch, std::uint64_t seed) {
    arch.validate();
    Model m;
    m.arch = arch;
    Rng rng(mix64(seed));

    const auto glorot = [&rng](std::vector<float>& w, int fan_in, int fan_out) {
        const float bound = std::sqrt(6.0f / static_cast<float>(fan_in + fan_out));
        for (auto& v : w) v = rng.uniform_f(-bound, bound);
    };

    int in_c = 3;
    for (int c : arch.conv_channels) {
        ConvBlock blk;
        blk.conv.weights = Tensor4(c, in_c, 3, 3);
        blk.conv.bias.assign(c, 0.0f);
        blk.conv.stride = 1;
        blk.conv.padding = 1;
        glorot(blk.conv.weights.data, in_c * 9, c * 9);
        blk.bn = nn::BatchNormParams::init(c);
        m.blocks.push_back(std::move(blk));
        in_c = c;
    }

    const int flat = m.flat_dim();
    m.fc1.weights = Mat(flat, arch.fc_hidden);
    m.fc1.bias.assign(arch.fc_hidden, 0.0f);
    glorot(m.fc1.weights.data, flat, arch.fc_hidden);
    m.fc2.weights = Mat(arch.fc_hidden, 1);
    m.fc2.bias.assign(1, 0.0f);
    glorot(m.fc2.weights.data, arch.fc_hidden, 1);
    return m;
}

ForwardResult forward(const Model& model, const Tensor4& input, nn::BnMode mode,
                      bool want_cache) {
    if (input.c != 3 || input.h != model.arch.input_size ||
        input.w != model.arch.input_size)
        throw std::invalid_argument("forward: input " + input.shape_str() +
                                    " does not match arch input size " +
                                    std::to_string(model.arch.input_size));

    ForwardResult fr;
    fr.cache.mode = mode;
    if (want_cache) fr.cache.blocks.resize(model.blocks.size());

    Tensor4 x = input;
    for (std::size_t b = 0; b < model.blocks.size(); ++b) {
        const ConvBlock& blk = model.blocks[b];
        BlockCache* bc = want_cache ? &fr.cache.blocks[b] : nullptr;

        if (bc) bc->conv_in = x;
        Tensor4 conv_out = nn::conv2d(x, blk.conv);
        nn::BnResult bn = nn::batchnorm(conv_out, blk.bn, mode);
        if (mode == nn::BnMode::train) {
            fr.new_running_mean.push_back(std::move(bn.new_running_mean));
            fr.new_running_var.push_back(std::move(bn.new_running_var));
        }
        Tensor4 act = nn::relu(bn.output);
        if (bc) {
            bc->bn = std::move(bn.cache);
            bc->bn_out = std::move(bn.output);
            bc->relu_out = act;
            bc->pre_pool_h = act.h;
            bc->pre_pool_w = act.w;
        }
        nn::PoolResult pooled = nn::maxpool2(act);
        if (bc) bc->pool_argmax = std::move(pooled.argmax);
        x = std::move(pooled.output);
    }

    Mat flat = flatten(x);
    Mat fc1_out = nn::linear(flat, model.fc1);
    Mat fc1_relu = fc1_out;
    for (auto& v : fc1_relu.data)
        if (v < 0.0f) v = 0.0f;
    Mat logits = nn::linear(fc1_relu, model.fc2);

    fr.logits.resize(logits.rows);
    for (int i = 0; i < logits.rows; ++i) fr.logits[i] = logits.at(i, 0);
    if (want_cache) {
        fr.cache.flat = std::move(flat);
        fr.cache.fc1_out = std::move(fc1_out);
        fr.cache.fc1_relu = std::move(fc1_relu);
    }
    return fr;
}

void commit_running_stats(Model& model, const ForwardResult& fr) {
    if (fr.new_running_mean.size() != model.blocks.size())
        throw std::logic_error("commit_running_stats: not a train-mode forward result");
    for (std::size_t b = 0; b < model.blocks.size(); ++b) {
        model.blocks[b].bn.running_mean = fr.new_running_mean[b];
        model.blocks[b].bn.running_var = fr.new_running_var[b];
    }
}

std::vector<float> head_forward(const Model& model, const Tensor4& final_activation) {
    nn::PoolResult pooled = nn::maxpool2(final_activation);
    Mat flat = flatten(pooled.output);
    Mat fc1_out = nn::linear(flat, model.fc1);
    for (auto& v : fc1_out.data)
        if (v < 0.0f) v = 0.0f;
    Mat logits = nn::linear(fc1_out, model.fc2);
    std::vector<float> out(logits.rows);
    for (int i = 0; i < logits.rows; ++i) out[i] = logits.at(i, 0);
    return out;
}

namespace {

// Shared fc2 -> ReLU -> fc1 -> unflatten -> unpool(last block) backward
// segment; returns the gradient at the last block's pre-pool activation.
Tensor4 head_backward(const Model& model, const ActivationCache& cache,
                      const std::vector<float>& grad_logits, nn::LinearGrads* fc2_g,
                      nn::LinearGrads* fc1_g) {
    const int n = static_cast<int>(grad_logits.size());
    Mat up(n, 1);
    for (int i = 0; i < n; ++i) up.at(i, 0) = grad_logits[i];

    nn::LinearGrads g2 = nn::linear_backward(cache.fc1_relu, model.fc2, up);
    Mat d_fc1 = g2.grad_input;
    for (std::size_t i = 0; i < d_fc1.data.size(); ++i)
        if (cache.fc1_out.data[i] <= 0.0f) d_fc1.data[i] = 0.0f;
    nn::LinearGrads g1 = nn::linear_backward(cache.flat, model.fc1, d_fc1);

    const BlockCache& last = cache.blocks.back();
    const int s = model.arch.input_size >> model.arch.blocks();
    Tensor4 d_pool = unflatten(g1.grad_input, model.final_channels(), s, s);
    if (fc2_g) *fc2_g = std::move(g2);
    if (fc1_g) *fc1_g = std::move(g1);
    return nn::maxpool2_backward(last.pool_argmax, d_pool, n, model.final_channels(),
                                 last.pre_pool_h, last.pre_pool_w);
}

}  // namespace

ModelGrads backward(const Model& model, const ActivationCache& cache,
                    const std::vector<float>& grad_logits) {
    if (cache.mode != nn::BnMode::train)
        throw std::logic_error("backward: cache must come from a train-mode forward");
    if (cache.blocks.size() != model.blocks.size())
        throw std::invalid_argument("backward: cache does not match model depth");

    ModelGrads g;
    g.blocks.resize(model.blocks.size());

    nn::LinearGrads fc2_g, fc1_g;
    Tensor4 d_act = head_backward(model, cache, grad_logits, &fc2_g, &fc1_g);
    g.fc2_weight = std::move(fc2_g.grad_weights);
    g.fc2_bias = std::move(fc2_g.grad_bias);
    g.fc1_weight = std::move(fc1_g.grad_weights);
    g.fc1_bias = std::move(fc1_g.grad_bias);

    for (int b = static_cast<int>(model.blocks.size()) - 1; b >= 0; --b) {
        const BlockCache& bc = cache.blocks[b];
        const ConvBlock& blk = model.blocks[b];

        if (b != static_cast<int>(model.blocks.size()) - 1)
            d_act = nn::maxpool2_backward(bc.pool_argmax, d_act, bc.relu_out.n,
                                          bc.relu_out.c, bc.pre_pool_h, bc.pre_pool_w);
        Tensor4 d_bn_out = nn::relu_backward(bc.bn_out, d_act);
        nn::BnGrads bng = nn::batchnorm_backward(bc.bn, blk.bn, d_bn_out);
        nn::ConvGrads cg = nn::conv2d_backward(bc.conv_in, blk.conv, bng.grad_input);

        g.blocks[b].conv_weight = std::move(cg.grad_weights);
        g.blocks[b].conv_bias = std::move(cg.grad_bias);
        g.blocks[b].gamma = std::move(bng.grad_gamma);
        g.blocks[b].beta = std::move(bng.grad_beta);
        d_act = std::move(cg.grad_input);
    }
    return g;
}

Tensor4 backward_to_tap(const Model& model, const ActivationCache& cache,
                        const std::vector<float>& grad_logits) {
    if (cache.blocks.size() != model.blocks.size())
        throw std::invalid_argument("backward_to_tap: cache does not match model depth");
    return head_backward(model, cache, grad_logits, nullptr, nullptr);
}

void for_each_param(Model& model, ModelGrads& grads,
                    const std::function<void(const std::string&, std::vector<float>&,
                                             const std::vector<float>&)>& fn) {
    for (std::size_t b = 0; b < model.blocks.size(); ++b) {
        const std::string p = "block" + std::to_string(b) + ".";
        fn(p + "conv.weight", model.blocks[b].conv.weights.data,
           grads.blocks[b].conv_weight.data);
        fn(p + "conv.bias", model.blocks[b].conv.bias, grads.blocks[b].conv_bias);
        fn(p + "bn.gamma", model.blocks[b].bn.gamma, grads.blocks[b].gamma);
        fn(p + "bn.beta", model.blocks[b].bn.beta, grads.blocks[b].beta);
    }
    fn("fc1.weight", model.fc1.weights.data, grads.fc1_weight.data);
    fn("fc1.bias", model.fc1.bias, grads.fc1_bias);
    fn("fc2.weight", model.fc2.weights.data, grads.fc2_weight.data);
    fn("fc2.bias", model.fc2.bias, grads.fc2_bias);
}

std::vector<TensorEntry> tensor_entries(Model& model) {
    std::vector<TensorEntry> out;
    for (std::size_t b = 0; b < model.blocks.size(); ++b) {
        const std::string p = "block" + std::to_string(b) + ".";
        ConvBlock& blk = model.blocks[b];
        out.push_back({p + "conv.weight",
                       {blk.conv.weights.n, blk.conv.weights.c, blk.conv.weights.h,
                        blk.conv.weights.w},
                       &blk.conv.weights.data});
        const int c = blk.bn.channels();
        out.push_back({p + "conv.bias", {c}, &blk.conv.bias});
        out.push_back({p + "bn.gamma", {c}, &blk.bn.gamma});
        out.push_back({p + "bn.beta", {c}, &blk.bn.beta});
        out.push_back({p + "bn.running_mean", {c}, &blk.bn.running_mean});
        out.push_back({p + "bn.running_var", {c}, &blk.bn.running_var});
    }
    out.push_back({"fc1.weight", {model.fc1.weights.rows, model.fc1.weights.cols},
                   &model.fc1.weights.data});
    out.push_back({"fc1.bias", {static_cast<int>(model.fc1.bias.size())},
                   &model.fc1.bias});
    out.push_back({"fc2.weight", {model.fc2.weights.rows, model.fc2.weights.cols},
                   &model.fc2.weights.data});
    out.push_back({"fc2.bias", {static_cast<int>(model.fc2.bias.size())},
                   &model.fc2.bias});
    return out;
}

double EvalReport::kind_accuracy(const std::string& kind) const {
    const auto it = per_kind.find(kind);
    if (it == per_kind.end() || it->second.first == 0) return 0.0;
    return static_cast<double>(it->second.second) /
           static_cast<double>(it->second.first);
}

EvalReport evaluate(const Model& model, const data::DatasetManifest& manifest,
                    data::Split split, int batch_size, const std::string& base_dir) {
    const std::vector<std::size_t> ids = manifest.split_ids(split);
    if (ids.empty())
        throw std::invalid_argument("evaluate: split '" + data::to_string(split) +
                                    "' is empty");

    EvalReport rep;
    double loss_sum = 0.0;
    for (std::size_t i = 0; i < ids.size(); i += batch_size) {
        const std::size_t end = std::min(ids.size(), i + batch_size);
        const std::vector<std::size_t> chunk(ids.begin() + i, ids.begin() + end);
        const data::Batch batch =
            data::load_batch(manifest, chunk, model.arch.input_size, base_dir);
        const ForwardResult fr = forward(model, batch.images, nn::BnMode::infer, false);
        const nn::LossValue lv = nn::bce_with_logit(fr.logits, batch.labels);
        loss_sum += static_cast<double>(lv.value) * static_cast<double>(chunk.size());

        for (std::size_t k = 0; k < chunk.size(); ++k) {
            const data::Record& rec = manifest.records[chunk[k]];
            const bool pred_forged = fr.logits[k] > 0.0f;
            const bool is_forged = rec.label == 1;
            if (pred_forged && is_forged) ++rep.tp;
            if (pred_forged && !is_forged) ++rep.fp;
            if (!pred_forged && !is_forged) ++rep.tn;
            if (!pred_forged && is_forged) ++rep.fn;
            auto& pk = rep.per_kind[rec.forgery_kind];
            ++pk.first;
            if (pred_forged == is_forged) ++pk.second;
        }
    }
    rep.accuracy = static_cast<double>(rep.tp + rep.tn) /
                   static_cast<double>(rep.total());
    rep.loss = loss_sum / static_cast<double>(ids.size());
    return rep;
}

}  // namespace fgl::model
