#include "fgl/train.hpp"

#include <cmath>
#include <stdexcept>

#include "fgl/loss.hpp"

namespace fgl::model {

void TrainConfig::validate() const {
    arch.validate();
    if (epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    if (batch_size < 2)
        throw std::invalid_argument("train: batch_size must be >= 2 for batchnorm");
    if (!(learning_rate > 0.0f)) throw std::invalid_argument("train: bad learning rate");
    if (!(rho > 0.0f && rho < 1.0f)) throw std::invalid_argument("train: rho in (0,1)");
}

Checkpoint train(const TrainConfig& config, const data::DatasetManifest& manifest,
                 const EpochHook& hook) {
    config.validate();
    if (manifest.split_ids(data::Split::train).empty() ||
        manifest.split_ids(data::Split::val).empty())
        throw std::invalid_argument("train: manifest needs nonempty train and val splits");

    Checkpoint ckpt;
    ckpt.net = model_init(config.arch, config.init_seed);

    // One RMSProp state per parameter tensor, built in registry order.
    {
        ModelGrads dummy;  // shapes only
        dummy.blocks.resize(ckpt.net.blocks.size());
        for_each_param(ckpt.net, dummy,
                       [&](const std::string& name, std::vector<float>& p,
                           const std::vector<float>&) {
                           ckpt.opt_state.emplace(
                               name, nn::RmsPropState::init(p.size(), config.learning_rate,
                                                            config.rho, config.epsilon));
                       });
    }

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const auto batches = data::epoch_iterator(manifest, data::Split::train,
                                                  config.batch_size, config.shuffle_seed,
                                                  epoch);
        double loss_sum = 0.0;
        std::size_t sample_count = 0;
        for (std::size_t bi = 0; bi < batches.size(); ++bi) {
            const data::Batch batch = data::load_batch(manifest, batches[bi],
                                                       config.arch.input_size,
                                                       config.base_dir);
            ForwardResult fr = forward(ckpt.net, batch.images, nn::BnMode::train, true);
            const nn::LossValue lv = nn::bce_with_logit(fr.logits, batch.labels);
            if (!std::isfinite(lv.value))
                throw std::runtime_error("train: non-finite loss at epoch " +
                                         std::to_string(epoch) + ", batch " +
                                         std::to_string(bi));
            loss_sum += static_cast<double>(lv.value) *
                        static_cast<double>(batch.labels.size());
            sample_count += batch.labels.size();

            commit_running_stats(ckpt.net, fr);
            ModelGrads grads = backward(ckpt.net, fr.cache, lv.grad_wrt_logit);
            for_each_param(ckpt.net, grads,
                           [&](const std::string& name, std::vector<float>& p,
                               const std::vector<float>& g) {
                               nn::rmsprop_step(p, g, ckpt.opt_state.at(name));
                           });
        }

        const float train_loss =
            static_cast<float>(loss_sum / static_cast<double>(sample_count));
        const EvalReport val = evaluate(ckpt.net, manifest, data::Split::val,
                                        config.batch_size, config.base_dir);
        ckpt.history.push_back({epoch, train_loss, static_cast<float>(val.accuracy)});
        ckpt.epoch = epoch + 1;
        if (hook) hook(epoch, train_loss, static_cast<float>(val.accuracy));
    }
    return ckpt;
}

}  // namespace fgl::model
