#ifndef FGL_TRAIN_HPP
#define FGL_TRAIN_HPP

#include <cstdint>
#include <string>

#include "fgl/checkpoint.hpp"
#include "fgl/dataset.hpp"
#include "fgl/model.hpp"

namespace fgl::model {

struct TrainConfig {
    ArchConfig arch;
    int epochs = 10;
    int batch_size = 32;  // >= 2, batchnorm needs multi-sample statistics
    float learning_rate = 1e-4f;
    float rho = 0.9f;
    float epsilon = 1e-8f;
    std::uint64_t init_seed = 1;
    std::uint64_t shuffle_seed = 2;
    std::string base_dir;  // anchor for relative manifest paths

    void validate() const;
};

/// Per-epoch progress callback: (epoch, mean train loss, val accuracy).
using EpochHook = std::function<void(int, float, float)>;

/// Full training run: shuffle, forward, BCE, backward, RMSProp per batch;
/// per-epoch train loss and val accuracy recorded in the history.
/// Single-threaded and bit-deterministic given config and manifest.
/// Aborts with a diagnostic if the loss turns non-finite.
Checkpoint train(const TrainConfig& config, const data::DatasetManifest& manifest,
                 const EpochHook& hook = {});

}  // namespace fgl::model

#endif
