#ifndef FGL_CHECKPOINT_HPP
#define FGL_CHECKPOINT_HPP

#include <map>
#include <string>
#include <vector>

#include "fgl/model.hpp"
#include "fgl/optim.hpp"

namespace fgl::model {

struct MetricPoint {
    int epoch = 0;
    float train_loss = 0.0f;
    float val_acc = 0.0f;
};

/// Everything needed to resume or reproduce: parameters, batchnorm running
/// stats, optimizer accumulators, and the metric history.
struct Checkpoint {
    Model net;
    std::map<std::string, nn::RmsPropState> opt_state;  // keyed by parameter name
    int epoch = 0;
    std::vector<MetricPoint> history;
};

/// On-disk format: magic "FGL1", u32-LE header length, UTF-8 JSON header
/// (version, arch, epoch, history, optimizer hyperparameters, tensor
/// directory with name/shape/offset), then raw little-endian f32 payloads in
/// directory order. Offsets are relative to the payload section.
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace fgl::model

#endif
