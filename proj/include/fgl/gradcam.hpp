#ifndef FGL_GRADCAM_HPP
#define FGL_GRADCAM_HPP

#include <array>
#include <vector>

#include "fgl/image.hpp"
#include "fgl/model.hpp"
#include "fgl/tensor.hpp"

namespace fgl::cam {

/// The two class scores of the single-logit head: forged = z, authentic = -z.
enum class ExplainClass { forged, authentic };

struct FeatureGrads {
    Tensor4 activation;  // last conv block's post-ReLU maps, (1, K, Hf, Wf)
    Tensor4 gradient;    // d(class score)/d(activation), same shape
    float logit = 0.0f;
};

/// Infer-mode forward of a single image, then backward from the class score
/// (not the loss) to the last conv block's post-ReLU output.
FeatureGrads feature_gradients(const model::Model& net, const Tensor4& image,
                               ExplainClass cls);

struct CamWeights {
    std::vector<float> alpha;  // one weight per feature map
    ExplainClass class_id = ExplainClass::forged;
};

/// Global-average-pool the gradients: alpha_k = (1/Z) sum_ij d y^c / d A^k_ij.
CamWeights compute_weights(const Tensor4& grads, ExplainClass cls);

struct RawCam {
    std::vector<float> values;  // >= 0, ReLU of the weighted channel sum
    int h = 0, w = 0;
};

RawCam compute_cam(const CamWeights& weights, const Tensor4& activation);

struct HeatMap {
    RawCam raw;
    std::vector<float> normalized;  // in [0,1], at target resolution
    int h = 0, w = 0;
    float norm_min = 0.0f, norm_max = 0.0f;
    bool degenerate = false;  // constant raw map, normalized defined all-zero
};

/// Bilinear upsample to the input resolution and min-max normalize; a
/// constant map normalizes to all-zero and is flagged degenerate.
HeatMap upsample_and_normalize(const RawCam& raw, int target_h, int target_w);

/// 256-entry blue->cyan->green->yellow->red lookup table.
const std::array<std::array<std::uint8_t, 3>, 256>& heat_colormap();

/// out = blend*colormap(heat) + (1-blend)*image; blend 0 returns the image
/// bit-identically.
img::ImageRGB render_overlay(const img::ImageRGB& image, const HeatMap& heatmap,
                             float blend);

struct LocalizationScore {
    double mass_in_mask_fraction = 0.0;
    double mask_area_fraction = 0.0;
    double concentration_ratio = 0.0;
    bool degenerate = false;
};

/// Threshold the normalized map at its (1 - top_fraction) quantile and
/// measure how much of the retained heat mass falls inside the truth mask.
/// concentration_ratio = mass fraction / mask area fraction; 1 is chance.
LocalizationScore localization_score(const HeatMap& heatmap,
                                     const img::BinaryMask& truth_mask,
                                     double top_fraction);

}  // namespace fgl::cam

#endif
