#include "fgl/gradcam.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fgl::cam {

FeatureGrads feature_gradients(const model::Model& net, const Tensor4& image,
                               ExplainClass cls) {
    if (image.n != 1)
        throw std::invalid_argument("feature_gradients: expects a single image, got " +
                                    image.shape_str());
    const model::ForwardResult fr =
        model::forward(net, image, nn::BnMode::infer, true);
    // y^forged = z, y^authentic = -z, so d y^c / d z is +1 or -1.
    const float seed = cls == ExplainClass::forged ? 1.0f : -1.0f;
    FeatureGrads out;
    out.activation = fr.cache.blocks.back().relu_out;
    out.gradient = model::backward_to_tap(net, fr.cache, {seed});
    out.logit = fr.logits[0];
    return out;
}

CamWeights compute_weights(const Tensor4& grads, ExplainClass cls) {
    if (grads.n != 1)
        throw std::invalid_argument("compute_weights: expects n=1, got " +
                                    grads.shape_str());
    CamWeights w;
    w.class_id = cls;
    w.alpha.resize(grads.c);
    const double z = static_cast<double>(grads.h) * grads.w;
    for (int k = 0; k < grads.c; ++k) {
        double sum = 0.0;
        for (int y = 0; y < grads.h; ++y)
            for (int x = 0; x < grads.w; ++x) sum += grads.at(0, k, y, x);
        w.alpha[k] = static_cast<float>(sum / z);
    }
    return w;
}

RawCam compute_cam(const CamWeights& weights, const Tensor4& activation) {
    if (activation.n != 1)
        throw std::invalid_argument("compute_cam: expects n=1, got " +
                                    activation.shape_str());
    if (static_cast<int>(weights.alpha.size()) != activation.c)
        throw std::invalid_argument("compute_cam: " +
                                    std::to_string(weights.alpha.size()) +
                                    " weights for " + std::to_string(activation.c) +
                                    " feature maps");
    RawCam cam;
    cam.h = activation.h;
    cam.w = activation.w;
    cam.values.assign(static_cast<std::size_t>(cam.h) * cam.w, 0.0f);
    for (int y = 0; y < cam.h; ++y)
        for (int x = 0; x < cam.w; ++x) {
            float acc = 0.0f;
            for (int k = 0; k < activation.c; ++k)
                acc += weights.alpha[k] * activation.at(0, k, y, x);
            cam.values[static_cast<std::size_t>(y) * cam.w + x] = std::max(acc, 0.0f);
        }
    return cam;
}

HeatMap upsample_and_normalize(const RawCam& raw, int target_h, int target_w) {
    for (float v : raw.values)
        if (v < 0.0f)
            throw std::invalid_argument("upsample_and_normalize: negative raw value");

    HeatMap hm;
    hm.raw = raw;
    hm.h = target_h;
    hm.w = target_w;
    hm.normalized =
        img::resize_bilinear_plane(raw.values, raw.w, raw.h, target_w, target_h);

    float lo = hm.normalized.empty() ? 0.0f : hm.normalized[0];
    float hi = lo;
    for (float v : hm.normalized) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    hm.norm_min = lo;
    hm.norm_max = hi;
    if (hi - lo <= 0.0f) {
        hm.degenerate = true;
        std::fill(hm.normalized.begin(), hm.normalized.end(), 0.0f);
        return hm;
    }
    const float range = hi - lo;
    for (float& v : hm.normalized) v = (v - lo) / range;
    return hm;
}

const std::array<std::array<std::uint8_t, 3>, 256>& heat_colormap() {
    static const auto lut = [] {
        std::array<std::array<std::uint8_t, 3>, 256> table{};
        // blue -> cyan -> green -> yellow -> red, evenly spaced anchors
        const int anchors[5][3] = {
            {0, 0, 255}, {0, 255, 255}, {0, 255, 0}, {255, 255, 0}, {255, 0, 0}};
        for (int i = 0; i < 256; ++i) {
            const double t = static_cast<double>(i) / 255.0 * 4.0;
            const int seg = std::min(3, static_cast<int>(t));
            const double f = t - seg;
            for (int c = 0; c < 3; ++c) {
                const double v =
                    anchors[seg][c] + f * (anchors[seg + 1][c] - anchors[seg][c]);
                table[i][c] = static_cast<std::uint8_t>(std::lround(v));
            }
        }
        return table;
    }();
    return lut;
}

img::ImageRGB render_overlay(const img::ImageRGB& image, const HeatMap& heatmap,
                             float blend) {
    if (!(blend >= 0.0f && blend <= 1.0f))
        throw std::invalid_argument("render_overlay: blend outside [0,1]");
    if (heatmap.w != image.width || heatmap.h != image.height)
        throw std::invalid_argument("render_overlay: heatmap size does not match image");

    const auto& lut = heat_colormap();
    img::ImageRGB out(image.width, image.height);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x) {
            const float hv =
                heatmap.normalized[static_cast<std::size_t>(y) * image.width + x];
            const int idx = static_cast<int>(
                std::lround(std::clamp(hv, 0.0f, 1.0f) * 255.0f));
            const auto& col = lut[idx];
            const std::uint8_t* src = image.px(x, y);
            std::uint8_t* dst = out.px(x, y);
            for (int ch = 0; ch < 3; ++ch) {
                const float v = blend * static_cast<float>(col[ch]) +
                                (1.0f - blend) * static_cast<float>(src[ch]);
                dst[ch] = static_cast<std::uint8_t>(
                    std::lround(std::clamp(v, 0.0f, 255.0f)));
            }
        }
    return out;
}

LocalizationScore localization_score(const HeatMap& heatmap,
                                     const img::BinaryMask& truth_mask,
                                     double top_fraction) {
    if (truth_mask.width != heatmap.w || truth_mask.height != heatmap.h)
        throw std::invalid_argument("localization_score: mask size does not match map");
    if (!(top_fraction > 0.0 && top_fraction <= 1.0))
        throw std::invalid_argument("localization_score: top_fraction in (0, 1]");

    LocalizationScore score;
    const std::size_t total = heatmap.normalized.size();
    score.mask_area_fraction =
        static_cast<double>(truth_mask.area()) / static_cast<double>(total);

    double mass_total = 0.0;
    for (float v : heatmap.normalized) mass_total += v;
    if (heatmap.degenerate || mass_total <= 0.0) {
        score.degenerate = true;
        return score;
    }

    std::vector<float> sorted(heatmap.normalized);
    std::sort(sorted.begin(), sorted.end());
    const std::size_t qi = std::min(
        total - 1,
        static_cast<std::size_t>((1.0 - top_fraction) * static_cast<double>(total)));
    const float threshold = std::max(sorted[qi], 1e-12f);

    double kept = 0.0, kept_in_mask = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
        const float v = heatmap.normalized[i];
        if (v < threshold) continue;
        kept += v;
        if (truth_mask.bits[i]) kept_in_mask += v;
    }
    if (kept <= 0.0) {
        score.degenerate = true;
        return score;
    }
    score.mass_in_mask_fraction = kept_in_mask / kept;
    score.concentration_ratio =
        score.mask_area_fraction > 0.0
            ? score.mass_in_mask_fraction / score.mask_area_fraction
            : 0.0;
    return score;
}

}  // namespace fgl::cam
