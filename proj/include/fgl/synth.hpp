#ifndef FGL_SYNTH_HPP
#define FGL_SYNTH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fgl/image.hpp"

namespace fgl::synth {

using img::BinaryMask;
using img::ImageRGB;

/// Rotation/scale about the mask centroid, then translation. Scale is sanity
/// bounded to [0.5, 2.0].
struct AffineTransform {
    double rotation_deg = 0.0;
    double scale = 1.0;
    double dx = 0.0;
    double dy = 0.0;
};

/// Returns the mask with the most foreground pixels; ties break to the
/// lowest index. Rejects empty lists, mixed dimensions, and all-empty masks.
std::pair<std::size_t, const BinaryMask*> select_largest_mask(
    const std::vector<BinaryMask>& masks);

struct WarpResult {
    ImageRGB patch;    // full-canvas, valid where mask is set
    BinaryMask mask;   // warped mask, re-binarized at 0.5
};

/// Inverse-mapping bilinear warp of the image and mask. Returns nullopt as a
/// retry signal when the transformed mask would leave the image bounds or
/// lands empty.
std::optional<WarpResult> apply_affine(const ImageRGB& image, const BinaryMask& mask,
                                       const AffineTransform& t);

/// Per-pixel compositing I = alpha*F + (1-alpha)*B, float math rounded to
/// 8 bits. alpha must be within [0,1]; alpha = 0 pixels are bit-identical to
/// the background.
ImageRGB blend_paste(const ImageRGB& background, const ImageRGB& patch,
                     const std::vector<float>& soft_mask);

/// Hard mask -> soft alpha: linear ramp over `feather_radius` pixels at the
/// boundary (4-neighbor BFS distance), `alpha_interior` inside.
std::vector<float> feather_mask(const BinaryMask& mask, int feather_radius,
                                float alpha_interior);

/// Morphological dilation with a square (Chebyshev) structuring element.
BinaryMask dilate_mask(const BinaryMask& mask, int radius);

/// Fill masked pixels by Jacobi iteration of the discrete Laplace equation
/// (repeated 4-neighbor averaging) with unmasked pixels as fixed boundary.
/// Stops when the max per-pixel change drops below tol or at max_iters.
/// Unmasked pixels are bit-identical to the input.
ImageRGB inpaint_diffusion(const ImageRGB& image, const BinaryMask& mask, int max_iters,
                           double tol);

enum class ForgeryKind { copy_move, inpaint };

std::string to_string(ForgeryKind k);

struct Provenance {
    std::string source_id;
    ForgeryKind kind = ForgeryKind::copy_move;
    std::uint64_t seed = 0;
    AffineTransform transform;   // identity for inpainting records
    float alpha_interior = 1.0f;
    std::string mask_path;       // filled by the caller once the mask is written
};

struct SynthRecord {
    ImageRGB forged_image;
    BinaryMask truth_mask;
    Provenance provenance;
};

std::string provenance_json(const Provenance& p);

struct SynthConfig {
    // mask admissibility, as a fraction of image area
    double area_lo = 0.01;
    double area_hi = 0.30;

    // copy-move transform sampling
    double rot_lo_deg = -30.0;
    double rot_hi_deg = 30.0;
    double scale_lo = 0.7;
    double scale_hi = 1.3;
    double min_shift_frac = 0.15;  // of the image diagonal
    std::optional<std::pair<double, double>> fixed_translate;
    float alpha_interior = 0.95f;
    int feather_radius = 2;
    int max_transform_attempts = 10;

    // inpainting
    int dilate_radius = 2;
    int inpaint_max_iters = 5000;
    double inpaint_tol = 0.05;
};

/// Either a record or the reason the source was skipped.
struct SynthOutcome {
    std::optional<SynthRecord> record;
    std::string skip_reason;
    bool ok() const { return record.has_value(); }
};

/// Largest admissible mask -> sampled affine -> feathered paste.
/// Deterministic given (image, masks, seed, config).
SynthOutcome synth_copy_move(const ImageRGB& image, const std::vector<BinaryMask>& masks,
                             std::uint64_t rng_seed, const SynthConfig& config,
                             const std::string& source_id);

/// Uniformly chosen admissible mask -> dilate -> diffusion fill. The truth
/// mask (and the admissibility test) is the dilated mask.
SynthOutcome synth_inpaint(const ImageRGB& image, const std::vector<BinaryMask>& masks,
                           std::uint64_t rng_seed, const SynthConfig& config,
                           const std::string& source_id);

struct ProceduralConfig {
    int width = 64;
    int height = 64;
    int min_shapes = 1;
    int max_shapes = 4;
    double shape_radius_lo = 0.08;  // fraction of min(width, height)
    double shape_radius_hi = 0.18;
    // Per-pixel uniform grain amplitude (intensity levels). Gives the image
    // high-frequency content that resampling and diffusion visibly destroy.
    double grain = 8.0;
};

/// Value-noise background with 1-4 disjoint textured shapes; one mask per
/// shape. Deterministic given the seed.
std::pair<ImageRGB, std::vector<BinaryMask>> make_procedural_image(
    std::uint64_t rng_seed, const ProceduralConfig& config);

}  // namespace fgl::synth

#endif
