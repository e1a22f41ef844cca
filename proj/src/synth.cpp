#include "fgl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "fgl/rng.hpp"

namespace fgl::synth {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Centroid {
    double x = 0.0, y = 0.0;
};

Centroid mask_centroid(const BinaryMask& m) {
    double sx = 0.0, sy = 0.0, n = 0.0;
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            if (m.at(x, y)) {
                sx += x;
                sy += y;
                n += 1.0;
            }
    if (n == 0.0) throw std::invalid_argument("mask_centroid: empty mask");
    return {sx / n, sy / n};
}

struct Bbox {
    int x0 = 0, y0 = 0, x1 = -1, y1 = -1;
    bool valid() const { return x1 >= x0 && y1 >= y0; }
};

Bbox mask_bbox(const BinaryMask& m) {
    Bbox b{m.width, m.height, -1, -1};
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            if (m.at(x, y)) {
                b.x0 = std::min(b.x0, x);
                b.y0 = std::min(b.y0, y);
                b.x1 = std::max(b.x1, x);
                b.y1 = std::max(b.y1, y);
            }
    return b;
}

struct ForwardMap {
    double cos_t, sin_t, scale, cx, cy, dx, dy;

    void apply(double x, double y, double& ox, double& oy) const {
        const double rx = x - cx, ry = y - cy;
        ox = cx + dx + scale * (cos_t * rx - sin_t * ry);
        oy = cy + dy + scale * (sin_t * rx + cos_t * ry);
    }
    void invert(double x, double y, double& ox, double& oy) const {
        const double rx = (x - cx - dx) / scale, ry = (y - cy - dy) / scale;
        ox = cx + cos_t * rx + sin_t * ry;
        oy = cy - sin_t * rx + cos_t * ry;
    }
};

ForwardMap make_map(const AffineTransform& t, const Centroid& c) {
    const double rad = t.rotation_deg * kPi / 180.0;
    return {std::cos(rad), std::sin(rad), t.scale, c.x, c.y, t.dx, t.dy};
}

// Forward-mapped bbox corners must stay 1 px inside the canvas so the warped
// mask cannot be truncated by the border.
bool warped_bbox_in_bounds(const Bbox& b, const ForwardMap& map, int width,
                           int height) {
    const double margin = 1.0;
    const double xs[2] = {static_cast<double>(b.x0), static_cast<double>(b.x1)};
    const double ys[2] = {static_cast<double>(b.y0), static_cast<double>(b.y1)};
    for (double x : xs)
        for (double y : ys) {
            double ox, oy;
            map.apply(x, y, ox, oy);
            if (ox < margin || ox > width - 1 - margin || oy < margin ||
                oy > height - 1 - margin)
                return false;
        }
    return true;
}

}  // namespace

std::pair<std::size_t, const BinaryMask*> select_largest_mask(
    const std::vector<BinaryMask>& masks) {
    if (masks.empty()) throw std::invalid_argument("select_largest_mask: empty list");
    for (const auto& m : masks)
        if (m.width != masks[0].width || m.height != masks[0].height)
            throw std::invalid_argument("select_largest_mask: mixed mask dimensions");
    std::size_t best = 0, best_area = 0;
    for (std::size_t i = 0; i < masks.size(); ++i) {
        const std::size_t a = masks[i].area();
        if (a > best_area) {  // strict: ties keep the lowest index
            best_area = a;
            best = i;
        }
    }
    if (best_area == 0)
        throw std::invalid_argument("select_largest_mask: all masks empty");
    return {best, &masks[best]};
}

std::optional<WarpResult> apply_affine(const ImageRGB& image, const BinaryMask& mask,
                                       const AffineTransform& t) {
    if (mask.width != image.width || mask.height != image.height)
        throw std::invalid_argument("apply_affine: mask dimensions do not match image");
    if (mask.empty_mask()) throw std::invalid_argument("apply_affine: empty mask");
    if (t.scale < 0.5 || t.scale > 2.0)
        throw std::invalid_argument("apply_affine: scale " + std::to_string(t.scale) +
                                    " outside [0.5, 2.0]");

    const Centroid c = mask_centroid(mask);
    const ForwardMap map = make_map(t, c);
    const Bbox b = mask_bbox(mask);
    if (!warped_bbox_in_bounds(b, map, image.width, image.height)) return std::nullopt;

    // Float planes once, so both mask and patch share the same sampler.
    const int w = image.width, h = image.height;
    std::vector<float> mask_plane(static_cast<std::size_t>(w) * h);
    for (std::size_t i = 0; i < mask.bits.size(); ++i)
        mask_plane[i] = static_cast<float>(mask.bits[i]);
    std::vector<float> channel(static_cast<std::size_t>(w) * h);

    WarpResult r;
    r.patch = ImageRGB(w, h);
    r.mask = BinaryMask(w, h);

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double sx, sy;
            map.invert(x, y, sx, sy);
            if (sx < -1.0 || sx > w || sy < -1.0 || sy > h) continue;
            const float mv = img::bilinear_sample(mask_plane, w, h,
                                                  static_cast<float>(sx),
                                                  static_cast<float>(sy));
            if (mv >= 0.5f) r.mask.at(x, y) = 1;
        }
    if (r.mask.empty_mask()) return std::nullopt;

    for (int ch = 0; ch < 3; ++ch) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                channel[static_cast<std::size_t>(y) * w + x] =
                    static_cast<float>(image.px(x, y)[ch]);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                if (!r.mask.at(x, y)) continue;
                double sx, sy;
                map.invert(x, y, sx, sy);
                const float v = img::bilinear_sample(channel, w, h,
                                                     static_cast<float>(sx),
                                                     static_cast<float>(sy));
                r.patch.px(x, y)[ch] = static_cast<std::uint8_t>(
                    std::lround(std::clamp(v, 0.0f, 255.0f)));
            }
    }
    return r;
}

ImageRGB blend_paste(const ImageRGB& background, const ImageRGB& patch,
                     const std::vector<float>& soft_mask) {
    if (patch.width != background.width || patch.height != background.height)
        throw std::invalid_argument("blend_paste: patch dimensions do not match");
    if (soft_mask.size() !=
        static_cast<std::size_t>(background.width) * background.height)
        throw std::invalid_argument("blend_paste: soft mask size does not match");
    for (float a : soft_mask)
        if (!(a >= 0.0f && a <= 1.0f))
            throw std::invalid_argument("blend_paste: alpha outside [0,1]");

    ImageRGB out(background.width, background.height);
    for (std::size_t p = 0; p < soft_mask.size(); ++p) {
        const float a = soft_mask[p];
        const std::uint8_t* bg = background.pixels.data() + p * 3;
        const std::uint8_t* fg = patch.pixels.data() + p * 3;
        std::uint8_t* dst = out.pixels.data() + p * 3;
        if (a == 0.0f) {
            dst[0] = bg[0];
            dst[1] = bg[1];
            dst[2] = bg[2];
            continue;
        }
        for (int ch = 0; ch < 3; ++ch) {
            const float v = a * static_cast<float>(fg[ch]) +
                            (1.0f - a) * static_cast<float>(bg[ch]);
            dst[ch] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 255.0f)));
        }
    }
    return out;
}

std::vector<float> feather_mask(const BinaryMask& mask, int feather_radius,
                                float alpha_interior) {
    if (feather_radius < 0)
        throw std::invalid_argument("feather_mask: negative feather radius");
    if (!(alpha_interior >= 0.0f && alpha_interior <= 1.0f))
        throw std::invalid_argument("feather_mask: alpha_interior outside [0,1]");

    const int w = mask.width, h = mask.height;
    const int unset = std::numeric_limits<int>::max();
    std::vector<int> dist(static_cast<std::size_t>(w) * h, unset);
    std::deque<std::pair<int, int>> queue;

    // Multi-source BFS from background; canvas borders count as background.
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (!mask.at(x, y)) {
                dist[i] = 0;
                queue.emplace_back(x, y);
            } else if (x == 0 || y == 0 || x == w - 1 || y == h - 1) {
                dist[i] = 1;
                queue.emplace_back(x, y);
            }
        }
    const int ddx[4] = {1, -1, 0, 0};
    const int ddy[4] = {0, 0, 1, -1};
    while (!queue.empty()) {
        const auto [x, y] = queue.front();
        queue.pop_front();
        const int d = dist[static_cast<std::size_t>(y) * w + x];
        for (int k = 0; k < 4; ++k) {
            const int nx = x + ddx[k], ny = y + ddy[k];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
            if (dist[ni] != unset) continue;
            dist[ni] = d + 1;
            queue.emplace_back(nx, ny);
        }
    }

    std::vector<float> alpha(static_cast<std::size_t>(w) * h, 0.0f);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y)) continue;
            const int d = dist[static_cast<std::size_t>(y) * w + x];
            const float ramp =
                std::min(1.0f, static_cast<float>(d) /
                                   static_cast<float>(feather_radius + 1));
            alpha[static_cast<std::size_t>(y) * w + x] = alpha_interior * ramp;
        }
    return alpha;
}

BinaryMask dilate_mask(const BinaryMask& mask, int radius) {
    if (radius < 0) throw std::invalid_argument("dilate_mask: negative radius");
    if (radius == 0) return mask;
    const int w = mask.width, h = mask.height;
    // Two-pass separable dilation for the square element.
    BinaryMask horiz(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            std::uint8_t v = 0;
            for (int d = -radius; d <= radius && !v; ++d) {
                const int nx = x + d;
                if (nx >= 0 && nx < w && mask.at(nx, y)) v = 1;
            }
            horiz.at(x, y) = v;
        }
    BinaryMask out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            std::uint8_t v = 0;
            for (int d = -radius; d <= radius && !v; ++d) {
                const int ny = y + d;
                if (ny >= 0 && ny < h && horiz.at(x, ny)) v = 1;
            }
            out.at(x, y) = v;
        }
    return out;
}

ImageRGB inpaint_diffusion(const ImageRGB& image, const BinaryMask& mask, int max_iters,
                           double tol) {
    if (mask.width != image.width || mask.height != image.height)
        throw std::invalid_argument("inpaint_diffusion: mask dimensions do not match");
    if (mask.empty_mask()) throw std::invalid_argument("inpaint_diffusion: empty mask");
    const std::size_t total = static_cast<std::size_t>(image.width) * image.height;
    if (mask.area() == total)
        throw std::invalid_argument(
            "inpaint_diffusion: mask covers the entire image, no boundary data");

    const int w = image.width, h = image.height;
    const int ddx[4] = {1, -1, 0, 0};
    const int ddy[4] = {0, 0, 1, -1};

    std::vector<std::size_t> masked;
    masked.reserve(mask.area());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (mask.at(x, y)) masked.push_back(static_cast<std::size_t>(y) * w + x);

    ImageRGB out = image;
    std::vector<float> field(total), next(total);
    for (int ch = 0; ch < 3; ++ch) {
        // Initialize masked pixels to the mean of the boundary ring so every
        // iterate stays within the boundary value range (maximum principle).
        double ring_sum = 0.0;
        std::size_t ring_n = 0;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                field[static_cast<std::size_t>(y) * w + x] =
                    static_cast<float>(image.px(x, y)[ch]);
                if (mask.at(x, y)) continue;
                bool on_ring = false;
                for (int k = 0; k < 4 && !on_ring; ++k) {
                    const int nx = x + ddx[k], ny = y + ddy[k];
                    if (nx >= 0 && ny >= 0 && nx < w && ny < h && mask.at(nx, ny))
                        on_ring = true;
                }
                if (on_ring) {
                    ring_sum += image.px(x, y)[ch];
                    ++ring_n;
                }
            }
        const float init =
            ring_n ? static_cast<float>(ring_sum / static_cast<double>(ring_n)) : 0.0f;
        for (std::size_t i : masked) field[i] = init;

        next = field;
        for (int it = 0; it < max_iters; ++it) {
            float max_delta = 0.0f;
            for (std::size_t i : masked) {
                const int x = static_cast<int>(i % w);
                const int y = static_cast<int>(i / w);
                float sum = 0.0f;
                int cnt = 0;
                for (int k = 0; k < 4; ++k) {
                    const int nx = x + ddx[k], ny = y + ddy[k];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    sum += field[static_cast<std::size_t>(ny) * w + nx];
                    ++cnt;
                }
                const float v = sum / static_cast<float>(cnt);
                max_delta = std::max(max_delta, std::fabs(v - field[i]));
                next[i] = v;
            }
            for (std::size_t i : masked) field[i] = next[i];
            if (max_delta < static_cast<float>(tol)) break;
        }
        for (std::size_t i : masked) {
            const int x = static_cast<int>(i % w);
            const int y = static_cast<int>(i / w);
            out.px(x, y)[ch] = static_cast<std::uint8_t>(
                std::lround(std::clamp(field[i], 0.0f, 255.0f)));
        }
    }
    return out;
}

std::string to_string(ForgeryKind k) {
    return k == ForgeryKind::copy_move ? "copy_move" : "inpaint";
}

std::string provenance_json(const Provenance& p) {
    nlohmann::ordered_json j;
    j["source_id"] = p.source_id;
    j["kind"] = to_string(p.kind);
    j["seed"] = p.seed;
    j["transform"] = {{"rotation_deg", p.transform.rotation_deg},
                      {"scale", p.transform.scale},
                      {"dx", p.transform.dx},
                      {"dy", p.transform.dy}};
    j["alpha_interior"] = p.alpha_interior;
    j["mask_path"] = p.mask_path;
    return j.dump();
}

namespace {

std::vector<std::size_t> admissible_masks(const std::vector<BinaryMask>& masks,
                                          const SynthConfig& cfg, int width, int height,
                                          bool dilate_first, int dilate_radius) {
    const double total = static_cast<double>(width) * height;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < masks.size(); ++i) {
        const BinaryMask& m =
            dilate_first ? dilate_mask(masks[i], dilate_radius) : masks[i];
        const double frac = static_cast<double>(m.area()) / total;
        if (frac >= cfg.area_lo && frac <= cfg.area_hi) idx.push_back(i);
    }
    return idx;
}

}  // namespace

SynthOutcome synth_copy_move(const ImageRGB& image, const std::vector<BinaryMask>& masks,
                             std::uint64_t rng_seed, const SynthConfig& config,
                             const std::string& source_id) {
    SynthOutcome out;
    const auto admissible =
        admissible_masks(masks, config, image.width, image.height, false, 0);
    if (admissible.empty()) {
        out.skip_reason = "no mask within area fraction bounds";
        return out;
    }
    std::vector<BinaryMask> candidates;
    candidates.reserve(admissible.size());
    for (std::size_t i : admissible) candidates.push_back(masks[i]);
    const auto [sel, mask_ptr] = select_largest_mask(candidates);
    const BinaryMask& mask = *mask_ptr;
    (void)sel;

    Rng rng(rng_seed);
    const Centroid c = mask_centroid(mask);
    const Bbox b = mask_bbox(mask);
    const double diag = std::hypot(image.width, image.height);
    const double min_shift = config.min_shift_frac * diag;
    const double total_px = static_cast<double>(image.width) * image.height;

    for (int attempt = 0; attempt < config.max_transform_attempts; ++attempt) {
        AffineTransform t;
        t.rotation_deg = rng.uniform(config.rot_lo_deg, config.rot_hi_deg);
        t.scale = rng.uniform(config.scale_lo, config.scale_hi);
        if (config.fixed_translate) {
            t.dx = config.fixed_translate->first;
            t.dy = config.fixed_translate->second;
        } else {
            // Target centroid uniform over the region where the warped bbox
            // fits; reject below the minimum shift.
            const ForwardMap probe = make_map(t, c);
            double hx = 0.0, hy = 0.0;
            const double xs[2] = {static_cast<double>(b.x0), static_cast<double>(b.x1)};
            const double ys[2] = {static_cast<double>(b.y0), static_cast<double>(b.y1)};
            for (double x : xs)
                for (double y : ys) {
                    double ox, oy;
                    probe.apply(x, y, ox, oy);
                    hx = std::max(hx, std::fabs(ox - c.x - t.dx));
                    hy = std::max(hy, std::fabs(oy - c.y - t.dy));
                }
            const double margin = 2.0;
            const double lo_x = hx + margin, hi_x = image.width - 1 - hx - margin;
            const double lo_y = hy + margin, hi_y = image.height - 1 - hy - margin;
            if (lo_x >= hi_x || lo_y >= hi_y) continue;  // shape too large to move
            t.dx = rng.uniform(lo_x, hi_x) - c.x;
            t.dy = rng.uniform(lo_y, hi_y) - c.y;
        }
        if (std::hypot(t.dx, t.dy) < min_shift) continue;

        auto warped = apply_affine(image, mask, t);
        if (!warped) continue;
        const double frac = static_cast<double>(warped->mask.area()) / total_px;
        if (frac < config.area_lo || frac > config.area_hi) continue;

        const std::vector<float> alpha =
            feather_mask(warped->mask, config.feather_radius, config.alpha_interior);
        SynthRecord rec;
        rec.forged_image = blend_paste(image, warped->patch, alpha);
        rec.truth_mask = warped->mask;
        rec.provenance = {source_id, ForgeryKind::copy_move, rng_seed, t,
                          config.alpha_interior, ""};
        out.record = std::move(rec);
        return out;
    }
    out.skip_reason = "transform rejected " +
                      std::to_string(config.max_transform_attempts) +
                      " consecutive times";
    return out;
}

SynthOutcome synth_inpaint(const ImageRGB& image, const std::vector<BinaryMask>& masks,
                           std::uint64_t rng_seed, const SynthConfig& config,
                           const std::string& source_id) {
    SynthOutcome out;
    // Admissibility is judged on the dilated mask: that is the truth mask.
    const auto admissible = admissible_masks(masks, config, image.width, image.height,
                                             true, config.dilate_radius);
    if (admissible.empty()) {
        out.skip_reason = "no mask within area fraction bounds after dilation";
        return out;
    }
    Rng rng(rng_seed);
    const std::size_t pick =
        admissible[static_cast<std::size_t>(rng.uniform_int(admissible.size()))];
    const BinaryMask truth = dilate_mask(masks[pick], config.dilate_radius);

    SynthRecord rec;
    rec.forged_image =
        inpaint_diffusion(image, truth, config.inpaint_max_iters, config.inpaint_tol);
    rec.truth_mask = truth;
    rec.provenance = {source_id, ForgeryKind::inpaint, rng_seed, AffineTransform{},
                      1.0f, ""};
    out.record = std::move(rec);
    return out;
}

// --- procedural generator ---

namespace {

// Value noise: random lattice, bilinear interpolation, two octaves.
class ValueNoise {
public:
    ValueNoise(Rng& rng, int cells) : cells_(cells), lattice_((cells + 1) * (cells + 1)) {
        for (auto& v : lattice_) v = rng.uniform_f(0.0f, 1.0f);
    }

    float sample(float u, float v) const {  // u, v in [0,1]
        const float x = u * cells_, y = v * cells_;
        const int x0 = std::min(static_cast<int>(x), cells_ - 1);
        const int y0 = std::min(static_cast<int>(y), cells_ - 1);
        const float dx = x - x0, dy = y - y0;
        const auto at = [&](int i, int j) { return lattice_[j * (cells_ + 1) + i]; };
        return at(x0, y0) * (1 - dx) * (1 - dy) + at(x0 + 1, y0) * dx * (1 - dy) +
               at(x0, y0 + 1) * (1 - dx) * dy + at(x0 + 1, y0 + 1) * dx * dy;
    }

private:
    int cells_;
    std::vector<float> lattice_;
};

struct Shape {
    bool ellipse = true;
    double cx = 0, cy = 0;       // center
    double rx = 0, ry = 0;       // radii
    double angle = 0;            // radians
    std::vector<std::pair<double, double>> poly;  // vertices when !ellipse

    bool contains(double x, double y) const {
        if (ellipse) {
            const double ca = std::cos(angle), sa = std::sin(angle);
            const double ux = ca * (x - cx) + sa * (y - cy);
            const double uy = -sa * (x - cx) + ca * (y - cy);
            return (ux * ux) / (rx * rx) + (uy * uy) / (ry * ry) <= 1.0;
        }
        // even-odd rule
        bool inside = false;
        for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
            const auto [xi, yi] = poly[i];
            const auto [xj, yj] = poly[j];
            if ((yi > y) != (yj > y) &&
                x < (xj - xi) * (y - yi) / (yj - yi) + xi)
                inside = !inside;
        }
        return inside;
    }
};

struct Rgb {
    float r, g, b;
};

Rgb random_color(Rng& rng) {
    return {rng.uniform_f(30.0f, 225.0f), rng.uniform_f(30.0f, 225.0f),
            rng.uniform_f(30.0f, 225.0f)};
}

Rgb lerp(const Rgb& a, const Rgb& b, float t) {
    return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
}

}  // namespace

std::pair<ImageRGB, std::vector<BinaryMask>> make_procedural_image(
    std::uint64_t rng_seed, const ProceduralConfig& config) {
    Rng rng(rng_seed);
    const int w = config.width, h = config.height;
    ImageRGB image(w, h);

    const ValueNoise coarse(rng, 6);
    const ValueNoise fine(rng, 16);
    const Rgb bg_a = random_color(rng), bg_b = random_color(rng);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const float u = (x + 0.5f) / w, v = (y + 0.5f) / h;
            const float t =
                0.65f * coarse.sample(u, v) + 0.35f * fine.sample(u, v);
            const Rgb col = lerp(bg_a, bg_b, t);
            std::uint8_t* px = image.px(x, y);
            px[0] = static_cast<std::uint8_t>(std::lround(std::clamp(col.r, 0.f, 255.f)));
            px[1] = static_cast<std::uint8_t>(std::lround(std::clamp(col.g, 0.f, 255.f)));
            px[2] = static_cast<std::uint8_t>(std::lround(std::clamp(col.b, 0.f, 255.f)));
        }

    const int span = config.max_shapes - config.min_shapes + 1;
    const int target =
        config.min_shapes + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(
                                std::max(1, span))));
    const double rmin = config.shape_radius_lo * std::min(w, h);
    const double rmax = config.shape_radius_hi * std::min(w, h);

    BinaryMask occupied(w, h);  // union of placed shapes, 2 px gap enforced
    std::vector<BinaryMask> masks;
    for (int s = 0; s < target; ++s) {
        bool placed = false;
        for (int attempt = 0; attempt < 30 && !placed; ++attempt) {
            Shape shape;
            shape.ellipse = rng.uniform_int(2) == 0;
            shape.rx = rng.uniform(rmin, rmax);
            shape.ry = rng.uniform(rmin, rmax);
            const double rr = std::max(shape.rx, shape.ry);
            if (2.0 * rr + 4.0 >= std::min(w, h)) continue;
            shape.cx = rng.uniform(rr + 2.0, w - 1 - rr - 2.0);
            shape.cy = rng.uniform(rr + 2.0, h - 1 - rr - 2.0);
            shape.angle = rng.uniform(0.0, kPi);
            if (!shape.ellipse) {
                const int verts = 3 + static_cast<int>(rng.uniform_int(5));
                for (int vtx = 0; vtx < verts; ++vtx) {
                    const double theta =
                        shape.angle + 2.0 * kPi * vtx / verts;
                    const double rad = rr * rng.uniform(0.55, 1.0);
                    shape.poly.emplace_back(shape.cx + rad * std::cos(theta),
                                            shape.cy + rad * std::sin(theta));
                }
            }

            BinaryMask m(w, h);
            const int x0 = std::max(0, static_cast<int>(shape.cx - rr - 1));
            const int x1 = std::min(w - 1, static_cast<int>(shape.cx + rr + 1));
            const int y0 = std::max(0, static_cast<int>(shape.cy - rr - 1));
            const int y1 = std::min(h - 1, static_cast<int>(shape.cy + rr + 1));
            std::size_t area = 0;
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x)
                    if (shape.contains(x, y)) {
                        m.at(x, y) = 1;
                        ++area;
                    }
            if (area == 0) continue;

            const BinaryMask grown = dilate_mask(m, 2);
            bool overlaps = false;
            for (std::size_t i = 0; i < grown.bits.size() && !overlaps; ++i)
                if (grown.bits[i] && occupied.bits[i]) overlaps = true;
            if (overlaps) continue;

            // Distinct texture per shape.
            const ValueNoise tex(rng, 10);
            const Rgb ca = random_color(rng), cb = random_color(rng);
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x) {
                    if (!m.at(x, y)) continue;
                    const float u = (x + 0.5f) / w, v = (y + 0.5f) / h;
                    const Rgb col = lerp(ca, cb, tex.sample(u, v));
                    std::uint8_t* px = image.px(x, y);
                    px[0] = static_cast<std::uint8_t>(
                        std::lround(std::clamp(col.r, 0.f, 255.f)));
                    px[1] = static_cast<std::uint8_t>(
                        std::lround(std::clamp(col.g, 0.f, 255.f)));
                    px[2] = static_cast<std::uint8_t>(
                        std::lround(std::clamp(col.b, 0.f, 255.f)));
                }
            for (std::size_t i = 0; i < grown.bits.size(); ++i)
                if (grown.bits[i]) occupied.bits[i] = 1;
            masks.push_back(std::move(m));
            placed = true;
        }
    }

    if (config.grain > 0.0) {
        for (auto& px : image.pixels) {
            const double v = px + rng.uniform(-config.grain, config.grain);
            px = static_cast<std::uint8_t>(
                std::lround(std::clamp(v, 0.0, 255.0)));
        }
    }
    return {std::move(image), std::move(masks)};
}

}  // namespace fgl::synth
