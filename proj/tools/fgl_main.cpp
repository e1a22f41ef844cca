// fgl: synthesize image forgeries, train/evaluate the detector, and explain
// classifications with Grad-CAM heatmaps.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "fgl/checkpoint.hpp"
#include "fgl/dataset.hpp"
#include "fgl/gradcam.hpp"
#include "fgl/image.hpp"
#include "fgl/model.hpp"
#include "fgl/rng.hpp"
#include "fgl/synth.hpp"
#include "fgl/train.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void write_runconfig(const fs::path& dir, const ordered_json& cfg) {
    fs::create_directories(dir);
    std::ofstream out(dir / "runconfig.json", std::ios::binary);
    out << cfg.dump(2) << "\n";
    if (!out) throw std::runtime_error("cannot write runconfig in " + dir.string());
}

std::string zero_pad(std::size_t v, int width) {
    std::string s = std::to_string(v);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

// --- synth ---

struct SynthArgs {
    std::string out_dir;
    bool procedural = false;
    std::string source_images, source_masks;
    std::size_t count = 100;
    std::string kind = "copy_move";  // copy_move | inpaint | mixed
    std::uint64_t seed = 7;
    std::uint64_t split_seed = 77;
    int size = 64;
    int min_shapes = 1, max_shapes = 4;
    double shape_r_lo = 0.08, shape_r_hi = 0.18;
    double grain = 8.0;
    fgl::synth::SynthConfig cfg;
};

int run_synth(const SynthArgs& a) {
    const fs::path out(a.out_dir);
    fs::create_directories(out / "authentic");
    fs::create_directories(out / "forged");
    fs::create_directories(out / "masks");

    ordered_json rc;
    rc["command"] = "synth";
    rc["procedural"] = a.procedural;
    rc["source_images"] = a.source_images;
    rc["source_masks"] = a.source_masks;
    rc["count"] = a.count;
    rc["kind"] = a.kind;
    rc["seed"] = a.seed;
    rc["split_seed"] = a.split_seed;
    rc["size"] = a.size;
    rc["shapes"] = {{"min", a.min_shapes},
                    {"max", a.max_shapes},
                    {"radius_lo", a.shape_r_lo},
                    {"radius_hi", a.shape_r_hi},
                    {"grain", a.grain}};
    rc["synth_config"] = {{"area_lo", a.cfg.area_lo},
                          {"area_hi", a.cfg.area_hi},
                          {"rot_lo_deg", a.cfg.rot_lo_deg},
                          {"rot_hi_deg", a.cfg.rot_hi_deg},
                          {"scale_lo", a.cfg.scale_lo},
                          {"scale_hi", a.cfg.scale_hi},
                          {"min_shift_frac", a.cfg.min_shift_frac},
                          {"alpha_interior", a.cfg.alpha_interior},
                          {"feather_radius", a.cfg.feather_radius},
                          {"dilate_radius", a.cfg.dilate_radius},
                          {"inpaint_max_iters", a.cfg.inpaint_max_iters},
                          {"inpaint_tol", a.cfg.inpaint_tol}};
    write_runconfig(out, rc);

    // Non-procedural sources: images paired with masks named <stem>*.png.
    std::vector<fs::path> src_images;
    if (!a.procedural) {
        if (a.source_images.empty())
            throw std::runtime_error("synth: give --procedural or --source-images");
        for (const auto& e : fs::directory_iterator(a.source_images))
            if (e.path().extension() == ".png") src_images.push_back(e.path());
        std::sort(src_images.begin(), src_images.end());
        if (src_images.empty())
            throw std::runtime_error("synth: no PNG images in " + a.source_images);
        if (a.count > src_images.size())
            throw std::runtime_error("synth: --count exceeds available source images (" +
                                     std::to_string(src_images.size()) + ")");
    }

    fgl::synth::ProceduralConfig pc;
    pc.width = pc.height = a.size;
    pc.min_shapes = a.min_shapes;
    pc.max_shapes = a.max_shapes;
    pc.shape_radius_lo = a.shape_r_lo;
    pc.shape_radius_hi = a.shape_r_hi;
    pc.grain = a.grain;

    std::ofstream prov(out / "provenance.jsonl", std::ios::binary);
    std::vector<std::string> authentic_paths;
    std::vector<fgl::data::ForgedEntry> forged_entries;
    std::size_t n_copy_move = 0, n_inpaint = 0, n_skipped = 0;

    for (std::size_t i = 0; i < a.count; ++i) {
        const std::string kind =
            a.kind == "mixed" ? (i % 2 == 0 ? "copy_move" : "inpaint") : a.kind;

        fgl::img::ImageRGB image;
        std::vector<fgl::img::BinaryMask> masks;
        std::string source_id;
        fgl::synth::SynthOutcome outcome;

        if (a.procedural) {
            // The authentic corpus and the forgery sources are disjoint
            // procedural streams; emitting a forgery's own source as an
            // authentic sample would let the classifier memorize content
            // instead of forgery evidence. Shape counts are balanced across
            // the classes per kind (a paste adds one blob, an inpaint hides
            // one) so blob counting carries no label information.
            fgl::synth::ProceduralConfig pc_auth = pc, pc_src = pc;
            if (kind == "copy_move") {
                pc_auth.min_shapes = pc.min_shapes + 1;
                pc_auth.max_shapes = pc.max_shapes + 1;
            } else {
                pc_src.min_shapes = pc.min_shapes + 1;
                pc_src.max_shapes = pc.max_shapes + 1;
            }

            const std::uint64_t auth_seed = fgl::derive_seed(a.seed, 2 * i);
            auto [auth_img, auth_masks] =
                fgl::synth::make_procedural_image(auth_seed, pc_auth);
            (void)auth_masks;
            image = std::move(auth_img);

            // Resample forgery sources until one synthesizes.
            const int max_tries = 50;
            fgl::img::ImageRGB forge_src;
            for (int t = 0; t < max_tries; ++t) {
                const std::uint64_t base = fgl::derive_seed(
                    a.seed, 2 * i + 1 + 1000000ull * static_cast<std::uint64_t>(t));
                std::vector<fgl::img::BinaryMask> fmasks;
                std::tie(forge_src, fmasks) =
                    fgl::synth::make_procedural_image(base, pc_src);
                source_id = "procedural:" + std::to_string(base);
                const std::uint64_t forge_seed = fgl::derive_seed(base, 1);
                outcome = kind == "copy_move"
                              ? fgl::synth::synth_copy_move(forge_src, fmasks,
                                                            forge_seed, a.cfg,
                                                            source_id)
                              : fgl::synth::synth_inpaint(forge_src, fmasks,
                                                          forge_seed, a.cfg,
                                                          source_id);
                if (outcome.ok()) break;
            }
            if (!outcome.ok())
                throw std::runtime_error("synth: record " + std::to_string(i) +
                                         " still skipped after " +
                                         std::to_string(max_tries) +
                                         " resamples: " + outcome.skip_reason);
        } else {
            const fs::path& img_path = src_images[i];
            image = fgl::img::read_png(img_path.string());
            source_id = img_path.filename().string();
            const std::string stem = img_path.stem().string();
            for (const auto& e : fs::directory_iterator(a.source_masks)) {
                if (e.path().extension() != ".png") continue;
                if (e.path().filename().string().rfind(stem, 0) == 0)
                    masks.push_back(fgl::img::read_mask_png(e.path().string()));
            }
            if (masks.empty()) {
                std::cerr << "synth: no masks for " << source_id << ", skipping\n";
                ++n_skipped;
                continue;
            }
            const std::uint64_t forge_seed = fgl::derive_seed(a.seed, i);
            outcome = kind == "copy_move"
                          ? fgl::synth::synth_copy_move(image, masks, forge_seed, a.cfg,
                                                        source_id)
                          : fgl::synth::synth_inpaint(image, masks, forge_seed, a.cfg,
                                                      source_id);
            if (!outcome.ok()) {
                std::cerr << "synth: " << source_id << " skipped: "
                          << outcome.skip_reason << "\n";
                ++n_skipped;
                continue;
            }
        }

        const std::string id = zero_pad(i, 6);
        const std::string auth_rel = "authentic/a" + id + ".png";
        const std::string forged_rel = "forged/f" + id + ".png";
        const std::string mask_rel = "masks/f" + id + "_mask.png";
        fgl::img::write_png((out / auth_rel).string(), image);
        fgl::synth::SynthRecord& rec = *outcome.record;
        fgl::img::write_png((out / forged_rel).string(), rec.forged_image);
        fgl::img::write_mask_png((out / mask_rel).string(), rec.truth_mask);
        rec.provenance.mask_path = mask_rel;
        prov << fgl::synth::provenance_json(rec.provenance) << "\n";

        authentic_paths.push_back(auth_rel);
        forged_entries.push_back(
            {forged_rel, mask_rel, fgl::synth::to_string(rec.provenance.kind)});
        if (rec.provenance.kind == fgl::synth::ForgeryKind::copy_move)
            ++n_copy_move;
        else
            ++n_inpaint;
    }
    prov.close();

    if (authentic_paths.empty())
        throw std::runtime_error("synth: zero admissible sources, nothing generated");

    const auto manifest =
        fgl::data::build_manifest(authentic_paths, forged_entries, a.split_seed);
    fgl::data::save_manifest(manifest, (out / "manifest.jsonl").string());

    std::cout << "synth: " << authentic_paths.size() << " authentic, "
              << forged_entries.size() << " forged (copy_move " << n_copy_move
              << ", inpaint " << n_inpaint << "), " << n_skipped << " skipped\n"
              << "manifest: " << (out / "manifest.jsonl").string() << "\n";
    return 0;
}

// --- train ---

struct TrainArgs {
    std::string scenario;
    std::vector<std::string> manifests;
    std::string out_dir;
    fgl::model::TrainConfig cfg;
    std::vector<int> widths = {16, 32, 64, 128, 128};
    int fc_hidden = 256;
    int input_size = 64;
    std::uint64_t resplit_seed = 99;
};

fgl::data::DatasetManifest load_resolved(const std::string& path) {
    auto m = fgl::data::load_manifest(path);
    for (auto& r : m.records) {
        r.image_path = fgl::data::resolve_relative(path, r.image_path);
        if (r.mask_path)
            r.mask_path = fgl::data::resolve_relative(path, *r.mask_path);
    }
    return m;
}

int run_train(TrainArgs& a) {
    const bool combined = a.scenario == "model3_combined";
    if (combined && a.manifests.size() != 2)
        throw std::runtime_error("train: model3_combined takes exactly two --manifests");
    if (!combined && a.manifests.size() != 1)
        throw std::runtime_error("train: scenario " + a.scenario +
                                 " takes exactly one --manifests entry");

    fgl::data::DatasetManifest manifest;
    if (combined) {
        std::vector<fgl::data::DatasetManifest> parts;
        for (const auto& p : a.manifests) parts.push_back(load_resolved(p));
        manifest = fgl::data::merge_and_resplit(parts, a.resplit_seed);
    } else {
        manifest = load_resolved(a.manifests[0]);
    }

    a.cfg.arch.input_size = a.input_size;
    a.cfg.arch.conv_channels = a.widths;
    a.cfg.arch.fc_hidden = a.fc_hidden;
    a.cfg.arch.validate_production();

    const fs::path out(a.out_dir);
    ordered_json rc;
    rc["command"] = "train";
    rc["scenario"] = a.scenario;
    rc["manifests"] = a.manifests;
    rc["epochs"] = a.cfg.epochs;
    rc["batch_size"] = a.cfg.batch_size;
    rc["learning_rate"] = a.cfg.learning_rate;
    rc["rho"] = a.cfg.rho;
    rc["epsilon"] = a.cfg.epsilon;
    rc["init_seed"] = a.cfg.init_seed;
    rc["shuffle_seed"] = a.cfg.shuffle_seed;
    rc["resplit_seed"] = a.resplit_seed;
    rc["input_size"] = a.input_size;
    rc["widths"] = a.widths;
    rc["fc_hidden"] = a.fc_hidden;
    write_runconfig(out, rc);

    std::ofstream metrics(out / "metrics.csv", std::ios::binary);
    metrics << "epoch,train_loss,val_acc\n";
    const auto ckpt = fgl::model::train(
        a.cfg, manifest, [&](int epoch, float loss, float acc) {
            metrics << epoch << "," << loss << "," << acc << "\n";
            metrics.flush();
            std::cout << "epoch " << epoch << ": train_loss " << loss << ", val_acc "
                      << acc << "\n";
        });
    fgl::model::save_checkpoint(ckpt, (out / "checkpoint.fgl").string());
    if (combined)
        fgl::data::save_manifest(manifest, (out / "combined_manifest.jsonl").string());
    std::cout << "checkpoint: " << (out / "checkpoint.fgl").string() << "\n";
    return 0;
}

// --- eval ---

struct EvalArgs {
    std::string checkpoint, manifest, out_dir;
    std::string split = "val";
    int batch_size = 32;
};

int run_eval(const EvalArgs& a) {
    const auto ckpt = fgl::model::load_checkpoint(a.checkpoint);
    const auto manifest = load_resolved(a.manifest);
    const auto split =
        a.split == "train" ? fgl::data::Split::train : fgl::data::Split::val;

    const fs::path out(a.out_dir);
    ordered_json rc;
    rc["command"] = "eval";
    rc["checkpoint"] = a.checkpoint;
    rc["manifest"] = a.manifest;
    rc["split"] = a.split;
    rc["batch_size"] = a.batch_size;
    write_runconfig(out, rc);

    const auto rep =
        fgl::model::evaluate(ckpt.net, manifest, split, a.batch_size, "");

    ordered_json j;
    j["split"] = a.split;
    j["accuracy"] = rep.accuracy;
    j["loss"] = rep.loss;
    j["confusion"] = {{"tp", rep.tp}, {"fp", rep.fp}, {"tn", rep.tn}, {"fn", rep.fn}};
    ordered_json per_kind;
    for (const auto& [kind, cc] : rep.per_kind)
        per_kind[kind] = {{"count", cc.first},
                          {"correct", cc.second},
                          {"accuracy", rep.kind_accuracy(kind)}};
    j["per_kind"] = std::move(per_kind);
    std::ofstream rf(out / "report.json", std::ios::binary);
    rf << j.dump(2) << "\n";
    if (!rf) throw std::runtime_error("cannot write report.json");

    std::cout << "accuracy " << rep.accuracy << " (loss " << rep.loss << ") over "
              << rep.total() << " images\n";
    for (const auto& [kind, cc] : rep.per_kind)
        std::cout << "  " << kind << ": " << rep.kind_accuracy(kind) << " (" << cc.first
                  << " images)\n";
    return 0;
}

// --- explain ---

struct ExplainArgs {
    std::string checkpoint, manifest, images_dir, masks_dir, out_dir;
    std::string split = "val";
    bool force = false;
    bool forged_records_only = true;
    float blend = 0.4f;
    double top_fraction = 0.1;
    std::size_t limit = 0;  // 0 = no limit
};

struct ExplainItem {
    std::string image_path;
    std::string stem;
    std::optional<std::string> mask_path;
};

int run_explain(const ExplainArgs& a) {
    const auto ckpt = fgl::model::load_checkpoint(a.checkpoint);
    const fs::path out(a.out_dir);

    ordered_json rc;
    rc["command"] = "explain";
    rc["checkpoint"] = a.checkpoint;
    rc["manifest"] = a.manifest;
    rc["images"] = a.images_dir;
    rc["masks"] = a.masks_dir;
    rc["split"] = a.split;
    rc["force"] = a.force;
    rc["blend"] = a.blend;
    rc["top_fraction"] = a.top_fraction;
    rc["limit"] = a.limit;
    write_runconfig(out, rc);

    std::vector<ExplainItem> items;
    if (!a.manifest.empty()) {
        const auto manifest = load_resolved(a.manifest);
        const auto split =
            a.split == "train" ? fgl::data::Split::train : fgl::data::Split::val;
        for (std::size_t id : manifest.split_ids(split)) {
            const auto& r = manifest.records[id];
            if (a.forged_records_only && r.label != 1) continue;
            items.push_back({r.image_path, fs::path(r.image_path).stem().string(),
                             r.mask_path});
        }
    } else if (!a.images_dir.empty()) {
        std::vector<fs::path> paths;
        for (const auto& e : fs::directory_iterator(a.images_dir))
            if (e.path().extension() == ".png") paths.push_back(e.path());
        std::sort(paths.begin(), paths.end());
        for (const auto& p : paths) {
            ExplainItem item{p.string(), p.stem().string(), std::nullopt};
            if (!a.masks_dir.empty()) {
                const fs::path m = fs::path(a.masks_dir) / (item.stem + "_mask.png");
                if (fs::exists(m)) item.mask_path = m.string();
            }
            items.push_back(std::move(item));
        }
    } else {
        throw std::runtime_error("explain: give --manifest or --images");
    }
    if (a.limit > 0 && items.size() > a.limit) items.resize(a.limit);

    const int size = ckpt.net.arch.input_size;
    std::size_t explained = 0, skipped = 0, scored = 0;
    double ratio_sum = 0.0;

    for (const auto& item : items) {
        fgl::img::ImageRGB image = fgl::img::read_png(item.image_path);
        if (image.width != size || image.height != size)
            image = fgl::img::resize_bilinear(image, size, size);
        fgl::Tensor4 input(1, 3, size, size);
        for (int c = 0; c < 3; ++c)
            for (int y = 0; y < size; ++y)
                for (int x = 0; x < size; ++x)
                    input.at(0, c, y, x) = static_cast<float>(image.px(x, y)[c]) / 255.0f;

        const auto fg = fgl::cam::feature_gradients(ckpt.net, input,
                                                    fgl::cam::ExplainClass::forged);
        const bool predicted_forged = fg.logit > 0.0f;
        if (!predicted_forged && !a.force) {
            std::cout << "skip " << item.stem
                      << ": predicted authentic (logit " << fg.logit << ")\n";
            ++skipped;
            continue;
        }

        const auto weights =
            fgl::cam::compute_weights(fg.gradient, fgl::cam::ExplainClass::forged);
        const auto raw = fgl::cam::compute_cam(weights, fg.activation);
        const auto heat = fgl::cam::upsample_and_normalize(raw, size, size);

        fgl::img::write_gray_png((out / (item.stem + ".cam.png")).string(),
                                 heat.normalized, heat.w, heat.h);
        fgl::img::write_png((out / (item.stem + ".overlay.png")).string(),
                            fgl::cam::render_overlay(image, heat, a.blend));

        ordered_json sidecar;
        sidecar["predicted_label"] = predicted_forged ? "forged" : "authentic";
        sidecar["logit"] = fg.logit;
        sidecar["class_explained"] = "forged";
        sidecar["degenerate_flag"] = heat.degenerate;
        if (item.mask_path) {
            auto mask = fgl::img::read_mask_png(*item.mask_path);
            if (mask.width != size || mask.height != size) {
                // Rescale mask with nearest sampling via threshold on bilinear.
                std::vector<float> plane(mask.bits.begin(), mask.bits.end());
                auto res = fgl::img::resize_bilinear_plane(plane, mask.width,
                                                           mask.height, size, size);
                fgl::img::BinaryMask scaled(size, size);
                for (std::size_t i = 0; i < res.size(); ++i)
                    scaled.bits[i] = res[i] >= 0.5f ? 1 : 0;
                mask = std::move(scaled);
            }
            const auto score =
                fgl::cam::localization_score(heat, mask, a.top_fraction);
            sidecar["localization"] = {
                {"mass_in_mask_fraction", score.mass_in_mask_fraction},
                {"mask_area_fraction", score.mask_area_fraction},
                {"concentration_ratio", score.concentration_ratio},
                {"degenerate", score.degenerate}};
            if (!score.degenerate) {
                ratio_sum += score.concentration_ratio;
                ++scored;
            }
        }
        std::ofstream sf(out / (item.stem + ".json"), std::ios::binary);
        sf << sidecar.dump(2) << "\n";
        if (!sf) throw std::runtime_error("cannot write sidecar for " + item.stem);
        ++explained;
    }

    std::cout << "explained " << explained << ", skipped " << skipped << "\n";
    if (scored > 0)
        std::cout << "mean concentration_ratio over " << scored << " masked images: "
                  << (ratio_sum / static_cast<double>(scored)) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"forgery synthesis, detection, and Grad-CAM explanation toolkit"};
    app.require_subcommand(1);

    SynthArgs sa;
    auto* synth = app.add_subcommand("synth", "generate a forgery dataset");
    synth->add_option("--out", sa.out_dir, "output directory")->required();
    synth->add_flag("--procedural", sa.procedural, "use the procedural image generator");
    synth->add_option("--source-images", sa.source_images, "directory of source PNGs");
    synth->add_option("--source-masks", sa.source_masks, "directory of mask PNGs");
    synth->add_option("--count", sa.count, "number of authentic/forged pairs");
    synth->add_option("--kind", sa.kind, "copy_move | inpaint | mixed")
        ->check(CLI::IsMember({"copy_move", "inpaint", "mixed"}));
    synth->add_option("--seed", sa.seed, "generation seed");
    synth->add_option("--split-seed", sa.split_seed, "manifest split seed");
    synth->add_option("--size", sa.size, "procedural image size");
    synth->add_option("--min-shapes", sa.min_shapes, "min shapes per image");
    synth->add_option("--max-shapes", sa.max_shapes, "max shapes per image");
    synth->add_option("--shape-r-lo", sa.shape_r_lo, "min shape radius fraction");
    synth->add_option("--shape-r-hi", sa.shape_r_hi, "max shape radius fraction");
    synth->add_option("--grain", sa.grain, "per-pixel noise amplitude, levels");
    synth->add_option("--area-min", sa.cfg.area_lo, "min mask area fraction");
    synth->add_option("--area-max", sa.cfg.area_hi, "max mask area fraction");
    synth->add_option("--rot-min", sa.cfg.rot_lo_deg, "min rotation, degrees");
    synth->add_option("--rot-max", sa.cfg.rot_hi_deg, "max rotation, degrees");
    synth->add_option("--scale-min", sa.cfg.scale_lo, "min scale");
    synth->add_option("--scale-max", sa.cfg.scale_hi, "max scale");
    synth->add_option("--min-shift-frac", sa.cfg.min_shift_frac,
                      "min centroid shift as a diagonal fraction");
    synth->add_option("--alpha-interior", sa.cfg.alpha_interior, "paste opacity");
    synth->add_option("--feather", sa.cfg.feather_radius, "feather ramp, pixels");
    synth->add_option("--dilate-radius", sa.cfg.dilate_radius,
                      "inpaint mask dilation, pixels");
    synth->add_option("--inpaint-max-iters", sa.cfg.inpaint_max_iters, "");
    synth->add_option("--inpaint-tol", sa.cfg.inpaint_tol, "");

    TrainArgs ta;
    auto* train = app.add_subcommand("train", "train a forgery classifier");
    train->add_option("--scenario", ta.scenario, "model1_inpaint | model2_copymove | model3_combined")
        ->required()
        ->check(CLI::IsMember({"model1_inpaint", "model2_copymove", "model3_combined"}));
    train->add_option("--manifests", ta.manifests, "manifest path(s)")->required();
    train->add_option("--out", ta.out_dir, "output directory")->required();
    train->add_option("--epochs", ta.cfg.epochs, "training epochs");
    train->add_option("--batch-size", ta.cfg.batch_size, "batch size");
    train->add_option("--lr", ta.cfg.learning_rate, "RMSProp learning rate");
    train->add_option("--rho", ta.cfg.rho, "RMSProp decay");
    train->add_option("--eps", ta.cfg.epsilon, "RMSProp epsilon");
    train->add_option("--init-seed", ta.cfg.init_seed, "weight init seed");
    train->add_option("--shuffle-seed", ta.cfg.shuffle_seed, "epoch shuffle seed");
    train->add_option("--split-seed", ta.resplit_seed,
                      "fresh split seed for model3_combined");
    train->add_option("--input-size", ta.input_size, "model input resolution");
    train->add_option("--widths", ta.widths, "conv channel widths (5 values)")
        ->delimiter(',');
    train->add_option("--fc-hidden", ta.fc_hidden, "fc hidden width");

    EvalArgs ea;
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
    eval->add_option("--checkpoint", ea.checkpoint, "checkpoint path")->required();
    eval->add_option("--manifest", ea.manifest, "manifest path")->required();
    eval->add_option("--out", ea.out_dir, "output directory")->required();
    eval->add_option("--split", ea.split, "train | val")
        ->check(CLI::IsMember({"train", "val"}));
    eval->add_option("--batch-size", ea.batch_size, "evaluation batch size");

    ExplainArgs xa;
    auto* explain = app.add_subcommand("explain", "Grad-CAM heatmaps and scores");
    explain->add_option("--checkpoint", xa.checkpoint, "checkpoint path")->required();
    explain->add_option("--manifest", xa.manifest, "explain records from a manifest");
    explain->add_option("--split", xa.split, "manifest split to explain")
        ->check(CLI::IsMember({"train", "val"}));
    explain->add_option("--images", xa.images_dir, "explain a directory of PNGs");
    explain->add_option("--masks", xa.masks_dir,
                        "truth masks (<stem>_mask.png) for localization scores");
    explain->add_option("--out", xa.out_dir, "output directory")->required();
    explain->add_flag("--force", xa.force, "explain even authentic-predicted images");
    explain->add_flag("!--forged-records-only", xa.forged_records_only,
                      "include authentic manifest records");
    explain->add_option("--blend", xa.blend, "overlay opacity");
    explain->add_option("--top-fraction", xa.top_fraction,
                        "heat mass quantile for localization");
    explain->add_option("--limit", xa.limit, "explain at most N images");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) return run_synth(sa);
        if (*train) return run_train(ta);
        if (*eval) return run_eval(ea);
        if (*explain) return run_explain(xa);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
