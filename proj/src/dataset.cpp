#include "fgl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "fgl/image.hpp"
#include "fgl/rng.hpp"

namespace fgl::data {

namespace fs = std::filesystem;

std::string to_string(Split s) { return s == Split::train ? "train" : "val"; }

static Split split_from_string(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "val") return Split::val;
    throw std::invalid_argument("manifest: unknown split tag '" + s + "'");
}

std::vector<std::size_t> DatasetManifest::split_ids(Split s) const {
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (records[i].split == s) ids.push_back(i);
    return ids;
}

static void assign_split(std::vector<Record>& records, std::uint64_t seed) {
    // Stratified by label: shuffle each label group, first 75% -> train.
    Rng rng(mix64(seed));
    for (int label = 0; label <= 1; ++label) {
        std::vector<std::size_t> group;
        for (std::size_t i = 0; i < records.size(); ++i)
            if (records[i].label == label) group.push_back(i);
        rng.shuffle(group);
        const std::size_t n_train = static_cast<std::size_t>(
            std::lround(0.75 * static_cast<double>(group.size())));
        for (std::size_t k = 0; k < group.size(); ++k)
            records[group[k]].split = k < n_train ? Split::train : Split::val;
    }
}

DatasetManifest build_manifest(const std::vector<std::string>& authentic_paths,
                               const std::vector<ForgedEntry>& forged,
                               std::uint64_t split_seed) {
    if (authentic_paths.empty() || forged.empty())
        throw std::invalid_argument("build_manifest: both corpora must be nonempty");

    DatasetManifest m;
    m.split_seed = split_seed;
    std::set<std::string> seen;
    for (const auto& p : authentic_paths) {
        if (!seen.insert(p).second)
            throw std::invalid_argument("build_manifest: duplicate path " + p);
        m.records.push_back({p, 0, "none", std::nullopt, Split::train});
    }
    for (const auto& f : forged) {
        if (f.mask_path.empty())
            throw std::invalid_argument("build_manifest: forged record " + f.image_path +
                                        " is missing its mask");
        if (f.forgery_kind != "copy_move" && f.forgery_kind != "inpaint")
            throw std::invalid_argument("build_manifest: unknown forgery kind '" +
                                        f.forgery_kind + "'");
        if (!seen.insert(f.image_path).second)
            throw std::invalid_argument("build_manifest: duplicate path " + f.image_path);
        m.records.push_back({f.image_path, 1, f.forgery_kind, f.mask_path, Split::train});
    }
    assign_split(m.records, split_seed);
    return m;
}

DatasetManifest merge_and_resplit(const std::vector<DatasetManifest>& parts,
                                  std::uint64_t split_seed) {
    DatasetManifest m;
    m.split_seed = split_seed;
    std::set<std::string> seen;
    for (const auto& part : parts)
        for (const auto& r : part.records) {
            if (!seen.insert(r.image_path).second)
                throw std::invalid_argument("merge_and_resplit: duplicate path " +
                                            r.image_path);
            m.records.push_back(r);
        }
    if (m.records.empty())
        throw std::invalid_argument("merge_and_resplit: no records to merge");
    assign_split(m.records, split_seed);
    return m;
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    nlohmann::ordered_json header;
    header["split_seed"] = manifest.split_seed;
    out << header.dump() << "\n";
    for (const auto& r : manifest.records) {
        nlohmann::ordered_json j;
        j["image_path"] = r.image_path;
        j["label"] = r.label;
        j["forgery_kind"] = r.forgery_kind;
        if (r.mask_path) j["mask_path"] = *r.mask_path;
        j["split"] = to_string(r.split);
        out << j.dump() << "\n";
    }
    if (!out) throw std::runtime_error("manifest write failed: " + path);
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read manifest: " + path);
    DatasetManifest m;
    std::string line;
    bool header_seen = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, true);
        if (!header_seen) {
            if (!j.contains("split_seed"))
                throw std::runtime_error("manifest " + path +
                                         ": first line must carry split_seed");
            m.split_seed = j["split_seed"].get<std::uint64_t>();
            header_seen = true;
            continue;
        }
        Record r;
        r.image_path = j.at("image_path").get<std::string>();
        r.label = j.at("label").get<int>();
        r.forgery_kind = j.at("forgery_kind").get<std::string>();
        if (j.contains("mask_path")) r.mask_path = j["mask_path"].get<std::string>();
        r.split = split_from_string(j.at("split").get<std::string>());
        const bool forged = r.label == 1;
        if (forged != (r.forgery_kind != "none") || forged != r.mask_path.has_value())
            throw std::runtime_error("manifest " + path + " line " +
                                     std::to_string(line_no) +
                                     ": label/kind/mask fields are inconsistent");
        m.records.push_back(std::move(r));
    }
    if (!header_seen) throw std::runtime_error("manifest " + path + " is empty");
    return m;
}

std::string resolve_relative(const std::string& anchor_file, const std::string& path) {
    fs::path p(path);
    if (p.is_absolute()) return path;
    return (fs::path(anchor_file).parent_path() / p).string();
}

Batch load_batch(const DatasetManifest& manifest, const std::vector<std::size_t>& ids,
                 int target_size, const std::string& base_dir) {
    if (ids.empty()) throw std::invalid_argument("load_batch: empty id list");
    if (target_size < 1) throw std::invalid_argument("load_batch: bad target size");

    Batch b;
    b.images = Tensor4(static_cast<int>(ids.size()), 3, target_size, target_size);
    b.labels.reserve(ids.size());
    b.record_ids = ids;

    for (std::size_t k = 0; k < ids.size(); ++k) {
        if (ids[k] >= manifest.records.size())
            throw std::out_of_range("load_batch: record id " + std::to_string(ids[k]) +
                                    " out of range");
        const Record& r = manifest.records[ids[k]];
        std::string path = r.image_path;
        if (!base_dir.empty() && !fs::path(path).is_absolute())
            path = (fs::path(base_dir) / path).string();
        const img::ImageRGB im = img::read_png(path);
        // Resize on float planes so no intermediate 8-bit rounding happens
        // between decode and the [0,1] scaling.
        std::vector<float> plane(static_cast<std::size_t>(im.width) * im.height);
        for (int c = 0; c < 3; ++c) {
            for (int y = 0; y < im.height; ++y)
                for (int x = 0; x < im.width; ++x)
                    plane[static_cast<std::size_t>(y) * im.width + x] =
                        static_cast<float>(im.px(x, y)[c]);
            std::vector<float> res =
                (im.width == target_size && im.height == target_size)
                    ? plane
                    : img::resize_bilinear_plane(plane, im.width, im.height,
                                                 target_size, target_size);
            for (int y = 0; y < target_size; ++y)
                for (int x = 0; x < target_size; ++x)
                    b.images.at(static_cast<int>(k), c, y, x) =
                        res[static_cast<std::size_t>(y) * target_size + x] / 255.0f;
        }
        b.labels.push_back(static_cast<float>(r.label));
    }
    return b;
}

std::vector<std::vector<std::size_t>> epoch_iterator(const DatasetManifest& manifest,
                                                     Split split, int batch_size,
                                                     std::uint64_t shuffle_seed,
                                                     int epoch_index) {
    if (batch_size < 1) throw std::invalid_argument("epoch_iterator: batch_size >= 1");
    std::vector<std::size_t> ids = manifest.split_ids(split);
    if (ids.empty())
        throw std::invalid_argument("epoch_iterator: split '" + to_string(split) +
                                    "' is empty");
    Rng rng(derive_seed(shuffle_seed, static_cast<std::uint64_t>(epoch_index)));
    rng.shuffle(ids);

    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t i = 0; i < ids.size(); i += batch_size) {
        const std::size_t end = std::min(ids.size(), i + batch_size);
        batches.emplace_back(ids.begin() + i, ids.begin() + end);
    }
    return batches;
}

}  // namespace fgl::data
