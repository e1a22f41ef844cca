#ifndef FGL_DATASET_HPP
#define FGL_DATASET_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fgl/tensor.hpp"

namespace fgl::data {

enum class Split { train, val };

std::string to_string(Split s);

/// One dataset entry. label 1 = forged, 0 = authentic; forged records carry
/// the forgery kind and a ground-truth mask path.
struct Record {
    std::string image_path;
    int label = 0;
    std::string forgery_kind = "none";  // none | copy_move | inpaint
    std::optional<std::string> mask_path;
    Split split = Split::train;
};

struct DatasetManifest {
    std::vector<Record> records;
    std::uint64_t split_seed = 0;

    std::vector<std::size_t> split_ids(Split s) const;
};

struct ForgedEntry {
    std::string image_path;
    std::string mask_path;
    std::string forgery_kind;  // copy_move | inpaint
};

/// One record per image, stratified 75/25 train/val shuffle-split by label,
/// deterministic given (input order, seed). Rejects duplicate paths and
/// forged entries without a mask.
DatasetManifest build_manifest(const std::vector<std::string>& authentic_paths,
                               const std::vector<ForgedEntry>& forged,
                               std::uint64_t split_seed);

/// JSON-lines serialization: a header line {"split_seed": ...} followed by
/// one record object per line in stable field order.
void save_manifest(const DatasetManifest& manifest, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

/// Merge record lists (e.g. two scenario manifests) and rebuild the
/// stratified split with a fresh seed.
DatasetManifest merge_and_resplit(const std::vector<DatasetManifest>& parts,
                                  std::uint64_t split_seed);

struct Batch {
    Tensor4 images;             // (n, 3, H, W), values in [0,1]
    std::vector<float> labels;  // 0 or 1
    std::vector<std::size_t> record_ids;
};

/// Decode PNGs, bilinear-resize to target_size x target_size, scale to [0,1],
/// pack NCHW in id order. Relative image paths resolve against base_dir.
Batch load_batch(const DatasetManifest& manifest, const std::vector<std::size_t>& ids,
                 int target_size, const std::string& base_dir = "");

/// Record ids of one split in (epoch_index, shuffle_seed)-determined order,
/// grouped into batches; the final short batch is kept.
std::vector<std::vector<std::size_t>> epoch_iterator(const DatasetManifest& manifest,
                                                     Split split, int batch_size,
                                                     std::uint64_t shuffle_seed,
                                                     int epoch_index);

/// Resolve a possibly relative path against the directory of `anchor_file`.
std::string resolve_relative(const std::string& anchor_file, const std::string& path);

}  // namespace fgl::data

#endif
