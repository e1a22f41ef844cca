#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "fgl/dataset.hpp"
#include "fgl/image.hpp"
#include "fgl/rng.hpp"

using namespace fgl;
using namespace fgl::data;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
    const fs::path d = fs::temp_directory_path() / "fgl_dataset_tests";
    fs::create_directories(d);
    return d;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

DatasetManifest toy_manifest(int n_auth, int n_forged, std::uint64_t seed) {
    std::vector<std::string> auth;
    std::vector<ForgedEntry> forged;
    for (int i = 0; i < n_auth; ++i) auth.push_back("a" + std::to_string(i) + ".png");
    for (int i = 0; i < n_forged; ++i)
        forged.push_back({"f" + std::to_string(i) + ".png",
                          "m" + std::to_string(i) + ".png", "copy_move"});
    return build_manifest(auth, forged, seed);
}

}  // namespace

TEST_CASE("stratified split: 8+8 records give 12 train / 4 val, balanced") {
    DatasetManifest m = toy_manifest(8, 8, 5);
    int train = 0, val = 0, train_forged = 0, val_forged = 0;
    for (const auto& r : m.records) {
        if (r.split == Split::train) {
            ++train;
            train_forged += r.label;
        } else {
            ++val;
            val_forged += r.label;
        }
    }
    CHECK(train == 12);
    CHECK(val == 4);
    CHECK(train_forged == 6);
    CHECK(val_forged == 2);
}

TEST_CASE("manifest bytes are identical for identical seeds") {
    const fs::path pa = tmp_dir() / "a.jsonl", pb = tmp_dir() / "b.jsonl";
    save_manifest(toy_manifest(8, 8, 7), pa.string());
    save_manifest(toy_manifest(8, 8, 7), pb.string());
    CHECK(read_file(pa) == read_file(pb));
    const fs::path pc = tmp_dir() / "c.jsonl";
    save_manifest(toy_manifest(8, 8, 8), pc.string());
    CHECK(read_file(pa) != read_file(pc));
}

TEST_CASE("split fractions stay within one record of 75/25 per label") {
    DatasetManifest m = toy_manifest(501, 499, 13);
    for (int label = 0; label <= 1; ++label) {
        long total = 0, train = 0;
        for (const auto& r : m.records)
            if (r.label == label) {
                ++total;
                train += r.split == Split::train;
            }
        CHECK(std::abs(train - std::lround(0.75 * total)) <= 1);
    }
}

TEST_CASE("manifest rejects duplicates and maskless forgeries") {
    CHECK_THROWS_AS(build_manifest({"x.png", "x.png"},
                                   {{"f.png", "m.png", "copy_move"}}, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_manifest({"x.png"}, {{"f.png", "", "copy_move"}}, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_manifest({"x.png"}, {{"f.png", "m.png", "splice"}}, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_manifest({}, {{"f.png", "m.png", "inpaint"}}, 1),
                    std::invalid_argument);
}

TEST_CASE("manifest save/load round trip") {
    DatasetManifest m = toy_manifest(5, 5, 21);
    const fs::path p = tmp_dir() / "roundtrip.jsonl";
    save_manifest(m, p.string());
    DatasetManifest back = load_manifest(p.string());
    CHECK(back.split_seed == m.split_seed);
    REQUIRE(back.records.size() == m.records.size());
    for (std::size_t i = 0; i < m.records.size(); ++i) {
        CHECK(back.records[i].image_path == m.records[i].image_path);
        CHECK(back.records[i].label == m.records[i].label);
        CHECK(back.records[i].forgery_kind == m.records[i].forgery_kind);
        CHECK(back.records[i].mask_path == m.records[i].mask_path);
        CHECK(back.records[i].split == m.records[i].split);
    }
    CHECK_THROWS_AS(load_manifest((tmp_dir() / "missing.jsonl").string()),
                    std::runtime_error);
}

TEST_CASE("load_batch decodes, resizes, and scales exactly") {
    // solid-color image at target size: constant value color/255
    img::ImageRGB solid(64, 64);
    for (std::size_t i = 0; i < solid.pixels.size(); i += 3) {
        solid.pixels[i] = 200;
        solid.pixels[i + 1] = 100;
        solid.pixels[i + 2] = 50;
    }
    const fs::path sp = tmp_dir() / "solid.png";
    img::write_png(sp.string(), solid);

    // 2x2 checkerboard of 0/255 resized to 1x1: exactly 0.5
    img::ImageRGB checker(2, 2);
    for (int c = 0; c < 3; ++c) {
        checker.px(0, 0)[c] = 0;
        checker.px(1, 0)[c] = 255;
        checker.px(0, 1)[c] = 255;
        checker.px(1, 1)[c] = 0;
    }
    const fs::path cp = tmp_dir() / "checker.png";
    img::write_png(cp.string(), checker);

    DatasetManifest m;
    m.records.push_back({sp.string(), 0, "none", std::nullopt, Split::train});
    m.records.push_back({cp.string(), 0, "none", std::nullopt, Split::train});

    Batch b = load_batch(m, {0}, 64);
    CHECK(b.images.at(0, 0, 10, 10) == 200.0f / 255.0f);
    CHECK(b.images.at(0, 1, 63, 0) == 100.0f / 255.0f);
    CHECK(b.images.at(0, 2, 0, 63) == 50.0f / 255.0f);

    Batch one = load_batch(m, {1}, 1);
    for (int c = 0; c < 3; ++c) CHECK(one.images.at(0, c, 0, 0) == 0.5f);
}

TEST_CASE("batched loads equal concatenated single loads") {
    Rng rng(61);
    DatasetManifest m;
    for (int i = 0; i < 4; ++i) {
        img::ImageRGB im(24, 24);
        for (auto& p : im.pixels) p = static_cast<std::uint8_t>(rng.uniform_int(256));
        const fs::path p = tmp_dir() / ("rand" + std::to_string(i) + ".png");
        img::write_png(p.string(), im);
        m.records.push_back({p.string(), i % 2, i % 2 ? "copy_move" : "none",
                             i % 2 ? std::optional<std::string>("m.png") : std::nullopt,
                             Split::train});
    }
    Batch all = load_batch(m, {0, 1, 2, 3}, 16);
    for (std::size_t k = 0; k < 4; ++k) {
        Batch single = load_batch(m, {k}, 16);
        for (int c = 0; c < 3; ++c)
            for (int y = 0; y < 16; ++y)
                for (int x = 0; x < 16; ++x)
                    CHECK(all.images.at(static_cast<int>(k), c, y, x) ==
                          single.images.at(0, c, y, x));
        CHECK(all.labels[k] == single.labels[0]);
    }
    CHECK(all.images.all_finite());
    for (float v : all.images.data) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
    }
}

TEST_CASE("load_batch names the offending path on failure") {
    DatasetManifest m;
    m.records.push_back({"nowhere/missing.png", 0, "none", std::nullopt, Split::train});
    CHECK_THROWS_WITH_AS(load_batch(m, {0}, 16), doctest::Contains("missing.png"),
                         std::runtime_error);
}

TEST_CASE("epoch_iterator batch sizes and determinism") {
    DatasetManifest m = toy_manifest(5, 5, 3);
    // force all ten records into train for exact batch arithmetic
    for (auto& r : m.records) r.split = Split::train;
    auto batches = epoch_iterator(m, Split::train, 4, 17, 0);
    REQUIRE(batches.size() == 3);
    CHECK(batches[0].size() == 4);
    CHECK(batches[1].size() == 4);
    CHECK(batches[2].size() == 2);

    auto again = epoch_iterator(m, Split::train, 4, 17, 0);
    CHECK(batches == again);
    auto other_epoch = epoch_iterator(m, Split::train, 4, 17, 1);
    CHECK(batches != other_epoch);  // reshuffled

    CHECK_THROWS_AS(epoch_iterator(m, Split::val, 4, 17, 0), std::invalid_argument);
}

TEST_CASE("every record appears exactly once per epoch") {
    Rng rng(62);
    for (int trial = 0; trial < 100; ++trial) {
        const int n_auth = 3 + static_cast<int>(rng.uniform_int(20));
        const int n_forged = 3 + static_cast<int>(rng.uniform_int(20));
        DatasetManifest m = toy_manifest(n_auth, n_forged, trial);
        const int batch = 1 + static_cast<int>(rng.uniform_int(7));
        const auto split = trial % 2 ? Split::train : Split::val;
        auto batches = epoch_iterator(m, split, batch, rng.next_u64(),
                                      static_cast<int>(rng.uniform_int(5)));
        std::multiset<std::size_t> seen;
        for (const auto& b : batches) seen.insert(b.begin(), b.end());
        const auto want = m.split_ids(split);
        CHECK(seen.size() == want.size());
        for (std::size_t id : want) CHECK(seen.count(id) == 1);
    }
}

TEST_CASE("no record sits in both splits") {
    DatasetManifest m = toy_manifest(40, 40, 9);
    const auto train = m.split_ids(Split::train);
    const auto val = m.split_ids(Split::val);
    std::set<std::size_t> train_set(train.begin(), train.end());
    for (std::size_t id : val) CHECK(train_set.count(id) == 0);
    CHECK(train.size() + val.size() == m.records.size());
}

TEST_CASE("merge_and_resplit combines corpora and rejects duplicates") {
    DatasetManifest a = toy_manifest(6, 6, 1);
    DatasetManifest b;
    b.split_seed = 2;
    for (int i = 0; i < 6; ++i) {
        b.records.push_back({"b_a" + std::to_string(i) + ".png", 0, "none",
                             std::nullopt, Split::train});
        b.records.push_back({"b_f" + std::to_string(i) + ".png", 1, "inpaint",
                             std::optional<std::string>("b_m" + std::to_string(i) +
                                                        ".png"),
                             Split::train});
    }
    DatasetManifest merged = merge_and_resplit({a, b}, 99);
    CHECK(merged.records.size() == a.records.size() + b.records.size());
    int train = 0;
    for (const auto& r : merged.records) train += r.split == Split::train;
    CHECK(std::abs(train - std::lround(0.75 * merged.records.size())) <= 2);

    CHECK_THROWS_AS(merge_and_resplit({a, a}, 99), std::invalid_argument);
}

TEST_CASE("resolve_relative anchors to the manifest directory") {
    CHECK(resolve_relative("/data/set1/manifest.jsonl", "img/x.png") ==
          "/data/set1/img/x.png");
    CHECK(resolve_relative("/data/set1/manifest.jsonl", "/abs/x.png") == "/abs/x.png");
}
