#include "fgl/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace fgl::model {

namespace {

constexpr char kMagic[4] = {'F', 'G', 'L', '1'};
constexpr int kFormatVersion = 1;

static_assert(sizeof(float) == 4, "checkpoint format assumes 32-bit floats");

struct DirEntry {
    std::string name;
    std::vector<int> shape;
    const std::vector<float>* data;
};

std::vector<DirEntry> directory(Checkpoint& ckpt) {
    std::vector<DirEntry> dir;
    for (const auto& e : tensor_entries(ckpt.net)) dir.push_back({e.name, e.shape, e.data});
    for (const auto& [name, st] : ckpt.opt_state)
        dir.push_back({"opt." + name + ".s", {static_cast<int>(st.s.size())}, &st.s});
    return dir;
}

void write_f32_le(std::ofstream& out, const std::vector<float>& v) {
    // Byte layout is little-endian; this build targets LE hosts.
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(float)));
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    Checkpoint& c = const_cast<Checkpoint&>(ckpt);  // directory needs mutable views
    const auto dir = directory(c);

    nlohmann::ordered_json header;
    header["version"] = kFormatVersion;
    header["arch"] = {{"input_size", ckpt.net.arch.input_size},
                      {"conv_channels", ckpt.net.arch.conv_channels},
                      {"fc_hidden", ckpt.net.arch.fc_hidden}};
    header["epoch"] = ckpt.epoch;
    nlohmann::ordered_json hist = nlohmann::ordered_json::array();
    for (const auto& h : ckpt.history)
        hist.push_back({{"epoch", h.epoch},
                        {"train_loss", h.train_loss},
                        {"val_acc", h.val_acc}});
    header["history"] = std::move(hist);
    if (!ckpt.opt_state.empty()) {
        const auto& st = ckpt.opt_state.begin()->second;
        header["optimizer"] = {{"learning_rate", st.learning_rate},
                               {"decay", st.decay},
                               {"epsilon", st.epsilon}};
    }
    nlohmann::ordered_json tensors = nlohmann::ordered_json::array();
    std::uint64_t offset = 0;
    for (const auto& e : dir) {
        tensors.push_back(
            {{"name", e.name}, {"shape", e.shape}, {"offset", offset}});
        offset += e.data->size() * sizeof(float);
    }
    header["tensors"] = std::move(tensors);

    const std::string header_str = header.dump();
    if (header_str.size() > UINT32_MAX)
        throw std::runtime_error("checkpoint header too large");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out.write(kMagic, 4);
    const std::uint32_t len = static_cast<std::uint32_t>(header_str.size());
    char lenbuf[4] = {static_cast<char>(len & 0xff), static_cast<char>((len >> 8) & 0xff),
                      static_cast<char>((len >> 16) & 0xff),
                      static_cast<char>((len >> 24) & 0xff)};
    out.write(lenbuf, 4);
    out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
    for (const auto& e : dir) write_f32_le(out, *e.data);
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read checkpoint: " + path);

    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("checkpoint " + path + ": bad magic, not an FGL1 file");
    unsigned char lenbuf[4];
    if (!in.read(reinterpret_cast<char*>(lenbuf), 4))
        throw std::runtime_error("checkpoint " + path + ": truncated header length");
    const std::uint32_t len = static_cast<std::uint32_t>(lenbuf[0]) |
                              (static_cast<std::uint32_t>(lenbuf[1]) << 8) |
                              (static_cast<std::uint32_t>(lenbuf[2]) << 16) |
                              (static_cast<std::uint32_t>(lenbuf[3]) << 24);
    std::string header_str(len, '\0');
    if (!in.read(header_str.data(), len))
        throw std::runtime_error("checkpoint " + path + ": truncated header");

    nlohmann::json header = nlohmann::json::parse(header_str);
    const int version = header.at("version").get<int>();
    if (version != kFormatVersion)
        throw std::runtime_error("checkpoint " + path + ": format version " +
                                 std::to_string(version) + " not supported (expected " +
                                 std::to_string(kFormatVersion) + ")");

    Checkpoint ckpt;
    ArchConfig arch;
    arch.input_size = header.at("arch").at("input_size").get<int>();
    arch.conv_channels = header.at("arch").at("conv_channels").get<std::vector<int>>();
    arch.fc_hidden = header.at("arch").at("fc_hidden").get<int>();
    ckpt.net = model_init(arch, 0);  // layout only; payloads overwrite everything
    ckpt.epoch = header.at("epoch").get<int>();
    for (const auto& h : header.at("history"))
        ckpt.history.push_back({h.at("epoch").get<int>(),
                                h.at("train_loss").get<float>(),
                                h.at("val_acc").get<float>()});

    float opt_lr = 0, opt_rho = 0, opt_eps = 0;
    const bool has_opt = header.contains("optimizer");
    if (has_opt) {
        opt_lr = header["optimizer"].at("learning_rate").get<float>();
        opt_rho = header["optimizer"].at("decay").get<float>();
        opt_eps = header["optimizer"].at("epsilon").get<float>();
    }

    auto entries = tensor_entries(ckpt.net);
    const std::streampos payload_start = in.tellg();
    for (const auto& t : header.at("tensors")) {
        const std::string name = t.at("name").get<std::string>();
        const std::uint64_t offset = t.at("offset").get<std::uint64_t>();
        std::size_t count = 1;
        for (int d : t.at("shape").get<std::vector<int>>())
            count *= static_cast<std::size_t>(d);

        std::vector<float>* dst = nullptr;
        if (name.rfind("opt.", 0) == 0 && name.size() > 6 &&
            name.substr(name.size() - 2) == ".s") {
            if (!has_opt)
                throw std::runtime_error("checkpoint " + path +
                                         ": optimizer tensor without hyperparameters");
            const std::string pname = name.substr(4, name.size() - 6);
            auto st = nn::RmsPropState::init(count, opt_lr, opt_rho, opt_eps);
            auto [it, inserted] = ckpt.opt_state.emplace(pname, std::move(st));
            if (!inserted)
                throw std::runtime_error("checkpoint " + path + ": duplicate tensor " +
                                         name);
            dst = &it->second.s;
        } else {
            for (auto& e : entries)
                if (e.name == name) {
                    dst = e.data;
                    break;
                }
            if (!dst)
                throw std::runtime_error("checkpoint " + path + ": unknown tensor " +
                                         name);
            if (dst->size() != count)
                throw std::runtime_error("checkpoint " + path + ": tensor " + name +
                                         " size mismatch");
        }
        dst->resize(count);
        in.seekg(payload_start + static_cast<std::streamoff>(offset));
        if (!in.read(reinterpret_cast<char*>(dst->data()),
                     static_cast<std::streamsize>(count * sizeof(float))))
            throw std::runtime_error("checkpoint " + path + ": truncated payload for " +
                                     name);
    }
    return ckpt;
}

}  // namespace fgl::model
