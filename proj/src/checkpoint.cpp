#include "mutec/checkpoint.hpp"

#include <cstdint>
#include <fstream>

#include "json.hpp"
#include "mutec/errors.hpp"

namespace mutec {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'M', 'U', 'T', 'E', 'C', 'K', 'P', '1'};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const RunConfig& config,
                     const ParamStore& store) {
    json header;
    header["config"] = json::parse(config.to_json());
    json index = json::array();
    for (const std::string& name : store.names()) {
        const Mat& m = store.value(name);
        index.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
    }
    header["tensors"] = index;
    const std::string head = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write checkpoint " + path.string());
    out.write(kMagic, sizeof(kMagic));
    const uint64_t head_len = head.size();
    out.write(reinterpret_cast<const char*>(&head_len), sizeof(head_len));
    out.write(head.data(), static_cast<std::streamsize>(head.size()));
    for (const std::string& name : store.names()) {
        const Mat& m = store.value(name);
        for (long r = 0; r < m.rows(); ++r)
            for (long c = 0; c < m.cols(); ++c) {
                const double v = m(r, c);
                out.write(reinterpret_cast<const char*>(&v), sizeof(v));
            }
    }
    if (!out) throw InputError("failed while writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read checkpoint " + path.string());

    char magic[sizeof(kMagic)];
    in.read(magic, sizeof(magic));
    if (!in || std::string(magic, sizeof(magic)) != std::string(kMagic, sizeof(kMagic)))
        throw ParseError(path.string() + " is not a checkpoint file");

    uint64_t head_len = 0;
    in.read(reinterpret_cast<char*>(&head_len), sizeof(head_len));
    std::string head(head_len, '\0');
    in.read(head.data(), static_cast<std::streamsize>(head_len));
    if (!in) throw ParseError(path.string() + ": truncated checkpoint header");

    json header = json::parse(head, nullptr, false);
    if (header.is_discarded() || !header.contains("config") || !header.contains("tensors"))
        throw ParseError(path.string() + ": malformed checkpoint header");

    Checkpoint ckpt;
    ckpt.config = config_from_json(header["config"].dump(), path.string());
    for (const json& entry : header["tensors"]) {
        const std::string name = entry.at("name").get<std::string>();
        const long rows = entry.at("rows").get<long>();
        const long cols = entry.at("cols").get<long>();
        Mat m(rows, cols);
        for (long r = 0; r < rows; ++r)
            for (long c = 0; c < cols; ++c) {
                double v = 0.0;
                in.read(reinterpret_cast<char*>(&v), sizeof(v));
                m(r, c) = v;
            }
        if (!in) throw ParseError(path.string() + ": truncated tensor payload for " + name);
        ckpt.tensors[name] = std::move(m);
    }
    return ckpt;
}

void restore_into(ParamStore& store, const Checkpoint& ckpt) {
    for (const auto& [name, value] : ckpt.tensors) {
        Mat& slot = store.get_or_create(name, static_cast<int>(value.rows()),
                                        static_cast<int>(value.cols()), Init::zeros);
        slot = value;
    }
}

}  // namespace mutec
