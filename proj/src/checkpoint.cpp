#include "olgan/checkpoint.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "weights.bin is little-endian; byte swapping is not implemented");

namespace olgan {

using nlohmann::json;

void save_checkpoint(const std::filesystem::path& dir, const json& meta,
                     const std::vector<std::pair<std::string, const DenseMatrix*>>& tensors) {
    std::filesystem::create_directories(dir);

    json index = json::array();
    std::size_t offset = 0;
    for (const auto& [name, t] : tensors) {
        index.push_back({{"name", name}, {"rows", t->rows()}, {"cols", t->cols()}, {"offset", offset}});
        offset += t->size();
    }
    json doc = meta;
    doc["tensor_index"] = index;
    doc["weights_file"] = "weights.bin";

    std::ofstream jf(dir / "model.json");
    if (!jf) throw std::runtime_error("save_checkpoint: cannot write model.json in " + dir.string());
    jf << doc.dump(2) << "\n";
    jf.close();

    std::ofstream wf(dir / "weights.bin", std::ios::binary);
    if (!wf) throw std::runtime_error("save_checkpoint: cannot write weights.bin in " + dir.string());
    for (const auto& [name, t] : tensors) {
        wf.write(reinterpret_cast<const char*>(t->data()),
                 static_cast<std::streamsize>(t->size() * sizeof(double)));
    }
    if (!wf) throw std::runtime_error("save_checkpoint: short write to weights.bin");
}

json load_checkpoint(const std::filesystem::path& dir, std::map<std::string, DenseMatrix>& tensors) {
    std::ifstream jf(dir / "model.json");
    if (!jf) throw std::runtime_error("load_checkpoint: cannot open " + (dir / "model.json").string());
    json doc = json::parse(jf);

    std::ifstream wf(dir / doc.value("weights_file", "weights.bin"), std::ios::binary);
    if (!wf) throw std::runtime_error("load_checkpoint: cannot open weights.bin in " + dir.string());

    tensors.clear();
    for (const auto& entry : doc.at("tensor_index")) {
        const std::string name = entry.at("name");
        DenseMatrix t(entry.at("rows").get<std::size_t>(), entry.at("cols").get<std::size_t>());
        wf.seekg(static_cast<std::streamoff>(entry.at("offset").get<std::size_t>() * sizeof(double)));
        wf.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(double)));
        if (!wf) throw std::runtime_error("load_checkpoint: truncated weights.bin reading " + name);
        tensors.emplace(name, std::move(t));
    }
    return doc;
}

}  // namespace olgan
