#pragma once

#include "olgan/matrix.hpp"

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace olgan {

// Checkpoints are a pair of files: `model.json` holds architecture metadata
// plus a named tensor index (name, rows, cols, offset), `weights.bin` holds
// the tensor data as concatenated little-endian 64-bit floats in index order.

void save_checkpoint(const std::filesystem::path& dir, const nlohmann::json& meta,
                     const std::vector<std::pair<std::string, const DenseMatrix*>>& tensors);

// Loads model.json + weights.bin from `dir`. Returns the metadata json and
// fills `tensors` keyed by name.
nlohmann::json load_checkpoint(const std::filesystem::path& dir,
                               std::map<std::string, DenseMatrix>& tensors);

}  // namespace olgan
