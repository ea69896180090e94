#pragma once

#include <filesystem>
#include <map>

#include "mutec/run_config.hpp"
#include "mutec/tape.hpp"

namespace mutec {

// Self-describing parameter archive: an 8-byte magic, a JSON header carrying
// the run config snapshot and the tensor index, then the tensor payloads as
// row-major doubles in index order.
struct Checkpoint {
    RunConfig config;
    std::map<std::string, Mat> tensors;
};

void save_checkpoint(const std::filesystem::path& path, const RunConfig& config,
                     const ParamStore& store);

Checkpoint load_checkpoint(const std::filesystem::path& path);

// Seeds a store with the checkpoint tensors; later get_or_create calls with
// the same names then return these values instead of fresh initializations.
void restore_into(ParamStore& store, const Checkpoint& ckpt);

}  // namespace mutec
