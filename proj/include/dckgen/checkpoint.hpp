#pragma once

// Checkpoints: an ordered text manifest of parameter names/shapes plus a
// binary tensor payload, alongside the training config that built the model.

#include <string>

#include "dckgen/config.hpp"
#include "dckgen/params.hpp"

namespace dckgen {

// Writes manifest.txt, params.dckt and config.txt into `dir`.
void save_checkpoint(const std::string& dir, const TrainConfig& cfg, const ParamStore& params);

// Reads the config stored with the checkpoint.
TrainConfig load_checkpoint_config(const std::string& dir);

// Loads parameter values into an existing store; every name and shape must
// match the manifest exactly.
void load_checkpoint_params(const std::string& dir, ParamStore& params);

}  // namespace dckgen
