#pragma once

#include <string>
#include <utility>
#include <vector>

#include "enero/policy.hpp"

namespace enero {

/// Ordered hyperparameter provenance block stored inside checkpoints.
using HyperBlock = std::vector<std::pair<std::string, std::string>>;

/// Versioned text checkpoint: named tensors with shapes and row-major values
/// in hexfloat, preceded by the hyperparameter block. Round-trips bit-exact.
void save_checkpoint(const PolicyParams& params, const HyperBlock& hyper,
                     const std::string& path);

PolicyParams load_checkpoint(const std::string& path,
                             HyperBlock* hyper_out = nullptr);

std::string checkpoint_to_text(const PolicyParams& params,
                               const HyperBlock& hyper);
PolicyParams checkpoint_from_text(const std::string& text,
                                  HyperBlock* hyper_out = nullptr);

}  // namespace enero
