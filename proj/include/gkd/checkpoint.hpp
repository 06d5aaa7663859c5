#pragma once

#include <string>

#include "gkd/train.hpp"

namespace gkd {

// Single JSON document: context tag, layer shapes, parameter data,
// optimizer moments, epoch and the training config. Round-trips bit-exactly.
void save_checkpoint(const ModelState& state, const std::string& path);
ModelState load_checkpoint(const std::string& path);

std::string checkpoint_to_json(const ModelState& state);
ModelState checkpoint_from_json(const std::string& text);

}  // namespace gkd
