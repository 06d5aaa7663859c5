#pragma once

#include <string>

#include "gkd/distill.hpp"
#include "gkd/synthdata.hpp"
#include "gkd/train.hpp"

namespace gkd {

// One flat JSON document with dotted keys ("train.epochs": 40) drives every
// subcommand; command-line flags override individual keys. Unknown keys are
// rejected.
struct RunConfig {
  GenConfig gen;
  TrainConfig train;
  DistillConfig distill;
  std::string data_in;
  std::string model_in;
  std::string model_out;
  std::string report_out;
  std::uint64_t seed = 0;
};

// value is a JSON scalar in text form ("40", "0.7", "\"local\"" or bare local)
void apply_config_key(RunConfig& cfg, const std::string& key,
                      const std::string& value);

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text);

std::string run_config_to_json(const RunConfig& cfg);

}  // namespace gkd
