/*
Copyright 2026 the medsim authors
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
you may obtain a copy of the License at

                http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "medsim/embedding.hpp"
#include "medsim/regression.hpp"
#include "medsim/sparse_features.hpp"
#include "medsim/text_sim.hpp"

namespace medsim {

struct DataPaths {
  std::string drugs;
  std::string side_effects;
  std::string ndfrt;
  std::string taxonomy;
  std::string corpus;
  std::string pairs;
};

/// Pipeline configuration, loaded from a TOML file. Relative data paths are
/// resolved against the config file's directory; the MEDSIM_SEED environment
/// variable overrides `seed`.
struct Config {
  std::uint64_t seed = 42;
  int workers = 1;
  double max_rater_range = 0.4;
  sparse::IdfVariant idf_variant = sparse::IdfVariant::paper;
  std::vector<std::string> feature_selection;  // canonical order, nonempty
  int cv_folds = 10;

  DataPaths data;
  textsim::Bm25Params bm25;
  embed::WalkConfig walks;
  embed::SgnsConfig hierarchy_sgns;
  embed::SgnsConfig text_sgns;
  regress::Hyperparams forest;

  bool enabled(const std::string& feature) const;
};

Config default_config();

/// Throws Error(config_error) on unknown keys, bad types or bad values.
Config load_config(const std::string& path);

}  // namespace medsim
