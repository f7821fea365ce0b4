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

#include "medsim/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <set>

#include <CLI11.hpp>

#include "medsim/error.hpp"

namespace medsim {

namespace {

namespace fs = std::filesystem;

void resolve_path(std::string& path, const fs::path& base) {
  if (path.empty()) return;
  fs::path p(path);
  if (p.is_relative()) path = (base / p).lexically_normal().string();
}

std::vector<std::string> normalize_selection(std::vector<std::string> selection) {
  std::set<std::string> seen(selection.begin(), selection.end());
  for (const auto& name : seen)
    if (!regress::is_feature_name(name))
      fail(errc::config_error, "unknown feature '" + name + "' in feature_selection");
  std::vector<std::string> ordered;
  for (const auto& name : regress::canonical_feature_names())
    if (seen.count(name)) ordered.push_back(name);
  if (ordered.empty())
    fail(errc::config_error, "feature_selection must not be empty");
  return ordered;
}

}  // namespace

bool Config::enabled(const std::string& feature) const {
  return std::find(feature_selection.begin(), feature_selection.end(), feature) !=
         feature_selection.end();
}

Config default_config() {
  Config cfg;
  cfg.feature_selection = regress::canonical_feature_names();
  cfg.hierarchy_sgns.dimension = 64;
  cfg.hierarchy_sgns.min_count = 1;
  cfg.hierarchy_sgns.subsample = 0.0;
  cfg.text_sgns.dimension = 128;
  cfg.text_sgns.min_count = 5;
  cfg.text_sgns.subsample = 1e-3;
  return cfg;
}

Config load_config(const std::string& path) {
  if (!fs::exists(path))
    fail(errc::config_error, "config file '" + path + "' does not exist");

  Config cfg = default_config();
  std::string idf_variant = "paper";
  std::vector<std::string> selection = cfg.feature_selection;

  // Config sections map onto CLI11 subcommands; unknown keys are errors.
  CLI::App app{"medsim pipeline configuration"};
  app.allow_config_extras(CLI::config_extras_mode::error);

  app.add_option("--seed", cfg.seed);
  app.add_option("--workers", cfg.workers)->check(CLI::PositiveNumber);
  app.add_option("--max_rater_range", cfg.max_rater_range)
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--idf_variant", idf_variant);
  app.add_option("--feature_selection", selection);
  app.add_option("--cv_folds", cfg.cv_folds)->check(CLI::Range(2, 1000));

  CLI::App* data = app.add_subcommand("data");
  data->add_option("--drugs", cfg.data.drugs);
  data->add_option("--side_effects", cfg.data.side_effects);
  data->add_option("--ndfrt", cfg.data.ndfrt);
  data->add_option("--taxonomy", cfg.data.taxonomy);
  data->add_option("--corpus", cfg.data.corpus);
  data->add_option("--pairs", cfg.data.pairs);

  CLI::App* bm25 = app.add_subcommand("bm25");
  bm25->add_option("--k1", cfg.bm25.k1)->check(CLI::NonNegativeNumber);
  bm25->add_option("--b", cfg.bm25.b)->check(CLI::Range(0.0, 1.0));

  CLI::App* walks = app.add_subcommand("walks");
  walks->add_option("--walks_per_node", cfg.walks.walks_per_node)
      ->check(CLI::PositiveNumber);
  walks->add_option("--walk_length", cfg.walks.walk_length)
      ->check(CLI::Range(2, 1 << 20));

  auto add_sgns = [&app](const std::string& section, embed::SgnsConfig& sgns) {
    CLI::App* sub = app.add_subcommand(section);
    sub->add_option("--dimension", sgns.dimension);
    sub->add_option("--window", sgns.window);
    sub->add_option("--negatives", sgns.negatives);
    sub->add_option("--epochs", sgns.epochs);
    sub->add_option("--min_count", sgns.min_count);
    sub->add_option("--subsample", sgns.subsample);
    sub->add_option("--lr_initial", sgns.lr_initial);
    sub->add_option("--lr_final", sgns.lr_final);
  };
  add_sgns("hierarchy_embedding", cfg.hierarchy_sgns);
  add_sgns("text_embedding", cfg.text_sgns);

  CLI::App* forest = app.add_subcommand("forest");
  forest->add_option("--n_trees", cfg.forest.n_trees)->check(CLI::PositiveNumber);
  forest->add_option("--max_depth", cfg.forest.max_depth)
      ->check(CLI::NonNegativeNumber);
  forest->add_option("--min_samples_leaf", cfg.forest.min_samples_leaf)
      ->check(CLI::PositiveNumber);
  forest->add_option("--features_per_split", cfg.forest.features_per_split)
      ->check(CLI::NonNegativeNumber);
  forest->add_option("--bootstrap", cfg.forest.bootstrap);

  app.set_config("--config")->required();

  try {
    const char* argv[] = {"medsim", "--config", path.c_str(), nullptr};
    app.parse(3, argv);
  } catch (const CLI::ParseError& e) {
    fail(errc::config_error, std::string("config '") + path + "': " + e.what());
  }

  cfg.idf_variant = sparse::idf_variant_from_string(idf_variant);
  cfg.feature_selection = normalize_selection(std::move(selection));

  const fs::path base = fs::path(path).parent_path();
  resolve_path(cfg.data.drugs, base);
  resolve_path(cfg.data.side_effects, base);
  resolve_path(cfg.data.ndfrt, base);
  resolve_path(cfg.data.taxonomy, base);
  resolve_path(cfg.data.corpus, base);
  resolve_path(cfg.data.pairs, base);

  if (const char* env_seed = std::getenv("MEDSIM_SEED")) {
    char* end = nullptr;
    const std::uint64_t value = std::strtoull(env_seed, &end, 10);
    if (end == env_seed || *end != '\0')
      fail(errc::config_error,
           std::string("MEDSIM_SEED is not an integer: '") + env_seed + "'");
    cfg.seed = value;
  }

  if (cfg.data.drugs.empty())
    fail(errc::config_error, "config must set data.drugs");
  cfg.hierarchy_sgns.workers = cfg.workers;
  cfg.text_sgns.workers = cfg.workers;
  cfg.forest.workers = cfg.workers;
  try {
    cfg.hierarchy_sgns.validate();
    cfg.text_sgns.validate();
  } catch (const Error& e) {
    fail(errc::config_error, std::string("config '") + path + "': " + e.what());
  }
  return cfg;
}

}  // namespace medsim
