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
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "medsim/kg_store.hpp"

namespace medsim::embed {

enum class Mode { hierarchy, text };

const char* mode_name(Mode m);
Mode mode_from_string(const std::string& name);

struct WalkConfig {
  int walks_per_node = 40;
  int walk_length = 20;  // nodes per walk sentence
  std::uint64_t seed = 1;
};

/// Truncated uniform random walks over the taxonomy, edges treated as
/// undirected so sentences cover leaf-to-root paths and siblings alike.
/// Walk w from node n draws from a seed derived from (seed, n, w); the
/// output is identical no matter how callers distribute the work.
std::vector<std::vector<std::string>> generate_walks(const kg::TaxonomyGraph& graph,
                                                     const WalkConfig& cfg);

struct SgnsConfig {
  int dimension = 64;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  double lr_initial = 0.025;
  double lr_final = 1e-4;
  int min_count = 1;
  double subsample = 0.0;  // word2vec subsample threshold; 0 disables
  std::uint64_t seed = 1;
  int workers = 1;  // deterministic only at 1

  void validate() const;
  std::uint64_t content_hash(Mode mode) const;
};

struct EmbeddingTable {
  Mode mode = Mode::hierarchy;
  int dimension = 0;
  std::map<std::string, std::vector<float>> vectors;
  std::uint64_t config_hash = 0;
  std::uint64_t corpus_hash = 0;
};

struct TrainStats {
  std::vector<double> epoch_loss;  // mean pair loss per epoch
  size_t vocab_size = 0;
};

/// Skip-gram with negative sampling: log s(u.v) + sum_k log s(-u_k.v),
/// negatives drawn from the unigram^0.75 distribution, linear learning-rate
/// decay from lr_initial to lr_final.
EmbeddingTable train_sgns(const std::vector<std::vector<std::string>>& sentences,
                          const SgnsConfig& cfg, Mode mode,
                          TrainStats* stats = nullptr);

/// Loss and analytic gradients for a single (center, positive, negatives)
/// triple; the same expressions the trainer applies, exposed so they can be
/// checked against finite differences.
struct SgnsGradients {
  double loss = 0.0;
  std::vector<double> center;
  std::vector<double> positive;
  std::vector<std::vector<double>> negatives;
};

SgnsGradients sgns_loss_and_grad(std::span<const double> center,
                                 std::span<const double> positive,
                                 const std::vector<std::vector<double>>& negatives);

/// hierarchy: the vector of the drug's taxonomy node.
/// text: the vector of the lowercased drug name if in vocabulary, else the
/// mean of in-vocabulary description tokens. nullopt when nothing applies.
std::optional<std::vector<float>> drug_vector(const EmbeddingTable& table,
                                              const kg::DrugRecord& drug, Mode mode);

/// Cosine mapped by (c+1)/2 into [0,1]; MISSING propagates.
std::optional<double> embedding_similarity(const EmbeddingTable& table,
                                           const kg::DrugRecord& d1,
                                           const kg::DrugRecord& d2, Mode mode);

// embeddings.tsv: "dim=<d> mode=<m> config=<hash>" header, then
// key <TAB> c1 .. <TAB> cd with 9 significant digits, keys sorted.
void write_table(const EmbeddingTable& table, std::ostream& os);
EmbeddingTable read_table(std::istream& is);

}  // namespace medsim::embed
