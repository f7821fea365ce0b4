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

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "medsim/kg_store.hpp"

namespace medsim::ingest {

// On-disk formats (all UTF-8, '#'-prefixed comment lines skipped in TSVs):
//   drugs.jsonl        {"id","name","description?","targets":[..],"taxonomy_node?"}
//   side_effects.tsv   drug_id <TAB> side_effect_id
//   ndfrt.tsv          drug_id <TAB> MoA|PE <TAB> concept_id
//   taxonomy.tsv       parent_node <TAB> child_node
//   corpus.jsonl       {"doc_id","text"}
//   pairs.tsv          drug_a <TAB> drug_b <TAB> score1;score2;...

struct CorpusDocument {
  std::string doc_id;
  std::string text;
};

/// A scored drug pair; ids are stored in lexicographic order.
struct LabeledPair {
  std::string drug_a;
  std::string drug_b;
  std::vector<double> rater_scores;
  double mean_score = 0.0;
};

struct ExcludedPair {
  LabeledPair pair;
  double rater_range = 0.0;
  long line = 0;
};

struct PairParseResult {
  std::vector<LabeledPair> kept;
  std::vector<ExcludedPair> excluded;  // rater range above the threshold
};

std::vector<kg::DrugRecord> parse_drugs(const std::string& path);

std::vector<std::pair<std::string, std::string>> parse_associations(
    const std::string& path, kg::Category category);

kg::TaxonomyGraph parse_taxonomy(const std::string& path);

std::vector<CorpusDocument> parse_corpus(const std::string& path);

/// Pairs whose rater score range (max - min) exceeds max_rater_range are
/// moved to the exclusion report instead of being kept.
PairParseResult parse_pairs(const std::string& path, double max_rater_range);

// Serializers for the same formats (used for round-trip checks and debugging).
void write_drugs(const std::vector<kg::DrugRecord>& records, std::ostream& os);
void write_associations(const std::vector<std::pair<std::string, std::string>>& pairs,
                        std::ostream& os);
void write_taxonomy(const kg::TaxonomyGraph& graph, std::ostream& os);
void write_corpus(const std::vector<CorpusDocument>& docs, std::ostream& os);
void write_pairs(const std::vector<LabeledPair>& pairs, std::ostream& os);

}  // namespace medsim::ingest
