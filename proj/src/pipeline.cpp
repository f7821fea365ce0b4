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

#include "medsim/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "medsim/rng.hpp"
#include "medsim/text_util.hpp"

namespace medsim::pipeline {

namespace {

// Stage seeds derived from the config master seed.
constexpr std::uint64_t kSeedWalks = 1;
constexpr std::uint64_t kSeedHierarchySgns = 2;
constexpr std::uint64_t kSeedTextSgns = 3;
constexpr std::uint64_t kSeedForest = 4;

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_error, "cannot write '" + path + "'");
  return out;
}

std::string feature_cell(const std::optional<double>& value) {
  return value ? text::format_g9(*value) : "NA";
}

}  // namespace

std::string ValidationSummary::to_text() const {
  std::ostringstream os;
  os << "drugs: " << drugs << '\n'
     << "  without taxonomy node: " << drugs_without_taxonomy << '\n'
     << "  without description:   " << drugs_without_description << '\n';
  static const char* kCategoryNames[] = {"side_effect", "target", "mechanism",
                                         "physiologic_effect"};
  for (size_t c = 0; c < 4; ++c)
    os << "annotations[" << kCategoryNames[c] << "]: " << annotations_per_category[c]
       << '\n';
  os << "taxonomy: " << taxonomy_nodes << " nodes, " << taxonomy_edges << " edges\n"
     << "corpus documents: " << corpus_documents << '\n'
     << "labeled pairs: " << pairs_kept << " kept, " << pairs_excluded
     << " excluded by rater disagreement\n"
     << "association rows for unknown drugs: " << association_rows_unknown_drug
     << '\n';
  return os.str();
}

Engine::Engine(Config cfg, DiagnosticSink sink)
    : cfg_(std::move(cfg)), sink_(std::move(sink)) {
  std::vector<kg::DrugRecord> records = ingest::parse_drugs(cfg_.data.drugs);

  kg::TaxonomyGraph taxonomy;
  if (!cfg_.data.taxonomy.empty()) {
    taxonomy = ingest::parse_taxonomy(cfg_.data.taxonomy);
  } else {
    size_t stripped = 0;
    for (auto& rec : records)
      if (rec.taxonomy_node) {
        rec.taxonomy_node.reset();
        ++stripped;
      }
    if (stripped > 0)
      emit_diagnostic(sink_, "no taxonomy file configured; dropped " +
                                 std::to_string(stripped) +
                                 " taxonomy attachments (hierarchy feature is MISSING)");
  }

  std::map<std::string, size_t> index_by_id;
  for (size_t i = 0; i < records.size(); ++i) index_by_id[records[i].id] = i;

  auto merge = [&](const std::vector<std::pair<std::string, std::string>>& pairs,
                   kg::Category category) {
    for (const auto& [drug_id, annotation] : pairs) {
      auto it = index_by_id.find(drug_id);
      if (it == index_by_id.end()) {
        ++association_rows_unknown_drug_;
        continue;
      }
      records[it->second].annotations(category).insert(annotation);
    }
  };
  if (!cfg_.data.side_effects.empty())
    merge(ingest::parse_associations(cfg_.data.side_effects, kg::Category::side_effect),
          kg::Category::side_effect);
  if (!cfg_.data.ndfrt.empty()) {
    merge(ingest::parse_associations(cfg_.data.ndfrt, kg::Category::mechanism),
          kg::Category::mechanism);
    merge(ingest::parse_associations(cfg_.data.ndfrt, kg::Category::physiologic_effect),
          kg::Category::physiologic_effect);
  }

  store_ = std::make_unique<kg::Store>(
      kg::Store::build(std::move(records), std::move(taxonomy)));

  if (!cfg_.data.pairs.empty())
    pairs_ = ingest::parse_pairs(cfg_.data.pairs, cfg_.max_rater_range);
}

const std::vector<ingest::LabeledPair>& Engine::labeled_pairs() const {
  return pair_report().kept;
}

const ingest::PairParseResult& Engine::pair_report() const {
  if (!pairs_)
    fail(errc::config_error, "no labeled pairs file configured (data.pairs)");
  return *pairs_;
}

const std::vector<ingest::CorpusDocument>& Engine::corpus() {
  if (!corpus_) {
    if (cfg_.data.corpus.empty())
      corpus_ = std::vector<ingest::CorpusDocument>{};
    else
      corpus_ = ingest::parse_corpus(cfg_.data.corpus);
  }
  return *corpus_;
}

ValidationSummary Engine::validate_summary() {
  ValidationSummary s;
  s.drugs = store_->drugs().size();
  for (const auto& drug : store_->drugs()) {
    if (!drug.taxonomy_node) ++s.drugs_without_taxonomy;
    if (textsim::tokenize(drug.description).empty()) ++s.drugs_without_description;
  }
  for (kg::Category c : kg::kAllCategories)
    s.annotations_per_category[static_cast<size_t>(c)] =
        store_->catalog().category(c).size();
  s.taxonomy_nodes = store_->taxonomy().node_labels.size();
  s.taxonomy_edges = store_->taxonomy().edges.size();
  if (!cfg_.data.corpus.empty()) s.corpus_documents = corpus().size();
  if (pairs_) {
    s.pairs_kept = pairs_->kept.size();
    s.pairs_excluded = pairs_->excluded.size();
  }
  s.association_rows_unknown_drug = association_rows_unknown_drug_;
  return s;
}

const textsim::Bm25Index& Engine::bm25_index() {
  if (!bm25_) bm25_ = textsim::Bm25Index::build(*store_, cfg_.bm25);
  return *bm25_;
}

const textsim::ScoreBounds& Engine::bm25_bounds() {
  if (!bounds_) bounds_ = textsim::compute_bounds(bm25_index());
  return *bounds_;
}

const embed::EmbeddingTable& Engine::embeddings(embed::Mode mode) {
  if (mode == embed::Mode::hierarchy) {
    if (!hierarchy_table_) {
      embed::WalkConfig walk_cfg = cfg_.walks;
      walk_cfg.seed = rng::derive_seed(cfg_.seed, kSeedWalks);
      auto walks = embed::generate_walks(store_->taxonomy(), walk_cfg);
      embed::SgnsConfig sgns = cfg_.hierarchy_sgns;
      sgns.seed = rng::derive_seed(cfg_.seed, kSeedHierarchySgns);
      hierarchy_table_ = embed::train_sgns(walks, sgns, embed::Mode::hierarchy);
    }
    return *hierarchy_table_;
  }

  if (!text_table_) {
    std::vector<std::vector<std::string>> sentences;
    for (const auto& doc : corpus()) {
      auto tokens = textsim::tokenize(doc.text);
      if (!tokens.empty()) sentences.push_back(std::move(tokens));
    }
    for (const auto& drug : store_->drugs()) {
      auto tokens = textsim::tokenize(drug.description);
      if (!tokens.empty()) sentences.push_back(std::move(tokens));
    }
    embed::SgnsConfig sgns = cfg_.text_sgns;
    sgns.seed = rng::derive_seed(cfg_.seed, kSeedTextSgns);
    text_table_ = embed::train_sgns(sentences, sgns, embed::Mode::text);
  }
  return *text_table_;
}

const sparse::SparseWeightedVector& Engine::sparse_vector(size_t drug_index,
                                                          kg::Category category) {
  auto& slot = sparse_[static_cast<size_t>(category)];
  if (!slot) {
    std::vector<sparse::SparseWeightedVector> vectors;
    vectors.reserve(store_->drugs().size());
    for (const auto& drug : store_->drugs())
      vectors.push_back(
          sparse::build_vector(drug, category, store_->catalog(), cfg_.idf_variant));
    slot = std::move(vectors);
  }
  return (*slot)[drug_index];
}

std::optional<double> Engine::compute_feature(const std::string& name,
                                              const kg::DrugRecord& a,
                                              const kg::DrugRecord& b) {
  auto category_feature = [&](kg::Category category) {
    const size_t ia = static_cast<size_t>(store_->find_by_id(a.id) - store_->drugs().data());
    const size_t ib = static_cast<size_t>(store_->find_by_id(b.id) - store_->drugs().data());
    return sparse::cosine(sparse_vector(ia, category), sparse_vector(ib, category));
  };

  if (name == "MF_sider") return category_feature(kg::Category::side_effect);
  if (name == "MF_target") return category_feature(kg::Category::target);
  if (name == "MF_mechanism") return category_feature(kg::Category::mechanism);
  if (name == "MF_pe") return category_feature(kg::Category::physiologic_effect);
  if (name == "HF")
    return embed::embedding_similarity(embeddings(embed::Mode::hierarchy), a, b,
                                       embed::Mode::hierarchy);
  if (name == "SF_ksts")
    return textsim::ksts_symmetric(bm25_index(), a.id, b.id, bm25_bounds(), sink_);
  if (name == "SF_textemb")
    return embed::embedding_similarity(embeddings(embed::Mode::text), a, b,
                                       embed::Mode::text);
  fail(errc::config_error, "unknown feature '" + name + "'");
}

regress::PairFeatureRow Engine::feature_row(const std::string& drug_a,
                                            const std::string& drug_b,
                                            const std::vector<std::string>& names,
                                            std::optional<double> gold) {
  const kg::DrugRecord* a = store_->find_by_id(drug_a);
  const kg::DrugRecord* b = store_->find_by_id(drug_b);
  if (!a || !b)
    fail(errc::unknown_drug_in_pair,
         "pair references unknown drug '" + (a ? drug_b : drug_a) + "'");

  regress::PairFeatureRow row;
  row.drug_a = drug_a;
  row.drug_b = drug_b;
  row.gold = gold;
  row.values.reserve(names.size());
  for (const auto& name : names) row.values.push_back(compute_feature(name, *a, *b));
  return row;
}

regress::PairFeatureTable Engine::features_for_labeled(
    const std::vector<std::string>& names) {
  regress::PairFeatureTable table;
  table.feature_names = names;
  for (const auto& pair : labeled_pairs())
    table.rows.push_back(feature_row(pair.drug_a, pair.drug_b, names, pair.mean_score));
  return table;
}

regress::PairFeatureTable Engine::features_all_pairs(
    const std::vector<std::string>& names) {
  regress::PairFeatureTable table;
  table.feature_names = names;
  const auto& drugs = store_->drugs();
  std::vector<std::string> ids;
  ids.reserve(drugs.size());
  for (const auto& drug : drugs) ids.push_back(drug.id);
  std::sort(ids.begin(), ids.end());
  for (size_t i = 0; i < ids.size(); ++i)
    for (size_t j = i + 1; j < ids.size(); ++j)
      table.rows.push_back(feature_row(ids[i], ids[j], names));
  return table;
}

SubstitutionResult rank_substitutes(Engine& engine, const regress::Model& model,
                                    const std::string& query, double threshold) {
  const kg::DrugRecord& query_drug = engine.store().resolve(query);

  SubstitutionResult result;
  result.query_id = query_drug.id;
  result.threshold = threshold;

  std::vector<std::string> ids;
  for (const auto& drug : engine.store().drugs())
    if (drug.id != query_drug.id) ids.push_back(drug.id);
  std::sort(ids.begin(), ids.end());

  for (const auto& id : ids) {
    regress::PairFeatureRow row =
        engine.feature_row(std::min(query_drug.id, id), std::max(query_drug.id, id),
                           model.feature_names);
    SubstitutionCandidate candidate;
    candidate.id = id;
    candidate.score = model.predict_row(row);
    candidate.suggested = candidate.score > threshold;
    result.ranked.push_back(std::move(candidate));
  }

  std::stable_sort(result.ranked.begin(), result.ranked.end(),
                   [](const SubstitutionCandidate& a, const SubstitutionCandidate& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.id < b.id;
                   });
  return result;
}

std::vector<AblationEntry> run_ablation(
    Engine& engine, const std::vector<std::vector<std::string>>& grid) {
  std::vector<AblationEntry> entries;
  const Config& cfg = engine.config();
  for (const auto& raw_selection : grid) {
    std::vector<std::string> selection;
    for (const auto& name : regress::canonical_feature_names())
      if (std::find(raw_selection.begin(), raw_selection.end(), name) !=
          raw_selection.end())
        selection.push_back(name);
    if (selection.size() != raw_selection.size())
      fail(errc::config_error, "ablation grid contains unknown or duplicate features");
    if (selection.empty())
      fail(errc::config_error, "ablation grid contains an empty feature subset");

    regress::PairFeatureTable table = engine.features_for_labeled(selection);
    // Shared master seed: every subset sees the same fold split.
    regress::CvResult cv = regress::cross_validate(
        table, regress::ModelKind::forest, cfg.forest, cfg.cv_folds,
        rng::derive_seed(cfg.seed, kSeedForest));
    entries.push_back({selection, cv.pooled});
  }
  return entries;
}

void write_features_tsv(const regress::PairFeatureTable& table, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "# medsim features\n# features:";
  for (const auto& name : table.feature_names) out << ' ' << name;
  out << "\n# columns: drug_a drug_b";
  for (const auto& name : table.feature_names) out << ' ' << name;
  out << " gold\n";
  for (const auto& row : table.rows) {
    out << row.drug_a << '\t' << row.drug_b;
    for (const auto& value : row.values) out << '\t' << feature_cell(value);
    out << '\t' << feature_cell(row.gold) << '\n';
  }
  if (!out) fail(errc::io_error, "failed writing '" + path + "'");
}

regress::PairFeatureTable read_features_tsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, "cannot open '" + path + "'");

  regress::PairFeatureTable table;
  std::string line;
  long line_no = 0;
  bool names_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string prefix = "# features:";
      if (line.rfind(prefix, 0) == 0) {
        std::istringstream is(line.substr(prefix.size()));
        std::string name;
        table.feature_names.clear();
        while (is >> name) table.feature_names.push_back(name);
        names_seen = true;
      }
      continue;
    }
    if (!names_seen && table.feature_names.empty())
      table.feature_names = regress::canonical_feature_names();

    auto fields = text::split(line, '\t');
    const size_t expected = 2 + table.feature_names.size() + 1;
    if (fields.size() != expected)
      fail(errc::wrong_column_count,
           path + ":" + std::to_string(line_no) + ": expected " +
               std::to_string(expected) + " columns, found " +
               std::to_string(fields.size()),
           line_no);

    regress::PairFeatureRow row;
    row.drug_a = fields[0];
    row.drug_b = fields[1];
    auto parse_cell = [&](const std::string& cell) -> std::optional<double> {
      if (cell == "NA") return std::nullopt;
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        fail(errc::malformed_line,
             path + ":" + std::to_string(line_no) + ": bad value '" + cell + "'",
             line_no);
      return value;
    };
    for (size_t f = 0; f < table.feature_names.size(); ++f)
      row.values.push_back(parse_cell(fields[2 + f]));
    row.gold = parse_cell(fields.back());
    table.rows.push_back(std::move(row));
  }
  for (const auto& name : table.feature_names)
    if (!regress::is_feature_name(name))
      fail(errc::layout_mismatch, path + ": unknown feature '" + name + "' in header");
  return table;
}

void write_vectors_tsv(Engine& engine, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "# columns: drug_id category annotation_id weight\n";
  const auto& drugs = engine.store().drugs();
  for (size_t i = 0; i < drugs.size(); ++i) {
    for (kg::Category c : kg::kAllCategories) {
      const auto& vec = engine.sparse_vector(i, c);
      for (const auto& [annotation, weight] : vec.entries)
        out << drugs[i].id << '\t' << kg::to_string(c) << '\t' << annotation << '\t'
            << text::format_g9(weight) << '\n';
    }
  }
}

void write_bm25_cache(Engine& engine, const std::string& path) {
  std::ofstream out = open_output(path);
  out << engine.bm25_index().to_json().dump(2) << '\n';
}

void write_embeddings_tsv(Engine& engine, embed::Mode mode, const std::string& path) {
  std::ofstream out = open_output(path);
  embed::write_table(engine.embeddings(mode), out);
  if (!out) fail(errc::io_error, "failed writing '" + path + "'");
}

regress::Model train_from_features(const regress::PairFeatureTable& features,
                                   const Config& cfg, const TrainOptions& options,
                                   const DiagnosticSink& sink) {
  regress::PairFeatureTable training;
  training.feature_names = features.feature_names;
  size_t held_out = 0;
  for (const auto& row : features.rows) {
    if (options.holdout_drug &&
        (row.drug_a == *options.holdout_drug || row.drug_b == *options.holdout_drug)) {
      ++held_out;
      continue;
    }
    training.rows.push_back(row);
  }
  if (options.holdout_drug && held_out == 0)
    emit_diagnostic(sink, "holdout drug '" + *options.holdout_drug +
                              "' appears in no feature row");

  const std::uint64_t seed = rng::derive_seed(cfg.seed, kSeedForest);
  regress::Model model;
  if (options.kind == regress::ModelKind::forest)
    model = regress::train_forest(training, cfg.forest, seed, sink);
  else
    model = regress::train_baseline(training, options.kind, cfg.forest, seed, sink);
  model.holdout_drug = options.holdout_drug;

  if (options.cv_report_path) {
    regress::CvResult cv = regress::cross_validate(training, options.kind, cfg.forest,
                                                   cfg.cv_folds, seed, sink);
    EvalOutput output{cv.pooled, std::nullopt};
    write_report_json(output, std::string(to_string(options.kind)) + "-cv",
                      *options.cv_report_path);
  }
  return model;
}

EvalOutput evaluate_model(const regress::Model& model,
                          const regress::PairFeatureTable& features,
                          std::optional<double> compare_r) {
  if (features.feature_names != model.feature_names)
    fail(errc::layout_mismatch,
         "feature file layout does not match the model's feature names");

  std::vector<double> pred, gold;
  for (const auto& row : features.rows) {
    if (!row.gold)
      fail(errc::invalid_argument,
           "row " + row.drug_a + "/" + row.drug_b + " has no gold score to evaluate");
    pred.push_back(model.predict_row(row));
    gold.push_back(*row.gold);
  }

  EvalOutput output;
  output.report = metrics::compute_report(pred, gold);
  if (compare_r) {
    if (!output.report.pearson)
      fail(errc::constant_input,
           "z-comparison requested but the model's Pearson correlation is undefined");
    output.z_vs_reference =
        metrics::z_compare(*output.report.pearson, *compare_r, output.report.n);
  }
  return output;
}

void write_report_json(const EvalOutput& output, const std::string& method,
                       const std::string& path) {
  nlohmann::json j;
  j["method"] = method;
  j["n"] = output.report.n;
  j["rmse"] = output.report.rmse;
  j["mae"] = output.report.mae;
  if (output.report.pearson)
    j["pearson"] = *output.report.pearson;
  else
    j["pearson"] = nullptr;
  if (output.report.spearman)
    j["spearman"] = *output.report.spearman;
  else
    j["spearman"] = nullptr;
  if (output.z_vs_reference) {
    j["z_vs_reference"] = output.z_vs_reference->z;
    j["p"] = output.z_vs_reference->p;
    j["significant"] = output.z_vs_reference->significant;
  }
  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
  if (!out) fail(errc::io_error, "failed writing '" + path + "'");
}

void write_ablation_tsv(const std::vector<AblationEntry>& entries,
                        const std::string& path) {
  std::ofstream out = open_output(path);
  out << "# columns: features pearson spearman rmse mae n\n";
  for (const auto& entry : entries) {
    std::string joined;
    for (const auto& name : entry.selection) {
      if (!joined.empty()) joined += '+';
      joined += name;
    }
    out << joined << '\t'
        << (entry.report.pearson ? text::format_g9(*entry.report.pearson) : "NA") << '\t'
        << (entry.report.spearman ? text::format_g9(*entry.report.spearman) : "NA")
        << '\t' << text::format_g9(entry.report.rmse) << '\t'
        << text::format_g9(entry.report.mae) << '\t' << entry.report.n << '\n';
  }
  if (!out) fail(errc::io_error, "failed writing '" + path + "'");
}

std::vector<std::vector<std::string>> read_grid_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, "cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::config_error, path + ": " + e.what());
  }
  if (!j.is_array())
    fail(errc::config_error, path + ": grid must be an array of feature-name arrays");
  std::vector<std::vector<std::string>> grid;
  for (const auto& subset : j) {
    if (!subset.is_array())
      fail(errc::config_error, path + ": grid entries must be arrays of feature names");
    grid.push_back(subset.get<std::vector<std::string>>());
  }
  if (grid.empty()) fail(errc::config_error, path + ": grid is empty");
  return grid;
}

}  // namespace medsim::pipeline
