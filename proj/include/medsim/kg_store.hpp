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

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace medsim::kg {

/// The four annotation categories a drug record carries.
enum class Category { side_effect, target, mechanism, physiologic_effect };

inline constexpr std::array<Category, 4> kAllCategories = {
    Category::side_effect, Category::target, Category::mechanism,
    Category::physiologic_effect};

const char* to_string(Category c);

/// One drug with its annotation sets and optional taxonomy attachment.
struct DrugRecord {
  std::string id;
  std::string name;
  std::string description;
  std::set<std::string> side_effects;
  std::set<std::string> targets;
  std::set<std::string> mechanisms;
  std::set<std::string> physiologic_effects;
  std::optional<std::string> taxonomy_node;

  const std::set<std::string>& annotations(Category c) const;
  std::set<std::string>& annotations(Category c);
};

struct AnnotationInfo {
  std::string label;
  int df = 0;  // number of drugs carrying the annotation
};

/// Per-category annotation id -> (label, document frequency) maps, plus the
/// drug count the frequencies were taken over.
class AnnotationCatalog {
public:
  const std::map<std::string, AnnotationInfo>& category(Category c) const {
    return maps_[static_cast<size_t>(c)];
  }
  std::map<std::string, AnnotationInfo>& category(Category c) {
    return maps_[static_cast<size_t>(c)];
  }

  /// Document frequency of an annotation; throws UnknownAnnotation.
  int df(Category c, const std::string& annotation) const;
  bool contains(Category c, const std::string& annotation) const;

  size_t drug_count = 0;

private:
  std::array<std::map<std::string, AnnotationInfo>, 4> maps_;
};

/// Concept hierarchy: labelled nodes, parent->child edges, drug attachments.
struct TaxonomyGraph {
  std::map<std::string, std::string> node_labels;            // id -> label
  std::vector<std::pair<std::string, std::string>> edges;    // parent -> child
  std::map<std::string, std::string> drug_leaves;            // drug id -> node id

  bool has_node(const std::string& id) const { return node_labels.count(id) != 0; }
  void add_node(const std::string& id) {
    node_labels.emplace(id, id);
  }
  void add_edge(const std::string& parent, const std::string& child) {
    add_node(parent);
    add_node(child);
    edges.emplace_back(parent, child);
  }

  /// Checks edge endpoints, acyclicity (parent->child) and root reachability.
  /// Throws CyclicTaxonomy / DanglingTaxonomyRef on violation.
  void validate() const;
};

/// Annotation ids are stored lowercase and whitespace-trimmed; the
/// multi-source exports disagree on casing.
std::string normalize_annotation_id(const std::string& raw);

/// Immutable after build; safe for concurrent reads.
class Store {
public:
  static Store build(std::vector<DrugRecord> drugs, TaxonomyGraph taxonomy);

  const std::vector<DrugRecord>& drugs() const { return drugs_; }
  const AnnotationCatalog& catalog() const { return catalog_; }
  const TaxonomyGraph& taxonomy() const { return taxonomy_; }

  const DrugRecord* find_by_id(const std::string& id) const;

  /// Exact-id match wins; otherwise a unique case-insensitive name match.
  /// Throws NotFound / AmbiguousName.
  const DrugRecord& resolve(const std::string& id_or_name) const;

private:
  Store() = default;

  std::vector<DrugRecord> drugs_;
  AnnotationCatalog catalog_;
  TaxonomyGraph taxonomy_;
  std::map<std::string, size_t> by_id_;
  std::multimap<std::string, size_t> by_lower_name_;
};

}  // namespace medsim::kg
