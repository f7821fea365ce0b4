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

#include "medsim/kg_store.hpp"

#include <deque>

#include "medsim/error.hpp"
#include "medsim/text_util.hpp"

namespace medsim::kg {

const char* to_string(Category c) {
  switch (c) {
    case Category::side_effect: return "side_effect";
    case Category::target: return "target";
    case Category::mechanism: return "mechanism";
    case Category::physiologic_effect: return "physiologic_effect";
  }
  return "?";
}

const std::set<std::string>& DrugRecord::annotations(Category c) const {
  switch (c) {
    case Category::side_effect: return side_effects;
    case Category::target: return targets;
    case Category::mechanism: return mechanisms;
    case Category::physiologic_effect: return physiologic_effects;
  }
  return side_effects;
}

std::set<std::string>& DrugRecord::annotations(Category c) {
  return const_cast<std::set<std::string>&>(
      static_cast<const DrugRecord*>(this)->annotations(c));
}

int AnnotationCatalog::df(Category c, const std::string& annotation) const {
  const auto& m = category(c);
  auto it = m.find(annotation);
  if (it == m.end())
    fail(errc::unknown_annotation,
         std::string("unknown annotation '") + annotation + "' in category " +
             to_string(c));
  return it->second.df;
}

bool AnnotationCatalog::contains(Category c, const std::string& annotation) const {
  return category(c).count(annotation) != 0;
}

std::string normalize_annotation_id(const std::string& raw) {
  return text::lower(text::trim(raw));
}

void TaxonomyGraph::validate() const {
  std::map<std::string, int> indegree;
  std::map<std::string, std::vector<std::string>> children;
  for (const auto& [id, label] : node_labels) {
    (void)label;
    indegree.emplace(id, 0);
  }
  for (const auto& [parent, child] : edges) {
    if (!has_node(parent) || !has_node(child))
      fail(errc::dangling_taxonomy_ref,
           "taxonomy edge " + parent + " -> " + child + " references a missing node");
    children[parent].push_back(child);
    ++indegree[child];
  }

  // Kahn's algorithm; leftover nodes mean a cycle in parent->child edges.
  std::deque<std::string> queue;
  for (const auto& [id, deg] : indegree)
    if (deg == 0) queue.push_back(id);
  size_t visited = 0;
  std::map<std::string, int> remaining = indegree;
  while (!queue.empty()) {
    std::string id = queue.front();
    queue.pop_front();
    ++visited;
    auto it = children.find(id);
    if (it == children.end()) continue;
    for (const auto& child : it->second)
      if (--remaining[child] == 0) queue.push_back(child);
  }
  if (visited != node_labels.size())
    fail(errc::cyclic_taxonomy, "taxonomy contains a parent/child cycle");
  // With acyclicity established, every node is reachable by walking up to a
  // zero-indegree root, so the reachability invariant holds here by the
  // count check above.
}

Store Store::build(std::vector<DrugRecord> drugs, TaxonomyGraph taxonomy) {
  taxonomy.validate();

  Store store;
  store.drugs_ = std::move(drugs);

  for (auto& drug : store.drugs_) {
    for (Category c : kAllCategories) {
      std::set<std::string> normalized;
      for (const auto& id : drug.annotations(c))
        normalized.insert(normalize_annotation_id(id));
      normalized.erase("");
      drug.annotations(c) = std::move(normalized);
    }
  }

  for (size_t i = 0; i < store.drugs_.size(); ++i) {
    const DrugRecord& drug = store.drugs_[i];
    if (drug.id.empty()) fail(errc::duplicate_drug_id, "empty drug id");
    auto [it, inserted] = store.by_id_.emplace(drug.id, i);
    (void)it;
    if (!inserted)
      fail(errc::duplicate_drug_id, "duplicate drug id '" + drug.id + "'");
    store.by_lower_name_.emplace(text::lower(drug.name), i);

    if (drug.taxonomy_node) {
      if (!taxonomy.has_node(*drug.taxonomy_node))
        fail(errc::dangling_taxonomy_ref,
             "drug '" + drug.id + "' references missing taxonomy node '" +
                 *drug.taxonomy_node + "'");
      taxonomy.drug_leaves[drug.id] = *drug.taxonomy_node;
    }
  }

  store.catalog_.drug_count = store.drugs_.size();
  for (const DrugRecord& drug : store.drugs_) {
    for (Category c : kAllCategories) {
      auto& m = store.catalog_.category(c);
      for (const auto& annotation : drug.annotations(c)) {
        auto [it, inserted] = m.emplace(annotation, AnnotationInfo{annotation, 0});
        (void)inserted;
        ++it->second.df;
      }
    }
  }

  store.taxonomy_ = std::move(taxonomy);
  return store;
}

const DrugRecord* Store::find_by_id(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &drugs_[it->second];
}

const DrugRecord& Store::resolve(const std::string& id_or_name) const {
  if (const DrugRecord* exact = find_by_id(id_or_name)) return *exact;

  auto [lo, hi] = by_lower_name_.equal_range(text::lower(id_or_name));
  size_t n = static_cast<size_t>(std::distance(lo, hi));
  if (n == 0)
    fail(errc::not_found, "no drug with id or name '" + id_or_name + "'");
  if (n > 1)
    fail(errc::ambiguous_name,
         "name '" + id_or_name + "' matches " + std::to_string(n) + " drugs");
  return drugs_[lo->second];
}

}  // namespace medsim::kg
