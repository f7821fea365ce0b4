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

#include "medsim/sparse_features.hpp"

#include <algorithm>
#include <cmath>

#include "medsim/error.hpp"

namespace medsim::sparse {

const char* to_string(IdfVariant v) {
  return v == IdfVariant::paper ? "paper" : "classic";
}

IdfVariant idf_variant_from_string(const std::string& name) {
  if (name == "paper") return IdfVariant::paper;
  if (name == "classic") return IdfVariant::classic;
  fail(errc::config_error, "idf_variant must be 'paper' or 'classic', got '" + name + "'");
}

double idf(const std::string& annotation, const kg::AnnotationCatalog& catalog,
           kg::Category category, IdfVariant variant) {
  const double df = static_cast<double>(catalog.df(category, annotation));
  const double n = static_cast<double>(catalog.drug_count);
  if (variant == IdfVariant::paper) return std::log(n + 1.0) / (df + 1.0);
  return std::log((n + 1.0) / (df + 1.0));
}

SparseWeightedVector build_vector(const kg::DrugRecord& drug, kg::Category category,
                                  const kg::AnnotationCatalog& catalog,
                                  IdfVariant variant) {
  SparseWeightedVector vec;
  vec.category = category;
  for (const auto& annotation : drug.annotations(category)) {
    double w = idf(annotation, catalog, category, variant);
    if (w > 0.0) vec.entries.emplace(annotation, w);
  }
  return vec;
}

std::optional<double> cosine(const SparseWeightedVector& a,
                             const SparseWeightedVector& b) {
  if (a.category != b.category)
    fail(errc::category_mismatch,
         std::string("cosine of vectors from categories ") + kg::to_string(a.category) +
             " and " + kg::to_string(b.category));
  if (a.empty() || b.empty()) return std::nullopt;

  double dot = 0.0;
  const auto& small = a.entries.size() <= b.entries.size() ? a : b;
  const auto& large = a.entries.size() <= b.entries.size() ? b : a;
  for (const auto& [id, w] : small.entries) {
    auto it = large.entries.find(id);
    if (it != large.entries.end()) dot += w * it->second;
  }
  double na = 0.0, nb = 0.0;
  for (const auto& [id, w] : a.entries) na += w * w;
  for (const auto& [id, w] : b.entries) nb += w * w;
  double value = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(value, 0.0, 1.0);
}

}  // namespace medsim::sparse
