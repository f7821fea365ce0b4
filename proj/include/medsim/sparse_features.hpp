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

#include <map>
#include <optional>
#include <string>

#include "medsim/kg_store.hpp"

namespace medsim::sparse {

/// `paper` reads the IDF formula literally (log over the numerator only),
/// `classic` is the textbook log of the full ratio. Cosine features are
/// invariant to the choice because it rescales a whole category uniformly.
enum class IdfVariant { paper, classic };

const char* to_string(IdfVariant v);
IdfVariant idf_variant_from_string(const std::string& name);

/// paper:   ln(|Drugs| + 1) / (DF + 1)
/// classic: ln((|Drugs| + 1) / (DF + 1))
/// Throws UnknownAnnotation when the annotation is not in the catalog.
double idf(const std::string& annotation, const kg::AnnotationCatalog& catalog,
           kg::Category category, IdfVariant variant = IdfVariant::paper);

/// Annotation id -> positive weight; absent entries encode weight 0.
struct SparseWeightedVector {
  kg::Category category = kg::Category::side_effect;
  std::map<std::string, double> entries;

  bool empty() const { return entries.empty(); }
};

SparseWeightedVector build_vector(const kg::DrugRecord& drug, kg::Category category,
                                  const kg::AnnotationCatalog& catalog,
                                  IdfVariant variant = IdfVariant::paper);

/// Cosine similarity in [0,1]; nullopt (MISSING) when either vector is
/// empty. Throws CategoryMismatch for vectors of different categories.
std::optional<double> cosine(const SparseWeightedVector& a,
                             const SparseWeightedVector& b);

}  // namespace medsim::sparse
