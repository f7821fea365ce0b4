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

#include "medsim/error.hpp"

#include <cstdio>

namespace medsim {

const char* errc_name(errc code) {
  switch (code) {
    case errc::ok: return "Ok";
    case errc::io_error: return "IoError";
    case errc::config_error: return "ConfigError";
    case errc::malformed_line: return "MalformedLine";
    case errc::missing_field: return "MissingField";
    case errc::duplicate_id: return "DuplicateId";
    case errc::wrong_column_count: return "WrongColumnCount";
    case errc::unknown_kind: return "UnknownKind";
    case errc::score_out_of_range: return "ScoreOutOfRange";
    case errc::self_pair: return "SelfPair";
    case errc::duplicate_drug_id: return "DuplicateDrugId";
    case errc::dangling_taxonomy_ref: return "DanglingTaxonomyRef";
    case errc::cyclic_taxonomy: return "CyclicTaxonomy";
    case errc::not_found: return "NotFound";
    case errc::ambiguous_name: return "AmbiguousName";
    case errc::unknown_annotation: return "UnknownAnnotation";
    case errc::category_mismatch: return "CategoryMismatch";
    case errc::empty_description: return "EmptyDescription";
    case errc::empty_graph: return "EmptyGraph";
    case errc::empty_vocabulary: return "EmptyVocabulary";
    case errc::mode_mismatch: return "ModeMismatch";
    case errc::insufficient_data: return "InsufficientData";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::too_few_rows: return "TooFewRows";
    case errc::layout_mismatch: return "LayoutMismatch";
    case errc::constant_input: return "ConstantInput";
    case errc::length_mismatch: return "LengthMismatch";
    case errc::degenerate_n: return "DegenerateN";
    case errc::unknown_drug_in_pair: return "UnknownDrugInPair";
    case errc::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

void emit_diagnostic(const DiagnosticSink& sink, const std::string& message) {
  if (sink) {
    sink(message);
  } else {
    std::fprintf(stderr, "medsim: warning: %s\n", message.c_str());
  }
}

}  // namespace medsim
