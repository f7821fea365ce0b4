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

#include <functional>
#include <stdexcept>
#include <string>

namespace medsim {

/// Error codes shared by the C++ core and the C API.
enum class errc {
  ok = 0,
  io_error,
  config_error,
  // ingest
  malformed_line,
  missing_field,
  duplicate_id,
  wrong_column_count,
  unknown_kind,
  score_out_of_range,
  self_pair,
  // store
  duplicate_drug_id,
  dangling_taxonomy_ref,
  cyclic_taxonomy,
  not_found,
  ambiguous_name,
  // features
  unknown_annotation,
  category_mismatch,
  empty_description,
  // embedding
  empty_graph,
  empty_vocabulary,
  mode_mismatch,
  // regression
  insufficient_data,
  dimension_mismatch,
  too_few_rows,
  layout_mismatch,
  // evaluation
  constant_input,
  length_mismatch,
  degenerate_n,
  // pipeline
  unknown_drug_in_pair,
  invalid_argument,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
public:
  Error(errc code, std::string message, long line = 0)
      : std::runtime_error(std::move(message)), code_(code), line_(line) {}

  errc code() const noexcept { return code_; }

  /// 1-based input line the error refers to, or 0 when not file-related.
  long line() const noexcept { return line_; }

private:
  errc code_;
  long line_;
};

[[noreturn]] inline void fail(errc code, std::string message, long line = 0) {
  throw Error(code, std::move(message), line);
}

/// Receives non-fatal warnings (degenerate bounds, imputation fallbacks, ...).
/// An empty sink sends messages to stderr.
using DiagnosticSink = std::function<void(const std::string&)>;

void emit_diagnostic(const DiagnosticSink& sink, const std::string& message);

}  // namespace medsim
