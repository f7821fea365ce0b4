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

#include "medsim/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "medsim/error.hpp"
#include "medsim/text_util.hpp"

namespace medsim::ingest {

namespace {

using nlohmann::ordered_json;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, "cannot open '" + path + "'");
  return in;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

/// Calls fn(line_no, line) for every non-blank line; when skip_comments is
/// set, '#'-prefixed lines are skipped too.
template <typename Fn>
void for_each_line(const std::string& path, bool skip_comments, Fn&& fn) {
  std::ifstream in = open_input(path);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line)) continue;
    if (skip_comments && line.front() == '#') continue;
    fn(line_no, line);
  }
}

std::vector<std::string> tsv_fields(const std::string& line, size_t expected,
                                    long line_no, const std::string& path) {
  std::vector<std::string> fields = text::split(line, '\t');
  if (fields.size() != expected)
    fail(errc::wrong_column_count,
         path + ":" + std::to_string(line_no) + ": expected " +
             std::to_string(expected) + " columns, found " +
             std::to_string(fields.size()),
         line_no);
  for (auto& f : fields) f = text::trim(f);
  return fields;
}

double parse_score(const std::string& s, long line_no, const std::string& path) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    fail(errc::malformed_line,
         path + ":" + std::to_string(line_no) + ": bad score '" + s + "'", line_no);
  if (value < 0.0 || value > 1.0)
    fail(errc::score_out_of_range,
         path + ":" + std::to_string(line_no) + ": score " + s +
             " outside [0,1]",
         line_no);
  return value;
}

std::string format_shortest(double value) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace

std::vector<kg::DrugRecord> parse_drugs(const std::string& path) {
  std::vector<kg::DrugRecord> records;
  std::set<std::string> seen;
  for_each_line(path, /*skip_comments=*/false, [&](long line_no, const std::string& line) {
    ordered_json obj;
    try {
      obj = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(errc::malformed_line,
           path + ":" + std::to_string(line_no) + ": " + e.what(), line_no);
    }
    if (!obj.is_object())
      fail(errc::malformed_line,
           path + ":" + std::to_string(line_no) + ": expected a JSON object",
           line_no);

    auto require_string = [&](const char* field) {
      if (!obj.contains(field) || !obj[field].is_string() ||
          text::trim(obj[field].get<std::string>()).empty())
        fail(errc::missing_field,
             path + ":" + std::to_string(line_no) + ": missing field '" +
                 field + "'",
             line_no);
      return text::trim(obj[field].get<std::string>());
    };

    kg::DrugRecord rec;
    rec.id = require_string("id");
    rec.name = text::normalize_text(require_string("name"));
    if (obj.contains("description") && obj["description"].is_string())
      rec.description = text::normalize_text(obj["description"].get<std::string>());
    if (obj.contains("targets")) {
      if (!obj["targets"].is_array())
        fail(errc::malformed_line,
             path + ":" + std::to_string(line_no) + ": 'targets' must be an array",
             line_no);
      for (const auto& t : obj["targets"]) {
        if (!t.is_string())
          fail(errc::malformed_line,
               path + ":" + std::to_string(line_no) + ": target ids must be strings",
               line_no);
        std::string id = kg::normalize_annotation_id(t.get<std::string>());
        if (!id.empty()) rec.targets.insert(id);
      }
    }
    if (obj.contains("taxonomy_node") && obj["taxonomy_node"].is_string()) {
      std::string node = text::trim(obj["taxonomy_node"].get<std::string>());
      if (!node.empty()) rec.taxonomy_node = node;
    }

    if (!seen.insert(rec.id).second)
      fail(errc::duplicate_id,
           path + ":" + std::to_string(line_no) + ": duplicate drug id '" +
               rec.id + "'",
           line_no);
    records.push_back(std::move(rec));
  });
  return records;
}

std::vector<std::pair<std::string, std::string>> parse_associations(
    const std::string& path, kg::Category category) {
  const bool three_column = category == kg::Category::mechanism ||
                            category == kg::Category::physiologic_effect;
  std::set<std::pair<std::string, std::string>> pairs;
  for_each_line(path, /*skip_comments=*/true, [&](long line_no, const std::string& line) {
    if (three_column) {
      auto fields = tsv_fields(line, 3, line_no, path);
      const std::string& kind = fields[1];
      if (kind != "MoA" && kind != "PE")
        fail(errc::unknown_kind,
             path + ":" + std::to_string(line_no) + ": unknown kind '" + kind +
                 "' (expected MoA or PE)",
             line_no);
      bool wanted = (category == kg::Category::mechanism) ? kind == "MoA"
                                                          : kind == "PE";
      if (wanted)
        pairs.emplace(fields[0], kg::normalize_annotation_id(fields[2]));
    } else {
      auto fields = tsv_fields(line, 2, line_no, path);
      pairs.emplace(fields[0], kg::normalize_annotation_id(fields[1]));
    }
  });
  return {pairs.begin(), pairs.end()};
}

kg::TaxonomyGraph parse_taxonomy(const std::string& path) {
  kg::TaxonomyGraph graph;
  for_each_line(path, /*skip_comments=*/true, [&](long line_no, const std::string& line) {
    auto fields = tsv_fields(line, 2, line_no, path);
    if (fields[0].empty() || fields[1].empty())
      fail(errc::malformed_line,
           path + ":" + std::to_string(line_no) + ": empty node id", line_no);
    graph.add_edge(fields[0], fields[1]);
  });
  return graph;
}

std::vector<CorpusDocument> parse_corpus(const std::string& path) {
  std::vector<CorpusDocument> docs;
  std::set<std::string> seen;
  for_each_line(path, /*skip_comments=*/false, [&](long line_no, const std::string& line) {
    ordered_json obj;
    try {
      obj = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(errc::malformed_line,
           path + ":" + std::to_string(line_no) + ": " + e.what(), line_no);
    }
    if (!obj.is_object() || !obj.contains("doc_id") || !obj["doc_id"].is_string())
      fail(errc::missing_field,
           path + ":" + std::to_string(line_no) + ": missing field 'doc_id'",
           line_no);
    if (!obj.contains("text") || !obj["text"].is_string())
      fail(errc::missing_field,
           path + ":" + std::to_string(line_no) + ": missing field 'text'", line_no);

    CorpusDocument doc;
    doc.doc_id = text::trim(obj["doc_id"].get<std::string>());
    doc.text = text::normalize_text(obj["text"].get<std::string>());
    if (doc.doc_id.empty())
      fail(errc::missing_field,
           path + ":" + std::to_string(line_no) + ": empty doc_id", line_no);
    if (text::trim(doc.text).empty())
      fail(errc::malformed_line,
           path + ":" + std::to_string(line_no) + ": empty text", line_no);
    if (!seen.insert(doc.doc_id).second)
      fail(errc::duplicate_id,
           path + ":" + std::to_string(line_no) + ": duplicate doc_id '" +
               doc.doc_id + "'",
           line_no);
    docs.push_back(std::move(doc));
  });
  return docs;
}

PairParseResult parse_pairs(const std::string& path, double max_rater_range) {
  PairParseResult result;
  for_each_line(path, /*skip_comments=*/true, [&](long line_no, const std::string& line) {
    auto fields = tsv_fields(line, 3, line_no, path);
    LabeledPair pair;
    pair.drug_a = fields[0];
    pair.drug_b = fields[1];
    if (pair.drug_a == pair.drug_b)
      fail(errc::self_pair,
           path + ":" + std::to_string(line_no) + ": pair of '" + pair.drug_a +
               "' with itself",
           line_no);
    if (pair.drug_b < pair.drug_a) std::swap(pair.drug_a, pair.drug_b);

    for (const auto& part : text::split(fields[2], ';')) {
      std::string s = text::trim(part);
      if (s.empty())
        fail(errc::malformed_line,
             path + ":" + std::to_string(line_no) + ": empty rater score",
             line_no);
      pair.rater_scores.push_back(parse_score(s, line_no, path));
    }
    if (pair.rater_scores.empty())
      fail(errc::malformed_line,
           path + ":" + std::to_string(line_no) + ": no rater scores", line_no);

    double sum = 0.0, lo = 1.0, hi = 0.0;
    for (double s : pair.rater_scores) {
      sum += s;
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    pair.mean_score = sum / static_cast<double>(pair.rater_scores.size());

    if (hi - lo > max_rater_range)
      result.excluded.push_back({std::move(pair), hi - lo, line_no});
    else
      result.kept.push_back(std::move(pair));
  });
  return result;
}

void write_drugs(const std::vector<kg::DrugRecord>& records, std::ostream& os) {
  for (const auto& rec : records) {
    ordered_json obj;
    obj["id"] = rec.id;
    obj["name"] = rec.name;
    if (!rec.description.empty()) obj["description"] = rec.description;
    if (!rec.targets.empty())
      obj["targets"] = std::vector<std::string>(rec.targets.begin(), rec.targets.end());
    if (rec.taxonomy_node) obj["taxonomy_node"] = *rec.taxonomy_node;
    os << obj.dump() << '\n';
  }
}

void write_associations(const std::vector<std::pair<std::string, std::string>>& pairs,
                        std::ostream& os) {
  for (const auto& [drug, annotation] : pairs)
    os << drug << '\t' << annotation << '\n';
}

void write_taxonomy(const kg::TaxonomyGraph& graph, std::ostream& os) {
  for (const auto& [parent, child] : graph.edges)
    os << parent << '\t' << child << '\n';
}

void write_corpus(const std::vector<CorpusDocument>& docs, std::ostream& os) {
  for (const auto& doc : docs) {
    ordered_json obj;
    obj["doc_id"] = doc.doc_id;
    obj["text"] = doc.text;
    os << obj.dump() << '\n';
  }
}

void write_pairs(const std::vector<LabeledPair>& pairs, std::ostream& os) {
  for (const auto& pair : pairs) {
    os << pair.drug_a << '\t' << pair.drug_b << '\t';
    for (size_t i = 0; i < pair.rater_scores.size(); ++i) {
      if (i > 0) os << ';';
      os << format_shortest(pair.rater_scores[i]);
    }
    os << '\n';
  }
}

}  // namespace medsim::ingest
