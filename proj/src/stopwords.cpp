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

#include "medsim/text_sim.hpp"
#include "medsim/text_util.hpp"

namespace medsim::textsim {

// Keep sorted; the FNV hash of the joined list versions cached indices.
const std::vector<std::string>& stopword_list() {
  static const std::vector<std::string> words = {
      "a",        "about",   "above",    "after",   "again",      "against",
      "all",      "am",      "an",       "and",     "any",        "are",
      "as",       "at",      "be",       "because", "been",       "before",
      "being",    "below",   "between",  "both",    "but",        "by",
      "can",      "cannot",  "could",    "did",     "do",         "does",
      "doing",    "down",    "during",   "each",    "few",        "for",
      "from",     "further", "had",      "has",     "have",       "having",
      "he",       "her",     "here",     "hers",    "herself",    "him",
      "himself",  "his",     "how",      "i",       "if",         "in",
      "into",     "is",      "it",       "its",     "itself",     "just",
      "me",       "more",    "most",     "my",      "myself",     "no",
      "nor",      "not",     "now",      "of",      "off",        "on",
      "once",     "only",    "or",       "other",   "our",        "ours",
      "ourselves", "out",    "over",     "own",     "same",       "she",
      "should",   "so",      "some",     "such",    "than",       "that",
      "the",      "their",   "theirs",   "them",    "themselves", "then",
      "there",    "these",   "they",     "this",    "those",      "through",
      "to",       "too",     "under",    "until",   "up",         "very",
      "was",      "we",      "were",     "what",    "when",       "where",
      "which",    "while",   "who",      "whom",    "why",        "will",
      "with",     "would",   "you",      "your",    "yours",      "yourself",
      "yourselves"};
  return words;
}

std::uint64_t stopword_hash() {
  static const std::uint64_t hash = [] {
    std::string joined;
    for (const auto& w : stopword_list()) {
      joined += w;
      joined += '\n';
    }
    return text::fnv1a64(joined);
  }();
  return hash;
}

}  // namespace medsim::textsim
