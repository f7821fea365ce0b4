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

#include "medsim/embedding.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "medsim/error.hpp"
#include "medsim/rng.hpp"
#include "medsim/text_sim.hpp"
#include "medsim/text_util.hpp"

namespace medsim::embed {

namespace {

constexpr std::uint64_t kWalkStream = 0x77616c6bULL;  // "walk"
constexpr std::uint64_t kInitStream = 0x696e6974ULL;  // "init"
constexpr std::uint64_t kTrainStream = 0x7472616eULL; // "tran"

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// -log(sigmoid(x)) computed stably for large |x|.
inline double log_sigmoid_loss(double x) {
  if (x > 0) return std::log1p(std::exp(-x));
  return -x + std::log1p(std::exp(x));
}

struct Vocab {
  std::vector<std::string> words;        // index -> token
  std::map<std::string, int> index;      // token -> index
  std::vector<std::int64_t> counts;      // index -> corpus count
  std::int64_t total_count = 0;

  std::vector<double> sampling_cdf;      // unigram^0.75 cumulative weights

  int lookup(const std::string& w) const {
    auto it = index.find(w);
    return it == index.end() ? -1 : it->second;
  }
};

Vocab build_vocab(const std::vector<std::vector<std::string>>& sentences,
                  int min_count) {
  std::map<std::string, std::int64_t> counts;
  for (const auto& sentence : sentences)
    for (const auto& token : sentence) ++counts[token];

  std::vector<std::pair<std::string, std::int64_t>> kept;
  for (auto& [token, count] : counts)
    if (count >= min_count) kept.emplace_back(token, count);
  if (kept.empty())
    fail(errc::empty_vocabulary,
         "no token reaches min_count=" + std::to_string(min_count));

  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocab vocab;
  for (auto& [token, count] : kept) {
    vocab.index.emplace(token, static_cast<int>(vocab.words.size()));
    vocab.words.push_back(token);
    vocab.counts.push_back(count);
    vocab.total_count += count;
  }

  vocab.sampling_cdf.resize(vocab.words.size());
  double cum = 0.0;
  for (size_t i = 0; i < vocab.counts.size(); ++i) {
    cum += std::pow(static_cast<double>(vocab.counts[i]), 0.75);
    vocab.sampling_cdf[i] = cum;
  }
  return vocab;
}

int draw_negative(const Vocab& vocab, rng::Generator& gen) {
  double r = gen.next_double() * vocab.sampling_cdf.back();
  auto it = std::upper_bound(vocab.sampling_cdf.begin(), vocab.sampling_cdf.end(), r);
  if (it == vocab.sampling_cdf.end()) --it;
  return static_cast<int>(it - vocab.sampling_cdf.begin());
}

}  // namespace

const char* mode_name(Mode m) { return m == Mode::hierarchy ? "hierarchy" : "text"; }

Mode mode_from_string(const std::string& name) {
  if (name == "hierarchy") return Mode::hierarchy;
  if (name == "text") return Mode::text;
  fail(errc::config_error, "embedding mode must be 'hierarchy' or 'text', got '" + name + "'");
}

void SgnsConfig::validate() const {
  if (dimension < 2) fail(errc::config_error, "sgns dimension must be >= 2");
  if (window < 1) fail(errc::config_error, "sgns window must be >= 1");
  if (negatives < 1) fail(errc::config_error, "sgns negatives must be >= 1");
  if (epochs < 1) fail(errc::config_error, "sgns epochs must be >= 1");
  if (min_count < 1) fail(errc::config_error, "sgns min_count must be >= 1");
  if (!(lr_initial > lr_final) || !(lr_final > 0.0))
    fail(errc::config_error, "sgns learning rate must satisfy initial > final > 0");
  if (subsample < 0.0) fail(errc::config_error, "sgns subsample must be >= 0");
  if (workers < 1) fail(errc::config_error, "sgns workers must be >= 1");
}

std::uint64_t SgnsConfig::content_hash(Mode mode) const {
  std::ostringstream os;
  os << mode_name(mode) << '|' << dimension << '|' << window << '|' << negatives
     << '|' << epochs << '|' << lr_initial << '|' << lr_final << '|' << min_count
     << '|' << subsample << '|' << seed;
  return text::fnv1a64(os.str());
}

std::vector<std::vector<std::string>> generate_walks(const kg::TaxonomyGraph& graph,
                                                     const WalkConfig& cfg) {
  if (cfg.walks_per_node < 1) fail(errc::config_error, "walks_per_node must be >= 1");
  if (cfg.walk_length < 2) fail(errc::config_error, "walk_length must be >= 2");
  if (graph.node_labels.empty()) fail(errc::empty_graph, "taxonomy has no nodes");

  std::vector<std::string> nodes;
  nodes.reserve(graph.node_labels.size());
  for (const auto& [id, label] : graph.node_labels) {
    (void)label;
    nodes.push_back(id);
  }

  std::map<std::string, std::vector<std::string>> adjacency;
  for (const auto& [parent, child] : graph.edges) {
    adjacency[parent].push_back(child);
    adjacency[child].push_back(parent);
  }
  for (auto& [id, neighbors] : adjacency) {
    (void)id;
    std::sort(neighbors.begin(), neighbors.end());
    neighbors.erase(std::unique(neighbors.begin(), neighbors.end()), neighbors.end());
  }

  std::vector<std::vector<std::string>> walks;
  walks.reserve(nodes.size() * static_cast<size_t>(cfg.walks_per_node));
  for (size_t ni = 0; ni < nodes.size(); ++ni) {
    for (int w = 0; w < cfg.walks_per_node; ++w) {
      rng::Generator gen(rng::derive_seed(cfg.seed ^ kWalkStream, ni, static_cast<std::uint64_t>(w)));
      std::vector<std::string> walk;
      walk.reserve(static_cast<size_t>(cfg.walk_length));
      std::string current = nodes[ni];
      walk.push_back(current);
      for (int step = 1; step < cfg.walk_length; ++step) {
        auto it = adjacency.find(current);
        if (it == adjacency.end() || it->second.empty()) break;  // isolated node
        current = it->second[gen.below(it->second.size())];
        walk.push_back(current);
      }
      walks.push_back(std::move(walk));
    }
  }
  return walks;
}

SgnsGradients sgns_loss_and_grad(std::span<const double> center,
                                 std::span<const double> positive,
                                 const std::vector<std::vector<double>>& negatives) {
  const size_t dim = center.size();
  SgnsGradients out;
  out.center.assign(dim, 0.0);
  out.positive.assign(dim, 0.0);
  out.negatives.assign(negatives.size(), std::vector<double>(dim, 0.0));

  double dot = 0.0;
  for (size_t d = 0; d < dim; ++d) dot += center[d] * positive[d];
  out.loss += log_sigmoid_loss(dot);
  const double g_pos = sigmoid(dot) - 1.0;
  for (size_t d = 0; d < dim; ++d) {
    out.center[d] += g_pos * positive[d];
    out.positive[d] += g_pos * center[d];
  }

  for (size_t k = 0; k < negatives.size(); ++k) {
    double ndot = 0.0;
    for (size_t d = 0; d < dim; ++d) ndot += center[d] * negatives[k][d];
    out.loss += log_sigmoid_loss(-ndot);
    const double g_neg = sigmoid(ndot);
    for (size_t d = 0; d < dim; ++d) {
      out.center[d] += g_neg * negatives[k][d];
      out.negatives[k][d] += g_neg * center[d];
    }
  }
  return out;
}

EmbeddingTable train_sgns(const std::vector<std::vector<std::string>>& sentences,
                          const SgnsConfig& cfg, Mode mode, TrainStats* stats) {
  cfg.validate();
  Vocab vocab = build_vocab(sentences, cfg.min_count);
  const int dim = cfg.dimension;
  const size_t vsize = vocab.words.size();

  // Sentences mapped to vocabulary indices, out-of-vocabulary tokens dropped.
  std::vector<std::vector<int>> corpus;
  corpus.reserve(sentences.size());
  std::int64_t corpus_tokens = 0;
  for (const auto& sentence : sentences) {
    std::vector<int> ids;
    ids.reserve(sentence.size());
    for (const auto& token : sentence) {
      int idx = vocab.lookup(token);
      if (idx >= 0) ids.push_back(idx);
    }
    corpus_tokens += static_cast<std::int64_t>(ids.size());
    corpus.push_back(std::move(ids));
  }

  std::vector<float> input(vsize * static_cast<size_t>(dim));
  std::vector<float> output(vsize * static_cast<size_t>(dim), 0.0f);
  {
    rng::Generator gen(rng::derive_seed(cfg.seed ^ kInitStream, 0));
    for (auto& v : input)
      v = static_cast<float>((gen.next_double() - 0.5) / dim);
  }

  const std::int64_t total_schedule =
      std::max<std::int64_t>(1, corpus_tokens * cfg.epochs);
  std::atomic<std::int64_t> processed{0};
  std::vector<double> epoch_loss_sum(static_cast<size_t>(cfg.epochs), 0.0);
  std::vector<std::int64_t> epoch_loss_count(static_cast<size_t>(cfg.epochs), 0);

  auto worker_fn = [&](int worker_id, double* loss_sum, std::int64_t* loss_count) {
    rng::Generator gen(rng::derive_seed(cfg.seed ^ kTrainStream,
                                        static_cast<std::uint64_t>(worker_id)));
    std::vector<double> center_grad(static_cast<size_t>(dim));
    std::vector<int> kept;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      for (size_t si = worker_id; si < corpus.size();
           si += static_cast<size_t>(cfg.workers)) {
        const std::vector<int>& sentence = corpus[si];
        if (sentence.empty()) continue;

        std::int64_t done =
            processed.fetch_add(static_cast<std::int64_t>(sentence.size())) ;
        double progress = static_cast<double>(done) / static_cast<double>(total_schedule);
        double lr = cfg.lr_initial + (cfg.lr_final - cfg.lr_initial) * std::min(1.0, progress);

        kept.clear();
        for (int idx : sentence) {
          if (cfg.subsample > 0.0) {
            double freq = static_cast<double>(vocab.counts[static_cast<size_t>(idx)]) /
                          static_cast<double>(vocab.total_count);
            double keep = (std::sqrt(freq / cfg.subsample) + 1.0) * cfg.subsample / freq;
            if (keep < 1.0 && gen.next_double() > keep) continue;
          }
          kept.push_back(idx);
        }

        for (size_t pos = 0; pos < kept.size(); ++pos) {
          // word2vec-style shrunk window: effective size uniform in [1, window]
          int eff = cfg.window - static_cast<int>(gen.below(static_cast<std::uint64_t>(cfg.window)));
          size_t lo = pos >= static_cast<size_t>(eff) ? pos - static_cast<size_t>(eff) : 0;
          size_t hi = std::min(kept.size() - 1, pos + static_cast<size_t>(eff));
          const int center = kept[pos];
          float* v = &input[static_cast<size_t>(center) * dim];

          for (size_t ctx = lo; ctx <= hi; ++ctx) {
            if (ctx == pos) continue;
            const int positive = kept[ctx];
            std::fill(center_grad.begin(), center_grad.end(), 0.0);
            double pair_loss = 0.0;

            for (int k = 0; k <= cfg.negatives; ++k) {
              int target;
              double label;
              if (k == 0) {
                target = positive;
                label = 1.0;
              } else {
                target = draw_negative(vocab, gen);
                if (target == positive) continue;
                label = 0.0;
              }
              float* u = &output[static_cast<size_t>(target) * dim];
              double dot = 0.0;
              for (int d = 0; d < dim; ++d) dot += static_cast<double>(v[d]) * u[d];
              pair_loss += label > 0.5 ? log_sigmoid_loss(dot) : log_sigmoid_loss(-dot);
              const double g = sigmoid(dot) - label;
              for (int d = 0; d < dim; ++d) {
                center_grad[d] += g * u[d];
                u[d] -= static_cast<float>(lr * g * v[d]);
              }
            }
            for (int d = 0; d < dim; ++d)
              v[d] -= static_cast<float>(lr * center_grad[d]);
            loss_sum[epoch] += pair_loss;
            ++loss_count[epoch];
          }
        }
      }
    }
  };

  if (cfg.workers == 1) {
    worker_fn(0, epoch_loss_sum.data(), epoch_loss_count.data());
  } else {
    std::vector<std::vector<double>> sums(static_cast<size_t>(cfg.workers),
                                          std::vector<double>(cfg.epochs, 0.0));
    std::vector<std::vector<std::int64_t>> counts(
        static_cast<size_t>(cfg.workers), std::vector<std::int64_t>(cfg.epochs, 0));
    std::vector<std::thread> threads;
    for (int w = 0; w < cfg.workers; ++w)
      threads.emplace_back(worker_fn, w, sums[w].data(), counts[w].data());
    for (auto& t : threads) t.join();
    for (int w = 0; w < cfg.workers; ++w)
      for (int e = 0; e < cfg.epochs; ++e) {
        epoch_loss_sum[e] += sums[w][e];
        epoch_loss_count[e] += counts[w][e];
      }
  }

  EmbeddingTable table;
  table.mode = mode;
  table.dimension = dim;
  table.config_hash = cfg.content_hash(mode);
  {
    std::string joined;
    for (const auto& sentence : sentences) {
      for (const auto& token : sentence) {
        joined += token;
        joined += ' ';
      }
      joined += '\n';
    }
    table.corpus_hash = text::fnv1a64(joined);
  }
  for (size_t i = 0; i < vsize; ++i) {
    std::vector<float> vec(input.begin() + static_cast<long>(i) * dim,
                           input.begin() + static_cast<long>(i + 1) * dim);
    table.vectors.emplace(vocab.words[i], std::move(vec));
  }

  if (stats) {
    stats->vocab_size = vsize;
    stats->epoch_loss.clear();
    for (int e = 0; e < cfg.epochs; ++e)
      stats->epoch_loss.push_back(
          epoch_loss_count[e] > 0 ? epoch_loss_sum[e] / static_cast<double>(epoch_loss_count[e])
                                  : 0.0);
  }
  return table;
}

std::optional<std::vector<float>> drug_vector(const EmbeddingTable& table,
                                              const kg::DrugRecord& drug, Mode mode) {
  if (table.mode != mode)
    fail(errc::mode_mismatch,
         std::string("embedding table holds ") + mode_name(table.mode) +
             " vectors, requested " + mode_name(mode));

  if (mode == Mode::hierarchy) {
    if (!drug.taxonomy_node) return std::nullopt;
    auto it = table.vectors.find(*drug.taxonomy_node);
    if (it == table.vectors.end()) return std::nullopt;
    return it->second;
  }

  auto it = table.vectors.find(text::lower(text::trim(drug.name)));
  if (it != table.vectors.end()) return it->second;

  std::vector<float> mean(static_cast<size_t>(table.dimension), 0.0f);
  int found = 0;
  for (const auto& token : textsim::tokenize(drug.description)) {
    auto tok_it = table.vectors.find(token);
    if (tok_it == table.vectors.end()) continue;
    for (int d = 0; d < table.dimension; ++d) mean[static_cast<size_t>(d)] += tok_it->second[static_cast<size_t>(d)];
    ++found;
  }
  if (found == 0) return std::nullopt;
  for (auto& v : mean) v /= static_cast<float>(found);
  return mean;
}

std::optional<double> embedding_similarity(const EmbeddingTable& table,
                                           const kg::DrugRecord& d1,
                                           const kg::DrugRecord& d2, Mode mode) {
  auto v1 = drug_vector(table, d1, mode);
  auto v2 = drug_vector(table, d2, mode);
  if (!v1 || !v2) return std::nullopt;

  double dot = 0.0, n1 = 0.0, n2 = 0.0;
  for (size_t d = 0; d < v1->size(); ++d) {
    dot += static_cast<double>((*v1)[d]) * (*v2)[d];
    n1 += static_cast<double>((*v1)[d]) * (*v1)[d];
    n2 += static_cast<double>((*v2)[d]) * (*v2)[d];
  }
  if (n1 == 0.0 || n2 == 0.0) return std::nullopt;
  double c = dot / (std::sqrt(n1) * std::sqrt(n2));
  return std::clamp((c + 1.0) / 2.0, 0.0, 1.0);
}

void write_table(const EmbeddingTable& table, std::ostream& os) {
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(table.config_hash));
  os << "dim=" << table.dimension << " mode=" << mode_name(table.mode)
     << " config=" << hash << '\n';
  for (const auto& [key, vec] : table.vectors) {
    os << key;
    for (float v : vec) os << '\t' << text::format_g9(static_cast<double>(v));
    os << '\n';
  }
}

EmbeddingTable read_table(std::istream& is) {
  EmbeddingTable table;
  std::string header;
  if (!std::getline(is, header))
    fail(errc::malformed_line, "embeddings file is empty");

  int dim = 0;
  char mode_buf[32] = {0};
  char hash_buf[32] = {0};
  if (std::sscanf(header.c_str(), "dim=%d mode=%31s config=%31s", &dim, mode_buf,
                  hash_buf) != 3 ||
      dim < 1)
    fail(errc::malformed_line, "bad embeddings header: " + header);
  table.dimension = dim;
  table.mode = mode_from_string(mode_buf);
  table.config_hash = std::strtoull(hash_buf, nullptr, 16);

  std::string line;
  long line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = text::split(line, '\t');
    if (fields.size() != static_cast<size_t>(dim) + 1)
      fail(errc::wrong_column_count,
           "embeddings line " + std::to_string(line_no) + ": expected " +
               std::to_string(dim + 1) + " fields",
           line_no);
    std::vector<float> vec(static_cast<size_t>(dim));
    for (int d = 0; d < dim; ++d) {
      try {
        vec[static_cast<size_t>(d)] = std::stof(fields[static_cast<size_t>(d) + 1]);
      } catch (const std::exception&) {
        fail(errc::malformed_line,
             "embeddings line " + std::to_string(line_no) + ": bad number", line_no);
      }
    }
    table.vectors.emplace(fields[0], std::move(vec));
  }
  return table;
}

}  // namespace medsim::embed
