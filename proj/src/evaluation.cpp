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

#include "medsim/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "medsim/error.hpp"

namespace medsim::metrics {

namespace {

void check_lengths(size_t a, size_t b, size_t min_len) {
  if (a != b)
    fail(errc::length_mismatch,
         "input lengths differ: " + std::to_string(a) + " vs " + std::to_string(b));
  if (a < min_len)
    fail(errc::length_mismatch,
         "need at least " + std::to_string(min_len) + " samples, got " + std::to_string(a));
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  check_lengths(x.size(), y.size(), 2);
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    fail(errc::constant_input, "correlation of a constant vector is undefined");
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<size_t> order(x.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return x[a] < x[b]; });

  std::vector<double> ranks(x.size(), 0.0);
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_lengths(x.size(), y.size(), 2);
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  return pearson(rx, ry);
}

std::pair<double, double> rmse_mae(std::span<const double> pred,
                                   std::span<const double> gold) {
  check_lengths(pred.size(), gold.size(), 1);
  double sq = 0.0, ab = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const double r = pred[i] - gold[i];
    sq += r * r;
    ab += std::abs(r);
  }
  const double n = static_cast<double>(pred.size());
  return {std::sqrt(sq / n), ab / n};
}

ZComparison z_compare(double r1, double r2, size_t n) {
  if (n < 4) fail(errc::degenerate_n, "z-comparison needs n >= 4, got " + std::to_string(n));
  if (std::abs(r1) >= 1.0 || std::abs(r2) >= 1.0)
    fail(errc::invalid_argument, "correlations must lie strictly inside (-1, 1)");

  ZComparison out;
  const double z1 = std::atanh(r1);
  const double z2 = std::atanh(r2);
  out.z = (z1 - z2) / std::sqrt(2.0 / (static_cast<double>(n) - 3.0));
  out.p = std::erfc(std::abs(out.z) / std::sqrt(2.0));  // two-sided normal tail
  out.significant = out.p < 0.05;
  return out;
}

MetricReport compute_report(std::span<const double> pred, std::span<const double> gold) {
  MetricReport report;
  std::tie(report.rmse, report.mae) = rmse_mae(pred, gold);
  report.n = pred.size();
  try {
    report.pearson = pearson(pred, gold);
    report.spearman = spearman(pred, gold);
  } catch (const Error& e) {
    if (e.code() != errc::constant_input && e.code() != errc::length_mismatch) throw;
  }
  return report;
}

}  // namespace medsim::metrics
