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

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace medsim::metrics {

/// Sample Pearson correlation. Throws LengthMismatch (lengths differ or
/// < 2) and ConstantInput (either vector has zero variance).
double pearson(std::span<const double> x, std::span<const double> y);

/// Average ranks (ties share the mean rank), 1-based.
std::vector<double> average_ranks(std::span<const double> x);

/// Pearson of average-ranked data.
double spearman(std::span<const double> x, std::span<const double> y);

/// (rmse, mae); lengths must match and be >= 1.
std::pair<double, double> rmse_mae(std::span<const double> pred,
                                   std::span<const double> gold);

struct ZComparison {
  double z = 0.0;
  double p = 1.0;
  bool significant = false;  // p < 0.05, two-sided
};

/// Fisher-transform comparison of two correlations measured on n pairs,
/// treated as independent samples: z = (atanh r1 - atanh r2) / sqrt(2/(n-3)).
/// Throws DegenerateN (n < 4) and InvalidArgument (|r| >= 1).
ZComparison z_compare(double r1, double r2, size_t n);

/// Correlations are nullopt when an input is constant (correlation
/// undefined); rmse/mae are always present.
struct MetricReport {
  std::optional<double> pearson;
  std::optional<double> spearman;
  double rmse = 0.0;
  double mae = 0.0;
  size_t n = 0;
};

MetricReport compute_report(std::span<const double> pred, std::span<const double> gold);

}  // namespace medsim::metrics
