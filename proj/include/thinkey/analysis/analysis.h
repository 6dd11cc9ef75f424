// Copyright 2026 The Thinkey Simulator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef THINKEY_ANALYSIS_ANALYSIS_H_
#define THINKEY_ANALYSIS_ANALYSIS_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "thinkey/common/types.h"

namespace thinkey::analysis {

// Normalized quality of service: Q = d_hat / (d + d_hat).
absl::StatusOr<double> Qos(double mean_confirm_ms, double target_ms);

// F = T * Q / S.
absl::StatusOr<double> Efficiency(double throughput, double qos, double cost);

struct Scalability {
  double psi = 0;
  bool perfect = false;  // psi >= 1
};
absl::StatusOr<Scalability> ScalabilityRatio(double f_scaled, double f_base);

struct ScaleConfig {
  std::uint64_t node_count = 1;
  std::uint64_t shard_count = 1;
  double target_confirm_ms = 1000;

  // One cost unit per node; network cost is not modelled.
  double cost() const { return static_cast<double>(node_count); }
};

enum class NodeScaling { kSqrt, kLog };

const char* NodeScalingName(NodeScaling f);
std::optional<NodeScaling> ParseNodeScaling(const std::string& name);

// f(r): sqrt(r), or the natural log for r >= e so that f(r) >= 1.
absl::StatusOr<double> NodeSpeed(double r, NodeScaling f);

struct Speedup {
  double speedup = 0;
  // speedup / k, the approximation of the scalability ratio.
  double psi_approx = 0;
};

// 1 / ((1 - p) / f(r) + p r / (f(r) k)) for a budget k spent as r per node
// on k / r nodes with a fraction p of the work parallel.
absl::StatusOr<Speedup> ComputeSpeedup(double p, double k, double r,
                                       NodeScaling f);

struct PerfSample {
  SimTime t_start = 0;
  SimTime t_end = 0;
  std::uint64_t requests_completed = 0;
  std::vector<double> confirmation_times;
};

struct Histogram {
  double lo = 0;
  double bin_width = 0;
  std::vector<std::uint64_t> counts;
};

struct Summary {
  double tps = 0;
  std::uint64_t requests = 0;
  double mean_confirm_ms = 0;
  double p50_confirm_ms = 0;
  double p95_confirm_ms = 0;
};

// Nearest-rank percentile of an unsorted sample; q in (0, 1].
double Percentile(std::vector<double> values, double q);

// Pools the samples: throughput is all completed requests over the span
// from the earliest start to the latest end. Order of samples is
// irrelevant.
absl::StatusOr<Summary> Summarize(std::span<const PerfSample> samples);

struct DurationStats {
  std::uint64_t count = 0;
  double mean = 0;
  double stddev = 0;  // population
  double min = 0;
  double max = 0;
  Histogram histogram;
};

// Mean, spread and an equal-width histogram over [min, max]. A constant
// sample yields one bin holding every value.
absl::StatusOr<DurationStats> Describe(std::span<const double> values,
                                       std::size_t bins = 10);

// One row of report.csv.
struct ReportRow {
  std::uint32_t shard_count = 1;
  double tps = 0;
  double mean_confirm_ms = 0;
  double p95_confirm_ms = 0;
  double cross_ratio = 0;
  double epoch_ms = 0;
};

inline constexpr char kReportHeader[] =
    "shard_count,tps,mean_confirm_ms,p95_confirm_ms,cross_ratio,epoch_ms";

void WriteReportCsv(std::ostream& out, std::span<const ReportRow> rows);

// Rebuilds report rows from a run trace (JSON lines). Each "run" record
// opens a row; "tx" records supply confirmation times and "epoch" records
// the epoch duration. Epochs flagged "full": false are skipped.
absl::StatusOr<std::vector<ReportRow>> SummarizeTrace(std::istream& trace);

}  // namespace thinkey::analysis

#endif  // THINKEY_ANALYSIS_ANALYSIS_H_
