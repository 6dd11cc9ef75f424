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

#include "thinkey/analysis/analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "json.hpp"

namespace thinkey::analysis {

absl::StatusOr<double> Qos(double mean_confirm_ms, double target_ms) {
  if (!(mean_confirm_ms >= 0)) {
    return absl::InvalidArgumentError("confirmation time must be >= 0");
  }
  if (!(target_ms > 0)) {
    return absl::InvalidArgumentError("target confirmation time must be > 0");
  }
  return target_ms / (mean_confirm_ms + target_ms);
}

absl::StatusOr<double> Efficiency(double throughput, double qos, double cost) {
  if (!(cost > 0)) return absl::InvalidArgumentError("cost must be > 0");
  return throughput * qos / cost;
}

absl::StatusOr<Scalability> ScalabilityRatio(double f_scaled, double f_base) {
  if (!(f_base > 0)) {
    return absl::InvalidArgumentError("base efficiency must be > 0");
  }
  double psi = f_scaled / f_base;
  return Scalability{psi, psi >= 1.0};
}

const char* NodeScalingName(NodeScaling f) {
  return f == NodeScaling::kSqrt ? "sqrt" : "log";
}

std::optional<NodeScaling> ParseNodeScaling(const std::string& name) {
  if (name == "sqrt") return NodeScaling::kSqrt;
  if (name == "log") return NodeScaling::kLog;
  return std::nullopt;
}

absl::StatusOr<double> NodeSpeed(double r, NodeScaling f) {
  if (f == NodeScaling::kSqrt) {
    if (!(r > 0)) return absl::InvalidArgumentError("sqrt scaling needs r > 0");
    return std::sqrt(r);
  }
  if (!(r >= std::numbers::e)) {
    return absl::InvalidArgumentError(
        absl::StrCat("log scaling needs r >= e, got ", r));
  }
  return std::log(r);
}

absl::StatusOr<Speedup> ComputeSpeedup(double p, double k, double r,
                                       NodeScaling f) {
  if (!(p >= 0 && p <= 1)) return absl::InvalidArgumentError("p must be in [0, 1]");
  if (!(r >= 1 && r <= k)) {
    return absl::InvalidArgumentError("r must satisfy 1 <= r <= k");
  }
  absl::StatusOr<double> fr = NodeSpeed(r, f);
  if (!fr.ok()) return fr.status();
  double s = 1.0 / ((1.0 - p) / *fr + p * r / (*fr * k));
  return Speedup{s, s / k};
}

double Percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(values.size())));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

absl::StatusOr<Summary> Summarize(std::span<const PerfSample> samples) {
  if (samples.empty()) return absl::InvalidArgumentError("no samples");
  Summary s;
  SimTime start = std::numeric_limits<double>::infinity();
  SimTime end = -std::numeric_limits<double>::infinity();
  std::vector<double> times;
  for (const PerfSample& p : samples) {
    if (p.confirmation_times.size() != p.requests_completed) {
      return absl::InvalidArgumentError(
          "sample has a confirmation time count different from its requests");
    }
    start = std::min(start, p.t_start);
    end = std::max(end, p.t_end);
    s.requests += p.requests_completed;
    times.insert(times.end(), p.confirmation_times.begin(),
                 p.confirmation_times.end());
  }
  if (!(end > start)) return absl::InvalidArgumentError("empty time window");
  s.tps = static_cast<double>(s.requests) / ((end - start) / 1000.0);
  if (!times.empty()) {
    // Sorted summation keeps the mean independent of sample order.
    std::sort(times.begin(), times.end());
    s.mean_confirm_ms = std::accumulate(times.begin(), times.end(), 0.0) /
                        static_cast<double>(times.size());
    s.p50_confirm_ms = Percentile(times, 0.5);
    s.p95_confirm_ms = Percentile(times, 0.95);
  }
  return s;
}

absl::StatusOr<DurationStats> Describe(std::span<const double> values,
                                       std::size_t bins) {
  if (values.empty()) return absl::InvalidArgumentError("no values");
  if (bins == 0) return absl::InvalidArgumentError("bins must be positive");
  DurationStats d;
  d.count = values.size();
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  d.min = *lo;
  d.max = *hi;
  const double n = static_cast<double>(values.size());
  d.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0;
  for (double v : values) ss += (v - d.mean) * (v - d.mean);
  d.stddev = std::sqrt(ss / n);
  d.histogram.lo = d.min;
  if (d.max == d.min) {
    d.histogram.counts = {d.count};
    return d;
  }
  d.histogram.bin_width = (d.max - d.min) / static_cast<double>(bins);
  d.histogram.counts.assign(bins, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - d.min) / d.histogram.bin_width);
    ++d.histogram.counts[std::min(b, bins - 1)];
  }
  return d;
}

void WriteReportCsv(std::ostream& out, std::span<const ReportRow> rows) {
  out << kReportHeader << '\n';
  for (const ReportRow& r : rows) {
    out << absl::StrFormat("%u,%.6f,%.6f,%.6f,%.6f,%.6f\n", r.shard_count, r.tps,
                           r.mean_confirm_ms, r.p95_confirm_ms, r.cross_ratio,
                           r.epoch_ms);
  }
}

namespace {

struct RowBuilder {
  ReportRow row;
  PerfSample sample;
  std::vector<double> epochs;
  SimTime first_submit = std::numeric_limits<double>::infinity();
  SimTime last_confirm = -std::numeric_limits<double>::infinity();

  absl::StatusOr<ReportRow> Finish() {
    if (sample.requests_completed > 0) {
      sample.t_start = first_submit;
      sample.t_end = last_confirm;
      absl::StatusOr<Summary> s = Summarize(std::span(&sample, 1));
      if (!s.ok()) return s.status();
      row.tps = s->tps;
      row.mean_confirm_ms = s->mean_confirm_ms;
      row.p95_confirm_ms = s->p95_confirm_ms;
    }
    if (!epochs.empty()) {
      row.epoch_ms = std::accumulate(epochs.begin(), epochs.end(), 0.0) /
                     static_cast<double>(epochs.size());
    }
    return row;
  }
};

}  // namespace

absl::StatusOr<std::vector<ReportRow>> SummarizeTrace(std::istream& trace) {
  std::vector<ReportRow> rows;
  std::optional<RowBuilder> current;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(trace, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("type")) {
      return absl::InvalidArgumentError(
          absl::StrCat("trace line ", line_no, " is not a typed JSON object"));
    }
    const std::string type = j["type"].get<std::string>();
    try {
      if (type == "run") {
        if (current) {
          absl::StatusOr<ReportRow> r = current->Finish();
          if (!r.ok()) return r.status();
          rows.push_back(*r);
        }
        current.emplace();
        current->row.shard_count = j.at("shard_count").get<std::uint32_t>();
        current->row.cross_ratio = j.at("cross_ratio").get<double>();
        continue;
      }
      if (!current) {
        return absl::InvalidArgumentError(
            absl::StrCat("trace line ", line_no, " precedes any run record"));
      }
      if (type == "tx") {
        if (j.at("confirm_t").is_null()) continue;
        double submit = j.at("submit_t").get<double>();
        double confirm = j.at("confirm_t").get<double>();
        current->first_submit = std::min(current->first_submit, submit);
        current->last_confirm = std::max(current->last_confirm, confirm);
        current->sample.confirmation_times.push_back(confirm - submit);
        ++current->sample.requests_completed;
      } else if (type == "epoch") {
        if (!j.value("full", true)) continue;
        current->epochs.push_back(j.at("duration_ms").get<double>());
      }
    } catch (const nlohmann::json::exception& e) {
      return absl::InvalidArgumentError(
          absl::StrCat("trace line ", line_no, ": ", e.what()));
    }
  }
  if (!current) return absl::InvalidArgumentError("trace has no run record");
  absl::StatusOr<ReportRow> r = current->Finish();
  if (!r.ok()) return r.status();
  rows.push_back(*r);
  return rows;
}

}  // namespace thinkey::analysis
