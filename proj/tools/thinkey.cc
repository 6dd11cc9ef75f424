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

// Command-line front end: scenario runs, workload generation, analytic
// calculators and trace summaries.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "json.hpp"
#include "thinkey/analysis/analysis.h"
#include "thinkey/committee/security.h"
#include "thinkey/scenario/scenario.h"

namespace {

namespace fs = std::filesystem;
using thinkey::scenario::Scenario;

int Fail(const absl::Status& s, int code) {
  std::cerr << "error: " << s.message() << '\n';
  return code;
}

// Flags that override fields of the loaded scenario.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> shard_count;
  std::optional<std::uint32_t> nodes_total;
  std::optional<std::uint32_t> committee_size;
  std::optional<std::uint32_t> epoch_rounds;
  std::optional<std::uint64_t> tx_count;
  std::optional<double> cross_chain_ratio;
  std::optional<std::uint32_t> block_size_limit;
  std::optional<std::uint32_t> degree;
  std::optional<std::uint32_t> full_fanout;
  std::optional<double> latency_min_ms;
  std::optional<double> latency_max_ms;
  std::optional<std::uint64_t> accounts;
  std::optional<double> redelivery_prob;

  void Register(CLI::App* app) {
    app->add_option("--seed", seed, "Scenario seed");
    app->add_option("--shard-count", shard_count, "Transaction chains");
    app->add_option("--nodes-total", nodes_total, "Registered nodes");
    app->add_option("--committee-size", committee_size, "Members per committee");
    app->add_option("--epoch-rounds", epoch_rounds, "Rounds per epoch");
    app->add_option("--tx-count", tx_count, "Payments in the workload");
    app->add_option("--cross-chain-ratio", cross_chain_ratio,
                    "Fraction of payments to another chain");
    app->add_option("--block-size-limit", block_size_limit,
                    "Messages per block, relays included");
    app->add_option("--degree", degree, "Peer degree");
    app->add_option("--full-fanout", full_fanout, "Full-message gossip fanout");
    app->add_option("--latency-min-ms", latency_min_ms, "Minimum link latency");
    app->add_option("--latency-max-ms", latency_max_ms, "Maximum link latency");
    app->add_option("--accounts", accounts, "Funded accounts");
    app->add_option("--redelivery-prob", redelivery_prob,
                    "Probability of redelivering each executed relay");
  }

  void Apply(nlohmann::json& j) const {
    auto set = [&j](const char* key, const auto& v) {
      if (v) j[key] = *v;
    };
    set("seed", seed);
    set("shard_count", shard_count);
    set("nodes_total", nodes_total);
    set("committee_size", committee_size);
    set("epoch_rounds", epoch_rounds);
    set("tx_count", tx_count);
    set("cross_chain_ratio", cross_chain_ratio);
    set("block_size_limit", block_size_limit);
    set("degree", degree);
    set("full_fanout", full_fanout);
    set("latency_min_ms", latency_min_ms);
    set("latency_max_ms", latency_max_ms);
    set("accounts", accounts);
    set("redelivery_prob", redelivery_prob);
  }
};

absl::Status WriteFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  if (!out) return absl::InternalError("cannot write " + path.string());
  return absl::OkStatus();
}

int RunCommand(const std::string& config_path, const std::string& workload_path,
               const std::string& out_dir, const Overrides& overrides) {
  nlohmann::json j = nlohmann::json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      return Fail(absl::NotFoundError("cannot open " + config_path),
                  thinkey::scenario::kExitIo);
    }
    j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) {
      return Fail(absl::InvalidArgumentError(config_path + ": malformed JSON"),
                  thinkey::scenario::kExitInvalidConfig);
    }
    if (j.is_object() && j.contains("scenario") && j.contains("code_version")) {
      j = j["scenario"];
    }
  }
  if (!j.is_object()) {
    return Fail(absl::InvalidArgumentError("scenario must be a JSON object"),
                thinkey::scenario::kExitInvalidConfig);
  }
  if (const char* env = std::getenv("THINKEY_SEED"); env != nullptr) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') {
      return Fail(absl::InvalidArgumentError("THINKEY_SEED: not an integer"),
                  thinkey::scenario::kExitInvalidConfig);
    }
    j["seed"] = static_cast<std::uint64_t>(v);
  }
  overrides.Apply(j);
  absl::StatusOr<Scenario> scenario = thinkey::scenario::ScenarioFromJson(j);
  if (!scenario.ok()) {
    return Fail(scenario.status(), thinkey::scenario::kExitInvalidConfig);
  }

  std::optional<thinkey::scenario::Workload> workload;
  if (!workload_path.empty()) {
    std::ifstream in(workload_path);
    if (!in) {
      return Fail(absl::NotFoundError("cannot open " + workload_path),
                  thinkey::scenario::kExitIo);
    }
    absl::StatusOr<thinkey::scenario::Workload> w =
        thinkey::scenario::ReadWorkloadJsonl(in);
    if (!w.ok()) return Fail(w.status(), thinkey::scenario::kExitInvalidConfig);
    workload = std::move(*w);
  }

  absl::StatusOr<thinkey::scenario::RunResult> result = thinkey::scenario::Run(
      *scenario, workload ? &*workload : nullptr);
  if (!result.ok()) {
    return Fail(result.status(), thinkey::scenario::kExitInvalidConfig);
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    return Fail(absl::InternalError("cannot create " + out_dir),
                thinkey::scenario::kExitIo);
  }
  const fs::path dir(out_dir);
  const std::string manifest =
      thinkey::scenario::MakeManifest(*scenario, *result).dump(2) + "\n";
  for (const auto& [name, content] :
       {std::pair<const char*, const std::string*>{"trace.jsonl",
                                                   &result->trace_jsonl},
        {"report.csv", &result->report_csv},
        {"manifest.json", &manifest}}) {
    if (absl::Status st = WriteFile(dir / name, *content); !st.ok()) {
      return Fail(st, thinkey::scenario::kExitIo);
    }
  }
  std::cout << result->report_csv;
  for (const thinkey::scenario::Violation& v : result->violations) {
    std::cerr << "violation[" << thinkey::scenario::ViolationKindName(v.kind)
              << "]: " << v.detail << '\n';
  }
  return result->exit_code();
}

int GenWorkloadCommand(std::uint64_t accounts, std::uint64_t tx_count,
                       std::uint32_t shards, double ratio, std::uint64_t seed,
                       const std::string& out_path) {
  absl::StatusOr<thinkey::scenario::Workload> w =
      thinkey::scenario::GenerateWorkload(accounts, tx_count, shards, ratio,
                                          seed);
  if (!w.ok()) return Fail(w.status(), thinkey::scenario::kExitInvalidConfig);
  std::ofstream out(out_path);
  thinkey::scenario::WriteWorkloadJsonl(out, *w);
  out.close();
  if (!out) {
    return Fail(absl::InternalError("cannot write " + out_path),
                thinkey::scenario::kExitIo);
  }
  nlohmann::ordered_json j;
  j["tx_count"] = w->payments.size();
  j["cross_fraction"] = thinkey::scenario::CrossFraction(*w);
  std::cout << j.dump() << '\n';
  return 0;
}

int CommitteeCommand(const thinkey::committee::FailureParams& p) {
  if (absl::Status st = thinkey::committee::ValidateFailureParams(p); !st.ok()) {
    return Fail(st, thinkey::scenario::kExitInvalidConfig);
  }
  thinkey::committee::Rational single =
      thinkey::committee::FailureProbabilityExact(p);
  thinkey::committee::Rational system =
      thinkey::committee::SystemFailureBoundExact(p.committees, single);
  nlohmann::ordered_json j;
  j["total_nodes"] = p.total_nodes;
  j["committee_size"] = p.committee_size;
  j["committees"] = p.committees;
  j["lambda"] = p.lambda;
  j["rho"] = p.rho;
  j["malicious"] = thinkey::committee::MaliciousCount(p);
  j["tolerated"] = thinkey::committee::ToleratedCount(p);
  j["p_single"] = single.convert_to<double>();
  j["p_single_exact"] = single.str();
  j["p_system_bound"] = system.convert_to<double>();
  j["p_system_bound_exact"] = system.str();
  std::cout << j.dump() << '\n';
  return 0;
}

int SpeedupCommand(double p, double k, double r, const std::string& f) {
  std::optional<thinkey::analysis::NodeScaling> scaling =
      thinkey::analysis::ParseNodeScaling(f);
  if (!scaling) {
    return Fail(absl::InvalidArgumentError("--f must be sqrt or log"),
                thinkey::scenario::kExitInvalidConfig);
  }
  absl::StatusOr<thinkey::analysis::Speedup> s =
      thinkey::analysis::ComputeSpeedup(p, k, r, *scaling);
  if (!s.ok()) return Fail(s.status(), thinkey::scenario::kExitInvalidConfig);
  nlohmann::ordered_json j;
  j["p"] = p;
  j["k"] = k;
  j["r"] = r;
  j["f"] = f;
  j["speedup"] = s->speedup;
  j["psi_approx"] = s->psi_approx;
  std::cout << j.dump() << '\n';
  return 0;
}

int SummarizeCommand(const std::string& in_path, const std::string& out_path) {
  std::ifstream in(in_path);
  if (!in) {
    return Fail(absl::NotFoundError("cannot open " + in_path),
                thinkey::scenario::kExitIo);
  }
  absl::StatusOr<std::vector<thinkey::analysis::ReportRow>> rows =
      thinkey::analysis::SummarizeTrace(in);
  if (!rows.ok()) return Fail(rows.status(), thinkey::scenario::kExitInvalidConfig);
  std::ostringstream csv;
  thinkey::analysis::WriteReportCsv(csv, *rows);
  if (out_path.empty() || out_path == "-") {
    std::cout << csv.str();
    return 0;
  }
  if (absl::Status st = WriteFile(out_path, csv.str()); !st.ok()) {
    return Fail(st, thinkey::scenario::kExitIo);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sharded-ledger simulator"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "Run a scenario");
  std::string config_path;
  std::string workload_path;
  std::string out_dir = ".";
  Overrides overrides;
  run->add_option("config", config_path,
                  "Scenario JSON, or a manifest of an earlier run");
  run->add_option("--workload", workload_path,
                  "Workload file from gen-workload (default: generated)");
  run->add_option("--out-dir", out_dir, "Directory for trace, report, manifest");
  overrides.Register(run);

  CLI::App* gen = app.add_subcommand("gen-workload", "Generate payments");
  std::uint64_t accounts = 1000;
  std::uint64_t tx_count = 10000;
  std::uint32_t shards = 4;
  double ratio = 0.2;
  std::uint64_t seed = 1;
  std::string gen_out = "workload.jsonl";
  gen->add_option("--accounts", accounts)->check(CLI::PositiveNumber);
  gen->add_option("--tx-count", tx_count);
  gen->add_option("--shard-count", shards)->check(CLI::PositiveNumber);
  gen->add_option("--cross-chain-ratio", ratio)->check(CLI::Range(0.0, 1.0));
  gen->add_option("--seed", seed);
  gen->add_option("--out", gen_out);

  CLI::App* analyze = app.add_subcommand("analyze", "Analytic calculators");
  analyze->require_subcommand(1);
  CLI::App* committee = analyze->add_subcommand(
      "committee", "Committee failure probability and union bound");
  thinkey::committee::FailureParams fp;
  fp.total_nodes = 400;
  fp.committee_size = 100;
  fp.lambda = 0.25;
  committee->add_option("--total-nodes", fp.total_nodes);
  committee->add_option("--committee-size", fp.committee_size);
  committee->add_option("--committees", fp.committees);
  committee->add_option("--lambda", fp.lambda);
  committee->add_option("--rho", fp.rho);
  CLI::App* speedup = analyze->add_subcommand("speedup", "Speedup formula");
  double p = 0.5;
  double k = 16;
  double r = 4;
  std::string f = "sqrt";
  speedup->add_option("--p", p);
  speedup->add_option("--k", k);
  speedup->add_option("--r", r);
  speedup->add_option("--f", f);

  CLI::App* summarize = app.add_subcommand("summarize", "Trace to report.csv");
  std::string sum_in;
  std::string sum_out = "-";
  summarize->add_option("--in", sum_in)->required();
  summarize->add_option("--out", sum_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : thinkey::scenario::kExitInvalidConfig;
  }

  if (run->parsed()) return RunCommand(config_path, workload_path, out_dir, overrides);
  if (gen->parsed()) {
    return GenWorkloadCommand(accounts, tx_count, shards, ratio, seed, gen_out);
  }
  if (committee->parsed()) return CommitteeCommand(fp);
  if (speedup->parsed()) return SpeedupCommand(p, k, r, f);
  if (summarize->parsed()) return SummarizeCommand(sum_in, sum_out);
  return thinkey::scenario::kExitInvalidConfig;
}
