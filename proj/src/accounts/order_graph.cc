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

#include "thinkey/accounts/order_graph.h"

#include <unordered_map>

#include "absl/strings/str_cat.h"

namespace thinkey::accounts {

bool OrderGraph::HasCycle() const {
  // Kahn's algorithm: a cycle leaves vertices with nonzero in-degree.
  std::vector<std::uint32_t> indegree(vertices.size(), 0);
  for (const auto& out : edges) {
    for (std::uint32_t v : out) ++indegree[v];
  }
  std::vector<std::uint32_t> ready;
  for (std::uint32_t v = 0; v < vertices.size(); ++v) {
    if (indegree[v] == 0) ready.push_back(v);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    std::uint32_t v = ready.back();
    ready.pop_back();
    ++visited;
    for (std::uint32_t w : edges[v]) {
      if (--indegree[w] == 0) ready.push_back(w);
    }
  }
  return visited != vertices.size();
}

OrderGraph BuildOrderGraph(std::span<const ProcessingProcedure> sigma) {
  OrderGraph g;
  std::unordered_map<Hash256, std::uint32_t> send_vertex;
  std::unordered_map<Hash256, std::uint32_t> recv_vertex;
  auto add_vertex = [&g](OrderGraph::EventKind kind, const Hash256& m,
                         Address a) {
    g.vertices.push_back({kind, m, a});
    g.edges.emplace_back();
    return static_cast<std::uint32_t>(g.vertices.size() - 1);
  };

  for (const ProcessingProcedure& p : sigma) {
    std::vector<std::uint32_t> previous_step;  // events of step k-1
    for (const ProcedureStep& step : p.steps) {
      std::uint32_t recv =
          add_vertex(OrderGraph::EventKind::kRecv, step.received, p.account);
      recv_vertex.emplace(step.received, recv);
      for (std::uint32_t prev : previous_step) g.edges[prev].push_back(recv);
      previous_step.assign(1, recv);
      for (const Hash256& e : step.emitted) {
        std::uint32_t send =
            add_vertex(OrderGraph::EventKind::kSend, e, p.account);
        send_vertex.emplace(e, send);
        g.edges[recv].push_back(send);
        previous_step.push_back(send);
      }
    }
  }
  for (const auto& [id, send] : send_vertex) {
    auto it = recv_vertex.find(id);
    if (it != recv_vertex.end()) g.edges[send].push_back(it->second);
  }
  return g;
}

OrderVerdict ValidateOrder(std::span<const ProcessingProcedure> sigma,
                           const std::unordered_set<Hash256>& inputs) {
  std::unordered_set<Hash256> received;
  std::unordered_set<Hash256> emitted;
  for (const ProcessingProcedure& p : sigma) {
    for (const ProcedureStep& step : p.steps) {
      if (!received.insert(step.received).second) {
        return {OrderResult::kMalformed,
                absl::StrCat("message ", step.received.ToHex(),
                             " received twice")};
      }
      for (const Hash256& e : step.emitted) {
        if (!emitted.insert(e).second) {
          return {OrderResult::kMalformed,
                  absl::StrCat("message ", e.ToHex(), " emitted twice")};
        }
        if (inputs.contains(e)) {
          return {OrderResult::kMalformed,
                  absl::StrCat("input ", e.ToHex(), " also emitted")};
        }
      }
    }
  }
  for (const Hash256& r : received) {
    if (!inputs.contains(r) && !emitted.contains(r)) {
      return {OrderResult::kUnknownMessage,
              absl::StrCat("message ", r.ToHex(),
                           " received but never sent and not an input")};
    }
  }
  if (BuildOrderGraph(sigma).HasCycle()) {
    return {OrderResult::kCycle, "order graph has a cycle"};
  }
  return {};
}

std::string FormatSigma(
    std::span<const ProcessingProcedure> sigma,
    const std::function<std::string(const Hash256&)>& label) {
  std::string out;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    absl::StrAppend(&out, "σ_", i + 1, " = (");
    const auto& steps = sigma[i].steps;
    for (std::size_t k = 0; k < steps.size(); ++k) {
      if (k > 0) absl::StrAppend(&out, " | ");
      absl::StrAppend(&out, label(steps[k].received));
      for (std::size_t e = 0; e < steps[k].emitted.size(); ++e) {
        absl::StrAppend(&out, e == 0 ? ":" : ",", label(steps[k].emitted[e]));
      }
    }
    absl::StrAppend(&out, ")\n");
  }
  return out;
}

}  // namespace thinkey::accounts
