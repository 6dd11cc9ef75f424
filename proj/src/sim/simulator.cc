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

#include "thinkey/sim/simulator.h"

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace thinkey::sim {

absl::StatusOr<EventHandle> Simulator::Schedule(SimEvent event) {
  if (event.fire_time < now_) {
    return absl::InvalidArgumentError(
        absl::StrCat("event '", event.kind, "' scheduled at t=", event.fire_time,
                     " before current time ", now_));
  }
  event.sequence = next_sequence_++;
  EventHandle handle{event.sequence};
  live_.insert(event.sequence);
  queue_.push(std::move(event));
  return handle;
}

EventHandle Simulator::After(SimTime delay, NodeId node, std::string kind,
                             std::function<void()> action, std::string detail) {
  SimEvent ev;
  ev.fire_time = now_ + (delay > 0 ? delay : 0);
  ev.target_node = node;
  ev.kind = std::move(kind);
  ev.detail = std::move(detail);
  ev.action = std::move(action);
  // fire_time >= now_ by construction.
  return *Schedule(std::move(ev));
}

bool Simulator::Cancel(EventHandle handle) {
  if (live_.erase(handle.sequence) == 0) return false;
  cancelled_.insert(handle.sequence);
  return true;
}

std::vector<LogRecord> Simulator::RunUntil(SimTime t_end) {
  std::vector<LogRecord> processed;
  while (!queue_.empty() && queue_.top().fire_time <= t_end) {
    // The event is copied out before popping because handlers may schedule.
    SimEvent ev = queue_.top();
    queue_.pop();
    if (cancelled_.erase(ev.sequence) > 0) continue;
    live_.erase(ev.sequence);
    now_ = ev.fire_time;
    ++fired_;
    LogRecord rec{ev.fire_time, ev.target_node, ev.kind, ev.detail};
    if (ev.action) {
      ev.action();
    } else if (handler_) {
      handler_(ev);
    }
    if (record_log_) log_.push_back(rec);
    processed.push_back(std::move(rec));
  }
  return processed;
}

std::vector<LogRecord> Simulator::RunAll() {
  std::vector<LogRecord> all;
  while (!empty()) {
    SimTime next = queue_.top().fire_time;
    auto part = RunUntil(next);
    all.insert(all.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return all;
}

void WriteEventLogJsonl(std::ostream& out, const std::vector<LogRecord>& log) {
  for (const LogRecord& r : log) {
    nlohmann::ordered_json j;
    j["t"] = r.t;
    j["node"] = r.node;
    j["kind"] = r.kind;
    j["detail"] = r.detail;
    out << j.dump() << "\n";
  }
}

}  // namespace thinkey::sim
