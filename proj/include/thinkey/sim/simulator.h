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

#ifndef THINKEY_SIM_SIMULATOR_H_
#define THINKEY_SIM_SIMULATOR_H_

#include <any>
#include <cstdint>
#include <functional>
#include <ostream>
#include <queue>
#include <string>
#include <unordered_set>
#include <vector>

#include "absl/status/statusor.h"
#include "thinkey/common/types.h"

namespace thinkey::sim {

// A timestamped deliverable. `sequence` is assigned by the simulator and
// breaks ties between events with equal fire times.
struct SimEvent {
  SimTime fire_time = 0;
  NodeId target_node = 0;
  std::string kind;
  std::string detail;
  std::any body;
  std::function<void()> action;
  std::uint64_t sequence = 0;
};

struct EventHandle {
  std::uint64_t sequence = 0;
};

struct LogRecord {
  SimTime t = 0;
  NodeId node = 0;
  std::string kind;
  std::string detail;

  bool operator==(const LogRecord&) const = default;
};

// Single-threaded discrete-event engine over simulated milliseconds.
//
// Events fire in nondecreasing fire_time; equal times fire in the order
// they were scheduled. An event either carries an `action` closure, which
// is invoked, or is passed to the handler installed with SetHandler.
class Simulator {
 public:
  using Handler = std::function<void(const SimEvent&)>;

  explicit Simulator(bool record_log = true) : record_log_(record_log) {}

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  // Rejects events whose fire_time precedes now().
  absl::StatusOr<EventHandle> Schedule(SimEvent event);

  // Convenience wrapper: fire `action` at now() + delay on `node`.
  EventHandle After(SimTime delay, NodeId node, std::string kind,
                    std::function<void()> action, std::string detail = {});

  // Returns false when the event already fired or was already cancelled.
  bool Cancel(EventHandle handle);

  void SetHandler(Handler handler) { handler_ = std::move(handler); }

  // Processes every event with fire_time <= t_end and returns the records of
  // the events processed by this call, in processing order. Cancelled events
  // are skipped and not logged. now() is left at the last fired event time.
  std::vector<LogRecord> RunUntil(SimTime t_end);

  // Runs until the queue is empty.
  std::vector<LogRecord> RunAll();

  SimTime now() const { return now_; }
  std::size_t pending() const { return queue_.size() - cancelled_.size(); }
  bool empty() const { return pending() == 0; }
  std::uint64_t fired_count() const { return fired_; }

  // Full log of everything processed so far, when recording is enabled.
  const std::vector<LogRecord>& log() const { return log_; }

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      if (a.fire_time != b.fire_time) return a.fire_time > b.fire_time;
      return a.sequence > b.sequence;
    }
  };

  bool record_log_;
  SimTime now_ = 0;
  std::uint64_t next_sequence_ = 0;
  std::uint64_t fired_ = 0;
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> queue_;
  std::unordered_set<std::uint64_t> live_;
  std::unordered_set<std::uint64_t> cancelled_;
  Handler handler_;
  std::vector<LogRecord> log_;
};

// Line-delimited JSON export: one {t, node, kind, detail} object per line.
void WriteEventLogJsonl(std::ostream& out, const std::vector<LogRecord>& log);

}  // namespace thinkey::sim

#endif  // THINKEY_SIM_SIMULATOR_H_
