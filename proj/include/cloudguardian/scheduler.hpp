// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <cloudguardian/clock.hpp>
#include <cloudguardian/sync_engine.hpp>

namespace cloudguardian {

enum class TickResult { Ran, Skipped, Failed };

struct TickRecord {
  std::uint64_t tick = 0;  // 1-based
  Clock::time_point due{};
  TickResult result = TickResult::Ran;
  std::string message;
};

/// Runs a task every `interval` of the injected clock on a background
/// thread. Ticks run one after another: a slow task postpones the following
/// ticks and they are then run back to back, never concurrently. A task
/// throwing NothingToAnchor counts as a skip; any other exception is a
/// failure. Neither stops the schedule.
class Scheduler {
 public:
  using Task = std::function<void()>;

  Scheduler(Clock& clock, std::chrono::nanoseconds interval, Task task);
  ~Scheduler();

  Scheduler(const Scheduler&) = delete;
  Scheduler& operator=(const Scheduler&) = delete;

  /// Halts before the next tick; a tick in progress finishes first.
  void stop();

  std::vector<TickRecord> log() const;
  std::uint64_t count(TickResult r) const;

 private:
  void run(std::stop_token stop, Clock::time_point start);

  Clock& clock_;
  std::chrono::nanoseconds interval_;
  Task task_;
  mutable std::mutex log_mutex_;
  std::vector<TickRecord> log_;
  std::jthread worker_;
};

/// Periodic anchoring of whatever real records the store holds.
std::unique_ptr<Scheduler> run_scheduler(SyncEngine& engine, std::chrono::nanoseconds interval, Protocol protocol,
                                         Clock& clock);

}  // namespace cloudguardian
