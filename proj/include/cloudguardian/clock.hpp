// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <set>
#include <stop_token>

#include <cloudguardian/core_model.hpp>

namespace cloudguardian {

/// Wall-clock time source with an interruptible sleep, so the scheduler and
/// the engine can run against simulated time.
class Clock {
 public:
  using time_point = std::chrono::system_clock::time_point;

  virtual ~Clock() = default;
  virtual time_point now() const = 0;
  /// Returns false when woken by a stop request before the deadline.
  virtual bool sleep_until(time_point deadline, std::stop_token stop) = 0;

  Timestamp now_seconds() const { return floor_to_seconds(now()); }
};

class SystemClock final : public Clock {
 public:
  time_point now() const override { return std::chrono::system_clock::now(); }
  bool sleep_until(time_point deadline, std::stop_token stop) override;
};

/// Time only moves when advance() is called.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(time_point start = time_point{}) : now_(start) {}

  time_point now() const override;
  bool sleep_until(time_point deadline, std::stop_token stop) override;

  void advance(std::chrono::nanoseconds by);
  void set(time_point t);

  /// Blocks until some thread sleeps on a deadline strictly after now(),
  /// i.e. every sleeper has caught up with the current time.
  void wait_for_idle_sleeper();

 private:
  mutable std::mutex mutex_;
  std::condition_variable_any cv_;
  time_point now_;
  std::multiset<time_point> deadlines_;
};

}  // namespace cloudguardian
