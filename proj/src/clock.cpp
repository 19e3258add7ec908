// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cloudguardian/clock.hpp>

#include <algorithm>

namespace cloudguardian {

bool SystemClock::sleep_until(time_point deadline, std::stop_token stop) {
  std::mutex m;
  std::condition_variable_any cv;
  std::unique_lock lock(m);
  cv.wait_until(lock, stop, deadline, [] { return false; });
  return !stop.stop_requested();
}

Clock::time_point ManualClock::now() const {
  std::lock_guard lock(mutex_);
  return now_;
}

bool ManualClock::sleep_until(time_point deadline, std::stop_token stop) {
  std::unique_lock lock(mutex_);
  if (now_ >= deadline) return !stop.stop_requested();
  const auto it = deadlines_.insert(deadline);
  cv_.notify_all();
  const bool reached = cv_.wait(lock, stop, [&] { return now_ >= deadline; });
  deadlines_.erase(it);
  cv_.notify_all();
  return reached;
}

void ManualClock::advance(std::chrono::nanoseconds by) {
  {
    std::lock_guard lock(mutex_);
    now_ += std::chrono::duration_cast<time_point::duration>(by);
  }
  cv_.notify_all();
}

void ManualClock::set(time_point t) {
  {
    std::lock_guard lock(mutex_);
    now_ = t;
  }
  cv_.notify_all();
}

void ManualClock::wait_for_idle_sleeper() {
  std::unique_lock lock(mutex_);
  cv_.wait(lock, [&] {
    return std::any_of(deadlines_.begin(), deadlines_.end(), [&](auto d) { return d > now_; });
  });
}

}  // namespace cloudguardian
