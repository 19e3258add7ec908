// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cloudguardian/error.hpp>
#include <cloudguardian/scheduler.hpp>

#include <algorithm>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace cloudguardian {

Scheduler::Scheduler(Clock& clock, std::chrono::nanoseconds interval, Task task)
    : clock_(clock), interval_(interval), task_(std::move(task)) {
  if (interval_ <= std::chrono::nanoseconds::zero()) throw std::invalid_argument("scheduler interval must be > 0");
  const auto start = clock_.now();
  worker_ = std::jthread([this, start](std::stop_token st) { run(st, start); });
}

Scheduler::~Scheduler() { stop(); }

void Scheduler::stop() {
  worker_.request_stop();
  if (worker_.joinable()) worker_.join();
}

void Scheduler::run(std::stop_token stop, Clock::time_point start) {
  auto due = start + std::chrono::duration_cast<Clock::time_point::duration>(interval_);
  for (std::uint64_t tick = 1;; ++tick) {
    if (!clock_.sleep_until(due, stop) || stop.stop_requested()) return;
    TickRecord rec{tick, due, TickResult::Ran, {}};
    try {
      task_();
    } catch (const Error& e) {
      rec.result = e.code() == ErrorCode::NothingToAnchor ? TickResult::Skipped : TickResult::Failed;
      rec.message = e.what();
    } catch (const std::exception& e) {
      rec.result = TickResult::Failed;
      rec.message = e.what();
    }
    if (rec.result == TickResult::Skipped)
      spdlog::info("scheduler tick {} skipped: {}", tick, rec.message);
    else if (rec.result == TickResult::Failed)
      spdlog::warn("scheduler tick {} failed: {}", tick, rec.message);
    {
      std::lock_guard lock(log_mutex_);
      log_.push_back(std::move(rec));
    }
    due += std::chrono::duration_cast<Clock::time_point::duration>(interval_);
  }
}

std::vector<TickRecord> Scheduler::log() const {
  std::lock_guard lock(log_mutex_);
  return log_;
}

std::uint64_t Scheduler::count(TickResult r) const {
  std::lock_guard lock(log_mutex_);
  return static_cast<std::uint64_t>(
      std::count_if(log_.begin(), log_.end(), [r](const TickRecord& t) { return t.result == r; }));
}

std::unique_ptr<Scheduler> run_scheduler(SyncEngine& engine, std::chrono::nanoseconds interval, Protocol protocol,
                                         Clock& clock) {
  return std::make_unique<Scheduler>(clock, interval, [&engine, protocol] { engine.anchor(protocol); });
}

}  // namespace cloudguardian
