// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

namespace cloudguardian {

struct PoolStats {
  std::size_t in_use = 0;
  std::size_t idle = 0;
  std::size_t peak_in_use = 0;
  std::uint64_t total_acquires = 0;
};

/// Fixed-size pool of long-lived resources (database connections). All
/// resources are opened up front; acquire() blocks until one is idle or the
/// timeout elapses.
template <class Resource>
class Pool {
 public:
  class Lease {
   public:
    Lease(Lease&& other) noexcept : pool_(std::exchange(other.pool_, nullptr)), res_(std::move(other.res_)) {}
    Lease& operator=(Lease&&) = delete;
    Lease(const Lease&) = delete;
    ~Lease() {
      if (pool_) pool_->release(std::move(res_));
    }

    Resource& operator*() noexcept { return *res_; }
    Resource* operator->() noexcept { return res_.get(); }

   private:
    friend class Pool;
    Lease(Pool* pool, std::unique_ptr<Resource> res) : pool_(pool), res_(std::move(res)) {}

    Pool* pool_;
    std::unique_ptr<Resource> res_;
  };

  Pool(std::size_t size, const std::function<std::unique_ptr<Resource>()>& factory) : size_(size) {
    idle_.reserve(size);
    for (std::size_t i = 0; i < size; ++i) idle_.push_back(factory());
  }

  Pool(const Pool&) = delete;
  Pool& operator=(const Pool&) = delete;

  /// nullopt on timeout.
  std::optional<Lease> try_acquire(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    if (!cv_.wait_for(lock, timeout, [&] { return !idle_.empty(); })) return std::nullopt;
    auto res = std::move(idle_.back());
    idle_.pop_back();
    ++in_use_;
    ++total_acquires_;
    peak_in_use_ = std::max(peak_in_use_, in_use_);
    return Lease(this, std::move(res));
  }

  PoolStats stats() const {
    std::lock_guard lock(mutex_);
    return PoolStats{in_use_, idle_.size(), peak_in_use_, total_acquires_};
  }

  std::size_t size() const noexcept { return size_; }

 private:
  void release(std::unique_ptr<Resource> res) {
    {
      std::lock_guard lock(mutex_);
      idle_.push_back(std::move(res));
      --in_use_;
    }
    cv_.notify_one();
  }

  const std::size_t size_;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::vector<std::unique_ptr<Resource>> idle_;
  std::size_t in_use_ = 0;
  std::size_t peak_in_use_ = 0;
  std::uint64_t total_acquires_ = 0;
};

}  // namespace cloudguardian
