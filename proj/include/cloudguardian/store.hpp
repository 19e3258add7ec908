// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <cloudguardian/core_model.hpp>
#include <cloudguardian/ids.hpp>
#include <cloudguardian/pool.hpp>

namespace cloudguardian {

enum class RowKind { Real, Placeholder };

/// A row of the records table. Real rows carry the record; placeholder rows
/// carry a surrogate id, how many records they stand for, and when.
struct RecordRow {
  std::string row_id;
  RowKind kind = RowKind::Real;
  std::optional<VehicleRecord> record;
  std::optional<SurrogateId> surrogate;
  std::optional<std::uint64_t> record_count;
  std::optional<Timestamp> anchored_at;
};

struct PoolConfig {
  std::size_t size = 4;
  std::chrono::milliseconds acquire_timeout{5000};
};

struct StoreConfig {
  std::filesystem::path path;
  PoolConfig pool{};
  /// fsync on commit. Benchmarks switch this off.
  bool durable = true;
  /// External SQL adapter DSN; not served by the embedded store.
  std::optional<std::string> dsn;
};

struct StoreCounts {
  std::uint64_t real = 0;
  std::uint64_t placeholders = 0;
  std::uint64_t anchored_records = 0;  // sum of placeholder record_count

  friend bool operator==(const StoreCounts&, const StoreCounts&) = default;
};

/// Contract every store adapter satisfies. Multi-row mutations are atomic and
/// isolated from concurrent queries.
class RecordStore {
 public:
  virtual ~RecordStore() = default;

  virtual std::string insert_record(const VehicleRecord& r) = 0;
  virtual std::vector<std::string> insert_records(std::span<const VehicleRecord> rs) = 0;

  /// Deletes the listed real rows and inserts one placeholder standing for them.
  virtual RecordRow swap_for_placeholder(std::span<const std::string> row_ids, const SurrogateId& surrogate,
                                         Timestamp anchored_at) = 0;
  /// One placeholder per row, all in a single transaction.
  virtual std::vector<RecordRow> swap_each_for_placeholder(
      std::span<const std::pair<std::string, SurrogateId>> swaps, Timestamp anchored_at) = 0;

  /// Deletes the placeholder and inserts the records as real rows.
  virtual std::uint64_t restore_records(const SurrogateId& surrogate, std::span<const VehicleRecord> records) = 0;
  /// Inserts records and decrements the placeholder's record_count by as many;
  /// the placeholder is deleted when the count reaches zero.
  virtual std::uint64_t restore_subset(const SurrogateId& surrogate, std::span<const VehicleRecord> records) = 0;
  /// Applies several restore_records in one transaction.
  virtual std::uint64_t restore_batch(
      std::span<const std::pair<SurrogateId, std::vector<VehicleRecord>>> batch) = 0;
  /// Applies several restore_subset in one transaction.
  virtual std::uint64_t restore_subsets(
      std::span<const std::pair<SurrogateId, std::vector<VehicleRecord>>> batch) = 0;

  /// Real rows matching the filter, sorted by (captured_at, plate).
  virtual std::vector<VehicleRecord> query(const RetrievalFilter& filter) = 0;
  virtual std::vector<RecordRow> real_rows() = 0;
  virtual std::vector<RecordRow> placeholders() = 0;
  /// Every row of every kind, in row order.
  virtual std::vector<RecordRow> dump() = 0;
  virtual StoreCounts counts() = 0;

  virtual PoolStats pool_stats() const = 0;
  /// Store calls plus rows read or written since construction; a stand-in
  /// for store-side CPU and disk work.
  virtual std::uint64_t op_count() const = 0;
};

/// File-backed reference store (SQLite). Deleted rows are overwritten on
/// disk, so swapped-out plates do not linger in free pages.
class EmbeddedStore final : public RecordStore {
 public:
  explicit EmbeddedStore(StoreConfig cfg);
  ~EmbeddedStore() override;

  std::string insert_record(const VehicleRecord& r) override;
  std::vector<std::string> insert_records(std::span<const VehicleRecord> rs) override;
  RecordRow swap_for_placeholder(std::span<const std::string> row_ids, const SurrogateId& surrogate,
                                 Timestamp anchored_at) override;
  std::vector<RecordRow> swap_each_for_placeholder(std::span<const std::pair<std::string, SurrogateId>> swaps,
                                                   Timestamp anchored_at) override;
  std::uint64_t restore_records(const SurrogateId& surrogate, std::span<const VehicleRecord> records) override;
  std::uint64_t restore_subset(const SurrogateId& surrogate, std::span<const VehicleRecord> records) override;
  std::uint64_t restore_batch(std::span<const std::pair<SurrogateId, std::vector<VehicleRecord>>> batch) override;
  std::uint64_t restore_subsets(std::span<const std::pair<SurrogateId, std::vector<VehicleRecord>>> batch) override;
  std::vector<VehicleRecord> query(const RetrievalFilter& filter) override;
  std::vector<RecordRow> real_rows() override;
  std::vector<RecordRow> placeholders() override;
  std::vector<RecordRow> dump() override;
  StoreCounts counts() override;
  PoolStats pool_stats() const override;
  std::uint64_t op_count() const override { return ops_.load(); }

  const StoreConfig& config() const noexcept { return cfg_; }

  class Connection;

 private:
  Pool<Connection>::Lease acquire();
  std::vector<RecordRow> rows_where(const std::string& where);

  StoreConfig cfg_;
  std::unique_ptr<Pool<Connection>> pool_;
  std::atomic<std::uint64_t> ops_{0};
};

std::unique_ptr<RecordStore> open_store(const StoreConfig& cfg);

}  // namespace cloudguardian
