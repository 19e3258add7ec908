// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cloudguardian/error.hpp>
#include <cloudguardian/store.hpp>

#include <charconv>
#include <map>

#include <sqlite3.h>

namespace cloudguardian {

namespace {

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS records (
  row_id       INTEGER PRIMARY KEY AUTOINCREMENT,
  kind         INTEGER NOT NULL,
  plate        TEXT,
  device_id    TEXT,
  captured_at  INTEGER,
  surrogate_id TEXT UNIQUE,
  record_count INTEGER,
  anchored_at  INTEGER,
  CHECK ((kind = 0 AND plate IS NOT NULL AND device_id IS NOT NULL AND captured_at IS NOT NULL
          AND surrogate_id IS NULL AND record_count IS NULL AND anchored_at IS NULL)
      OR (kind = 1 AND plate IS NULL AND device_id IS NULL AND captured_at IS NULL
          AND surrogate_id IS NOT NULL AND record_count >= 1 AND anchored_at IS NOT NULL))
);
CREATE INDEX IF NOT EXISTS records_kind_time ON records (kind, captured_at);
)sql";

constexpr int kReal = 0;

std::int64_t to_epoch(Timestamp t) { return t.time_since_epoch().count(); }
Timestamp from_epoch(std::int64_t s) { return Timestamp{std::chrono::seconds{s}}; }

std::int64_t parse_row_id(const std::string& row_id) {
  std::int64_t v = 0;
  const auto* end = row_id.data() + row_id.size();
  const auto [ptr, ec] = std::from_chars(row_id.data(), end, v);
  if (ec != std::errc{} || ptr != end || row_id.empty())
    throw Error(ErrorCode::UnknownRow, "no such row: '" + row_id + "'");
  return v;
}

}  // namespace

class EmbeddedStore::Connection {
 public:
  Connection(const StoreConfig& cfg) {
    const int rc = sqlite3_open_v2(cfg.path.c_str(), &db_,
                                   SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_NOMUTEX, nullptr);
    if (rc != SQLITE_OK) {
      std::string msg = db_ ? sqlite3_errmsg(db_) : sqlite3_errstr(rc);
      sqlite3_close(db_);
      throw Error(ErrorCode::StoreUnavailable, "open " + cfg.path.string() + ": " + msg);
    }
    sqlite3_busy_timeout(db_, static_cast<int>(cfg.pool.acquire_timeout.count()));
    exec("PRAGMA secure_delete = ON");
    exec("PRAGMA journal_mode = DELETE");
    exec(cfg.durable ? "PRAGMA synchronous = FULL" : "PRAGMA synchronous = OFF");
    exec(kSchema);
  }

  ~Connection() {
    for (auto& [sql, stmt] : cache_) sqlite3_finalize(stmt);
    sqlite3_close(db_);
  }

  Connection(const Connection&) = delete;
  Connection& operator=(const Connection&) = delete;

  void exec(const char* sql) {
    char* err = nullptr;
    if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
      std::string msg = err ? err : "unknown error";
      sqlite3_free(err);
      throw Error(ErrorCode::StoreUnavailable, msg);
    }
  }

  /// Resets its statement on scope exit so no read transaction stays open.
  class Stmt {
   public:
    explicit Stmt(sqlite3_stmt* s) : s_(s) {}
    Stmt(const Stmt&) = delete;
    Stmt& operator=(const Stmt&) = delete;
    ~Stmt() { sqlite3_reset(s_); }
    operator sqlite3_stmt*() const noexcept { return s_; }

   private:
    sqlite3_stmt* s_;
  };

  /// Cached prepared statement, reset and unbound.
  Stmt prepare(const std::string& sql) {
    auto it = cache_.find(sql);
    if (it == cache_.end()) {
      sqlite3_stmt* stmt = nullptr;
      if (sqlite3_prepare_v2(db_, sql.c_str(), -1, &stmt, nullptr) != SQLITE_OK)
        throw Error(ErrorCode::StoreUnavailable, sqlite3_errmsg(db_));
      it = cache_.emplace(sql, stmt).first;
    }
    sqlite3_reset(it->second);
    sqlite3_clear_bindings(it->second);
    return Stmt(it->second);
  }

  /// SQLITE_ROW or SQLITE_DONE; anything else becomes StoreUnavailable.
  int step(sqlite3_stmt* stmt) {
    const int rc = sqlite3_step(stmt);
    if (rc != SQLITE_ROW && rc != SQLITE_DONE) throw Error(ErrorCode::StoreUnavailable, sqlite3_errmsg(db_));
    return rc;
  }

  std::int64_t changes() const { return sqlite3_changes(db_); }
  std::int64_t last_rowid() const { return sqlite3_last_insert_rowid(db_); }

  std::int64_t insert_real(const VehicleRecord& r) {
    auto st = prepare("INSERT INTO records (kind, plate, device_id, captured_at) VALUES (0, ?, ?, ?)");
    sqlite3_bind_text(st, 1, r.plate.data(), static_cast<int>(r.plate.size()), SQLITE_TRANSIENT);
    sqlite3_bind_text(st, 2, r.device_id.data(), static_cast<int>(r.device_id.size()), SQLITE_TRANSIENT);
    sqlite3_bind_int64(st, 3, to_epoch(r.captured_at));
    step(st);
    return last_rowid();
  }

  RecordRow insert_placeholder(const SurrogateId& surrogate, std::uint64_t count, Timestamp anchored_at) {
    auto st = prepare(
        "INSERT INTO records (kind, surrogate_id, record_count, anchored_at) VALUES (1, ?, ?, ?)");
    sqlite3_bind_text(st, 1, surrogate.str().c_str(), -1, SQLITE_TRANSIENT);
    sqlite3_bind_int64(st, 2, static_cast<std::int64_t>(count));
    sqlite3_bind_int64(st, 3, to_epoch(anchored_at));
    if (sqlite3_step(st) != SQLITE_DONE) {
      const bool dup = sqlite3_extended_errcode(db_) == SQLITE_CONSTRAINT_UNIQUE;
      throw Error(dup ? ErrorCode::UnknownSurrogate : ErrorCode::StoreUnavailable,
                  dup ? "surrogate already in use: " + surrogate.str() : std::string(sqlite3_errmsg(db_)));
    }
    return RecordRow{std::to_string(last_rowid()), RowKind::Placeholder, std::nullopt, surrogate, count, anchored_at};
  }

  void delete_real(const std::string& row_id) {
    auto st = prepare("DELETE FROM records WHERE row_id = ? AND kind = 0");
    sqlite3_bind_int64(st, 1, parse_row_id(row_id));
    step(st);
    if (changes() != 1) throw Error(ErrorCode::UnknownRow, "no real row with id " + row_id);
  }

  /// (row_id, record_count) of the placeholder, or UnknownSurrogate.
  std::pair<std::int64_t, std::uint64_t> find_placeholder(const SurrogateId& surrogate) {
    auto st = prepare("SELECT row_id, record_count FROM records WHERE kind = 1 AND surrogate_id = ?");
    sqlite3_bind_text(st, 1, surrogate.str().c_str(), -1, SQLITE_TRANSIENT);
    if (step(st) != SQLITE_ROW) throw Error(ErrorCode::UnknownSurrogate, surrogate.str());
    return {sqlite3_column_int64(st, 0), static_cast<std::uint64_t>(sqlite3_column_int64(st, 1))};
  }

  void delete_row(std::int64_t row_id) {
    auto st = prepare("DELETE FROM records WHERE row_id = ?");
    sqlite3_bind_int64(st, 1, row_id);
    step(st);
  }

  void set_count(std::int64_t row_id, std::uint64_t count) {
    auto st = prepare("UPDATE records SET record_count = ? WHERE row_id = ?");
    sqlite3_bind_int64(st, 1, static_cast<std::int64_t>(count));
    sqlite3_bind_int64(st, 2, row_id);
    step(st);
  }

  std::vector<RecordRow> rows(const std::string& where) {
    auto st = prepare(
        "SELECT row_id, kind, plate, device_id, captured_at, surrogate_id, record_count, anchored_at "
        "FROM records " + where + " ORDER BY row_id");
    std::vector<RecordRow> out;
    while (step(st) == SQLITE_ROW) {
      RecordRow row;
      row.row_id = std::to_string(sqlite3_column_int64(st, 0));
      if (sqlite3_column_int(st, 1) == kReal) {
        row.kind = RowKind::Real;
        row.record = VehicleRecord{text(st, 2), text(st, 3), from_epoch(sqlite3_column_int64(st, 4))};
      } else {
        row.kind = RowKind::Placeholder;
        row.surrogate = SurrogateId::parse(text(st, 5));
        row.record_count = static_cast<std::uint64_t>(sqlite3_column_int64(st, 6));
        row.anchored_at = from_epoch(sqlite3_column_int64(st, 7));
      }
      out.push_back(std::move(row));
    }
    return out;
  }

  static std::string text(sqlite3_stmt* st, int col) {
    const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(st, col));
    return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(st, col))) : std::string{};
  }

 private:
  sqlite3* db_ = nullptr;
  std::map<std::string, sqlite3_stmt*> cache_;
};

namespace {

/// BEGIN IMMEDIATE .. COMMIT, rolled back unless committed.
class WriteTxn {
 public:
  explicit WriteTxn(EmbeddedStore::Connection& c) : conn_(c) { conn_.exec("BEGIN IMMEDIATE"); }
  ~WriteTxn() {
    if (!done_) {
      try {
        conn_.exec("ROLLBACK");
      } catch (...) {
      }
    }
  }
  void commit() {
    conn_.exec("COMMIT");
    done_ = true;
  }

 private:
  EmbeddedStore::Connection& conn_;
  bool done_ = false;
};

}  // namespace

EmbeddedStore::EmbeddedStore(StoreConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.pool.size == 0) throw Error(ErrorCode::InvalidConfig, "pool size must be >= 1");
  if (cfg_.dsn) throw Error(ErrorCode::InvalidConfig, "external SQL adapter is not part of this build");
  if (cfg_.path.empty()) throw Error(ErrorCode::InvalidConfig, "store path is empty");
  pool_ = std::make_unique<Pool<Connection>>(cfg_.pool.size, [this] { return std::make_unique<Connection>(cfg_); });
}

EmbeddedStore::~EmbeddedStore() = default;

Pool<EmbeddedStore::Connection>::Lease EmbeddedStore::acquire() {
  ++ops_;
  auto lease = pool_->try_acquire(cfg_.pool.acquire_timeout);
  if (!lease) throw Error(ErrorCode::StoreUnavailable, "timed out waiting for a pooled connection");
  return std::move(*lease);
}

std::string EmbeddedStore::insert_record(const VehicleRecord& r) {
  return insert_records(std::span(&r, 1)).front();
}

std::vector<std::string> EmbeddedStore::insert_records(std::span<const VehicleRecord> rs) {
  for (const auto& r : rs) validate_record(r);
  auto conn = acquire();
  WriteTxn txn(*conn);
  std::vector<std::string> ids;
  ids.reserve(rs.size());
  for (const auto& r : rs) ids.push_back(std::to_string(conn->insert_real(r)));
  txn.commit();
  ops_ += rs.size();
  return ids;
}

RecordRow EmbeddedStore::swap_for_placeholder(std::span<const std::string> row_ids, const SurrogateId& surrogate,
                                              Timestamp anchored_at) {
  if (row_ids.empty()) throw Error(ErrorCode::UnknownRow, "empty row list");
  auto conn = acquire();
  WriteTxn txn(*conn);
  for (const auto& id : row_ids) conn->delete_real(id);
  auto row = conn->insert_placeholder(surrogate, row_ids.size(), anchored_at);
  txn.commit();
  ops_ += row_ids.size() + 1;
  return row;
}

std::vector<RecordRow> EmbeddedStore::swap_each_for_placeholder(
    std::span<const std::pair<std::string, SurrogateId>> swaps, Timestamp anchored_at) {
  auto conn = acquire();
  WriteTxn txn(*conn);
  std::vector<RecordRow> out;
  out.reserve(swaps.size());
  for (const auto& [row_id, surrogate] : swaps) {
    conn->delete_real(row_id);
    out.push_back(conn->insert_placeholder(surrogate, 1, anchored_at));
  }
  txn.commit();
  ops_ += 2 * swaps.size();
  return out;
}

std::uint64_t EmbeddedStore::restore_records(const SurrogateId& surrogate, std::span<const VehicleRecord> records) {
  const std::pair<SurrogateId, std::vector<VehicleRecord>> one{surrogate, {records.begin(), records.end()}};
  return restore_batch(std::span(&one, 1));
}

std::uint64_t EmbeddedStore::restore_batch(
    std::span<const std::pair<SurrogateId, std::vector<VehicleRecord>>> batch) {
  for (const auto& [s, records] : batch)
    for (const auto& r : records) validate_record(r);
  auto conn = acquire();
  WriteTxn txn(*conn);
  std::uint64_t restored = 0;
  for (const auto& [surrogate, records] : batch) {
    conn->delete_row(conn->find_placeholder(surrogate).first);
    for (const auto& r : records) conn->insert_real(r);
    restored += records.size();
  }
  txn.commit();
  ops_ += restored + batch.size();
  return restored;
}

std::uint64_t EmbeddedStore::restore_subset(const SurrogateId& surrogate, std::span<const VehicleRecord> records) {
  const std::pair<SurrogateId, std::vector<VehicleRecord>> one{surrogate, {records.begin(), records.end()}};
  return restore_subsets(std::span(&one, 1));
}

std::uint64_t EmbeddedStore::restore_subsets(
    std::span<const std::pair<SurrogateId, std::vector<VehicleRecord>>> batch) {
  for (const auto& [s, records] : batch)
    for (const auto& r : records) validate_record(r);
  auto conn = acquire();
  WriteTxn txn(*conn);
  std::uint64_t restored = 0;
  for (const auto& [surrogate, records] : batch) {
    const auto [row_id, count] = conn->find_placeholder(surrogate);
    if (records.size() > count)
      throw Error(ErrorCode::PayloadMismatch, "placeholder " + surrogate.str() + " stands for " +
                                                  std::to_string(count) + " records, asked to restore " +
                                                  std::to_string(records.size()));
    if (records.size() == count)
      conn->delete_row(row_id);
    else
      conn->set_count(row_id, count - records.size());
    for (const auto& r : records) conn->insert_real(r);
    restored += records.size();
  }
  txn.commit();
  ops_ += restored + batch.size();
  return restored;
}

std::vector<VehicleRecord> EmbeddedStore::query(const RetrievalFilter& filter) {
  filter.validate();
  std::string sql = "SELECT plate, device_id, captured_at FROM records WHERE kind = 0";
  if (filter.device_id) sql += " AND device_id = ?1";
  if (filter.from) sql += " AND captured_at >= ?2";
  if (filter.to) sql += " AND captured_at <= ?3";
  sql += " ORDER BY captured_at, plate, device_id";

  auto conn = acquire();
  auto st = conn->prepare(sql);
  if (filter.device_id) sqlite3_bind_text(st, 1, filter.device_id->c_str(), -1, SQLITE_TRANSIENT);
  if (filter.from) sqlite3_bind_int64(st, 2, to_epoch(*filter.from));
  if (filter.to) sqlite3_bind_int64(st, 3, to_epoch(*filter.to));
  std::vector<VehicleRecord> out;
  while (conn->step(st) == SQLITE_ROW)
    out.push_back(VehicleRecord{Connection::text(st, 0), Connection::text(st, 1),
                                from_epoch(sqlite3_column_int64(st, 2))});
  ops_ += out.size();
  return out;
}

std::vector<RecordRow> EmbeddedStore::rows_where(const std::string& where) {
  auto out = acquire()->rows(where);
  ops_ += out.size();
  return out;
}

std::vector<RecordRow> EmbeddedStore::real_rows() { return rows_where("WHERE kind = 0"); }

std::vector<RecordRow> EmbeddedStore::placeholders() { return rows_where("WHERE kind = 1"); }

std::vector<RecordRow> EmbeddedStore::dump() { return rows_where(""); }

StoreCounts EmbeddedStore::counts() {
  auto conn = acquire();
  auto st = conn->prepare(
      "SELECT COALESCE(SUM(kind = 0), 0), COALESCE(SUM(kind = 1), 0), COALESCE(SUM(record_count), 0) FROM records");
  conn->step(st);
  return StoreCounts{static_cast<std::uint64_t>(sqlite3_column_int64(st, 0)),
                     static_cast<std::uint64_t>(sqlite3_column_int64(st, 1)),
                     static_cast<std::uint64_t>(sqlite3_column_int64(st, 2))};
}

PoolStats EmbeddedStore::pool_stats() const { return pool_->stats(); }

std::unique_ptr<RecordStore> open_store(const StoreConfig& cfg) { return std::make_unique<EmbeddedStore>(cfg); }

}  // namespace cloudguardian
