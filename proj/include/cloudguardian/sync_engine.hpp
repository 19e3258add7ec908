// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <cloudguardian/clock.hpp>
#include <cloudguardian/core_model.hpp>
#include <cloudguardian/ids.hpp>
#include <cloudguardian/simchain.hpp>
#include <cloudguardian/store.hpp>
#include <cloudguardian/vault.hpp>

namespace cloudguardian {

struct EngineConfig {
  std::filesystem::path vault_path;
  std::string passphrase;
  KdfParams kdf = KdfParams::interactive();
  /// Delete chain keys once their records are back in the store. Export
  /// never removes anything.
  bool remove_on_recover = true;
  /// Seeds chain-id and surrogate generation; unset means the OS CSPRNG.
  std::optional<std::uint64_t> rng_seed;
};

struct AnchorOutcome {
  Protocol protocol = Protocol::P2;
  std::uint64_t tx_count = 0;
  std::vector<ChainId> chain_ids;
  std::uint64_t records_anchored = 0;
  std::uint64_t gas_total = 0;
  double elapsed_ms = 0;
};

struct RecoveryOutcome {
  Protocol protocol = Protocol::P2;
  std::uint64_t chain_calls = 0;
  std::uint64_t chain_txs = 0;
  std::uint64_t records_restored = 0;
  std::uint64_t records_exported = 0;
  double elapsed_ms = 0;
};

/// The downloadable export document.
struct ExportFile {
  Timestamp generated_at{};
  RetrievalFilter filter;
  std::vector<VehicleRecord> records;  // sorted by (captured_at, plate)

  /// UTF-8 JSON; identical state and filter give identical bytes.
  std::string to_json() const;
  static ExportFile from_json(std::string_view text);
};

struct ExportResult {
  ExportFile file;
  RecoveryOutcome outcome;
};

struct EngineStatus {
  StoreCounts store;
  std::uint64_t mapping_entries = 0;
  std::uint64_t anchored_records = 0;
  ChainCounters chain;
};

/// Moves records between the store and the contract. Anchor and recovery
/// operations are mutually exclusive; exports run alongside each other and
/// only ever observe a state between two anchors/recoveries.
class SyncEngine {
 public:
  SyncEngine(RecordStore& store, ChainBackend& chain, ContractAddress contract, EngineConfig cfg, Clock& clock);

  /// P1 sends one transaction per record with the placeholder keyed to the
  /// chain id. P2, P3 and P4 send every real record in one payload under a
  /// fresh chain id and leave one uncorrelated placeholder.
  AnchorOutcome anchor(Protocol protocol);

  /// Pulls every mapped payload back into the store.
  RecoveryOutcome recover_all(Protocol protocol);

  /// Read-only: no store writes, no chain transactions, mapping untouched.
  ExportResult export_filtered(const RetrievalFilter& filter);

  /// Restores only matching records. Payloads that still hold non-matching
  /// records are re-stored under a new chain id with the remainder.
  RecoveryOutcome recover_filtered(const RetrievalFilter& filter);

  /// Current mapping, empty if no vault has been written yet.
  IdMapping mapping() const;
  EngineStatus status();

  const ContractAddress& contract() const noexcept { return contract_; }
  RecordStore& store() noexcept { return store_; }
  ChainBackend& chain() noexcept { return chain_; }
  const EngineConfig& config() const noexcept { return cfg_; }

 private:
  struct Fetched {
    ChainId id;
    MappingEntry entry;
    std::vector<VehicleRecord> records;
  };

  std::vector<Fetched> fetch_all(const IdMapping& m, std::uint64_t& calls);
  void save(const IdMapping& m) const;

  RecordStore& store_;
  ChainBackend& chain_;
  ContractAddress contract_;
  EngineConfig cfg_;
  Clock& clock_;
  std::unique_ptr<RandomSource> rng_;
  mutable std::shared_mutex op_mutex_;
};

}  // namespace cloudguardian
