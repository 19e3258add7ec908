// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include <cloudguardian/core_model.hpp>
#include <cloudguardian/ids.hpp>

namespace cloudguardian {

/// 20-byte contract address, rendered "0x" + 40 hex chars.
struct ContractAddress {
  std::array<std::uint8_t, 20> bytes{};

  std::string str() const;
  static ContractAddress parse(std::string_view text);

  friend bool operator==(const ContractAddress&, const ContractAddress&) = default;
  friend auto operator<=>(const ContractAddress&, const ContractAddress&) = default;
};

enum class EventKind { DataStored, DataRemoved };

struct ChainEvent {
  EventKind kind = EventKind::DataStored;
  std::string id;
  std::string str;  // empty for DataRemoved
  std::uint64_t block = 0;
  std::uint32_t index = 0;

  friend bool operator==(const ChainEvent&, const ChainEvent&) = default;
};

enum class TxStatus { Pending, Mined };

struct TxReceipt {
  std::array<std::uint8_t, 32> tx_hash{};
  TxStatus status = TxStatus::Pending;
  std::uint64_t block = 0;
  std::uint64_t gas_used = 0;
  std::vector<ChainEvent> events;

  std::string tx_hash_hex() const { return "0x" + to_hex(tx_hash); }

  friend bool operator==(const TxReceipt&, const TxReceipt&) = default;
};

enum class ChainMode { Instant, Latency };

struct ChainConfig {
  GasModel gas_model{};
  std::uint64_t block_gas_limit = 30'000'000;
  std::uint64_t base_tx_gas = 0;
  ChainMode mode = ChainMode::Instant;
  std::uint32_t tx_latency_ms = 0;
  std::uint32_t call_latency_ms = 0;
  std::optional<std::uint64_t> rng_seed;

  /// Throws InvalidConfig on a zero block gas limit.
  void validate() const;
};

struct ChainCounters {
  std::uint64_t tx_count = 0;
  std::uint64_t call_count = 0;
  std::uint64_t bytes_stored = 0;
  std::uint64_t total_gas = 0;

  friend bool operator==(const ChainCounters&, const ChainCounters&) = default;
};

/// Operations of the DataOptimized key-value contract. The in-process
/// simulator implements this; a JSON-RPC node adapter would implement the same
/// surface against a live network.
class ChainBackend {
 public:
  virtual ~ChainBackend() = default;

  virtual ContractAddress deploy_contract() = 0;
  virtual TxReceipt store_data(const ContractAddress& addr, const std::string& id,
                               const std::string& payload) = 0;
  virtual std::string get_data(const ContractAddress& addr, const std::string& id) = 0;
  virtual TxReceipt remove_data(const ContractAddress& addr, const std::string& id) = 0;
  virtual std::vector<ChainEvent> events(const ContractAddress& addr, std::uint64_t from_block) = 0;
  virtual ChainCounters counters(const ContractAddress& addr) = 0;
};

/// Gas charged for storing a string of `chars` characters under the 4-bytes-
/// per-character model, excluding the base transaction cost.
BigUint storage_gas(std::uint64_t chars, const GasModel& g);

/// Deterministic in-process chain. Each transaction is mined into its own
/// block; submissions are serialized in arrival order.
class SimChain final : public ChainBackend {
 public:
  explicit SimChain(ChainConfig cfg);
  ~SimChain() override;

  ContractAddress deploy_contract() override;
  TxReceipt store_data(const ContractAddress& addr, const std::string& id,
                       const std::string& payload) override;
  std::string get_data(const ContractAddress& addr, const std::string& id) override;
  TxReceipt remove_data(const ContractAddress& addr, const std::string& id) override;
  std::vector<ChainEvent> events(const ContractAddress& addr, std::uint64_t from_block) override;
  ChainCounters counters(const ContractAddress& addr) override;

  const ChainConfig& config() const noexcept { return cfg_; }
  std::uint64_t tip() const;
  std::vector<ContractAddress> contracts() const;
  /// Snapshot of every key currently held by a contract, in key order.
  std::map<std::string, std::string> state(const ContractAddress& addr) const;

  /// Persists contracts, logs, counters and block height as JSON.
  void save(const std::filesystem::path& path) const;
  /// Restores a snapshot written by save(); config comes from the caller.
  static std::unique_ptr<SimChain> load(const std::filesystem::path& path, ChainConfig cfg);

 private:
  struct Contract;

  Contract& contract_locked(const ContractAddress& addr) const;
  TxReceipt mine_locked(Contract& c, std::uint64_t gas, ChainEvent ev);
  void simulate_delay(std::uint32_t ms) const;

  ChainConfig cfg_;
  std::unique_ptr<RandomSource> rng_;
  mutable std::shared_mutex mutex_;
  std::map<ContractAddress, std::unique_ptr<Contract>> contracts_;
  std::uint64_t block_ = 0;
};

}  // namespace cloudguardian
