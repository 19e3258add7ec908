// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <cloudguardian/clock.hpp>
#include <cloudguardian/simchain.hpp>
#include <cloudguardian/store.hpp>
#include <cloudguardian/sync_engine.hpp>
#include <cloudguardian/vault.hpp>

namespace cloudguardian {

struct VaultSection {
  std::filesystem::path path = "id_mapping.vault";
  KdfParams kdf = KdfParams::interactive();
  bool remove_on_recover = true;
};

struct GatewaySection {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::chrono::seconds session_ttl{3600};
  std::optional<std::filesystem::path> users_path;
};

struct SchedulerSection {
  /// Zero disables periodic anchoring.
  std::chrono::seconds interval{0};
  Protocol protocol = Protocol::P2;
};

/// Everything `cloudguardian serve` and the one-shot subcommands need.
struct ServiceConfig {
  ChainConfig chain;
  /// Where the simulated chain is snapshotted between runs; empty = memory only.
  std::filesystem::path chain_state_path = "chain_state.json";
  StoreConfig store;
  VaultSection vault;
  GatewaySection gateway;
  SchedulerSection scheduler;
};

/// INI file with [chain], [store], [vault], [gateway] and [scheduler]
/// sections. Relative paths resolve against the file's directory. Unknown
/// keys are rejected.
ServiceConfig load_config(const std::filesystem::path& path);
ServiceConfig parse_config(std::string_view ini_text, const std::filesystem::path& base_dir);

/// Store, chain, contract and engine wired from one config. The passphrase
/// comes from the caller (normally the environment).
class Deployment {
 public:
  Deployment(ServiceConfig cfg, std::string passphrase, Clock& clock);
  ~Deployment();

  SyncEngine& engine() noexcept { return *engine_; }
  RecordStore& store() noexcept { return *store_; }
  SimChain& chain() noexcept { return *chain_; }
  const ServiceConfig& config() const noexcept { return cfg_; }

  /// Writes the chain snapshot, if a state path is configured.
  void checkpoint();

 private:
  ServiceConfig cfg_;
  std::unique_ptr<RecordStore> store_;
  std::unique_ptr<SimChain> chain_;
  std::unique_ptr<SyncEngine> engine_;
};

}  // namespace cloudguardian
