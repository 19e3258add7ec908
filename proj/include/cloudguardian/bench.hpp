// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <cloudguardian/core_model.hpp>
#include <cloudguardian/simchain.hpp>
#include <cloudguardian/vault.hpp>

namespace cloudguardian {

struct WorkloadOptions {
  std::size_t device_pool = 10;
  Timestamp window_start = std::chrono::sys_days{std::chrono::year{2024} / 5 / 1};
  std::chrono::seconds window = std::chrono::hours{24 * 7};
};

/// Device ids of the generated pool: "000001", "000002", ...
std::string workload_device(std::size_t index);

/// Deterministic pseudo-random valid records for a given seed.
std::vector<VehicleRecord> gen_records(std::size_t n, std::uint64_t seed, const WorkloadOptions& opts = {});

struct BenchConfig {
  std::vector<std::uint64_t> sizes{60, 600, 6000, 60000};
  std::vector<Protocol> protocols{Protocol::P1, Protocol::P2, Protocol::P3, Protocol::P4};
  std::uint64_t seed = 1;
  /// Gas model and latency settings for every cell's chain.
  ChainConfig chain{};
  WorkloadOptions workload{};
  /// Scratch space for per-cell stores and vaults; a temp dir when empty.
  std::filesystem::path work_dir;
  std::optional<std::filesystem::path> output;

  /// Throws InvalidConfig unless sizes are non-empty and strictly increasing
  /// and protocols are non-empty and distinct.
  void validate() const;
};

struct BenchRow {
  Protocol protocol = Protocol::P1;
  std::uint64_t n_records = 0;
  double ship_ms = 0;
  std::uint64_t ship_txs = 0;
  std::uint64_t ship_gas = 0;
  double recover_ms = 0;
  std::uint64_t recover_calls = 0;
  std::uint64_t recover_txs = 0;
  /// Operation/byte counters stand in for CPU, memory and disk energy.
  std::uint64_t store_ops = 0;
  std::uint64_t bytes_on_chain = 0;
};

inline constexpr std::string_view kBenchCsvHeader =
    "protocol,n_records,ship_ms,ship_txs,ship_gas,recover_ms,recover_calls,recover_txs,store_ops,bytes_on_chain";

struct BenchReport {
  std::vector<BenchRow> rows;

  /// Header row then one row per cell; LF line endings.
  std::string to_csv() const;
  static BenchReport from_csv(std::string_view text);
  const BenchRow* find(Protocol p, std::uint64_t n) const;
};

/// Every (protocol, size) cell runs on a fresh store, chain and vault:
/// ingest, anchor (timed as shipping), then the protocol's recovery path
/// (recover_all for P1/P2, full export for P3, half-window recover_filtered
/// for P4). Cells run sequentially.
BenchReport run_bench(const BenchConfig& cfg);

/// Closed window covering the first half of the workload's time span.
RetrievalFilter half_window_filter(const WorkloadOptions& opts);

struct PlotFiles {
  std::filesystem::path ship_data;
  std::filesystem::path recover_data;
  std::filesystem::path script;
};

/// gnuplot data files (one column per protocol, one line per size) and a
/// script rendering them as two line charts.
PlotFiles emit_plot(const BenchReport& report, const std::filesystem::path& dir);

}  // namespace cloudguardian
