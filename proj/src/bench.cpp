// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cloudguardian/bench.hpp>
#include <cloudguardian/clock.hpp>
#include <cloudguardian/error.hpp>
#include <cloudguardian/store.hpp>
#include <cloudguardian/sync_engine.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace cloudguardian {

namespace {

std::string fmt_ms(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", ms);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
}

/// Removes the directory tree on scope exit.
struct ScratchDir {
  std::filesystem::path path;
  bool owned;
  ~ScratchDir() {
    std::error_code ec;
    if (owned) std::filesystem::remove_all(path, ec);
  }
};

ScratchDir make_scratch(const std::filesystem::path& requested) {
  if (!requested.empty()) {
    std::filesystem::create_directories(requested);
    return ScratchDir{requested, false};
  }
  std::random_device rd;
  for (;;) {
    auto p = std::filesystem::temp_directory_path() / ("cloudguardian-bench-" + std::to_string(rd()));
    if (std::filesystem::create_directory(p)) return ScratchDir{p, true};
  }
}

BenchRow run_cell(const BenchConfig& cfg, Protocol protocol, std::uint64_t n, const std::filesystem::path& dir) {
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);

  StoreConfig sc;
  sc.path = dir / "records.db";
  sc.durable = false;
  EmbeddedStore store(sc);

  ChainConfig cc = cfg.chain;
  cc.rng_seed = cfg.seed;
  SimChain chain(cc);
  const auto contract = chain.deploy_contract();

  EngineConfig ec;
  ec.vault_path = dir / "id_mapping.vault";
  ec.passphrase = "bench-passphrase";
  ec.kdf = KdfParams::fast();
  ec.rng_seed = cfg.seed;
  ManualClock clock(Clock::time_point{std::chrono::sys_days{std::chrono::year{2024} / 6 / 1}});
  SyncEngine engine(store, chain, contract, ec, clock);

  store.insert_records(gen_records(n, cfg.seed, cfg.workload));

  BenchRow row;
  row.protocol = protocol;
  row.n_records = n;
  const auto ship = engine.anchor(protocol);
  row.ship_ms = ship.elapsed_ms;
  row.ship_txs = ship.tx_count;
  row.ship_gas = ship.gas_total;
  row.bytes_on_chain = chain.counters(contract).bytes_stored;

  RecoveryOutcome rec;
  switch (protocol) {
    case Protocol::P1:
    case Protocol::P2: rec = engine.recover_all(protocol); break;
    case Protocol::P3: rec = engine.export_filtered(RetrievalFilter{}).outcome; break;
    case Protocol::P4: rec = engine.recover_filtered(half_window_filter(cfg.workload)); break;
  }
  row.recover_ms = rec.elapsed_ms;
  row.recover_calls = rec.chain_calls;
  row.recover_txs = rec.chain_txs;
  row.store_ops = store.op_count();
  return row;
}

}  // namespace

std::string workload_device(std::size_t index) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%06zu", index + 1);
  return buf;
}

std::vector<VehicleRecord> gen_records(std::size_t n, std::uint64_t seed, const WorkloadOptions& opts) {
  if (opts.device_pool == 0 || opts.device_pool > 999999) throw Error(ErrorCode::InvalidConfig, "bad device pool");
  std::mt19937_64 rng(seed);
  auto pick = [&rng](std::uint64_t bound) { return static_cast<std::uint64_t>(rng() % bound); };
  std::vector<VehicleRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Plate shaped like "AB-12-CD".
    std::string plate(8, '-');
    for (int k : {0, 1, 6, 7}) plate[k] = static_cast<char>('A' + pick(26));
    for (int k : {3, 4}) plate[k] = static_cast<char>('0' + pick(10));
    const auto device = workload_device(pick(opts.device_pool));
    const auto offset = std::chrono::seconds(pick(static_cast<std::uint64_t>(opts.window.count())));
    out.push_back(VehicleRecord{std::move(plate), device, opts.window_start + offset});
  }
  return out;
}

RetrievalFilter half_window_filter(const WorkloadOptions& opts) {
  return RetrievalFilter{std::nullopt, opts.window_start, opts.window_start + opts.window / 2};
}

void BenchConfig::validate() const {
  if (sizes.empty()) throw Error(ErrorCode::InvalidConfig, "at least one size is required");
  if (sizes.front() == 0) throw Error(ErrorCode::InvalidConfig, "sizes must be >= 1");
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1]) throw Error(ErrorCode::InvalidConfig, "sizes must be strictly increasing");
  if (protocols.empty()) throw Error(ErrorCode::InvalidConfig, "at least one protocol is required");
  if (std::set<Protocol>(protocols.begin(), protocols.end()).size() != protocols.size())
    throw Error(ErrorCode::InvalidConfig, "protocols must be distinct");
  chain.validate();
}

std::string BenchReport::to_csv() const {
  std::string out(kBenchCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += std::string(to_string(r.protocol)) + ',' + std::to_string(r.n_records) + ',' + fmt_ms(r.ship_ms) + ',' +
           std::to_string(r.ship_txs) + ',' + std::to_string(r.ship_gas) + ',' + fmt_ms(r.recover_ms) + ',' +
           std::to_string(r.recover_calls) + ',' + std::to_string(r.recover_txs) + ',' +
           std::to_string(r.store_ops) + ',' + std::to_string(r.bytes_on_chain) + '\n';
  }
  return out;
}

BenchReport BenchReport::from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kBenchCsvHeader)
    throw Error(ErrorCode::InvalidConfig, "CSV header does not match the bench report layout");
  BenchReport report;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != 10) throw Error(ErrorCode::InvalidConfig, "CSV row has " + std::to_string(f.size()) + " fields");
    const auto proto = parse_protocol(f[0]);
    if (!proto) throw Error(ErrorCode::InvalidConfig, "unknown protocol '" + f[0] + "'");
    try {
      report.rows.push_back(BenchRow{*proto, std::stoull(f[1]), std::stod(f[2]), std::stoull(f[3]), std::stoull(f[4]),
                                     std::stod(f[5]), std::stoull(f[6]), std::stoull(f[7]), std::stoull(f[8]),
                                     std::stoull(f[9])});
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::InvalidConfig, "unparsable CSV row: " + line);
    }
  }
  return report;
}

const BenchRow* BenchReport::find(Protocol p, std::uint64_t n) const {
  const auto it =
      std::find_if(rows.begin(), rows.end(), [&](const BenchRow& r) { return r.protocol == p && r.n_records == n; });
  return it == rows.end() ? nullptr : &*it;
}

BenchReport run_bench(const BenchConfig& cfg) {
  cfg.validate();
  const auto scratch = make_scratch(cfg.work_dir);
  BenchReport report;
  for (const auto p : cfg.protocols) {
    for (const auto n : cfg.sizes) {
      const auto dir = scratch.path / (std::string(to_string(p)) + "_" + std::to_string(n));
      try {
        report.rows.push_back(run_cell(cfg, p, n, dir));
      } catch (const Error& e) {
        throw Error(e.code(), "bench cell " + std::string(to_string(p)) + " n=" + std::to_string(n) + ": " + e.what());
      }
      std::error_code ec;
      std::filesystem::remove_all(dir, ec);
    }
  }
  if (cfg.output) write_file(*cfg.output, report.to_csv());
  return report;
}

PlotFiles emit_plot(const BenchReport& report, const std::filesystem::path& dir) {
  if (report.rows.empty()) throw Error(ErrorCode::IoFailure, "nothing to plot: the report is empty");
  std::vector<Protocol> protocols;
  std::set<std::uint64_t> sizes;
  for (const auto& r : report.rows) {
    if (std::find(protocols.begin(), protocols.end(), r.protocol) == protocols.end()) protocols.push_back(r.protocol);
    sizes.insert(r.n_records);
  }
  std::sort(protocols.begin(), protocols.end());

  auto table = [&](std::string_view title, double BenchRow::*field) {
    std::string out = "# " + std::string(title) + " (ms) by n_records\n# n_records";
    for (auto p : protocols) out += ' ' + std::string(to_string(p));
    out += '\n';
    for (auto n : sizes) {
      out += std::to_string(n);
      for (auto p : protocols) {
        const auto* row = report.find(p, n);
        out += ' ' + (row ? fmt_ms(row->*field) : std::string("NaN"));
      }
      out += '\n';
    }
    return out;
  };

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
  PlotFiles files{dir / "ship.dat", dir / "recover.dat", dir / "plot.gp"};
  write_file(files.ship_data, table("shipping time", &BenchRow::ship_ms));
  write_file(files.recover_data, table("recovery time", &BenchRow::recover_ms));

  std::string gp =
      "set terminal pngcairo size 900,600\n"
      "set logscale x\n"
      "set xlabel 'records'\n"
      "set ylabel 'ms'\n"
      "set key left top\n";
  for (const auto& [name, data] : {std::pair{"ship", "ship.dat"}, std::pair{"recover", "recover.dat"}}) {
    gp += "set output '" + std::string(name) + ".png'\n";
    gp += "set title '" + std::string(name) + " time by protocol'\n";
    gp += "plot ";
    for (std::size_t i = 0; i < protocols.size(); ++i) {
      if (i) gp += ", ";
      gp += "'" + std::string(data) + "' using 1:" + std::to_string(i + 2) + " with linespoints title '" +
            std::string(to_string(protocols[i])) + "'";
    }
    gp += '\n';
  }
  write_file(files.script, gp);
  return files;
}

}  // namespace cloudguardian
