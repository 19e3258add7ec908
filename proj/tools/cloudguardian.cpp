// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cloudguardian/bench.hpp>
#include <cloudguardian/config.hpp>
#include <cloudguardian/error.hpp>
#include <cloudguardian/gateway.hpp>
#include <cloudguardian/scheduler.hpp>

#include <csignal>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

using namespace cloudguardian;

namespace {

Gateway* g_gateway = nullptr;

void on_signal(int) {
  if (g_gateway) g_gateway->stop();
}

std::optional<Timestamp> opt_time(const std::string& text, const char* flag) {
  if (text.empty()) return std::nullopt;
  auto t = parse_timestamp(text);
  if (!t) throw Error(ErrorCode::InvalidFilter, std::string(flag) + " must look like 2024-05-01T12:00:00Z");
  return t;
}

Protocol protocol_arg(const std::string& text) {
  auto p = parse_protocol(text);
  if (!p) throw Error(ErrorCode::InvalidConfig, "protocol must be p1, p2, p3 or p4");
  return *p;
}

struct FilterArgs {
  std::string device, from, to;

  void add(CLI::App* cmd) {
    cmd->add_option("--device", device, "6-char device id");
    cmd->add_option("--from", from, "inclusive lower bound, e.g. 2024-05-01T00:00:00Z");
    cmd->add_option("--to", to, "inclusive upper bound");
  }

  RetrievalFilter build() const {
    RetrievalFilter f;
    if (!device.empty()) f.device_id = device;
    f.from = opt_time(from, "--from");
    f.to = opt_time(to, "--to");
    f.validate();
    return f;
  }
};

std::vector<std::uint64_t> parse_sizes(const std::string& csv) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(csv);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(std::stoull(item));
  return out;
}

std::vector<Protocol> parse_protocols(const std::string& csv) {
  std::vector<Protocol> out;
  std::stringstream ss(csv);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(protocol_arg(item));
  return out;
}

void print(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cloudguardian: anchor relational records on a key-value contract"};
  app.require_subcommand(1);

  std::string config_path = "cloudguardian.ini";
  std::string protocol = "p2";
  FilterArgs filter;
  std::string out_path;

  auto* serve = app.add_subcommand("serve", "run the HTTP gateway (and the scheduler, if configured)");
  serve->add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);

  auto* anchor = app.add_subcommand("anchor", "ship every real record to the chain");
  anchor->add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
  anchor->add_option("--protocol", protocol, "p1, p2, p3 or p4");

  auto* exp = app.add_subcommand("export", "write anchored records matching a filter to a JSON file");
  exp->add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
  filter.add(exp);
  exp->add_option("--out", out_path, "output file (stdout if omitted)");

  auto* restore = app.add_subcommand("restore", "bring anchored records back into the store");
  restore->add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
  restore->add_option("--protocol", protocol, "p1, p2 (everything) or p4 (filtered)");
  filter.add(restore);

  std::string sizes = "60,600,6000,60000";
  std::string protocols = "p1,p2,p3,p4";
  std::uint64_t seed = 1;
  std::uint32_t tx_latency = 0, call_latency = 0;
  std::uint64_t gas_price = 1, block_gas_limit = 30'000'000, base_gas = 0;
  std::string plot_dir;
  auto* bench = app.add_subcommand("bench", "measure shipping/recovery per protocol and size");
  bench->add_option("--sizes", sizes, "comma-separated, strictly increasing record counts");
  bench->add_option("--protocols", protocols, "comma-separated subset of p1,p2,p3,p4");
  bench->add_option("--seed", seed, "workload seed");
  bench->add_option("--out", out_path, "CSV output path");
  bench->add_option("--tx-latency-ms", tx_latency, "simulated confirmation delay per transaction");
  bench->add_option("--call-latency-ms", call_latency, "simulated delay per read call");
  bench->add_option("--gas-price", gas_price, "gas per byte");
  bench->add_option("--block-gas-limit", block_gas_limit, "per-transaction gas ceiling");
  bench->add_option("--base-tx-gas", base_gas, "flat gas added to every transaction");
  bench->add_option("--plot-dir", plot_dir, "also write gnuplot data and script here");

  CLI11_PARSE(app, argc, argv);

  try {
    SystemClock clock;
    if (*bench) {
      BenchConfig cfg;
      cfg.sizes = parse_sizes(sizes);
      cfg.protocols = parse_protocols(protocols);
      cfg.seed = seed;
      cfg.chain.gas_model.price_per_byte = gas_price;
      cfg.chain.block_gas_limit = block_gas_limit;
      cfg.chain.base_tx_gas = base_gas;
      cfg.chain.tx_latency_ms = tx_latency;
      cfg.chain.call_latency_ms = call_latency;
      cfg.chain.mode = (tx_latency || call_latency) ? ChainMode::Latency : ChainMode::Instant;
      if (!out_path.empty()) cfg.output = out_path;
      const auto report = run_bench(cfg);
      if (out_path.empty()) std::cout << report.to_csv();
      if (!plot_dir.empty()) emit_plot(report, plot_dir);
      return 0;
    }

    Deployment dep(load_config(config_path), passphrase_from_env(), clock);

    if (*serve) {
      const auto& cfg = dep.config();
      GatewayOptions opts;
      opts.host = cfg.gateway.host;
      opts.port = cfg.gateway.port;
      opts.session_ttl = cfg.gateway.session_ttl;
      opts.users_path = cfg.gateway.users_path;
      Gateway gateway(dep.engine(), opts, clock, [&dep] { dep.checkpoint(); });
      std::unique_ptr<Scheduler> scheduler;
      if (cfg.scheduler.interval.count() > 0)
        scheduler = std::make_unique<Scheduler>(clock, cfg.scheduler.interval, [&dep, &cfg] {
          dep.engine().anchor(cfg.scheduler.protocol);
          dep.checkpoint();
        });
      g_gateway = &gateway;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on " << opts.host << ":" << opts.port << "\n";
      gateway.run();
      if (scheduler) scheduler->stop();
      dep.checkpoint();
      return 0;
    }

    if (*anchor) {
      const auto out = dep.engine().anchor(protocol_arg(protocol));
      dep.checkpoint();
      print({{"protocol", to_string(out.protocol)},
             {"tx_count", out.tx_count},
             {"records_anchored", out.records_anchored},
             {"gas_total", out.gas_total},
             {"elapsed_ms", out.elapsed_ms}});
      return 0;
    }

    if (*exp) {
      const auto result = dep.engine().export_filtered(filter.build());
      const auto text = result.file.to_json();
      if (out_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
        out << text;
        if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + out_path);
        std::cerr << result.outcome.records_exported << " records written to " << out_path << "\n";
      }
      return 0;
    }

    if (*restore) {
      const auto p = protocol_arg(protocol);
      RecoveryOutcome out;
      if (p == Protocol::P4)
        out = dep.engine().recover_filtered(filter.build());
      else if (p == Protocol::P3)
        throw Error(ErrorCode::InvalidConfig, "p3 never restores; use export");
      else
        out = dep.engine().recover_all(p);
      dep.checkpoint();
      print({{"protocol", to_string(out.protocol)},
             {"chain_calls", out.chain_calls},
             {"chain_txs", out.chain_txs},
             {"records_restored", out.records_restored},
             {"elapsed_ms", out.elapsed_ms}});
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::NothingToAnchor ? 3 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
