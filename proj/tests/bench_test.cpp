// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cloudguardian/bench.hpp>

#include <map>
#include <sstream>

#include "test_support.hpp"

using namespace cloudguardian;

namespace {

BenchConfig small_config() {
  BenchConfig cfg;
  cfg.sizes = {6, 60, 120};
  return cfg;
}

}  // namespace

TEST(GenRecords, Deterministic) {
  EXPECT_EQ(gen_records(60, 1), gen_records(60, 1));
  EXPECT_NE(gen_records(60, 1), gen_records(60, 2));
}

TEST(GenRecords, ValidAndSpread) {
  const WorkloadOptions opts;
  const auto rs = gen_records(600, 1, opts);
  std::map<std::string, int> per_device;
  for (const auto& r : rs) {
    EXPECT_NO_THROW(encode_record(r));
    EXPECT_GE(r.captured_at, opts.window_start);
    EXPECT_LT(r.captured_at, opts.window_start + opts.window);
    ++per_device[r.device_id];
  }
  EXPECT_EQ(per_device.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_GE(per_device[workload_device(i)], 1);
}

TEST(BenchConfig, Validation) {
  BenchConfig cfg;
  cfg.sizes = {60, 60};
  EXPECT_CG_ERROR(cfg.validate(), ErrorCode::InvalidConfig);
  cfg.sizes = {};
  EXPECT_CG_ERROR(cfg.validate(), ErrorCode::InvalidConfig);
  cfg.sizes = {0, 5};
  EXPECT_CG_ERROR(cfg.validate(), ErrorCode::InvalidConfig);
  cfg.sizes = {5};
  cfg.protocols = {Protocol::P1, Protocol::P1};
  EXPECT_CG_ERROR(cfg.validate(), ErrorCode::InvalidConfig);
  cfg.protocols = {};
  EXPECT_CG_ERROR(cfg.validate(), ErrorCode::InvalidConfig);
}

TEST(RunBench, CounterLaws) {
  const auto cfg = small_config();
  const auto report = run_bench(cfg);
  ASSERT_EQ(report.rows.size(), 12u);
  for (const auto& row : report.rows) {
    const auto n = row.n_records;
    SCOPED_TRACE(std::string(to_string(row.protocol)) + " n=" + std::to_string(n));
    EXPECT_EQ(row.ship_txs, row.protocol == Protocol::P1 ? n : 1u);
    EXPECT_EQ(row.ship_gas, 144 * n);
    EXPECT_EQ(row.bytes_on_chain, 144 * n);
    switch (row.protocol) {
      case Protocol::P1:
        EXPECT_EQ(row.recover_calls, n);
        EXPECT_EQ(row.recover_txs, n);
        break;
      case Protocol::P2:
        EXPECT_EQ(row.recover_calls, 1u);
        EXPECT_EQ(row.recover_txs, 1u);
        break;
      case Protocol::P3:
        EXPECT_EQ(row.recover_calls, 1u);
        EXPECT_EQ(row.recover_txs, 0u);
        break;
      case Protocol::P4:
        // One re-store of the remainder plus one removal, unless the
        // half-window filter happened to take everything.
        EXPECT_EQ(row.recover_calls, 1u);
        EXPECT_LE(row.recover_txs, 2u);
        break;
    }
    EXPECT_GT(row.store_ops, 0u);
  }
}

TEST(RunBench, GasWithBase) {
  auto cfg = small_config();
  cfg.sizes = {10};
  cfg.protocols = {Protocol::P1, Protocol::P2};
  cfg.chain.gas_model.price_per_byte = 10;
  cfg.chain.base_tx_gas = 21000;
  const auto report = run_bench(cfg);
  EXPECT_EQ(report.find(Protocol::P2, 10)->ship_gas, 144u * 10 * 10 + 21000);
  EXPECT_EQ(report.find(Protocol::P1, 10)->ship_gas, 10u * (144 * 10 + 21000));
}

TEST(RunBench, CountersAreDeterministic) {
  const auto a = run_bench(small_config());
  const auto b = run_bench(small_config());
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].ship_txs, b.rows[i].ship_txs);
    EXPECT_EQ(a.rows[i].ship_gas, b.rows[i].ship_gas);
    EXPECT_EQ(a.rows[i].recover_calls, b.rows[i].recover_calls);
    EXPECT_EQ(a.rows[i].recover_txs, b.rows[i].recover_txs);
    EXPECT_EQ(a.rows[i].store_ops, b.rows[i].store_ops);
    EXPECT_EQ(a.rows[i].bytes_on_chain, b.rows[i].bytes_on_chain);
  }
}

TEST(BenchReport, CsvRoundTrip) {
  cgtest::TempDir dir;
  auto cfg = small_config();
  cfg.output = dir / "bench.csv";
  const auto report = run_bench(cfg);
  const auto text = cgtest::read_bytes(dir / "bench.csv");
  EXPECT_EQ(text, report.to_csv());
  EXPECT_EQ(text.substr(0, text.find('\n')), kBenchCsvHeader);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  const auto back = BenchReport::from_csv(text);
  EXPECT_EQ(back.to_csv(), text);
  EXPECT_CG_ERROR(BenchReport::from_csv("protocol,n\n"), ErrorCode::InvalidConfig);
  EXPECT_CG_ERROR(BenchReport::from_csv(std::string(kBenchCsvHeader) + "\np9,1,1,1,1,1,1,1,1,1\n"),
                  ErrorCode::InvalidConfig);
}

TEST(EmitPlot, Cardinality) {
  BenchReport report;
  for (auto p : {Protocol::P1, Protocol::P2, Protocol::P3, Protocol::P4})
    for (std::uint64_t n : {60, 600, 6000, 60000})
      report.rows.push_back(BenchRow{p, n, n * 0.5, 1, 1, n * 0.25, 1, 1, 1, 1});
  cgtest::TempDir dir;
  const auto files = emit_plot(report, dir / "plots");
  const auto script = cgtest::read_bytes(files.script);
  std::size_t charts = 0, series = 0;
  for (std::size_t pos = 0; (pos = script.find("set output", pos)) != std::string::npos; ++pos) ++charts;
  for (std::size_t pos = 0; (pos = script.find("with linespoints", pos)) != std::string::npos; ++pos) ++series;
  EXPECT_EQ(charts, 2u);
  EXPECT_EQ(series, 8u);

  std::istringstream ship(cgtest::read_bytes(files.ship_data));
  std::vector<std::string> data_lines;
  for (std::string line; std::getline(ship, line);)
    if (!line.empty() && line[0] != '#') data_lines.push_back(line);
  ASSERT_EQ(data_lines.size(), 4u);
  EXPECT_EQ(data_lines[0], "60 30.000 30.000 30.000 30.000");

  const auto again = emit_plot(BenchReport::from_csv(report.to_csv()), dir / "plots2");
  EXPECT_EQ(cgtest::read_bytes(again.ship_data), cgtest::read_bytes(files.ship_data));
  EXPECT_EQ(cgtest::read_bytes(again.recover_data), cgtest::read_bytes(files.recover_data));
}

TEST(EmitPlot, EmptyReport) {
  cgtest::TempDir dir;
  EXPECT_CG_ERROR(emit_plot(BenchReport{}, dir.path()), ErrorCode::IoFailure);
}
