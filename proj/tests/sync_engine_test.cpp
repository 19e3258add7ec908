// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cloudguardian/bench.hpp>
#include <cloudguardian/sync_engine.hpp>

#include <set>

#include "test_support.hpp"

using namespace cloudguardian;
using cgtest::at;
using cgtest::rec;

namespace {

/// Forwards to a real chain until told to fail.
class FlakyChain final : public ChainBackend {
 public:
  explicit FlakyChain(ChainBackend& inner) : inner_(inner) {}

  bool down = false;

  ContractAddress deploy_contract() override { return inner_.deploy_contract(); }
  TxReceipt store_data(const ContractAddress& a, const std::string& id, const std::string& p) override {
    check();
    return inner_.store_data(a, id, p);
  }
  std::string get_data(const ContractAddress& a, const std::string& id) override {
    check();
    return inner_.get_data(a, id);
  }
  TxReceipt remove_data(const ContractAddress& a, const std::string& id) override {
    check();
    return inner_.remove_data(a, id);
  }
  std::vector<ChainEvent> events(const ContractAddress& a, std::uint64_t from) override {
    return inner_.events(a, from);
  }
  ChainCounters counters(const ContractAddress& a) override { return inner_.counters(a); }

 private:
  void check() const {
    if (down) throw Error(ErrorCode::ChainUnavailable, "node unreachable");
  }
  ChainBackend& inner_;
};

class EngineTest : public ::testing::Test {
 protected:
  EngineTest() {
    StoreConfig sc;
    sc.path = dir_ / "records.db";
    sc.durable = false;
    store_ = std::make_unique<EmbeddedStore>(sc);
    ChainConfig cc;
    cc.rng_seed = 5;
    chain_ = std::make_unique<SimChain>(cc);
    contract_ = chain_->deploy_contract();
    engine_ = make_engine(*chain_);
  }

  std::unique_ptr<SyncEngine> make_engine(ChainBackend& chain, bool remove_on_recover = true) {
    EngineConfig ec;
    ec.vault_path = dir_ / "id_mapping.vault";
    ec.passphrase = "test-pass";
    ec.kdf = KdfParams::fast();
    ec.rng_seed = 9;
    ec.remove_on_recover = remove_on_recover;
    return std::make_unique<SyncEngine>(*store_, chain, contract_, ec, clock_);
  }

  std::vector<VehicleRecord> real() {
    std::vector<VehicleRecord> out;
    for (const auto& r : store_->real_rows()) out.push_back(*r.record);
    return cgtest::sorted(out);
  }

  std::vector<VehicleRecord> ingest(std::size_t n, std::uint64_t seed) {
    auto rs = gen_records(n, seed);
    store_->insert_records(rs);
    return rs;
  }

  std::string store_and_vault_bytes() {
    std::string all;
    for (const auto& row : store_->dump()) {
      if (row.record) all += encode_record(*row.record).text();
      if (row.surrogate) all += row.surrogate->str();
    }
    return all + cgtest::read_dir_bytes(dir_.path());
  }

  cgtest::TempDir dir_;
  ManualClock clock_{Clock::time_point{std::chrono::sys_days{std::chrono::year{2024} / 6 / 1}}};
  std::unique_ptr<EmbeddedStore> store_;
  std::unique_ptr<SimChain> chain_;
  ContractAddress contract_;
  std::unique_ptr<SyncEngine> engine_;
};

}  // namespace

TEST_F(EngineTest, NothingToAnchor) {
  for (auto p : {Protocol::P1, Protocol::P2, Protocol::P3, Protocol::P4})
    EXPECT_CG_ERROR(engine_->anchor(p), ErrorCode::NothingToAnchor);
  EXPECT_FALSE(std::filesystem::exists(dir_ / "id_mapping.vault"));
}

TEST_F(EngineTest, P1ThreeRecords) {
  ingest(3, 1);
  const auto out = engine_->anchor(Protocol::P1);
  EXPECT_EQ(out.tx_count, 3u);
  EXPECT_EQ(out.records_anchored, 3u);
  EXPECT_EQ(out.gas_total, 3u * 144u);
  EXPECT_EQ(engine_->mapping().size(), 3u);
  EXPECT_EQ(store_->counts(), (StoreCounts{0, 3, 3}));
}

TEST_F(EngineTest, P2ThreeRecords) {
  ingest(3, 1);
  const auto out = engine_->anchor(Protocol::P2);
  EXPECT_EQ(out.tx_count, 1u);
  EXPECT_EQ(out.gas_total, 432u);
  ASSERT_EQ(out.chain_ids.size(), 1u);
  EXPECT_EQ(chain_->get_data(contract_, out.chain_ids[0].str()).size(), 108u);
  EXPECT_EQ(store_->counts(), (StoreCounts{0, 1, 3}));
}

TEST_F(EngineTest, GasWithPriceAndBase) {
  ChainConfig cc;
  cc.rng_seed = 1;
  cc.gas_model.price_per_byte = 10;
  cc.base_tx_gas = 21000;
  SimChain chain(cc);
  contract_ = chain.deploy_contract();
  auto engine = make_engine(chain);
  ingest(3, 1);
  EXPECT_EQ(engine->anchor(Protocol::P2).gas_total, 4320u + 21000u);
  ingest(3, 2);
  EXPECT_EQ(engine->anchor(Protocol::P1).gas_total, 3u * (1440u + 21000u));
}

TEST_F(EngineTest, TransactionCountLaw) {
  for (std::size_t n : {1u, 10u, 100u}) {
    for (auto p : {Protocol::P1, Protocol::P2, Protocol::P3, Protocol::P4}) {
      ingest(n, n);
      const auto before = chain_->counters(contract_).tx_count;
      const auto out = engine_->anchor(p);
      const auto sent = chain_->counters(contract_).tx_count - before;
      EXPECT_EQ(sent, p == Protocol::P1 ? n : 1u) << to_string(p) << " n=" << n;
      EXPECT_EQ(out.tx_count, sent);
    }
  }
}

TEST_F(EngineTest, RecoverAllRoundTrip) {
  const auto records = ingest(200, 4);
  engine_->anchor(Protocol::P2);
  EXPECT_TRUE(real().empty());
  const auto out = engine_->recover_all(Protocol::P2);
  EXPECT_EQ(out.records_restored, 200u);
  EXPECT_EQ(out.chain_calls, 1u);
  EXPECT_EQ(out.chain_txs, 1u);
  EXPECT_EQ(real(), cgtest::sorted(records));
  EXPECT_EQ(store_->counts().placeholders, 0u);
  EXPECT_TRUE(engine_->mapping().empty());
  EXPECT_TRUE(chain_->state(contract_).empty());
}

TEST_F(EngineTest, RecoverAllAfterSeveralBatches) {
  std::vector<VehicleRecord> all;
  for (std::uint64_t k = 0; k < 4; ++k) {
    const auto rs = ingest(5 + k, 40 + k);
    all.insert(all.end(), rs.begin(), rs.end());
    engine_->anchor(k % 2 ? Protocol::P1 : Protocol::P2);
  }
  const std::size_t entries = engine_->mapping().size();
  EXPECT_EQ(entries, 2u + 6u + 8u);
  const auto out = engine_->recover_all(Protocol::P2);
  EXPECT_EQ(out.chain_calls, entries);
  EXPECT_EQ(real(), cgtest::sorted(all));
}

TEST_F(EngineTest, RecoverKeepsChainWhenConfigured) {
  auto engine = make_engine(*chain_, false);
  ingest(4, 1);
  engine->anchor(Protocol::P2);
  const auto out = engine->recover_all(Protocol::P2);
  EXPECT_EQ(out.chain_txs, 0u);
  EXPECT_EQ(chain_->state(contract_).size(), 1u);
}

TEST_F(EngineTest, TamperedPayloadIsDetected) {
  ingest(3, 1);
  const auto id = engine_->anchor(Protocol::P2).chain_ids.at(0);
  chain_->store_data(contract_, id.str(), std::string(72, 'A'));
  EXPECT_CG_ERROR(engine_->recover_all(Protocol::P2), ErrorCode::PayloadMismatch);
  EXPECT_CG_ERROR(engine_->export_filtered({}), ErrorCode::PayloadMismatch);
  EXPECT_EQ(store_->counts(), (StoreCounts{0, 1, 3}));
  EXPECT_EQ(engine_->mapping().size(), 1u);
}

TEST_F(EngineTest, GarbledPayloadIsDetected) {
  ingest(1, 1);
  const auto id = engine_->anchor(Protocol::P2).chain_ids.at(0);
  chain_->store_data(contract_, id.str(), std::string(36, '?'));
  EXPECT_CG_ERROR(engine_->recover_all(Protocol::P2), ErrorCode::PayloadMismatch);
}

TEST_F(EngineTest, ExportMatchesLinearScan) {
  const auto records = ingest(300, 8);
  engine_->anchor(Protocol::P2);
  ingest(40, 9);
  const auto extra = gen_records(40, 9);
  engine_->anchor(Protocol::P1);
  std::vector<VehicleRecord> anchored = records;
  anchored.insert(anchored.end(), extra.begin(), extra.end());

  const std::vector<RetrievalFilter> filters{
      {},
      {workload_device(2), std::nullopt, std::nullopt},
      RetrievalFilter::day(std::chrono::year{2024} / 5 / 3),
      {workload_device(7), at(2024, 5, 2), at(2024, 5, 5)},
  };
  const auto tx_before = chain_->counters(contract_).tx_count;
  const auto dump_before = store_->dump().size();
  const auto ops_before = store_->op_count();
  const auto vault_before = cgtest::read_bytes(dir_ / "id_mapping.vault");
  for (const auto& f : filters) {
    std::vector<VehicleRecord> oracle;
    for (const auto& r : anchored)
      if (f.matches(r)) oracle.push_back(r);
    std::sort(oracle.begin(), oracle.end(), record_order);
    const auto res = engine_->export_filtered(f);
    EXPECT_EQ(res.file.records, oracle);
    EXPECT_EQ(res.outcome.chain_txs, 0u);
    EXPECT_EQ(res.outcome.records_restored, 0u);
    EXPECT_EQ(res.outcome.records_exported, oracle.size());
  }
  EXPECT_EQ(chain_->counters(contract_).tx_count, tx_before);
  EXPECT_EQ(store_->op_count(), ops_before);
  EXPECT_EQ(store_->dump().size(), dump_before);
  EXPECT_EQ(cgtest::read_bytes(dir_ / "id_mapping.vault"), vault_before);
}

TEST_F(EngineTest, ExportPartitionByDevice) {
  const auto records = ingest(400, 12);
  engine_->anchor(Protocol::P2);
  std::vector<VehicleRecord> united;
  for (std::size_t d = 0; d < 10; ++d) {
    const auto part = engine_->export_filtered({workload_device(d), std::nullopt, std::nullopt}).file.records;
    united.insert(united.end(), part.begin(), part.end());
  }
  EXPECT_EQ(cgtest::sorted(united), cgtest::sorted(records));
}

TEST_F(EngineTest, ExportFileIsDeterministicJson) {
  ingest(20, 3);
  engine_->anchor(Protocol::P2);
  const RetrievalFilter f{workload_device(1), at(2024, 5, 1), at(2024, 5, 8)};
  const auto a = engine_->export_filtered(f).file.to_json();
  const auto b = engine_->export_filtered(f).file.to_json();
  EXPECT_EQ(a, b);
  const auto back = ExportFile::from_json(a);
  EXPECT_EQ(back.filter, f);
  EXPECT_EQ(back.records, engine_->export_filtered(f).file.records);
  EXPECT_NE(a.find("\"generated_at\": \"2024-06-01T00:00:00Z\""), std::string::npos);
}

TEST_F(EngineTest, ExportRejectsBadFilter) {
  EXPECT_CG_ERROR(engine_->export_filtered({std::nullopt, at(2024, 5, 2), at(2024, 5, 1)}), ErrorCode::InvalidFilter);
  EXPECT_CG_ERROR(engine_->recover_filtered({std::string("x"), std::nullopt, std::nullopt}), ErrorCode::InvalidFilter);
}

TEST_F(EngineTest, RecoverFilteredSubset) {
  const auto records = ingest(300, 6);
  engine_->anchor(Protocol::P2);
  const RetrievalFilter f{workload_device(4), std::nullopt, std::nullopt};
  std::vector<VehicleRecord> hit;
  for (const auto& r : records)
    if (f.matches(r)) hit.push_back(r);
  ASSERT_FALSE(hit.empty());

  const auto out = engine_->recover_filtered(f);
  EXPECT_EQ(out.records_restored, hit.size());
  EXPECT_EQ(real(), cgtest::sorted(hit));
  const auto m = engine_->mapping();
  EXPECT_EQ(m.total_records(), records.size() - hit.size());
  EXPECT_EQ(store_->counts().anchored_records, records.size() - hit.size());
  EXPECT_EQ(store_->counts().placeholders, 1u);
  // The remainder is re-keyed but still points at the same placeholder.
  EXPECT_EQ(m.entries().begin()->second.surrogate, store_->placeholders().at(0).surrogate);
  EXPECT_EQ(chain_->state(contract_).size(), 1u);
}

TEST_F(EngineTest, RecoverFilteredNoneAndAll) {
  const auto records = ingest(50, 6);
  engine_->anchor(Protocol::P2);
  const auto none = engine_->recover_filtered({std::string("ZZZZZZ"), std::nullopt, std::nullopt});
  EXPECT_EQ(none.records_restored, 0u);
  EXPECT_EQ(none.chain_txs, 0u);
  EXPECT_TRUE(real().empty());
  const auto all = engine_->recover_filtered({});
  EXPECT_EQ(all.records_restored, 50u);
  EXPECT_EQ(real(), cgtest::sorted(records));
  EXPECT_TRUE(engine_->mapping().empty());
  EXPECT_EQ(store_->counts().placeholders, 0u);
  EXPECT_TRUE(chain_->state(contract_).empty());
}

TEST_F(EngineTest, RecoverFilteredExhaustivePartition) {
  const auto records = ingest(300, 31);
  engine_->anchor(Protocol::P2);
  ingest(30, 32);
  const auto more = gen_records(30, 32);
  engine_->anchor(Protocol::P1);
  for (int day = 1; day <= 7; ++day)
    engine_->recover_filtered(RetrievalFilter::day(std::chrono::year{2024} / 5 / day));
  std::vector<VehicleRecord> all = records;
  all.insert(all.end(), more.begin(), more.end());
  EXPECT_EQ(real(), cgtest::sorted(all));
  EXPECT_TRUE(engine_->mapping().empty());
  EXPECT_EQ(store_->counts().placeholders, 0u);
}

TEST_F(EngineTest, SecrecyAfterAnchor) {
  for (auto p : {Protocol::P1, Protocol::P2, Protocol::P3, Protocol::P4}) {
    const auto records = ingest(60, 70 + static_cast<int>(p));
    engine_->anchor(p);
    const auto bytes = store_and_vault_bytes();
    for (const auto& r : records) {
      ASSERT_EQ(bytes.find(r.plate), std::string::npos) << to_string(p) << " " << r.plate;
      ASSERT_EQ(bytes.find(r.device_id), std::string::npos) << to_string(p) << " " << r.device_id;
    }
    // The chain itself holds the data.
    std::string chain_bytes;
    for (const auto& [k, v] : chain_->state(contract_)) chain_bytes += v;
    EXPECT_NE(chain_bytes.find(records[0].plate), std::string::npos);
  }
}

TEST_F(EngineTest, P1SurrogateCorrespondsToChainId) {
  ingest(5, 1);
  engine_->anchor(Protocol::P1);
  const auto m = engine_->mapping();
  std::set<std::string> chain_hex;
  for (const auto& [id, e] : m.entries()) chain_hex.insert(std::string(id.hex()));
  // Anyone reading the store can find the on-chain record of every row.
  for (const auto& ph : store_->placeholders()) {
    ASSERT_TRUE(ph.surrogate);
    EXPECT_TRUE(chain_hex.contains(std::string(ph.surrogate->hex())));
    EXPECT_NE(chain_->get_data(contract_, "ch_" + std::string(ph.surrogate->hex())), "");
  }
}

TEST_F(EngineTest, P2SurrogatesDisjointFromChainIds) {
  for (int k = 0; k < 5; ++k) {
    ingest(10, 100 + k);
    engine_->anchor(Protocol::P2);
  }
  const auto m = engine_->mapping();
  std::set<std::string> chain_hex, chain_ids;
  for (const auto& [id, e] : m.entries()) {
    chain_hex.insert(std::string(id.hex()));
    chain_ids.insert(id.str());
  }
  for (const auto& ph : store_->placeholders()) {
    EXPECT_FALSE(chain_ids.contains(ph.surrogate->str()));
    EXPECT_FALSE(chain_hex.contains(std::string(ph.surrogate->hex())));
    EXPECT_EQ(chain_->get_data(contract_, "ch_" + std::string(ph.surrogate->hex())), "");
  }
}

TEST_F(EngineTest, ChainDownLeavesStateIntact) {
  FlakyChain flaky(*chain_);
  auto engine = make_engine(flaky);
  const auto records = ingest(10, 2);
  flaky.down = true;
  EXPECT_CG_ERROR(engine->anchor(Protocol::P2), ErrorCode::ChainUnavailable);
  EXPECT_CG_ERROR(engine->anchor(Protocol::P1), ErrorCode::ChainUnavailable);
  EXPECT_EQ(real(), cgtest::sorted(records));
  EXPECT_TRUE(engine->mapping().empty());

  flaky.down = false;
  engine->anchor(Protocol::P2);
  flaky.down = true;
  EXPECT_CG_ERROR(engine->recover_all(Protocol::P2), ErrorCode::ChainUnavailable);
  EXPECT_CG_ERROR(engine->export_filtered({}), ErrorCode::ChainUnavailable);
  EXPECT_EQ(store_->counts(), (StoreCounts{0, 1, 10}));
  flaky.down = false;
  engine->recover_all(Protocol::P2);
  EXPECT_EQ(real(), cgtest::sorted(records));
}

TEST_F(EngineTest, GasLimitLeavesStoreIntact) {
  ChainConfig cc;
  cc.rng_seed = 1;
  cc.block_gas_limit = 144 * 10;
  SimChain chain(cc);
  contract_ = chain.deploy_contract();
  auto engine = make_engine(chain);
  ingest(11, 1);
  EXPECT_CG_ERROR(engine->anchor(Protocol::P2), ErrorCode::GasLimitExceeded);
  EXPECT_EQ(store_->counts().real, 11u);
  EXPECT_EQ(engine->anchor(Protocol::P1).tx_count, 11u);
}

TEST_F(EngineTest, WrongPassphrase) {
  ingest(2, 1);
  engine_->anchor(Protocol::P2);
  EngineConfig ec;
  ec.vault_path = dir_ / "id_mapping.vault";
  ec.passphrase = "not-it";
  SyncEngine other(*store_, *chain_, contract_, ec, clock_);
  EXPECT_CG_ERROR(other.recover_all(Protocol::P2), ErrorCode::AuthFailure);
  EXPECT_EQ(store_->counts(), (StoreCounts{0, 1, 2}));
}

TEST_F(EngineTest, Status) {
  ingest(7, 1);
  engine_->anchor(Protocol::P2);
  ingest(2, 2);
  const auto st = engine_->status();
  EXPECT_EQ(st.store, (StoreCounts{2, 1, 7}));
  EXPECT_EQ(st.mapping_entries, 1u);
  EXPECT_EQ(st.anchored_records, 7u);
  EXPECT_EQ(st.chain.tx_count, 1u);
}
