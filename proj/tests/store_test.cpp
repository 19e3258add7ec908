// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cloudguardian/bench.hpp>
#include <cloudguardian/store.hpp>

#include <latch>
#include <thread>

#include "test_support.hpp"

using namespace cloudguardian;
using cgtest::at;
using cgtest::rec;

namespace {

class StoreTest : public ::testing::Test {
 protected:
  StoreConfig config(std::size_t pool = 4) {
    StoreConfig cfg;
    cfg.path = dir_ / "records.db";
    cfg.pool.size = pool;
    cfg.durable = false;
    return cfg;
  }

  std::vector<VehicleRecord> contents(RecordStore& s) {
    std::vector<VehicleRecord> out;
    for (const auto& row : s.real_rows()) out.push_back(*row.record);
    return cgtest::sorted(out);
  }

  SurrogateId surrogate(std::uint64_t seed) {
    SeededRandom rng(seed);
    return SurrogateId::generate(rng);
  }

  cgtest::TempDir dir_;
};

}  // namespace

TEST_F(StoreTest, InsertAndList) {
  EmbeddedStore store(config());
  const auto r = rec("AB-12-CD", "000042", at(2024, 5, 1));
  store.insert_record(r);
  EXPECT_EQ(contents(store), std::vector{r});
  EXPECT_CG_ERROR(store.insert_record(rec("bad plate", "000042", at(2024, 5, 1))), ErrorCode::InvalidRecord);
}

TEST_F(StoreTest, DuplicateContentGetsDistinctRows) {
  EmbeddedStore store(config());
  const auto r = rec("AB-12-CD", "000042", at(2024, 5, 1));
  const auto a = store.insert_record(r);
  const auto b = store.insert_record(r);
  EXPECT_NE(a, b);
}

TEST_F(StoreTest, InsertHundred) {
  EmbeddedStore store(config());
  store.insert_records(gen_records(100, 5));
  EXPECT_EQ(store.counts(), (StoreCounts{100, 0, 0}));
}

TEST_F(StoreTest, SwapAndRestore) {
  EmbeddedStore store(config());
  const auto records = gen_records(5, 3);
  const auto ids = store.insert_records(records);
  const std::vector<std::string> three(ids.begin(), ids.begin() + 3);
  const auto s = surrogate(1);
  const auto ph = store.swap_for_placeholder(three, s, at(2024, 6, 1));
  EXPECT_EQ(ph.kind, RowKind::Placeholder);
  EXPECT_EQ(ph.record_count, 3u);
  EXPECT_EQ(ph.surrogate, s);
  EXPECT_EQ(store.counts(), (StoreCounts{2, 1, 3}));

  const std::vector<VehicleRecord> first3(records.begin(), records.begin() + 3);
  EXPECT_EQ(store.restore_records(s, first3), 3u);
  EXPECT_EQ(contents(store), cgtest::sorted(records));
  EXPECT_EQ(store.counts().placeholders, 0u);
}

TEST_F(StoreTest, SwapIsAtomic) {
  EmbeddedStore store(config());
  const auto ids = store.insert_records(gen_records(3, 3));
  const auto before = store.dump();
  const std::vector<std::string> bad{ids[0], ids[1], "999999"};
  EXPECT_CG_ERROR(store.swap_for_placeholder(bad, surrogate(1), at(2024, 6, 1)), ErrorCode::UnknownRow);
  const std::vector<std::string> junk{ids[0], "not-a-row"};
  EXPECT_CG_ERROR(store.swap_for_placeholder(junk, surrogate(1), at(2024, 6, 1)), ErrorCode::UnknownRow);
  const auto after = store.dump();
  ASSERT_EQ(after.size(), before.size());
  for (std::size_t i = 0; i < after.size(); ++i) EXPECT_EQ(after[i].record, before[i].record);
}

TEST_F(StoreTest, SwapEach) {
  EmbeddedStore store(config());
  const auto ids = store.insert_records(gen_records(3, 3));
  std::vector<std::pair<std::string, SurrogateId>> swaps;
  for (std::size_t i = 0; i < ids.size(); ++i) swaps.emplace_back(ids[i], surrogate(10 + i));
  const auto rows = store.swap_each_for_placeholder(swaps, at(2024, 6, 1));
  EXPECT_EQ(rows.size(), 3u);
  EXPECT_EQ(store.counts(), (StoreCounts{0, 3, 3}));
}

TEST_F(StoreTest, RestoreEdgeCases) {
  EmbeddedStore store(config());
  const auto ids = store.insert_records(gen_records(2, 3));
  const auto s = surrogate(1);
  store.swap_for_placeholder(ids, s, at(2024, 6, 1));
  EXPECT_EQ(store.restore_records(s, {}), 0u);
  EXPECT_EQ(store.counts(), (StoreCounts{0, 0, 0}));
  EXPECT_CG_ERROR(store.restore_records(s, {}), ErrorCode::UnknownSurrogate);
}

TEST_F(StoreTest, RestoreSubsetDecrements) {
  EmbeddedStore store(config());
  const auto records = gen_records(4, 8);
  const auto s = surrogate(2);
  store.swap_for_placeholder(store.insert_records(records), s, at(2024, 6, 1));
  const std::vector<VehicleRecord> one{records[0]};
  EXPECT_EQ(store.restore_subset(s, one), 1u);
  EXPECT_EQ(store.counts(), (StoreCounts{1, 1, 3}));
  const std::vector<VehicleRecord> too_many(4, records[1]);
  EXPECT_CG_ERROR(store.restore_subset(s, too_many), ErrorCode::PayloadMismatch);
  EXPECT_EQ(store.counts(), (StoreCounts{1, 1, 3}));
  const std::vector<VehicleRecord> rest(records.begin() + 1, records.end());
  store.restore_subset(s, rest);
  EXPECT_EQ(store.counts(), (StoreCounts{4, 0, 0}));
  EXPECT_EQ(contents(store), cgtest::sorted(records));
}

TEST_F(StoreTest, QueryMatchesLinearScan) {
  EmbeddedStore store(config());
  const auto records = gen_records(500, 21);
  store.insert_records(records);
  const std::vector<RetrievalFilter> filters{
      {},
      {workload_device(3), std::nullopt, std::nullopt},
      {std::nullopt, at(2024, 5, 2), at(2024, 5, 4, 12)},
      {workload_device(0), at(2024, 5, 3), at(2024, 5, 3, 23, 59, 59)},
      {std::string("ZZZZZZ"), std::nullopt, std::nullopt},
  };
  for (const auto& f : filters) {
    std::vector<VehicleRecord> oracle;
    for (const auto& r : records)
      if (f.matches(r)) oracle.push_back(r);
    std::sort(oracle.begin(), oracle.end(), record_order);
    EXPECT_EQ(store.query(f), oracle);
  }
  EXPECT_CG_ERROR(store.query(RetrievalFilter{std::nullopt, at(2024, 5, 2), at(2024, 5, 1)}), ErrorCode::InvalidFilter);
}

TEST_F(StoreTest, SwapErasesPlaintextFromFile) {
  EmbeddedStore store(config());
  const auto records = gen_records(50, 4);
  const auto ids = store.insert_records(records);
  ASSERT_NE(cgtest::read_dir_bytes(dir_.path()).find(records[0].plate), std::string::npos);
  store.swap_for_placeholder(ids, surrogate(3), at(2024, 6, 1));
  const auto bytes = cgtest::read_dir_bytes(dir_.path());
  for (const auto& r : records) {
    EXPECT_EQ(bytes.find(r.plate), std::string::npos) << r.plate;
    EXPECT_EQ(bytes.find(r.device_id), std::string::npos) << r.device_id;
  }
}

TEST_F(StoreTest, PersistsAcrossReopen) {
  const auto records = gen_records(10, 2);
  {
    EmbeddedStore store(config());
    store.insert_records(records);
  }
  EmbeddedStore store(config());
  EXPECT_EQ(contents(store), cgtest::sorted(records));
}

TEST_F(StoreTest, ConfigErrors) {
  auto cfg = config();
  cfg.dsn = "postgres://x";
  EXPECT_CG_ERROR(EmbeddedStore{cfg}, ErrorCode::InvalidConfig);
  cfg = config(0);
  EXPECT_CG_ERROR(EmbeddedStore{cfg}, ErrorCode::InvalidConfig);
  cfg = config();
  cfg.path = dir_ / "no" / "such" / "dir" / "x.db";
  EXPECT_CG_ERROR(EmbeddedStore{cfg}, ErrorCode::StoreUnavailable);
}

TEST_F(StoreTest, PoolFreshAndSequential) {
  EmbeddedStore store(config(4));
  auto st = store.pool_stats();
  EXPECT_EQ(st.in_use, 0u);
  EXPECT_EQ(st.idle, 4u);
  store.insert_records(gen_records(20, 1));
  const auto base = store.pool_stats().total_acquires;
  for (int i = 0; i < 100; ++i) store.query({});
  st = store.pool_stats();
  EXPECT_LE(st.peak_in_use, 4u);
  EXPECT_EQ(st.total_acquires - base, 100u);
  EXPECT_EQ(st.in_use, 0u);
}

TEST_F(StoreTest, PoolConcurrentPeak) {
  EmbeddedStore store(config(4));
  store.insert_records(gen_records(20000, 1));
  const auto base = store.pool_stats().total_acquires;
  std::latch gate(100);
  {
    std::vector<std::jthread> threads;
    for (int i = 0; i < 100; ++i)
      threads.emplace_back([&] {
        gate.arrive_and_wait();
        store.query({});
      });
  }
  const auto st = store.pool_stats();
  EXPECT_EQ(st.peak_in_use, 4u);
  EXPECT_EQ(st.total_acquires - base, 100u);
}

TEST(Pool, TimeoutWhenExhausted) {
  Pool<int> pool(1, [] { return std::make_unique<int>(7); });
  auto a = pool.try_acquire(std::chrono::milliseconds(10));
  ASSERT_TRUE(a);
  EXPECT_EQ(**a, 7);
  EXPECT_FALSE(pool.try_acquire(std::chrono::milliseconds(10)));
  a.reset();
  EXPECT_TRUE(pool.try_acquire(std::chrono::milliseconds(10)));
  EXPECT_EQ(pool.stats().total_acquires, 2u);
}
