// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cloudguardian/error.hpp>
#include <cloudguardian/sync_engine.hpp>

#include <algorithm>
#include <mutex>

#include <json.hpp>

namespace cloudguardian {

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

nlohmann::ordered_json filter_json(const RetrievalFilter& f) {
  auto j = nlohmann::ordered_json::object();
  if (f.device_id) j["device_id"] = *f.device_id;
  if (f.from) j["from"] = format_timestamp(*f.from);
  if (f.to) j["to"] = format_timestamp(*f.to);
  return j;
}

}  // namespace

std::string ExportFile::to_json() const {
  nlohmann::ordered_json doc;
  doc["generated_at"] = format_timestamp(generated_at);
  doc["filter"] = filter_json(filter);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : records)
    rows.push_back({{"plate", r.plate}, {"device_id", r.device_id}, {"captured_at", format_timestamp(r.captured_at)}});
  doc["records"] = std::move(rows);
  return doc.dump(2) + "\n";
}

ExportFile ExportFile::from_json(std::string_view text) {
  auto ts = [](const nlohmann::json& j) {
    auto t = parse_timestamp(j.get<std::string>());
    if (!t) throw std::invalid_argument("bad timestamp in export file");
    return *t;
  };
  const auto doc = nlohmann::json::parse(text);
  ExportFile f;
  f.generated_at = ts(doc.at("generated_at"));
  const auto& jf = doc.at("filter");
  if (jf.contains("device_id")) f.filter.device_id = jf.at("device_id").get<std::string>();
  if (jf.contains("from")) f.filter.from = ts(jf.at("from"));
  if (jf.contains("to")) f.filter.to = ts(jf.at("to"));
  for (const auto& jr : doc.at("records"))
    f.records.push_back(
        VehicleRecord{jr.at("plate").get<std::string>(), jr.at("device_id").get<std::string>(), ts(jr.at("captured_at"))});
  return f;
}

SyncEngine::SyncEngine(RecordStore& store, ChainBackend& chain, ContractAddress contract, EngineConfig cfg,
                       Clock& clock)
    : store_(store),
      chain_(chain),
      contract_(contract),
      cfg_(std::move(cfg)),
      clock_(clock),
      rng_(make_random_source(cfg_.rng_seed)) {
  if (cfg_.passphrase.empty()) throw Error(ErrorCode::InvalidConfig, "vault passphrase is empty");
}

IdMapping SyncEngine::mapping() const {
  if (!std::filesystem::exists(cfg_.vault_path)) return {};
  return vault_load(cfg_.vault_path, cfg_.passphrase);
}

void SyncEngine::save(const IdMapping& m) const { vault_save(m, cfg_.vault_path, cfg_.passphrase, cfg_.kdf); }

AnchorOutcome SyncEngine::anchor(Protocol protocol) {
  std::unique_lock lock(op_mutex_);
  Stopwatch sw;
  const auto rows = store_.real_rows();
  if (rows.empty()) throw Error(ErrorCode::NothingToAnchor, "the store holds no real records");

  IdMapping m = mapping();
  const Timestamp now = clock_.now_seconds();
  AnchorOutcome out;
  out.protocol = protocol;
  out.records_anchored = rows.size();

  // Chain first, then vault, then store: a crash at any point leaves the
  // records either still in the store or recoverable from the chain.
  if (protocol == Protocol::P1) {
    std::vector<std::pair<std::string, SurrogateId>> swaps;
    swaps.reserve(rows.size());
    for (const auto& row : rows) {
      const auto id = ChainId::generate(*rng_);
      const auto receipt = chain_.store_data(contract_, id.str(), encode_record(*row.record).text());
      ++out.tx_count;
      out.gas_total += receipt.gas_used;
      // The placeholder reuses the chain id's random part, so the store
      // row points straight at its on-chain record.
      auto surrogate = SurrogateId::from_hex(id.hex());
      m.put(id, MappingEntry{1, now, Protocol::P1, surrogate});
      swaps.emplace_back(row.row_id, std::move(surrogate));
      out.chain_ids.push_back(id);
    }
    save(m);
    store_.swap_each_for_placeholder(swaps, now);
  } else {
    std::vector<VehicleRecord> records;
    std::vector<std::string> row_ids;
    records.reserve(rows.size());
    row_ids.reserve(rows.size());
    for (const auto& row : rows) {
      records.push_back(*row.record);
      row_ids.push_back(row.row_id);
    }
    const Payload payload = encode_records(records);
    const auto id = ChainId::generate(*rng_);
    const auto surrogate = SurrogateId::generate(*rng_);
    const auto receipt = chain_.store_data(contract_, id.str(), payload.text());
    out.tx_count = 1;
    out.gas_total = receipt.gas_used;
    out.chain_ids.push_back(id);
    m.put(id, MappingEntry{records.size(), now, Protocol::P2, surrogate});
    save(m);
    store_.swap_for_placeholder(row_ids, surrogate, now);
  }
  out.elapsed_ms = sw.elapsed_ms();
  return out;
}

std::vector<SyncEngine::Fetched> SyncEngine::fetch_all(const IdMapping& m, std::uint64_t& calls) {
  std::vector<Fetched> out;
  out.reserve(m.size());
  for (const auto& [id, entry] : m.entries()) {
    const std::string text = chain_.get_data(contract_, id.str());
    ++calls;
    if (text.size() != entry.record_count * kRecordWidth)
      throw Error(ErrorCode::PayloadMismatch, id.str() + ": expected " + std::to_string(entry.record_count) +
                                                  " records, chain holds " + std::to_string(text.size()) + " chars");
    try {
      out.push_back(Fetched{id, entry, decode_records(Payload(text))});
    } catch (const Error& e) {
      throw Error(ErrorCode::PayloadMismatch, id.str() + ": " + e.what());
    }
  }
  return out;
}

RecoveryOutcome SyncEngine::recover_all(Protocol protocol) {
  std::unique_lock lock(op_mutex_);
  Stopwatch sw;
  RecoveryOutcome out;
  out.protocol = protocol;
  IdMapping m = mapping();
  const auto fetched = fetch_all(m, out.chain_calls);

  std::vector<std::pair<SurrogateId, std::vector<VehicleRecord>>> batch;
  batch.reserve(fetched.size());
  for (const auto& f : fetched) batch.emplace_back(f.entry.surrogate, f.records);
  out.records_restored = store_.restore_batch(batch);

  for (const auto& f : fetched) m.remove(f.id);
  save(m);
  if (cfg_.remove_on_recover) {
    for (const auto& f : fetched) {
      chain_.remove_data(contract_, f.id.str());
      ++out.chain_txs;
    }
  }
  out.elapsed_ms = sw.elapsed_ms();
  return out;
}

ExportResult SyncEngine::export_filtered(const RetrievalFilter& filter) {
  filter.validate();
  std::shared_lock lock(op_mutex_);
  Stopwatch sw;
  ExportResult res;
  res.outcome.protocol = Protocol::P3;
  const auto fetched = fetch_all(mapping(), res.outcome.chain_calls);
  for (const auto& f : fetched)
    std::copy_if(f.records.begin(), f.records.end(), std::back_inserter(res.file.records),
                 [&](const VehicleRecord& r) { return filter.matches(r); });
  std::sort(res.file.records.begin(), res.file.records.end(), record_order);
  res.file.generated_at = clock_.now_seconds();
  res.file.filter = filter;
  res.outcome.records_exported = res.file.records.size();
  res.outcome.elapsed_ms = sw.elapsed_ms();
  return res;
}

RecoveryOutcome SyncEngine::recover_filtered(const RetrievalFilter& filter) {
  filter.validate();
  std::unique_lock lock(op_mutex_);
  Stopwatch sw;
  RecoveryOutcome out;
  out.protocol = Protocol::P4;
  IdMapping m = mapping();
  const auto fetched = fetch_all(m, out.chain_calls);

  std::vector<std::pair<SurrogateId, std::vector<VehicleRecord>>> restores;
  std::vector<ChainId> retired;
  for (const auto& f : fetched) {
    std::vector<VehicleRecord> hit, keep;
    for (const auto& r : f.records) (filter.matches(r) ? hit : keep).push_back(r);
    if (hit.empty()) continue;
    if (!keep.empty()) {
      const auto fresh = ChainId::generate(*rng_);
      chain_.store_data(contract_, fresh.str(), encode_records(keep).text());
      ++out.chain_txs;
      m.put(fresh, MappingEntry{keep.size(), f.entry.anchored_at, f.entry.protocol, f.entry.surrogate});
    }
    m.remove(f.id);
    retired.push_back(f.id);
    restores.emplace_back(f.entry.surrogate, std::move(hit));
  }
  if (restores.empty()) {
    out.elapsed_ms = sw.elapsed_ms();
    return out;
  }

  save(m);
  out.records_restored = store_.restore_subsets(restores);
  if (cfg_.remove_on_recover) {
    for (const auto& id : retired) {
      chain_.remove_data(contract_, id.str());
      ++out.chain_txs;
    }
  }
  out.elapsed_ms = sw.elapsed_ms();
  return out;
}

EngineStatus SyncEngine::status() {
  std::shared_lock lock(op_mutex_);
  const auto m = mapping();
  return EngineStatus{store_.counts(), m.size(), m.total_records(), chain_.counters(contract_)};
}

}  // namespace cloudguardian
