// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cloudguardian/error.hpp>
#include <cloudguardian/simchain.hpp>

#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

namespace cloudguardian {

namespace {

template <std::size_t N>
std::array<std::uint8_t, N> parse_hex_bytes(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() != 2 * N) throw std::invalid_argument("hex length mismatch");
  std::array<std::uint8_t, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    const int hi = nibble(hex[2 * i]), lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit");
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

}  // namespace

std::string ContractAddress::str() const { return "0x" + to_hex(bytes); }

ContractAddress ContractAddress::parse(std::string_view text) {
  if (text.size() != 42 || text.substr(0, 2) != "0x")
    throw std::invalid_argument("contract address must be 0x + 40 hex chars");
  return ContractAddress{parse_hex_bytes<20>(text.substr(2))};
}

void ChainConfig::validate() const {
  if (block_gas_limit == 0) throw Error(ErrorCode::InvalidConfig, "block_gas_limit must be > 0");
}

BigUint storage_gas(std::uint64_t chars, const GasModel& g) {
  return BigUint(chars) * GasModel::bytes_per_char * g.price_per_byte;
}

struct SimChain::Contract {
  std::map<std::string, std::string> data;
  std::vector<ChainEvent> log;
  std::uint64_t tx_count = 0;
  std::atomic<std::uint64_t> call_count{0};
  std::uint64_t bytes_stored = 0;
  std::uint64_t total_gas = 0;
};

SimChain::SimChain(ChainConfig cfg) : cfg_(std::move(cfg)), rng_(make_random_source(cfg_.rng_seed)) {
  cfg_.validate();
}

SimChain::~SimChain() = default;

SimChain::Contract& SimChain::contract_locked(const ContractAddress& addr) const {
  const auto it = contracts_.find(addr);
  if (it == contracts_.end()) throw Error(ErrorCode::UnknownContract, addr.str());
  return *it->second;
}

void SimChain::simulate_delay(std::uint32_t ms) const {
  if (cfg_.mode == ChainMode::Latency && ms > 0)
    std::this_thread::sleep_for(std::chrono::milliseconds(ms));
}

ContractAddress SimChain::deploy_contract() {
  std::unique_lock lock(mutex_);
  ContractAddress addr;
  do {
    addr.bytes = rng_->bytes<20>();
  } while (contracts_.contains(addr));
  contracts_.emplace(addr, std::make_unique<Contract>());
  return addr;
}

TxReceipt SimChain::mine_locked(Contract& c, std::uint64_t gas, ChainEvent ev) {
  // Confirmation delay is taken while holding the writer lock: blocks are
  // produced one at a time, FIFO.
  simulate_delay(cfg_.tx_latency_ms);
  TxReceipt receipt;
  receipt.tx_hash = rng_->bytes<32>();
  receipt.block = ++block_;
  receipt.gas_used = gas;
  ev.block = receipt.block;
  ev.index = 0;
  c.log.push_back(ev);
  receipt.events.push_back(std::move(ev));
  receipt.status = TxStatus::Mined;
  ++c.tx_count;
  c.total_gas += gas;
  return receipt;
}

TxReceipt SimChain::store_data(const ContractAddress& addr, const std::string& id,
                               const std::string& payload) {
  std::unique_lock lock(mutex_);
  auto& c = contract_locked(addr);
  const BigUint gas = storage_gas(payload.size(), cfg_.gas_model) + cfg_.base_tx_gas;
  if (gas > cfg_.block_gas_limit)
    throw Error(ErrorCode::GasLimitExceeded, "storeData needs " + gas.str() + " gas, block limit is " +
                                                 std::to_string(cfg_.block_gas_limit));
  c.data[id] = payload;
  c.bytes_stored += payload.size() * GasModel::bytes_per_char;
  return mine_locked(c, static_cast<std::uint64_t>(gas), ChainEvent{EventKind::DataStored, id, payload});
}

std::string SimChain::get_data(const ContractAddress& addr, const std::string& id) {
  simulate_delay(cfg_.call_latency_ms);
  std::shared_lock lock(mutex_);
  auto& c = contract_locked(addr);
  ++c.call_count;
  const auto it = c.data.find(id);
  return it == c.data.end() ? std::string{} : it->second;
}

TxReceipt SimChain::remove_data(const ContractAddress& addr, const std::string& id) {
  std::unique_lock lock(mutex_);
  auto& c = contract_locked(addr);
  c.data.erase(id);
  return mine_locked(c, cfg_.base_tx_gas, ChainEvent{EventKind::DataRemoved, id, {}});
}

std::vector<ChainEvent> SimChain::events(const ContractAddress& addr, std::uint64_t from_block) {
  std::shared_lock lock(mutex_);
  const auto& c = contract_locked(addr);
  std::vector<ChainEvent> out;
  for (const auto& ev : c.log)
    if (ev.block >= from_block) out.push_back(ev);
  return out;
}

ChainCounters SimChain::counters(const ContractAddress& addr) {
  std::shared_lock lock(mutex_);
  const auto& c = contract_locked(addr);
  return ChainCounters{c.tx_count, c.call_count.load(), c.bytes_stored, c.total_gas};
}

std::uint64_t SimChain::tip() const {
  std::shared_lock lock(mutex_);
  return block_;
}

std::vector<ContractAddress> SimChain::contracts() const {
  std::shared_lock lock(mutex_);
  std::vector<ContractAddress> out;
  for (const auto& [addr, c] : contracts_) out.push_back(addr);
  return out;
}

std::map<std::string, std::string> SimChain::state(const ContractAddress& addr) const {
  std::shared_lock lock(mutex_);
  return contract_locked(addr).data;
}

void SimChain::save(const std::filesystem::path& path) const {
  using nlohmann::json;
  std::shared_lock lock(mutex_);
  json doc;
  doc["block"] = block_;
  doc["contracts"] = json::array();
  for (const auto& [addr, c] : contracts_) {
    json log = json::array();
    for (const auto& ev : c->log)
      log.push_back({{"kind", ev.kind == EventKind::DataStored ? "dataStored" : "dataRemoved"},
                     {"id", ev.id},
                     {"str", ev.str},
                     {"block", ev.block},
                     {"index", ev.index}});
    doc["contracts"].push_back({{"address", addr.str()},
                                {"data", c->data},
                                {"log", std::move(log)},
                                {"tx_count", c->tx_count},
                                {"call_count", c->call_count.load()},
                                {"bytes_stored", c->bytes_stored},
                                {"total_gas", c->total_gas}});
  }
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + tmp.string());
    out << doc.dump();
    if (!out) throw Error(ErrorCode::IoFailure, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "rename to " + path.string() + ": " + ec.message());
}

std::unique_ptr<SimChain> SimChain::load(const std::filesystem::path& path, ChainConfig cfg) {
  using nlohmann::json;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  auto chain = std::make_unique<SimChain>(std::move(cfg));
  try {
    const json doc = json::parse(in);
    chain->block_ = doc.at("block").get<std::uint64_t>();
    for (const auto& jc : doc.at("contracts")) {
      auto c = std::make_unique<Contract>();
      c->data = jc.at("data").get<std::map<std::string, std::string>>();
      for (const auto& je : jc.at("log"))
        c->log.push_back(ChainEvent{
            je.at("kind").get<std::string>() == "dataStored" ? EventKind::DataStored : EventKind::DataRemoved,
            je.at("id").get<std::string>(), je.at("str").get<std::string>(),
            je.at("block").get<std::uint64_t>(), je.at("index").get<std::uint32_t>()});
      c->tx_count = jc.at("tx_count").get<std::uint64_t>();
      c->call_count = jc.at("call_count").get<std::uint64_t>();
      c->bytes_stored = jc.at("bytes_stored").get<std::uint64_t>();
      c->total_gas = jc.at("total_gas").get<std::uint64_t>();
      chain->contracts_.emplace(ContractAddress::parse(jc.at("address").get<std::string>()), std::move(c));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoFailure, "corrupt chain snapshot " + path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorCode::IoFailure, "corrupt chain snapshot " + path.string() + ": " + e.what());
  }
  return chain;
}

}  // namespace cloudguardian
