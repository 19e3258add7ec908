// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cloudguardian/config.hpp>
#include <cloudguardian/error.hpp>

#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace cloudguardian {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"chain",
     {"gas_price_per_byte", "block_gas_limit", "base_tx_gas", "mode", "tx_latency_ms", "call_latency_ms", "rng_seed",
      "state_path"}},
    {"store", {"path", "pool_size", "acquire_timeout_ms", "durable", "dsn"}},
    {"vault", {"path", "kdf", "remove_on_recover"}},
    {"gateway", {"listen", "session_ttl_s", "users_path"}},
    {"scheduler", {"interval_s", "protocol"}},
};

/// Missing keys take the fallback; present but unparsable ones are errors.
template <class T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
  const auto node = tree.get_child_optional(key);
  if (!node) return fallback;
  const auto value = node->get_value_optional<T>();
  if (!value) throw Error(ErrorCode::InvalidConfig, "bad value for " + key + ": '" + node->data() + "'");
  return *value;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

ServiceConfig parse_config(std::string_view ini_text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(ini_text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  for (const auto& [section, body] : tree) {
    const auto known = kKnownKeys.find(section);
    if (known == kKnownKeys.end()) throw Error(ErrorCode::InvalidConfig, "unknown section [" + section + "]");
    for (const auto& [key, value] : body)
      if (!known->second.contains(key))
        throw Error(ErrorCode::InvalidConfig, "unknown key " + section + "." + key);
  }

  ServiceConfig cfg;
  auto& ch = cfg.chain;
  ch.gas_model.price_per_byte = get<std::uint64_t>(tree, "chain.gas_price_per_byte", ch.gas_model.price_per_byte);
  ch.block_gas_limit = get<std::uint64_t>(tree, "chain.block_gas_limit", ch.block_gas_limit);
  ch.base_tx_gas = get<std::uint64_t>(tree, "chain.base_tx_gas", ch.base_tx_gas);
  const auto mode = get<std::string>(tree, "chain.mode", "instant");
  if (mode == "instant")
    ch.mode = ChainMode::Instant;
  else if (mode == "latency")
    ch.mode = ChainMode::Latency;
  else
    throw Error(ErrorCode::InvalidConfig, "chain.mode must be instant or latency");
  ch.tx_latency_ms = get<std::uint32_t>(tree, "chain.tx_latency_ms", 0);
  ch.call_latency_ms = get<std::uint32_t>(tree, "chain.call_latency_ms", 0);
  if (auto seed = tree.get_optional<std::string>("chain.rng_seed"); seed && !seed->empty())
    ch.rng_seed = get<std::uint64_t>(tree, "chain.rng_seed", 0);
  ch.validate();
  cfg.chain_state_path = resolve(base_dir, get<std::string>(tree, "chain.state_path", "chain_state.json"));

  cfg.store.path = resolve(base_dir, get<std::string>(tree, "store.path", "records.db"));
  cfg.store.pool.size = get<std::size_t>(tree, "store.pool_size", cfg.store.pool.size);
  if (cfg.store.pool.size == 0) throw Error(ErrorCode::InvalidConfig, "store.pool_size must be >= 1");
  cfg.store.pool.acquire_timeout =
      std::chrono::milliseconds(get<std::int64_t>(tree, "store.acquire_timeout_ms", cfg.store.pool.acquire_timeout.count()));
  cfg.store.durable = get<bool>(tree, "store.durable", true);
  if (auto dsn = tree.get_optional<std::string>("store.dsn"); dsn && !dsn->empty()) cfg.store.dsn = *dsn;

  cfg.vault.path = resolve(base_dir, get<std::string>(tree, "vault.path", "id_mapping.vault"));
  const auto kdf = get<std::string>(tree, "vault.kdf", "interactive");
  if (kdf == "interactive")
    cfg.vault.kdf = KdfParams::interactive();
  else if (kdf == "fast")
    cfg.vault.kdf = KdfParams::fast();
  else
    throw Error(ErrorCode::InvalidConfig, "vault.kdf must be interactive or fast");
  cfg.vault.remove_on_recover = get<bool>(tree, "vault.remove_on_recover", true);

  const auto listen = get<std::string>(tree, "gateway.listen", "127.0.0.1:8080");
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::InvalidConfig, "gateway.listen must be host:port");
  cfg.gateway.host = listen.substr(0, colon);
  try {
    cfg.gateway.port = std::stoi(listen.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidConfig, "gateway.listen has a bad port");
  }
  cfg.gateway.session_ttl = std::chrono::seconds(get<std::int64_t>(tree, "gateway.session_ttl_s", 3600));
  if (auto users = tree.get_optional<std::string>("gateway.users_path"); users && !users->empty())
    cfg.gateway.users_path = resolve(base_dir, *users);

  cfg.scheduler.interval = std::chrono::seconds(get<std::int64_t>(tree, "scheduler.interval_s", 0));
  const auto proto = parse_protocol(get<std::string>(tree, "scheduler.protocol", "p2"));
  if (!proto) throw Error(ErrorCode::InvalidConfig, "scheduler.protocol must be p1..p4");
  cfg.scheduler.protocol = *proto;
  return cfg;
}

ServiceConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::filesystem::absolute(path).parent_path());
}

Deployment::Deployment(ServiceConfig cfg, std::string passphrase, Clock& clock) : cfg_(std::move(cfg)) {
  store_ = open_store(cfg_.store);
  if (!cfg_.chain_state_path.empty() && std::filesystem::exists(cfg_.chain_state_path))
    chain_ = SimChain::load(cfg_.chain_state_path, cfg_.chain);
  else
    chain_ = std::make_unique<SimChain>(cfg_.chain);

  const auto contracts = chain_->contracts();
  if (contracts.size() > 1)
    throw Error(ErrorCode::InvalidConfig, "chain snapshot holds more than one contract");
  const ContractAddress addr = contracts.empty() ? chain_->deploy_contract() : contracts.front();

  EngineConfig ec;
  ec.vault_path = cfg_.vault.path;
  ec.passphrase = std::move(passphrase);
  ec.kdf = cfg_.vault.kdf;
  ec.remove_on_recover = cfg_.vault.remove_on_recover;
  engine_ = std::make_unique<SyncEngine>(*store_, *chain_, addr, std::move(ec), clock);
  if (contracts.empty()) checkpoint();
}

Deployment::~Deployment() = default;

void Deployment::checkpoint() {
  if (!cfg_.chain_state_path.empty()) chain_->save(cfg_.chain_state_path);
}

}  // namespace cloudguardian
