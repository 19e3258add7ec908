// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cloudguardian/error.hpp>
#include <cloudguardian/gateway.hpp>

#include <algorithm>
#include <fstream>

#include <sodium.h>
#include <spdlog/spdlog.h>

#include <httplib.h>
#include <json.hpp>

namespace cloudguardian {

namespace {

using nlohmann::json;

constexpr std::size_t kMinPassword = 8;
constexpr std::size_t kMaxPassword = 128;

std::string hash_password(const std::string& password, const KdfParams& cost) {
  char out[crypto_pwhash_STRBYTES];
  if (crypto_pwhash_str(out, password.data(), password.size(), cost.opslimit,
                        static_cast<std::size_t>(cost.memlimit)) != 0)
    throw Error(ErrorCode::IoFailure, "password hashing ran out of memory");
  return out;
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  res.status = status;
  res.set_content(json{{"error", code}, {"message", message}}.dump(), "application/json");
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidRecord:
    case ErrorCode::MalformedRecord:
    case ErrorCode::InvalidFilter:
    case ErrorCode::EmptyPayload:
      return 400;
    case ErrorCode::NothingToAnchor:
      return 409;
    case ErrorCode::GasLimitExceeded:
      return 413;
    case ErrorCode::ChainUnavailable:
    case ErrorCode::UnknownContract:
    case ErrorCode::PayloadMismatch:
      return 502;
    case ErrorCode::StoreUnavailable:
      return 503;
    default:
      return 500;
  }
}

std::string_view wire_code(ErrorCode code) {
  return code == ErrorCode::AuthFailure ? "VaultAuthFailure" : to_string(code);
}

std::optional<Timestamp> timestamp_field(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto t = parse_timestamp(text);
  if (!t) throw Error(ErrorCode::InvalidFilter, "timestamps must look like 2024-05-01T12:00:00Z");
  return t;
}

RetrievalFilter filter_from_query(const httplib::Request& req) {
  RetrievalFilter f;
  if (req.has_param("device") && !req.get_param_value("device").empty())
    f.device_id = req.get_param_value("device");
  if (req.has_param("from")) f.from = timestamp_field(req.get_param_value("from"));
  if (req.has_param("to")) f.to = timestamp_field(req.get_param_value("to"));
  f.validate();
  return f;
}

RetrievalFilter filter_from_json(const json& j) {
  RetrievalFilter f;
  if (!j.is_object()) throw Error(ErrorCode::InvalidFilter, "filter must be an object");
  if (j.contains("device_id")) f.device_id = j.at("device_id").get<std::string>();
  if (j.contains("from")) f.from = timestamp_field(j.at("from").get<std::string>());
  if (j.contains("to")) f.to = timestamp_field(j.at("to").get<std::string>());
  f.validate();
  return f;
}

json record_json(const VehicleRecord& r) {
  return json{{"plate", r.plate}, {"device_id", r.device_id}, {"captured_at", format_timestamp(r.captured_at)}};
}

json anchor_json(const AnchorOutcome& a) {
  json ids = json::array();
  for (const auto& id : a.chain_ids) ids.push_back(id.str());
  return json{{"protocol", to_string(a.protocol)}, {"tx_count", a.tx_count},       {"chain_ids", ids},
              {"records_anchored", a.records_anchored}, {"gas_total", a.gas_total}, {"elapsed_ms", a.elapsed_ms}};
}

json recovery_json(const RecoveryOutcome& r) {
  return json{{"protocol", to_string(r.protocol)},
              {"chain_calls", r.chain_calls},
              {"chain_txs", r.chain_txs},
              {"records_restored", r.records_restored},
              {"records_exported", r.records_exported},
              {"elapsed_ms", r.elapsed_ms}};
}

std::optional<std::string> bearer_token(const httplib::Request& req) {
  const auto header = req.get_header_value("Authorization");
  constexpr std::string_view prefix = "Bearer ";
  if (header.size() <= prefix.size() || header.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
  return header.substr(prefix.size());
}

}  // namespace

bool is_valid_username(std::string_view username) noexcept {
  return username.size() >= 3 && username.size() <= 32 &&
         std::all_of(username.begin(), username.end(),
                     [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_'; });
}

UserDirectory::UserDirectory(std::optional<std::filesystem::path> path, KdfParams hash_cost, Clock& clock)
    : path_(std::move(path)), cost_(hash_cost), clock_(clock) {
  if (sodium_init() < 0) throw Error(ErrorCode::IoFailure, "libsodium initialisation failed");
  std::array<std::uint8_t, 16> noise{};
  randombytes_buf(noise.data(), noise.size());
  dummy_hash_ = hash_password(to_hex(noise), cost_);
  if (path_ && std::filesystem::exists(*path_)) {
    std::ifstream in(*path_);
    try {
      const auto doc = json::parse(in);
      for (const auto& ju : doc.at("users")) {
        const auto created = parse_timestamp(ju.at("created_at").get<std::string>());
        UserAccount u{ju.at("username").get<std::string>(), ju.at("password_hash").get<std::string>(),
                      created.value_or(Timestamp{})};
        users_.emplace(u.username, std::move(u));
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::IoFailure, "corrupt user file " + path_->string() + ": " + e.what());
    }
  }
}

UserDirectory::RegisterResult UserDirectory::register_user(const std::string& username,
                                                           const std::string& password) {
  if (!is_valid_username(username) || password.size() < kMinPassword || password.size() > kMaxPassword)
    return RegisterResult::WeakInput;
  {
    std::lock_guard lock(mutex_);
    if (users_.contains(username)) return RegisterResult::Duplicate;
  }
  auto hash = hash_password(password, cost_);
  std::lock_guard lock(mutex_);
  if (!users_.emplace(username, UserAccount{username, std::move(hash), clock_.now_seconds()}).second)
    return RegisterResult::Duplicate;
  persist_locked();
  return RegisterResult::Created;
}

bool UserDirectory::verify(const std::string& username, const std::string& password) const {
  std::string hash;
  bool known = false;
  {
    std::lock_guard lock(mutex_);
    if (const auto it = users_.find(username); it != users_.end()) {
      hash = it->second.password_hash;
      known = true;
    } else {
      hash = dummy_hash_;
    }
  }
  const bool ok = crypto_pwhash_str_verify(hash.c_str(), password.data(), password.size()) == 0;
  return known && ok;
}

std::size_t UserDirectory::size() const {
  std::lock_guard lock(mutex_);
  return users_.size();
}

std::optional<UserAccount> UserDirectory::find(const std::string& username) const {
  std::lock_guard lock(mutex_);
  const auto it = users_.find(username);
  if (it == users_.end()) return std::nullopt;
  return it->second;
}

void UserDirectory::persist_locked() const {
  if (!path_) return;
  json users = json::array();
  for (const auto& [name, u] : users_)
    users.push_back(
        {{"username", u.username}, {"password_hash", u.password_hash}, {"created_at", format_timestamp(u.created_at)}});
  const auto tmp = std::filesystem::path(path_->string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << json{{"users", users}}.dump(2);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, *path_);
}

SessionToken SessionTable::issue(const std::string& username) {
  std::array<unsigned char, 32> raw{};
  randombytes_buf(raw.data(), raw.size());
  char encoded[sodium_base64_ENCODED_LEN(32, sodium_base64_VARIANT_URLSAFE_NO_PADDING)];
  sodium_bin2base64(encoded, sizeof(encoded), raw.data(), raw.size(), sodium_base64_VARIANT_URLSAFE_NO_PADDING);
  const auto expires = clock_.now() + ttl_;
  std::lock_guard lock(mutex_);
  sessions_[encoded] = Session{username, expires};
  return SessionToken{encoded, floor_to_seconds(expires)};
}

SessionTable::Check SessionTable::check(const std::string& token) {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(token);
  if (it == sessions_.end()) return Check::Unknown;
  if (clock_.now() >= it->second.expires_at) {
    sessions_.erase(it);
    return Check::Expired;
  }
  return Check::Valid;
}

Gateway::Gateway(SyncEngine& engine, GatewayOptions opts, Clock& clock, std::function<void()> after_mutation)
    : engine_(engine),
      opts_(std::move(opts)),
      clock_(clock),
      after_mutation_(std::move(after_mutation)),
      users_(opts_.users_path, opts_.password_cost, clock),
      sessions_(opts_.session_ttl, clock),
      server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

Gateway::~Gateway() { stop(); }

void Gateway::install_routes() {
  auto& srv = *server_;
  auto mutation_mutex = std::make_shared<std::mutex>();

  // Wraps a handler with error mapping, and optionally token checking and the
  // post-mutation hook.
  auto wrap = [this, mutation_mutex](bool needs_auth, bool mutates, auto handler) {
    return [this, mutation_mutex, needs_auth, mutates, handler](const httplib::Request& req,
                                                                 httplib::Response& res) {
      if (needs_auth) {
        const auto token = bearer_token(req);
        if (!token) return send_error(res, 401, "NoToken", "missing bearer token");
        switch (sessions_.check(*token)) {
          case SessionTable::Check::Valid: break;
          case SessionTable::Check::Expired: return send_error(res, 401, "Expired", "session expired");
          case SessionTable::Check::Unknown: return send_error(res, 401, "InvalidToken", "unknown session");
        }
      }
      try {
        handler(req, res);
        if (mutates && after_mutation_) {
          std::lock_guard lock(*mutation_mutex);
          after_mutation_();
        }
      } catch (const Error& e) {
        send_error(res, http_status(e.code()), wire_code(e.code()), e.what());
      } catch (const json::exception& e) {
        send_error(res, 400, "BadRequest", e.what());
      } catch (const std::exception& e) {
        spdlog::error("{} {}: {}", req.method, req.path, e.what());
        send_error(res, 500, "Internal", "internal error");
      }
    };
  };

  srv.Post("/api/register", wrap(false, false, [this](const httplib::Request& req, httplib::Response& res) {
             const auto body = json::parse(req.body);
             const auto result =
                 users_.register_user(body.at("username").get<std::string>(), body.at("password").get<std::string>());
             switch (result) {
               case UserDirectory::RegisterResult::Created:
                 res.status = 201;
                 res.set_content(json{{"username", body.at("username")}}.dump(), "application/json");
                 return;
               case UserDirectory::RegisterResult::Duplicate:
                 return send_error(res, 409, "DuplicateUser", "username already taken");
               case UserDirectory::RegisterResult::WeakInput:
                 return send_error(res, 400, "WeakInput",
                                   "username must be 3-32 chars of [a-z0-9_], password 8-128 chars");
             }
           }));

  srv.Post("/api/login", wrap(false, false, [this](const httplib::Request& req, httplib::Response& res) {
             const auto body = json::parse(req.body);
             const auto username = body.at("username").get<std::string>();
             if (!users_.verify(username, body.at("password").get<std::string>()))
               return send_error(res, 401, "BadCredentials", "invalid username or password");
             const auto token = sessions_.issue(username);
             res.set_content(json{{"token", token.value}, {"expires_at", format_timestamp(token.expires_at)}}.dump(),
                             "application/json");
           }));

  srv.Post("/api/records", wrap(true, false, [this](const httplib::Request& req, httplib::Response& res) {
             const auto body = json::parse(req.body);
             const auto when = parse_timestamp(body.at("captured_at").get<std::string>());
             if (!when) throw Error(ErrorCode::InvalidRecord, "captured_at must look like 2024-05-01T12:00:00Z");
             const VehicleRecord r{body.at("plate").get<std::string>(), body.at("device_id").get<std::string>(), *when};
             const auto row_id = engine_.store().insert_record(r);
             res.status = 201;
             res.set_content(json{{"row_id", row_id}}.dump(), "application/json");
           }));

  srv.Get("/api/records", wrap(true, false, [this](const httplib::Request& req, httplib::Response& res) {
            json out = json::array();
            for (const auto& r : engine_.store().query(filter_from_query(req))) out.push_back(record_json(r));
            res.set_content(json{{"records", out}}.dump(), "application/json");
          }));

  srv.Post("/api/anchor", wrap(true, true, [this](const httplib::Request& req, httplib::Response& res) {
             const auto body = req.body.empty() ? json::object() : json::parse(req.body);
             const auto proto = parse_protocol(body.value("protocol", std::string("p2")));
             if (!proto) return send_error(res, 400, "BadRequest", "protocol must be p1, p2, p3 or p4");
             res.set_content(anchor_json(engine_.anchor(*proto)).dump(), "application/json");
           }));

  srv.Post("/api/restore", wrap(true, true, [this](const httplib::Request& req, httplib::Response& res) {
             const auto body = req.body.empty() ? json::object() : json::parse(req.body);
             const auto proto = parse_protocol(body.value("protocol", std::string("p2")));
             if (!proto || *proto == Protocol::P3)
               return send_error(res, 400, "BadRequest", "protocol must be p1, p2 or p4");
             RecoveryOutcome out;
             if (*proto == Protocol::P4)
               out = engine_.recover_filtered(body.contains("filter") ? filter_from_json(body.at("filter"))
                                                                       : RetrievalFilter{});
             else
               out = engine_.recover_all(*proto);
             res.set_content(recovery_json(out).dump(), "application/json");
           }));

  srv.Get("/api/export", wrap(true, false, [this](const httplib::Request& req, httplib::Response& res) {
            const auto result = engine_.export_filtered(filter_from_query(req));
            res.set_header("Content-Disposition", "attachment; filename=\"export.json\"");
            res.set_content(result.file.to_json(), "application/json");
          }));

  srv.Get("/api/status", wrap(false, false, [this](const httplib::Request&, httplib::Response& res) {
            const auto s = engine_.status();
            res.set_content(json{{"real_rows", s.store.real},
                                 {"placeholders", s.store.placeholders},
                                 {"mapping_entries", s.mapping_entries},
                                 {"anchored_records", s.anchored_records},
                                 {"chain_counters",
                                  {{"tx_count", s.chain.tx_count},
                                   {"call_count", s.chain.call_count},
                                   {"bytes_stored", s.chain.bytes_stored},
                                   {"total_gas", s.chain.total_gas}}}}
                                .dump(),
                            "application/json");
          }));
}

int Gateway::bind() {
  port_ = opts_.port == 0 ? server_->bind_to_any_port(opts_.host) : (server_->bind_to_port(opts_.host, opts_.port)
                                                                         ? opts_.port
                                                                         : -1);
  if (port_ < 0) throw Error(ErrorCode::IoFailure, "cannot bind " + opts_.host + ":" + std::to_string(opts_.port));
  return port_;
}

int Gateway::start() {
  bind();
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void Gateway::run() {
  bind();
  server_->listen_after_bind();
}

void Gateway::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace cloudguardian
