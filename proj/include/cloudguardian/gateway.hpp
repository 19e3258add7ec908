// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>

#include <cloudguardian/clock.hpp>
#include <cloudguardian/sync_engine.hpp>
#include <cloudguardian/vault.hpp>

namespace httplib {
class Server;
}

namespace cloudguardian {

struct UserAccount {
  std::string username;
  std::string password_hash;  // Argon2id encoded string
  Timestamp created_at{};
};

bool is_valid_username(std::string_view username) noexcept;

/// Registered users, optionally persisted as JSON. Only password hashes are
/// ever stored.
class UserDirectory {
 public:
  enum class RegisterResult { Created, Duplicate, WeakInput };

  UserDirectory(std::optional<std::filesystem::path> path, KdfParams hash_cost, Clock& clock);

  RegisterResult register_user(const std::string& username, const std::string& password);
  /// Constant work whether or not the user exists.
  bool verify(const std::string& username, const std::string& password) const;
  std::size_t size() const;
  std::optional<UserAccount> find(const std::string& username) const;

 private:
  void persist_locked() const;

  std::optional<std::filesystem::path> path_;
  KdfParams cost_;
  Clock& clock_;
  std::string dummy_hash_;
  mutable std::mutex mutex_;
  std::map<std::string, UserAccount> users_;
};

struct SessionToken {
  std::string value;  // 32 random bytes, base64url without padding
  Timestamp expires_at{};
};

/// In-memory bearer tokens.
class SessionTable {
 public:
  enum class Check { Valid, Unknown, Expired };

  SessionTable(std::chrono::seconds ttl, Clock& clock) : ttl_(ttl), clock_(clock) {}

  SessionToken issue(const std::string& username);
  Check check(const std::string& token);

 private:
  struct Session {
    std::string username;
    Clock::time_point expires_at;
  };

  std::chrono::seconds ttl_;
  Clock& clock_;
  std::mutex mutex_;
  std::unordered_map<std::string, Session> sessions_;
};

struct GatewayOptions {
  std::string host = "127.0.0.1";
  /// 0 binds an ephemeral port.
  int port = 8080;
  std::chrono::seconds session_ttl{3600};
  std::optional<std::filesystem::path> users_path;
  KdfParams password_cost = KdfParams::interactive();
};

/// JSON-over-HTTP front end for user and data management. Error bodies are
/// {"error": code, "message": text}.
class Gateway {
 public:
  /// `after_mutation` runs after every request that changed chain state.
  Gateway(SyncEngine& engine, GatewayOptions opts, Clock& clock, std::function<void()> after_mutation = {});
  ~Gateway();

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  /// Binds and serves on a background thread; returns the bound port.
  int start();
  /// Binds and serves on the calling thread until stop().
  void run();
  void stop();

  int port() const noexcept { return port_; }
  UserDirectory& users() noexcept { return users_; }

 private:
  void install_routes();
  int bind();

  SyncEngine& engine_;
  GatewayOptions opts_;
  Clock& clock_;
  std::function<void()> after_mutation_;
  UserDirectory users_;
  SessionTable sessions_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace cloudguardian
