// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <cloudguardian/core_model.hpp>
#include <cloudguardian/ids.hpp>

namespace cloudguardian {

/// Which anchoring path produced a mapping entry. P3 and P4 anchor through
/// the batched path and are recorded as P2.
enum class Protocol { P1, P2, P3, P4 };

std::string_view to_string(Protocol p) noexcept;
/// Accepts "p1".."p4" in either case; nullopt otherwise.
std::optional<Protocol> parse_protocol(std::string_view text) noexcept;

struct MappingEntry {
  std::uint64_t record_count = 1;
  Timestamp anchored_at{};
  Protocol protocol = Protocol::P2;
  /// Placeholder row standing for this payload in the store.
  SurrogateId surrogate;

  friend bool operator==(const MappingEntry&, const MappingEntry&) = default;
};

/// chain id -> metadata of the payload anchored under it. Payload text is
/// never held here; it lives on-chain.
class IdMapping {
 public:
  /// Throws DuplicateChainId.
  void put(const ChainId& id, MappingEntry entry);
  /// Throws UnknownChainId.
  void remove(const ChainId& id);
  /// Throws UnknownChainId.
  const MappingEntry& at(const ChainId& id) const;
  bool contains(const ChainId& id) const { return entries_.contains(id); }

  /// Key order.
  const std::map<ChainId, MappingEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::uint64_t total_records() const noexcept;

  /// Canonical JSON, keys in order; equal mappings serialise identically.
  std::string serialize() const;
  /// Throws MalformedVault.
  static IdMapping deserialize(std::string_view text);

  friend bool operator==(const IdMapping&, const IdMapping&) = default;

 private:
  std::map<ChainId, MappingEntry> entries_;
};

/// Argon2id cost parameters, stored in the file header.
struct KdfParams {
  std::uint64_t opslimit;
  std::uint64_t memlimit;

  static KdfParams interactive();
  /// Minimum legal cost; for tests and throwaway benchmark vaults.
  static KdfParams fast();

  friend bool operator==(const KdfParams&, const KdfParams&) = default;
};

inline constexpr std::string_view kVaultMagic = "CGV1";
inline constexpr std::size_t kVaultSaltSize = 16;
inline constexpr std::size_t kVaultParamsSize = 16;
inline constexpr std::size_t kVaultNonceSize = 24;
inline constexpr std::size_t kVaultHeaderSize = 4 + kVaultSaltSize + kVaultParamsSize + kVaultNonceSize;
inline constexpr std::size_t kVaultTagSize = 16;

/// magic | salt | opslimit (u64 LE) | memlimit (u64 LE) | nonce | ciphertext+tag.
/// The header is authenticated as associated data. Written to a temp file and
/// renamed into place; a fresh salt and nonce are drawn on every save.
void vault_save(const IdMapping& m, const std::filesystem::path& path, std::string_view passphrase,
                const KdfParams& kdf = KdfParams::interactive());

/// AuthFailure for a wrong passphrase or any tampering (indistinguishable),
/// MalformedVault for a bad magic or truncation, IoFailure if unreadable.
IdMapping vault_load(const std::filesystem::path& path, std::string_view passphrase);

/// Passphrase from CG_VAULT_PASSPHRASE; throws InvalidConfig if unset or empty.
std::string passphrase_from_env();

inline constexpr const char* kPassphraseEnv = "CG_VAULT_PASSPHRASE";

}  // namespace cloudguardian
