// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cloudguardian/error.hpp>
#include <cloudguardian/vault.hpp>

#include <array>
#include <cctype>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>

#include <fcntl.h>
#include <sodium.h>
#include <sys/file.h>
#include <unistd.h>

#include <json.hpp>

namespace cloudguardian {

namespace {

constexpr std::uint64_t kMaxMemlimit = 1ull << 30;
constexpr std::uint64_t kMaxOpslimit = 64;

static_assert(kVaultNonceSize == crypto_aead_xchacha20poly1305_ietf_NPUBBYTES);
static_assert(kVaultTagSize == crypto_aead_xchacha20poly1305_ietf_ABYTES);
static_assert(kVaultSaltSize == crypto_pwhash_SALTBYTES);

void ensure_sodium() {
  if (sodium_init() < 0) throw Error(ErrorCode::IoFailure, "libsodium initialisation failed");
}

void put_u64(std::uint8_t* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint64_t get_u64(const std::uint8_t* in) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = v << 8 | in[i];
  return v;
}

/// Zeroes the key on scope exit.
struct DerivedKey {
  std::array<std::uint8_t, crypto_aead_xchacha20poly1305_ietf_KEYBYTES> bytes{};
  ~DerivedKey() { sodium_memzero(bytes.data(), bytes.size()); }
};

void derive_key(DerivedKey& key, std::string_view passphrase, const std::uint8_t* salt, const KdfParams& kdf) {
  if (crypto_pwhash(key.bytes.data(), key.bytes.size(), passphrase.data(), passphrase.size(), salt,
                    kdf.opslimit, static_cast<std::size_t>(kdf.memlimit), crypto_pwhash_ALG_ARGON2ID13) != 0)
    throw Error(ErrorCode::IoFailure, "key derivation ran out of memory");
}

/// Advisory lock on a sidecar file; exclusive for writers, shared for readers.
class FileLock {
 public:
  FileLock(const std::filesystem::path& vault, int op) {
    const auto lock_path = vault.string() + ".lock";
    fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0600);
    if (fd_ < 0) throw Error(ErrorCode::IoFailure, "cannot open lock file " + lock_path);
    while (::flock(fd_, op) != 0) {
      if (errno != EINTR) {
        ::close(fd_);
        throw Error(ErrorCode::IoFailure, "cannot lock " + lock_path);
      }
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

}  // namespace

std::string_view to_string(Protocol p) noexcept {
  switch (p) {
    case Protocol::P1: return "p1";
    case Protocol::P2: return "p2";
    case Protocol::P3: return "p3";
    case Protocol::P4: return "p4";
  }
  return "p?";
}

std::optional<Protocol> parse_protocol(std::string_view text) noexcept {
  if (text.size() != 2 || std::tolower(static_cast<unsigned char>(text[0])) != 'p') return std::nullopt;
  switch (text[1]) {
    case '1': return Protocol::P1;
    case '2': return Protocol::P2;
    case '3': return Protocol::P3;
    case '4': return Protocol::P4;
    default: return std::nullopt;
  }
}

void IdMapping::put(const ChainId& id, MappingEntry entry) {
  if (entry.record_count == 0) throw std::invalid_argument("mapping entries stand for at least one record");
  if (!entries_.emplace(id, std::move(entry)).second) throw Error(ErrorCode::DuplicateChainId, id.str());
}

void IdMapping::remove(const ChainId& id) {
  if (entries_.erase(id) == 0) throw Error(ErrorCode::UnknownChainId, id.str());
}

const MappingEntry& IdMapping::at(const ChainId& id) const {
  const auto it = entries_.find(id);
  if (it == entries_.end()) throw Error(ErrorCode::UnknownChainId, id.str());
  return it->second;
}

std::uint64_t IdMapping::total_records() const noexcept {
  std::uint64_t n = 0;
  for (const auto& [id, e] : entries_) n += e.record_count;
  return n;
}

std::string IdMapping::serialize() const {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [id, e] : entries_)
    entries.push_back({{"chain_id", id.str()},
                       {"record_count", e.record_count},
                       {"anchored_at", format_timestamp(e.anchored_at)},
                       {"protocol", to_string(e.protocol)},
                       {"surrogate", e.surrogate.str()}});
  return nlohmann::json{{"version", 1}, {"entries", std::move(entries)}}.dump();
}

IdMapping IdMapping::deserialize(std::string_view text) {
  IdMapping m;
  try {
    const auto doc = nlohmann::json::parse(text);
    for (const auto& je : doc.at("entries")) {
      const auto when = parse_timestamp(je.at("anchored_at").get<std::string>());
      const auto proto = parse_protocol(je.at("protocol").get<std::string>());
      if (!when || !proto) throw Error(ErrorCode::MalformedVault, "bad entry field");
      m.put(ChainId::parse(je.at("chain_id").get<std::string>()),
            MappingEntry{je.at("record_count").get<std::uint64_t>(), *when, *proto,
                         SurrogateId::parse(je.at("surrogate").get<std::string>())});
    }
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedVault, e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::MalformedVault, e.what());
  }
  return m;
}

KdfParams KdfParams::interactive() {
  return KdfParams{crypto_pwhash_OPSLIMIT_INTERACTIVE, crypto_pwhash_MEMLIMIT_INTERACTIVE};
}

KdfParams KdfParams::fast() { return KdfParams{crypto_pwhash_OPSLIMIT_MIN, crypto_pwhash_MEMLIMIT_MIN}; }

void vault_save(const IdMapping& m, const std::filesystem::path& path, std::string_view passphrase,
                const KdfParams& kdf) {
  ensure_sodium();
  if (passphrase.empty()) throw Error(ErrorCode::InvalidConfig, "vault passphrase is empty");
  if (kdf.opslimit < crypto_pwhash_OPSLIMIT_MIN || kdf.opslimit > kMaxOpslimit ||
      kdf.memlimit < crypto_pwhash_MEMLIMIT_MIN || kdf.memlimit > kMaxMemlimit)
    throw Error(ErrorCode::InvalidConfig, "KDF parameters out of range");

  const std::string plain = m.serialize();
  std::vector<std::uint8_t> file(kVaultHeaderSize + plain.size() + kVaultTagSize);
  std::uint8_t* p = file.data();
  std::memcpy(p, kVaultMagic.data(), 4);
  std::uint8_t* salt = p + 4;
  randombytes_buf(salt, kVaultSaltSize);
  put_u64(salt + kVaultSaltSize, kdf.opslimit);
  put_u64(salt + kVaultSaltSize + 8, kdf.memlimit);
  std::uint8_t* nonce = salt + kVaultSaltSize + kVaultParamsSize;
  randombytes_buf(nonce, kVaultNonceSize);

  DerivedKey key;
  derive_key(key, passphrase, salt, kdf);
  unsigned long long clen = 0;
  crypto_aead_xchacha20poly1305_ietf_encrypt(
      p + kVaultHeaderSize, &clen, reinterpret_cast<const unsigned char*>(plain.data()), plain.size(), p,
      kVaultHeaderSize, nullptr, nonce, key.bytes.data());
  file.resize(kVaultHeaderSize + clen);

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  FileLock lock(path, LOCK_EX);
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0600);
  if (fd < 0) throw Error(ErrorCode::IoFailure, "cannot create " + tmp.string());
  std::size_t written = 0;
  while (written < file.size()) {
    const auto n = ::write(fd, file.data() + written, file.size() - written);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      ::close(fd);
      throw Error(ErrorCode::IoFailure, "write to " + tmp.string() + " failed");
    }
    written += static_cast<std::size_t>(n);
  }
  const bool synced = ::fsync(fd) == 0;
  ::close(fd);
  if (!synced) throw Error(ErrorCode::IoFailure, "fsync " + tmp.string() + " failed");
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "rename to " + path.string() + ": " + ec.message());
}

IdMapping vault_load(const std::filesystem::path& path, std::string_view passphrase) {
  ensure_sodium();
  std::vector<std::uint8_t> file;
  {
    if (!std::filesystem::exists(path)) throw Error(ErrorCode::IoFailure, "no vault at " + path.string());
    FileLock lock(path, LOCK_SH);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
    file.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  if (file.size() < kVaultHeaderSize + kVaultTagSize)
    throw Error(ErrorCode::MalformedVault, "vault file truncated");
  if (std::memcmp(file.data(), kVaultMagic.data(), 4) != 0)
    throw Error(ErrorCode::MalformedVault, "bad magic");

  const std::uint8_t* salt = file.data() + 4;
  const KdfParams kdf{get_u64(salt + kVaultSaltSize), get_u64(salt + kVaultSaltSize + 8)};
  if (kdf.opslimit < crypto_pwhash_OPSLIMIT_MIN || kdf.opslimit > kMaxOpslimit ||
      kdf.memlimit < crypto_pwhash_MEMLIMIT_MIN || kdf.memlimit > kMaxMemlimit)
    throw Error(ErrorCode::MalformedVault, "KDF parameters out of range");
  const std::uint8_t* nonce = salt + kVaultSaltSize + kVaultParamsSize;

  DerivedKey key;
  derive_key(key, passphrase, salt, kdf);
  std::string plain(file.size() - kVaultHeaderSize - kVaultTagSize, '\0');
  unsigned long long plen = 0;
  if (crypto_aead_xchacha20poly1305_ietf_decrypt(reinterpret_cast<unsigned char*>(plain.data()), &plen, nullptr,
                                                 file.data() + kVaultHeaderSize, file.size() - kVaultHeaderSize,
                                                 file.data(), kVaultHeaderSize, nonce, key.bytes.data()) != 0)
    throw Error(ErrorCode::AuthFailure, "vault authentication failed");
  plain.resize(plen);
  auto m = IdMapping::deserialize(plain);
  sodium_memzero(plain.data(), plain.size());
  return m;
}

std::string passphrase_from_env() {
  const char* v = std::getenv(kPassphraseEnv);
  if (!v || !*v) throw Error(ErrorCode::InvalidConfig, std::string(kPassphraseEnv) + " is not set");
  return v;
}

}  // namespace cloudguardian
