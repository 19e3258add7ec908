// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cloudguardian {

std::string to_hex(std::span<const std::uint8_t> bytes);

/// Source of random bytes for identifiers. The secure source draws from the
/// OS CSPRNG; the seeded source is reproducible and meant for tests/benches.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  template <std::size_t N>
  std::array<std::uint8_t, N> bytes() {
    std::array<std::uint8_t, N> out{};
    fill(out);
    return out;
  }
};

class SecureRandom final : public RandomSource {
 public:
  SecureRandom();
  void fill(std::span<std::uint8_t> out) override;
};

class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(std::uint64_t seed) : engine_(seed) {}
  void fill(std::span<std::uint8_t> out) override;

 private:
  std::mutex mutex_;
  std::mt19937_64 engine_;
};

std::unique_ptr<RandomSource> make_random_source(const std::optional<std::uint64_t>& seed);

namespace detail {

template <class Tag>
class PrefixedId {
 public:
  static constexpr std::string_view prefix = Tag::prefix;
  static constexpr std::size_t hex_len = 32;

  PrefixedId() = default;

  /// Throws std::invalid_argument unless the text is prefix + 32 lowercase hex.
  static PrefixedId parse(std::string_view text) {
    if (!valid(text)) throw std::invalid_argument("malformed identifier: " + std::string(text));
    PrefixedId id;
    id.value_ = std::string(text);
    return id;
  }

  static PrefixedId from_hex(std::string_view hex) { return parse(std::string(prefix) + std::string(hex)); }

  static PrefixedId generate(RandomSource& rng) {
    const auto raw = rng.bytes<16>();
    return from_hex(to_hex(raw));
  }

  static bool valid(std::string_view text) noexcept {
    if (text.size() != prefix.size() + hex_len || text.substr(0, prefix.size()) != prefix) return false;
    for (char c : text.substr(prefix.size()))
      if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    return true;
  }

  const std::string& str() const noexcept { return value_; }
  std::string_view hex() const noexcept { return std::string_view(value_).substr(prefix.size()); }

  friend bool operator==(const PrefixedId&, const PrefixedId&) = default;
  friend auto operator<=>(const PrefixedId&, const PrefixedId&) = default;

 private:
  std::string value_;
};

struct ChainIdTag {
  static constexpr std::string_view prefix = "ch_";
};
struct SurrogateIdTag {
  static constexpr std::string_view prefix = "db_";
};

}  // namespace detail

/// Key of a payload in the contract mapping.
using ChainId = detail::PrefixedId<detail::ChainIdTag>;
/// Placeholder key in the store; never shares a namespace with ChainId.
using SurrogateId = detail::PrefixedId<detail::SurrogateIdTag>;

}  // namespace cloudguardian
