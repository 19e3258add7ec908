// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace cloudguardian {

using Timestamp = std::chrono::sys_seconds;
using BigUint = boost::multiprecision::cpp_int;

inline constexpr std::size_t kPlateWidth = 10;
inline constexpr std::size_t kDeviceWidth = 6;
inline constexpr std::size_t kTimestampWidth = 20;
inline constexpr std::size_t kRecordWidth = kPlateWidth + kDeviceWidth + kTimestampWidth;
static_assert(kRecordWidth == 36);

inline constexpr std::uint64_t kBytesPerChar = 4;
inline constexpr std::uint64_t kBytesPerPackage = kRecordWidth * kBytesPerChar;  // 144

/// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_timestamp(Timestamp t);
/// Strict inverse of format_timestamp; nullopt on any syntax or calendar error.
std::optional<Timestamp> parse_timestamp(std::string_view text);
/// Drops sub-second precision toward the past.
template <class Duration>
Timestamp floor_to_seconds(std::chrono::sys_time<Duration> t) {
  return std::chrono::floor<std::chrono::seconds>(t);
}

struct VehicleRecord {
  std::string plate;
  std::string device_id;
  Timestamp captured_at{};

  friend bool operator==(const VehicleRecord&, const VehicleRecord&) = default;
  friend auto operator<=>(const VehicleRecord&, const VehicleRecord&) = default;
};

bool is_valid_plate(std::string_view plate) noexcept;
bool is_valid_device_id(std::string_view device) noexcept;
/// Throws InvalidRecord naming the offending field.
void validate_record(const VehicleRecord& r);

/// Export/query ordering: captured_at, then plate, then device.
bool record_order(const VehicleRecord& a, const VehicleRecord& b) noexcept;

/// One fixed-width 36-character package.
class Record36 {
 public:
  /// Throws MalformedRecord unless the text is exactly 36 chars.
  explicit Record36(std::string text);

  const std::string& text() const noexcept { return text_; }

  friend bool operator==(const Record36&, const Record36&) = default;

 private:
  std::string text_;
};

/// y packages concatenated under a single chain key.
class Payload {
 public:
  /// Throws MalformedPayload unless text is a non-empty multiple of 36 chars.
  explicit Payload(std::string text);

  const std::string& text() const noexcept { return text_; }
  std::uint64_t packages() const noexcept { return text_.size() / kRecordWidth; }
  std::uint64_t char_count() const noexcept { return text_.size(); }
  std::uint64_t byte_size() const noexcept { return char_count() * kBytesPerChar; }

  friend bool operator==(const Payload&, const Payload&) = default;

 private:
  std::string text_;
};

struct GasModel {
  std::uint64_t price_per_byte = 1;
  static constexpr std::uint64_t bytes_per_char = kBytesPerChar;
};

Record36 encode_record(const VehicleRecord& r);
VehicleRecord decode_record(const Record36& s);
/// Convenience overload for raw text of unknown provenance.
VehicleRecord decode_record(std::string_view text);

Payload encode_payload(std::span<const Record36> records);
std::vector<Record36> decode_payload(const Payload& p);

Payload encode_records(std::span<const VehicleRecord> records);
std::vector<VehicleRecord> decode_records(const Payload& p);

/// 144 * y * price_per_byte, exact.
BigUint gas_cost(const BigUint& packages, const GasModel& g);
/// floor((2^256 - 1) / 144)
BigUint theoretical_max_packages();
/// Largest y whose gas_cost fits in the block gas limit.
std::uint64_t practical_max_packages(std::uint64_t block_gas_limit, const GasModel& g);

/// Closed interval on captured_at plus optional device equality.
struct RetrievalFilter {
  std::optional<std::string> device_id;
  std::optional<Timestamp> from;
  std::optional<Timestamp> to;

  bool empty() const noexcept { return !device_id && !from && !to; }
  bool matches(const VehicleRecord& r) const noexcept;
  /// Throws InvalidFilter on from > to or a malformed device id.
  void validate() const;

  /// Whole UTC day, 00:00:00Z .. 23:59:59Z.
  static RetrievalFilter day(std::chrono::year_month_day d,
                             std::optional<std::string> device = std::nullopt);

  friend bool operator==(const RetrievalFilter&, const RetrievalFilter&) = default;
};

}  // namespace cloudguardian
