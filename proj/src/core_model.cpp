// cloudguardian: blockchain-anchored data custody
// Copyright 2026 The cloudguardian Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cloudguardian/core_model.hpp>
#include <cloudguardian/error.hpp>

#include <algorithm>
#include <cstdio>
#include <tuple>

namespace cloudguardian {

namespace {

bool is_upper_alnum(char c) noexcept {
  return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool read_digits(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  out = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    out = out * 10 + (s[i] - '0');
  }
  return true;
}

}  // namespace

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::optional<Timestamp> parse_timestamp(std::string_view s) {
  using namespace std::chrono;
  if (s.size() != kTimestampWidth) return std::nullopt;
  if (s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' || s[16] != ':' || s[19] != 'Z')
    return std::nullopt;
  int y, mo, d, h, mi, se;
  if (!read_digits(s, 0, 4, y) || !read_digits(s, 5, 2, mo) || !read_digits(s, 8, 2, d) ||
      !read_digits(s, 11, 2, h) || !read_digits(s, 14, 2, mi) || !read_digits(s, 17, 2, se))
    return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || se > 59) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{se};
}

bool is_valid_plate(std::string_view plate) noexcept {
  return !plate.empty() && plate.size() <= kPlateWidth &&
         std::all_of(plate.begin(), plate.end(),
                     [](char c) { return is_upper_alnum(c) || c == '-'; });
}

bool is_valid_device_id(std::string_view device) noexcept {
  return device.size() == kDeviceWidth && std::all_of(device.begin(), device.end(), is_upper_alnum);
}

void validate_record(const VehicleRecord& r) {
  if (!is_valid_plate(r.plate))
    throw Error(ErrorCode::InvalidRecord, "plate must be 1-10 chars of [A-Z0-9-]: '" + r.plate + "'");
  if (!is_valid_device_id(r.device_id))
    throw Error(ErrorCode::InvalidRecord,
                "device_id must be exactly 6 chars of [A-Z0-9]: '" + r.device_id + "'");
  const auto text = format_timestamp(r.captured_at);
  if (text.size() != kTimestampWidth || !parse_timestamp(text))
    throw Error(ErrorCode::InvalidRecord, "captured_at outside the 4-digit year range");
}

bool record_order(const VehicleRecord& a, const VehicleRecord& b) noexcept {
  return std::tie(a.captured_at, a.plate, a.device_id) <
         std::tie(b.captured_at, b.plate, b.device_id);
}

Record36::Record36(std::string text) : text_(std::move(text)) {
  if (text_.size() != kRecordWidth)
    throw Error(ErrorCode::MalformedRecord,
                "record text must be 36 chars, got " + std::to_string(text_.size()));
}

Payload::Payload(std::string text) : text_(std::move(text)) {
  if (text_.empty() || text_.size() % kRecordWidth != 0)
    throw Error(ErrorCode::MalformedPayload,
                "payload length " + std::to_string(text_.size()) + " is not a positive multiple of 36");
}

Record36 encode_record(const VehicleRecord& r) {
  validate_record(r);
  std::string text;
  text.reserve(kRecordWidth);
  text += r.plate;
  text.append(kPlateWidth - r.plate.size(), ' ');
  text += r.device_id;
  text += format_timestamp(r.captured_at);
  return Record36(std::move(text));
}

VehicleRecord decode_record(std::string_view text) {
  if (text.size() != kRecordWidth)
    throw Error(ErrorCode::MalformedRecord,
                "record text must be 36 chars, got " + std::to_string(text.size()));
  auto plate = text.substr(0, kPlateWidth);
  const auto last = plate.find_last_not_of(' ');
  plate = last == std::string_view::npos ? std::string_view{} : plate.substr(0, last + 1);
  const auto device = text.substr(kPlateWidth, kDeviceWidth);
  const auto when = parse_timestamp(text.substr(kPlateWidth + kDeviceWidth));
  if (!when) throw Error(ErrorCode::MalformedRecord, "unparsable timestamp segment");
  if (!is_valid_plate(plate) || !is_valid_device_id(device))
    throw Error(ErrorCode::MalformedRecord, "plate or device segment has invalid characters");
  return VehicleRecord{std::string(plate), std::string(device), *when};
}

VehicleRecord decode_record(const Record36& s) { return decode_record(std::string_view(s.text())); }

Payload encode_payload(std::span<const Record36> records) {
  if (records.empty()) throw Error(ErrorCode::EmptyPayload, "payload needs at least one record");
  std::string text;
  text.reserve(records.size() * kRecordWidth);
  for (const auto& r : records) text += r.text();
  return Payload(std::move(text));
}

std::vector<Record36> decode_payload(const Payload& p) {
  std::vector<Record36> out;
  out.reserve(p.packages());
  for (std::size_t pos = 0; pos < p.text().size(); pos += kRecordWidth)
    out.emplace_back(p.text().substr(pos, kRecordWidth));
  return out;
}

Payload encode_records(std::span<const VehicleRecord> records) {
  if (records.empty()) throw Error(ErrorCode::EmptyPayload, "payload needs at least one record");
  std::string text;
  text.reserve(records.size() * kRecordWidth);
  for (const auto& r : records) text += encode_record(r).text();
  return Payload(std::move(text));
}

std::vector<VehicleRecord> decode_records(const Payload& p) {
  std::vector<VehicleRecord> out;
  out.reserve(p.packages());
  const std::string_view text = p.text();
  for (std::size_t pos = 0; pos < text.size(); pos += kRecordWidth)
    out.push_back(decode_record(text.substr(pos, kRecordWidth)));
  return out;
}

BigUint gas_cost(const BigUint& packages, const GasModel& g) {
  return packages * kBytesPerPackage * g.price_per_byte;
}

BigUint theoretical_max_packages() {
  const BigUint max_string_bytes = (BigUint(1) << 256) - 1;
  return max_string_bytes / kBytesPerPackage;
}

std::uint64_t practical_max_packages(std::uint64_t block_gas_limit, const GasModel& g) {
  if (g.price_per_byte == 0)
    throw Error(ErrorCode::ZeroGasPrice, "a zero gas price leaves package count unbounded");
  const BigUint per_package = gas_cost(1, g);
  return static_cast<std::uint64_t>(BigUint(block_gas_limit) / per_package);
}

bool RetrievalFilter::matches(const VehicleRecord& r) const noexcept {
  if (device_id && r.device_id != *device_id) return false;
  if (from && r.captured_at < *from) return false;
  if (to && r.captured_at > *to) return false;
  return true;
}

void RetrievalFilter::validate() const {
  if (device_id && !is_valid_device_id(*device_id))
    throw Error(ErrorCode::InvalidFilter, "device_id must be 6 chars of [A-Z0-9]");
  if (from && to && *from > *to)
    throw Error(ErrorCode::InvalidFilter, "from is later than to");
}

RetrievalFilter RetrievalFilter::day(std::chrono::year_month_day d, std::optional<std::string> device) {
  using namespace std::chrono;
  const Timestamp start = sys_days{d};
  return RetrievalFilter{std::move(device), start, start + hours{23} + minutes{59} + seconds{59}};
}

}  // namespace cloudguardian
