#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "xsni/hostname.hpp"

namespace xsni::proto {

// Provisional code point from the private-use range.
inline constexpr std::uint16_t kResumptionAcrossSniType = 0xFF5C;

// Client side: bare support indication, empty data field.
struct ClientIndication {
  friend bool operator==(const ClientIndication&, const ClientIndication&) { return true; }
};

// Server side: the SNIs that can resume sessions issued under this one.
struct ServerSniList {
  std::vector<Hostname> names; // non-empty when sent
  friend bool operator==(const ServerSniList&, const ServerSniList&) = default;
};

// Wire layout (big-endian lengths, mirroring the server_name list format):
//   uint16 extension_type
//   uint16 extension_length
//   body:
//     client indication  -> empty
//     server list        -> uint16 list_length, then per name:
//                           uint8 name_type (0), uint16 name_length, name bytes
struct ExtensionRecord {
  std::uint16_t extension_type = kResumptionAcrossSniType;
  std::variant<ClientIndication, ServerSniList> body;

  friend bool operator==(const ExtensionRecord&, const ExtensionRecord&) = default;
};

// Throws EncodeError (a ValidationError) on an empty server list, an
// over-long name, or a body exceeding 2^14 - 1 bytes.
std::vector<std::uint8_t> encode_extension(const ExtensionRecord& record);

enum class DecodeStatus {
  Ok,
  NotOurs,        // well-framed extension with a different type: skip it
  Truncated,      // input shorter than a declared length
  TrailingBytes,  // bytes after the declared extension body
  LengthMismatch, // inner list length disagrees with the body length
  BadNameType,    // name entry type other than 0
  BadName,        // empty, over-long, or non-ASCII hostname
  EmptyList,      // server list with zero entries
};

std::string to_string(DecodeStatus status);

struct DecodeResult {
  DecodeStatus status = DecodeStatus::Ok;
  std::optional<ExtensionRecord> record; // set iff status == Ok
  std::string detail;

  bool ok() const { return status == DecodeStatus::Ok; }
  // Errors that must terminate the connection; NotOurs is not one of them.
  bool fatal() const { return status != DecodeStatus::Ok && status != DecodeStatus::NotOurs; }
};

// Never throws and never reads past the declared lengths; random input
// yields a typed status.
DecodeResult decode_extension(std::span<const std::uint8_t> bytes);

} // namespace xsni::proto
