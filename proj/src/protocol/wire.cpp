#include "xsni/protocol/wire.hpp"

namespace xsni::proto {

namespace {

constexpr std::size_t kMaxBodyLength = (1u << 14) - 1;
constexpr std::size_t kMaxNameLength = 253;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

class Reader {
public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }

  std::optional<std::uint16_t> u16() {
    if (remaining() < 2) {
      return std::nullopt;
    }
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] << 8 | bytes_[pos_ + 1]);
    pos_ += 2;
    return v;
  }

  std::optional<std::uint8_t> u8() {
    if (remaining() < 1) {
      return std::nullopt;
    }
    return bytes_[pos_++];
  }

  std::optional<std::span<const std::uint8_t>> take(std::size_t n) {
    if (remaining() < n) {
      return std::nullopt;
    }
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

DecodeResult fail(DecodeStatus status, std::string detail) {
  return DecodeResult{status, std::nullopt, std::move(detail)};
}

} // namespace

std::string to_string(DecodeStatus status) {
  switch (status) {
  case DecodeStatus::Ok: return "ok";
  case DecodeStatus::NotOurs: return "not_ours";
  case DecodeStatus::Truncated: return "truncated";
  case DecodeStatus::TrailingBytes: return "trailing_bytes";
  case DecodeStatus::LengthMismatch: return "length_mismatch";
  case DecodeStatus::BadNameType: return "bad_name_type";
  case DecodeStatus::BadName: return "bad_name";
  case DecodeStatus::EmptyList: return "empty_list";
  }
  throw std::logic_error("unreachable decode status");
}

std::vector<std::uint8_t> encode_extension(const ExtensionRecord& record) {
  std::vector<std::uint8_t> body;
  if (const auto* list = std::get_if<ServerSniList>(&record.body)) {
    if (list->names.empty()) {
      throw ValidationError("server SNI list must not be empty");
    }
    std::vector<std::uint8_t> entries;
    for (const Hostname& name : list->names) {
      const std::string& s = name.str();
      if (s.size() > kMaxNameLength) {
        throw ValidationError("SNI exceeds 253 bytes: " + s);
      }
      entries.push_back(0); // name type: host_name
      put_u16(entries, static_cast<std::uint16_t>(s.size()));
      entries.insert(entries.end(), s.begin(), s.end());
    }
    put_u16(body, static_cast<std::uint16_t>(entries.size()));
    body.insert(body.end(), entries.begin(), entries.end());
    if (body.size() > kMaxBodyLength) {
      throw ValidationError("extension body exceeds 2^14 - 1 bytes");
    }
  }
  std::vector<std::uint8_t> out;
  put_u16(out, record.extension_type);
  put_u16(out, static_cast<std::uint16_t>(body.size()));
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

DecodeResult decode_extension(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  auto type = r.u16();
  auto length = r.u16();
  if (!type || !length) {
    return fail(DecodeStatus::Truncated, "extension header needs 4 bytes");
  }
  if (r.remaining() < *length) {
    return fail(DecodeStatus::Truncated, "declared body length exceeds input");
  }
  if (r.remaining() > *length) {
    return fail(DecodeStatus::TrailingBytes, "bytes after the declared extension body");
  }
  if (*type != kResumptionAcrossSniType) {
    return DecodeResult{DecodeStatus::NotOurs, std::nullopt, "extension type mismatch"};
  }
  if (*length == 0) {
    return DecodeResult{DecodeStatus::Ok, ExtensionRecord{*type, ClientIndication{}}, {}};
  }

  auto list_length = r.u16();
  if (!list_length) {
    return fail(DecodeStatus::Truncated, "server list length needs 2 bytes");
  }
  if (*list_length != r.remaining()) {
    return fail(DecodeStatus::LengthMismatch, "list length disagrees with body length");
  }
  ServerSniList list;
  while (r.remaining() > 0) {
    auto name_type = r.u8();
    auto name_length = r.u16();
    if (!name_type || !name_length) {
      return fail(DecodeStatus::Truncated, "name entry header needs 3 bytes");
    }
    if (*name_type != 0) {
      return fail(DecodeStatus::BadNameType, "unknown name type");
    }
    auto raw = r.take(*name_length);
    if (!raw) {
      return fail(DecodeStatus::Truncated, "name shorter than declared");
    }
    auto host = Hostname::try_parse(
        std::string_view(reinterpret_cast<const char*>(raw->data()), raw->size()));
    if (!host) {
      return fail(DecodeStatus::BadName, "not a legal hostname");
    }
    list.names.push_back(std::move(*host));
  }
  if (list.names.empty()) {
    return fail(DecodeStatus::EmptyList, "server list with zero entries");
  }
  return DecodeResult{DecodeStatus::Ok, ExtensionRecord{*type, std::move(list)}, {}};
}

} // namespace xsni::proto
