#include "xsni/protocol/session.hpp"

#include <algorithm>

namespace xsni::proto {

namespace {

std::uint64_t fnv1a(std::span<const std::uint8_t> data, std::uint64_t seed) {
  std::uint64_t h = seed ^ 0xcbf29ce484222325ull;
  for (std::uint8_t b : data) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

} // namespace

std::string to_string(TlsVersion version) {
  return version == TlsVersion::V1_2 ? "1.2" : "1.3";
}

TlsVersion tls_version_from_string(std::string_view s) {
  if (s == "1.2") return TlsVersion::V1_2;
  if (s == "1.3") return TlsVersion::V1_3;
  throw ParseError("unknown TLS version: \"" + std::string(s) + "\"");
}

bool SessionState::covers(const Hostname& target) const {
  if (issuing_sni == target) {
    return true;
  }
  return std::find(resumable_snis.begin(), resumable_snis.end(), target) != resumable_snis.end();
}

KeyedSealer::KeyedSealer(std::vector<std::uint8_t> key) : key_(std::move(key)) {
  if (key_.empty()) {
    throw ValidationError("sealing key must not be empty");
  }
}

std::vector<std::uint8_t> KeyedSealer::seal(std::span<const std::uint8_t> plaintext) const {
  std::uint64_t key_hash = fnv1a(key_, 0);
  std::uint64_t tag = fnv1a(plaintext, key_hash);
  std::vector<std::uint8_t> blob;
  blob.reserve(8 + plaintext.size());
  for (int i = 7; i >= 0; --i) {
    blob.push_back(static_cast<std::uint8_t>(tag >> (8 * i)));
  }
  for (std::size_t i = 0; i < plaintext.size(); ++i) {
    blob.push_back(plaintext[i] ^ key_[i % key_.size()]);
  }
  return blob;
}

std::optional<std::vector<std::uint8_t>>
KeyedSealer::unseal(std::span<const std::uint8_t> blob) const {
  if (blob.size() < 8) {
    return std::nullopt;
  }
  std::uint64_t tag = 0;
  for (int i = 0; i < 8; ++i) {
    tag = tag << 8 | blob[i];
  }
  std::vector<std::uint8_t> plaintext;
  plaintext.reserve(blob.size() - 8);
  for (std::size_t i = 8; i < blob.size(); ++i) {
    plaintext.push_back(blob[i] ^ key_[(i - 8) % key_.size()]);
  }
  std::uint64_t key_hash = fnv1a(key_, 0);
  if (fnv1a(plaintext, key_hash) != tag) {
    return std::nullopt;
  }
  return plaintext;
}

} // namespace xsni::proto
