#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "xsni/hostname.hpp"

namespace xsni::proto {

enum class TlsVersion { V1_2, V1_3 };

std::string to_string(TlsVersion version);
TlsVersion tls_version_from_string(std::string_view s);

// Injected time source so lifetime behavior is deterministic under test.
class VirtualClock {
public:
  std::int64_t now() const { return now_s_; }
  void advance(std::int64_t seconds) { now_s_ += seconds; }

private:
  std::int64_t now_s_ = 0;
};

// Client-side resumable state from one full handshake: the ticket identity,
// the session secret, and the hostnames it may be replayed against. The
// issuing SNI is implicitly resumable whether or not it was advertised.
struct SessionState {
  std::vector<std::uint8_t> psk_identity;
  std::vector<std::uint8_t> secret;
  Hostname issuing_sni;
  std::vector<Hostname> resumable_snis; // SAN-validated advertisements only
  std::int64_t issued_at = 0;
  std::int64_t lifetime_s = 0;
  TlsVersion tls_version = TlsVersion::V1_3;

  bool expired(std::int64_t now) const { return now > issued_at + lifetime_s; }
  bool covers(const Hostname& target) const;
};

// Authenticated seal/unseal pair abstracting the ticket encryption key.
// Unseal fails for blobs produced under a different key.
class Sealer {
public:
  virtual ~Sealer() = default;
  virtual std::vector<std::uint8_t> seal(std::span<const std::uint8_t> plaintext) const = 0;
  virtual std::optional<std::vector<std::uint8_t>>
  unseal(std::span<const std::uint8_t> blob) const = 0;
};

// Deterministic keyed construction: a keyed 64-bit tag over the payload
// plus a key-stream XOR. Structural stand-in, not cryptography.
class KeyedSealer : public Sealer {
public:
  explicit KeyedSealer(std::vector<std::uint8_t> key);

  std::vector<std::uint8_t> seal(std::span<const std::uint8_t> plaintext) const override;
  std::optional<std::vector<std::uint8_t>>
  unseal(std::span<const std::uint8_t> blob) const override;

private:
  std::vector<std::uint8_t> key_;
};

} // namespace xsni::proto
