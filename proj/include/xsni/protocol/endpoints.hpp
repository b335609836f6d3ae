#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <set>

#include "xsni/certificate.hpp"
#include "xsni/protocol/session.hpp"
#include "xsni/protocol/wire.hpp"

namespace xsni::proto {

// Server-side connection state recovered during resumption.
struct ServerSideState {
  std::vector<std::uint8_t> secret;
  Hostname issuing_sni;
  std::int64_t issued_at = 0;
  std::int64_t lifetime_s = 0;
  TlsVersion tls_version = TlsVersion::V1_3;

  bool expired(std::int64_t now) const { return now > issued_at + lifetime_s; }
};

std::vector<std::uint8_t> serialize_state(const ServerSideState& state);
std::optional<ServerSideState> deserialize_state(std::span<const std::uint8_t> bytes);

enum class SharingMode { SealingKey, Database };

std::string to_string(SharingMode mode);
SharingMode sharing_mode_from_string(std::string_view s);

// Shared lookup table for the database variant. Linearizable insert/lookup
// keyed by PSK identity; many handshakes may hit it concurrently.
class SharedStateStore {
public:
  std::vector<std::uint8_t> insert(const ServerSideState& state);
  std::optional<ServerSideState> lookup(std::span<const std::uint8_t> psk_identity) const;

private:
  mutable std::mutex mutex_;
  std::uint64_t next_id_ = 1;
  std::map<std::vector<std::uint8_t>, ServerSideState> entries_;
};

// How a set of SNIs shares cryptographic state: either every member holds
// the same sealing key (state travels inside the ticket), or members share
// a state database (the ticket is a lookup handle).
class SharingGroup {
public:
  static std::shared_ptr<SharingGroup> with_sealing_key(std::set<Hostname> members,
                                                        std::vector<std::uint8_t> key);
  static std::shared_ptr<SharingGroup> with_database(std::set<Hostname> members);

  SharingMode mode() const { return mode_; }
  const std::set<Hostname>& members() const { return members_; }
  bool is_member(const Hostname& sni) const { return members_.count(sni) != 0; }

  std::vector<std::uint8_t> issue(const ServerSideState& state) const;
  std::optional<ServerSideState> recover(std::span<const std::uint8_t> psk_identity) const;

  // Unique per issuance, deterministic per group.
  std::vector<std::uint8_t> next_secret() const;

private:
  SharingGroup(SharingMode mode, std::set<Hostname> members);

  SharingMode mode_;
  std::set<Hostname> members_;
  std::shared_ptr<const Sealer> sealer_;      // SealingKey mode
  std::shared_ptr<SharedStateStore> store_;   // Database mode
  mutable std::atomic<std::uint64_t> secret_counter_{1};
};

enum class HandshakeKind { Full, Resumed };

std::string to_string(HandshakeKind kind);

struct HandshakeOffer {
  Hostname sni;
  std::vector<std::uint8_t> extension_bytes; // encoded client indication, may be empty
  std::optional<std::vector<std::uint8_t>> psk_identity;

  bool indicates_extension() const;
};

struct HandshakeResponse {
  HandshakeKind kind = HandshakeKind::Full;
  TlsVersion tls_version = TlsVersion::V1_3;
  std::optional<CertificateDescriptor> certificate; // full handshakes only
  std::vector<std::uint8_t> extension_bytes;        // encoded server list, may be empty
  // TLS 1.3 carries the extension inside the encrypted portion of the
  // response; 1.2 and lower send it in the clear ServerHello list.
  bool extension_encrypted = false;
  // Issued on full handshakes.
  std::optional<std::vector<std::uint8_t>> psk_identity;
  std::optional<std::vector<std::uint8_t>> session_secret;
  std::int64_t lifetime_s = 0;
  // Echoed recovered secret on resumed handshakes; the client completes the
  // resumption only if it matches the cached secret.
  std::optional<std::vector<std::uint8_t>> resumption_proof;
};

// One SNI endpoint: certificate, sharing-group membership, and the list it
// advertises. Construction rejects advertisements outside the sharing group
// or outside the certificate's SAN coverage.
class ServerEndpoint {
public:
  ServerEndpoint(Hostname sni, CertificateDescriptor certificate,
                 std::shared_ptr<SharingGroup> group, std::vector<Hostname> advertise,
                 std::shared_ptr<const VirtualClock> clock, TlsVersion version = TlsVersion::V1_3,
                 std::int64_t ticket_lifetime_s = 604800);

  const Hostname& sni() const { return sni_; }
  const CertificateDescriptor& certificate() const { return certificate_; }
  const std::vector<Hostname>& advertised() const { return advertise_; }
  TlsVersion tls_version() const { return version_; }

  HandshakeResponse respond(const HandshakeOffer& offer) const;

private:
  Hostname sni_;
  CertificateDescriptor certificate_;
  std::shared_ptr<SharingGroup> group_;
  std::vector<Hostname> advertise_;
  std::shared_ptr<const VirtualClock> clock_;
  TlsVersion version_;
  std::int64_t ticket_lifetime_s_;
};

enum class ValidationPolicy {
  Strict,  // one uncovered name rejects the whole list
  Lenient, // uncovered names are filtered out
};

struct ValidationOutcome {
  std::vector<Hostname> accepted;
  std::vector<Hostname> rejected;

  bool all_accepted() const { return rejected.empty(); }
};

// SAN gate of the client: advertised names survive only when the
// certificate presented in the same full handshake covers them.
ValidationOutcome client_validate(const ServerSniList& advertised,
                                  const CertificateDescriptor& certificate,
                                  ValidationPolicy policy);

struct CompletedHandshake {
  HandshakeKind kind = HandshakeKind::Full;
  bool offered_psk = false;
  bool certificate_received = false;
  std::vector<Hostname> advertised;
  std::vector<Hostname> accepted;
  std::string validation = "none"; // none | accepted | filtered | rejected
  bool extension_encrypted = false;
};

class ClientEndpoint {
public:
  ClientEndpoint(std::shared_ptr<const VirtualClock> clock, bool support_extension = true,
                 ValidationPolicy policy = ValidationPolicy::Strict);

  HandshakeOffer hello(const Hostname& target) const;
  CompletedHandshake complete(const Hostname& target, const HandshakeResponse& response);

  const std::vector<SessionState>& cache() const { return cache_; }
  bool supports_extension() const { return support_extension_; }

private:
  const SessionState* usable_state(const Hostname& target) const;

  std::shared_ptr<const VirtualClock> clock_;
  bool support_extension_;
  ValidationPolicy policy_;
  std::vector<SessionState> cache_;
};

} // namespace xsni::proto
