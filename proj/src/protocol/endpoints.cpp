#include "xsni/protocol/endpoints.hpp"

#include <algorithm>

namespace xsni::proto {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 7; i >= 0; --i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

} // namespace

std::string to_string(SharingMode mode) {
  return mode == SharingMode::SealingKey ? "sealing_key" : "database";
}

SharingMode sharing_mode_from_string(std::string_view s) {
  if (s == "sealing_key") return SharingMode::SealingKey;
  if (s == "database") return SharingMode::Database;
  throw ParseError("unknown sharing mode: \"" + std::string(s) + "\"");
}

std::string to_string(HandshakeKind kind) {
  return kind == HandshakeKind::Full ? "full" : "resumed";
}

std::vector<std::uint8_t> serialize_state(const ServerSideState& state) {
  std::vector<std::uint8_t> out;
  put_u16(out, static_cast<std::uint16_t>(state.secret.size()));
  out.insert(out.end(), state.secret.begin(), state.secret.end());
  put_u16(out, static_cast<std::uint16_t>(state.issuing_sni.str().size()));
  out.insert(out.end(), state.issuing_sni.str().begin(), state.issuing_sni.str().end());
  out.push_back(state.tls_version == TlsVersion::V1_2 ? 2 : 3);
  put_u64(out, static_cast<std::uint64_t>(state.issued_at));
  put_u64(out, static_cast<std::uint64_t>(state.lifetime_s));
  return out;
}

std::optional<ServerSideState> deserialize_state(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  auto u16 = [&]() -> std::optional<std::uint16_t> {
    if (bytes.size() - pos < 2) return std::nullopt;
    std::uint16_t v = static_cast<std::uint16_t>(bytes[pos] << 8 | bytes[pos + 1]);
    pos += 2;
    return v;
  };
  auto u64 = [&]() -> std::optional<std::uint64_t> {
    if (bytes.size() - pos < 8) return std::nullopt;
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v = v << 8 | bytes[pos + i];
    }
    pos += 8;
    return v;
  };
  ServerSideState state;
  auto secret_len = u16();
  if (!secret_len || bytes.size() - pos < *secret_len) return std::nullopt;
  state.secret.assign(bytes.begin() + pos, bytes.begin() + pos + *secret_len);
  pos += *secret_len;
  auto sni_len = u16();
  if (!sni_len || bytes.size() - pos < *sni_len) return std::nullopt;
  auto host = Hostname::try_parse(
      std::string_view(reinterpret_cast<const char*>(bytes.data() + pos), *sni_len));
  if (!host) return std::nullopt;
  state.issuing_sni = *host;
  pos += *sni_len;
  if (bytes.size() - pos < 1) return std::nullopt;
  state.tls_version = bytes[pos++] == 2 ? TlsVersion::V1_2 : TlsVersion::V1_3;
  auto issued = u64();
  auto lifetime = u64();
  if (!issued || !lifetime || pos != bytes.size()) return std::nullopt;
  state.issued_at = static_cast<std::int64_t>(*issued);
  state.lifetime_s = static_cast<std::int64_t>(*lifetime);
  return state;
}

std::vector<std::uint8_t> SharedStateStore::insert(const ServerSideState& state) {
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<std::uint8_t> id;
  id.reserve(10);
  id.push_back('d');
  id.push_back('b');
  put_u64(id, next_id_++);
  entries_[id] = state;
  return id;
}

std::optional<ServerSideState>
SharedStateStore::lookup(std::span<const std::uint8_t> psk_identity) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = entries_.find(std::vector<std::uint8_t>(psk_identity.begin(), psk_identity.end()));
  if (it == entries_.end()) {
    return std::nullopt;
  }
  return it->second;
}

SharingGroup::SharingGroup(SharingMode mode, std::set<Hostname> members)
    : mode_(mode), members_(std::move(members)) {
  if (members_.empty()) {
    throw ConfigError("sharing group needs at least one member");
  }
}

std::shared_ptr<SharingGroup> SharingGroup::with_sealing_key(std::set<Hostname> members,
                                                             std::vector<std::uint8_t> key) {
  auto group = std::shared_ptr<SharingGroup>(
      new SharingGroup(SharingMode::SealingKey, std::move(members)));
  group->sealer_ = std::make_shared<KeyedSealer>(std::move(key));
  return group;
}

std::shared_ptr<SharingGroup> SharingGroup::with_database(std::set<Hostname> members) {
  auto group =
      std::shared_ptr<SharingGroup>(new SharingGroup(SharingMode::Database, std::move(members)));
  group->store_ = std::make_shared<SharedStateStore>();
  return group;
}

std::vector<std::uint8_t> SharingGroup::issue(const ServerSideState& state) const {
  if (mode_ == SharingMode::SealingKey) {
    return sealer_->seal(serialize_state(state));
  }
  return store_->insert(state);
}

std::optional<ServerSideState>
SharingGroup::recover(std::span<const std::uint8_t> psk_identity) const {
  if (mode_ == SharingMode::SealingKey) {
    auto plaintext = sealer_->unseal(psk_identity);
    if (!plaintext) {
      return std::nullopt;
    }
    return deserialize_state(*plaintext);
  }
  return store_->lookup(psk_identity);
}

std::vector<std::uint8_t> SharingGroup::next_secret() const {
  std::uint64_t n = secret_counter_.fetch_add(1);
  std::vector<std::uint8_t> secret;
  secret.reserve(16);
  put_u64(secret, n * 0x9e3779b97f4a7c15ull + 0x6a09e667f3bcc908ull);
  put_u64(secret, n);
  return secret;
}

bool HandshakeOffer::indicates_extension() const {
  if (extension_bytes.empty()) {
    return false;
  }
  DecodeResult decoded = decode_extension(extension_bytes);
  return decoded.ok() && std::holds_alternative<ClientIndication>(decoded.record->body);
}

ServerEndpoint::ServerEndpoint(Hostname sni, CertificateDescriptor certificate,
                               std::shared_ptr<SharingGroup> group,
                               std::vector<Hostname> advertise,
                               std::shared_ptr<const VirtualClock> clock, TlsVersion version,
                               std::int64_t ticket_lifetime_s)
    : sni_(std::move(sni)), certificate_(std::move(certificate)), group_(std::move(group)),
      advertise_(std::move(advertise)), clock_(std::move(clock)), version_(version),
      ticket_lifetime_s_(ticket_lifetime_s) {
  if (!group_ || !clock_) {
    throw ConfigError("server " + sni_.str() + " needs a sharing group and a clock");
  }
  if (!group_->is_member(sni_)) {
    throw ConfigError("server " + sni_.str() + " is not a member of its sharing group");
  }
  for (const Hostname& name : advertise_) {
    if (!group_->is_member(name)) {
      throw ConfigError("server " + sni_.str() + " advertises " + name.str() +
                        " outside its sharing group");
    }
    if (!certificate_.covers(name)) {
      throw ConfigError("server " + sni_.str() + " advertises " + name.str() +
                        " which its certificate does not cover");
    }
  }
}

HandshakeResponse ServerEndpoint::respond(const HandshakeOffer& offer) const {
  HandshakeResponse response;
  response.tls_version = version_;

  if (offer.psk_identity) {
    auto state = group_->recover(*offer.psk_identity);
    if (state && !state->expired(clock_->now())) {
      response.kind = HandshakeKind::Resumed;
      response.resumption_proof = state->secret;
      return response;
    }
    // Unknown or undecryptable identity: fall back to a full handshake.
  }

  response.kind = HandshakeKind::Full;
  response.certificate = certificate_;
  ServerSideState state{group_->next_secret(), sni_, clock_->now(), ticket_lifetime_s_, version_};
  response.psk_identity = group_->issue(state);
  response.session_secret = state.secret;
  response.lifetime_s = ticket_lifetime_s_;
  if (offer.indicates_extension() && !advertise_.empty()) {
    response.extension_bytes = encode_extension(ExtensionRecord{
        kResumptionAcrossSniType, ServerSniList{advertise_}});
    response.extension_encrypted = version_ == TlsVersion::V1_3;
  }
  return response;
}

ValidationOutcome client_validate(const ServerSniList& advertised,
                                  const CertificateDescriptor& certificate,
                                  ValidationPolicy policy) {
  ValidationOutcome outcome;
  for (const Hostname& name : advertised.names) {
    if (certificate.covers(name)) {
      outcome.accepted.push_back(name);
    } else {
      outcome.rejected.push_back(name);
    }
  }
  if (policy == ValidationPolicy::Strict && !outcome.rejected.empty()) {
    // A partially invalid list means a misconfigured or hostile server;
    // keep issuer-only resumption.
    outcome.accepted.clear();
  }
  return outcome;
}

ClientEndpoint::ClientEndpoint(std::shared_ptr<const VirtualClock> clock, bool support_extension,
                               ValidationPolicy policy)
    : clock_(std::move(clock)), support_extension_(support_extension), policy_(policy) {
  if (!clock_) {
    throw ConfigError("client needs a clock");
  }
}

const SessionState* ClientEndpoint::usable_state(const Hostname& target) const {
  const SessionState* best = nullptr;
  for (const SessionState& state : cache_) {
    if (state.expired(clock_->now()) || !state.covers(target)) {
      continue;
    }
    if (!best || state.issued_at > best->issued_at) {
      best = &state;
    }
  }
  return best;
}

HandshakeOffer ClientEndpoint::hello(const Hostname& target) const {
  HandshakeOffer offer;
  offer.sni = target;
  if (support_extension_) {
    offer.extension_bytes = encode_extension(ExtensionRecord{kResumptionAcrossSniType,
                                                             ClientIndication{}});
  }
  if (const SessionState* state = usable_state(target)) {
    offer.psk_identity = state->psk_identity;
  }
  return offer;
}

CompletedHandshake ClientEndpoint::complete(const Hostname& target,
                                            const HandshakeResponse& response) {
  CompletedHandshake result;
  result.offered_psk = usable_state(target) != nullptr;
  result.extension_encrypted = response.extension_encrypted;

  if (response.kind == HandshakeKind::Resumed) {
    const SessionState* state = usable_state(target);
    if (!state || !response.resumption_proof) {
      throw ValidationError("resumed response for " + target.str() + " without an offered PSK");
    }
    if (*response.resumption_proof != state->secret) {
      throw ValidationError("server for " + target.str() +
                            " failed to prove knowledge of the session secret");
    }
    result.kind = HandshakeKind::Resumed;
    return result;
  }

  // Full handshake: certificate-based authentication.
  if (!response.certificate) {
    throw ValidationError("full handshake response for " + target.str() +
                          " carries no certificate");
  }
  if (!response.certificate->covers(target) && response.certificate->subject_sni != target) {
    throw ValidationError("certificate presented for " + target.str() +
                          " does not authenticate it");
  }
  result.kind = HandshakeKind::Full;
  result.certificate_received = true;

  std::vector<Hostname> resumable;
  if (!response.extension_bytes.empty()) {
    if (!support_extension_) {
      throw ValidationError("server sent resumption_across_sni to a non-indicating client");
    }
    DecodeResult decoded = decode_extension(response.extension_bytes);
    if (decoded.fatal()) {
      throw ParseError("malformed resumption_across_sni extension: " +
                       to_string(decoded.status));
    }
    if (decoded.ok()) {
      if (const auto* list = std::get_if<ServerSniList>(&decoded.record->body)) {
        result.advertised = list->names;
        ValidationOutcome outcome = client_validate(*list, *response.certificate, policy_);
        result.accepted = outcome.accepted;
        if (outcome.all_accepted()) {
          result.validation = "accepted";
        } else if (!outcome.accepted.empty()) {
          result.validation = "filtered";
        } else {
          result.validation = "rejected";
        }
        resumable = outcome.accepted;
      }
    }
  }

  if (response.psk_identity && response.session_secret) {
    cache_.push_back(SessionState{*response.psk_identity, *response.session_secret, target,
                                  std::move(resumable), clock_->now(), response.lifetime_s,
                                  response.tls_version});
  }
  return result;
}

} // namespace xsni::proto
