#include "xsni/protocol/harness.hpp"

#include <fstream>
#include <sstream>

namespace xsni::proto {

void ServerSet::add(std::shared_ptr<ServerEndpoint> server) {
  Hostname sni = server->sni();
  auto [it, inserted] = servers_.emplace(sni, std::move(server));
  if (!inserted) {
    throw ConfigError("duplicate server SNI: " + sni.str());
  }
}

const ServerEndpoint& ServerSet::by_sni(const Hostname& sni) const {
  auto it = servers_.find(sni);
  if (it == servers_.end()) {
    throw ValidationError("no server registered for SNI " + sni.str());
  }
  return *it->second;
}

ServerSet server_set_from_json(const nlohmann::json& doc,
                               std::shared_ptr<const VirtualClock> clock,
                               std::int64_t ticket_lifetime_s) {
  if (!doc.is_object() || !doc.contains("sharing_groups") ||
      !doc.at("sharing_groups").is_array()) {
    throw ParseError("server configuration requires a sharing_groups array");
  }
  ServerSet set;
  std::size_t group_index = 0;
  for (const auto& jg : doc.at("sharing_groups")) {
    if (!jg.is_object() || !jg.contains("mode") || !jg.contains("members") ||
        !jg.at("members").is_array()) {
      throw ParseError("sharing group requires mode and members");
    }
    SharingMode mode = sharing_mode_from_string(jg.at("mode").get<std::string>());

    struct MemberSpec {
      Hostname sni;
      std::vector<SanPattern> san;
      std::vector<Hostname> advertise;
      TlsVersion version = TlsVersion::V1_3;
    };
    std::vector<MemberSpec> specs;
    std::set<Hostname> member_names;
    for (const auto& jm : jg.at("members")) {
      if (!jm.is_object() || !jm.contains("sni") || !jm.contains("san") ||
          !jm.contains("advertise") || !jm.at("san").is_array() ||
          !jm.at("advertise").is_array()) {
        throw ParseError("group member requires sni, san, advertise");
      }
      MemberSpec spec{Hostname(jm.at("sni").get<std::string>()), {}, {}, TlsVersion::V1_3};
      for (const auto& s : jm.at("san")) {
        spec.san.emplace_back(s.get<std::string>());
      }
      for (const auto& a : jm.at("advertise")) {
        spec.advertise.emplace_back(a.get<std::string>());
      }
      if (jm.contains("tls_version")) {
        spec.version = tls_version_from_string(jm.at("tls_version").get<std::string>());
      }
      member_names.insert(spec.sni);
      specs.push_back(std::move(spec));
    }

    std::shared_ptr<SharingGroup> group;
    if (mode == SharingMode::SealingKey) {
      // Deterministic per-group key; real deployments would provision one.
      std::string key_text = "group-key-" + std::to_string(group_index);
      group = SharingGroup::with_sealing_key(
          member_names, std::vector<std::uint8_t>(key_text.begin(), key_text.end()));
    } else {
      group = SharingGroup::with_database(member_names);
    }
    for (auto& spec : specs) {
      CertificateDescriptor cert(spec.sni, std::move(spec.san),
                                 "key-group-" + std::to_string(group_index));
      set.add(std::make_shared<ServerEndpoint>(spec.sni, std::move(cert), group,
                                               std::move(spec.advertise), clock, spec.version,
                                               ticket_lifetime_s));
    }
    ++group_index;
  }
  return set;
}

ServerSet server_set_from_file(const std::filesystem::path& path,
                               std::shared_ptr<const VirtualClock> clock,
                               std::int64_t ticket_lifetime_s) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return server_set_from_json(doc, std::move(clock), ticket_lifetime_s);
}

std::string transcript_line(const Transcript& t) {
  std::ostringstream out;
  out << "target=" << t.target.str() << " mode=" << to_string(t.kind) << " extension=[";
  for (std::size_t i = 0; i < t.advertised.size(); ++i) {
    out << (i ? "," : "") << t.advertised[i].str();
  }
  out << "] validation=" << t.validation;
  return out.str();
}

Transcript run_handshake(ClientEndpoint& client, const ServerSet& servers,
                         const Hostname& target, const ResponseTamper& tamper) {
  HandshakeOffer offer = client.hello(target);
  HandshakeResponse response = servers.by_sni(target).respond(offer);
  if (tamper) {
    tamper(response);
  }
  CompletedHandshake completed = client.complete(target, response);
  return Transcript{target,
                    completed.kind,
                    completed.offered_psk,
                    completed.certificate_received,
                    completed.advertised,
                    completed.accepted,
                    completed.validation,
                    completed.extension_encrypted};
}

std::vector<std::string> parse_script(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) {
      line.pop_back();
    }
    if (line.empty() || line.front() == '#') {
      continue;
    }
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> parse_script_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open " + path.string());
  }
  return parse_script(in);
}

std::vector<Transcript> run_script(ClientEndpoint& client, const ServerSet& servers,
                                   std::span<const std::string> script, VirtualClock& clock) {
  std::vector<Transcript> transcripts;
  for (const std::string& line : script) {
    if (line.rfind("@advance ", 0) == 0) {
      std::int64_t seconds = 0;
      try {
        seconds = std::stoll(line.substr(9));
      } catch (const std::exception&) {
        throw ParseError("bad script directive: \"" + line + "\"");
      }
      clock.advance(seconds);
      continue;
    }
    transcripts.push_back(run_handshake(client, servers, Hostname(line)));
  }
  return transcripts;
}

} // namespace xsni::proto
