#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>

#include <json.hpp>

#include "xsni/protocol/endpoints.hpp"

namespace xsni::proto {

// In-process registry of servers, addressed by SNI.
class ServerSet {
public:
  void add(std::shared_ptr<ServerEndpoint> server);
  const ServerEndpoint& by_sni(const Hostname& sni) const;
  const std::map<Hostname, std::shared_ptr<ServerEndpoint>>& servers() const { return servers_; }

private:
  std::map<Hostname, std::shared_ptr<ServerEndpoint>> servers_;
};

// Configuration document:
// { "sharing_groups": [ { "mode": "sealing_key"|"database",
//                         "members": [ { "sni": str, "san": [str],
//                                        "advertise": [str],
//                                        "tls_version": "1.2"|"1.3" (optional) } ] } ] }
ServerSet server_set_from_json(const nlohmann::json& doc,
                               std::shared_ptr<const VirtualClock> clock,
                               std::int64_t ticket_lifetime_s = 604800);
ServerSet server_set_from_file(const std::filesystem::path& path,
                               std::shared_ptr<const VirtualClock> clock,
                               std::int64_t ticket_lifetime_s = 604800);

struct Transcript {
  Hostname target;
  HandshakeKind kind = HandshakeKind::Full;
  bool offered_psk = false;
  bool certificate_received = false;
  std::vector<Hostname> advertised;
  std::vector<Hostname> accepted;
  std::string validation = "none";
  bool extension_encrypted = false;
};

std::string transcript_line(const Transcript& t);

// Applied to the server's response before the client sees it; stands in for
// an on-path attacker rewriting bytes.
using ResponseTamper = std::function<void(HandshakeResponse&)>;

Transcript run_handshake(ClientEndpoint& client, const ServerSet& servers,
                         const Hostname& target, const ResponseTamper& tamper = {});

// A script is one connection target per line. Blank lines and lines starting
// with '#' are skipped; "@advance <seconds>" moves the virtual clock.
std::vector<std::string> parse_script(std::istream& in);
std::vector<std::string> parse_script_file(const std::filesystem::path& path);

std::vector<Transcript> run_script(ClientEndpoint& client, const ServerSet& servers,
                                   std::span<const std::string> script, VirtualClock& clock);

} // namespace xsni::proto
