#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include <json.hpp>

#include "xsni/certificate.hpp"
#include "xsni/hostname.hpp"

namespace xsni {

struct TreeNode {
  Hostname host;
  std::optional<Hostname> parent; // nullopt for the root
  bool tls = true;
  std::optional<CertificateDescriptor> cert;
};

// The causal hostname-request graph of one website visit: a tree rooted at
// the site's root-domain, edges pointing from a request's origin to the
// hostname it triggered. Depth counts hops including the root itself, so
// the root is the first sequential connection (depth 1).
class DomainTree {
public:
  // Validates the tree invariants: unique hostnames, parent edges forming a
  // tree rooted at `root`, no cycles, every node reachable.
  DomainTree(Hostname root, std::vector<TreeNode> nodes);

  static DomainTree from_json(const nlohmann::json& doc);
  static DomainTree from_file(const std::filesystem::path& path);
  nlohmann::json to_json() const; // canonical: nodes sorted by host, explicit nulls

  const Hostname& root() const { return root_; }
  const std::map<Hostname, TreeNode>& nodes() const { return nodes_; }
  bool contains(const Hostname& host) const { return nodes_.count(host) != 0; }
  const TreeNode& node(const Hostname& host) const;

  // 1 + number of parent edges between `host` and the root.
  int depth(const Hostname& host) const;

  // Maximum depth over TLS-supporting nodes; the longest chain of
  // sequentially dependent connections. 1 for a tree without TLS nodes.
  int longest_path() const;

  int distinct_tls_hostnames() const;
  std::set<Hostname> tls_hostnames() const;

  // Root-first hop sequence ending at `host`.
  std::vector<Hostname> path_from_root(const Hostname& host) const;

private:
  Hostname root_;
  std::map<Hostname, TreeNode> nodes_;
  std::map<Hostname, int> depth_;
};

// Loads every *.json file in `dir` as a domain tree; the result is sorted
// by root hostname so downstream aggregates do not depend on file order.
std::vector<DomainTree> load_corpus(const std::filesystem::path& dir);

} // namespace xsni
