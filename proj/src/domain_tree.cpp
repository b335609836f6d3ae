#include "xsni/domain_tree.hpp"

#include <algorithm>
#include <fstream>

namespace xsni {

namespace {

CertificateDescriptor cert_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("subject") || !j.contains("san") || !j.contains("key_id")) {
    throw ParseError("certificate object requires subject, san, key_id");
  }
  if (!j.at("san").is_array() || !j.at("subject").is_string() || !j.at("key_id").is_string()) {
    throw ParseError("malformed certificate object");
  }
  std::vector<SanPattern> sans;
  for (const auto& s : j.at("san")) {
    if (!s.is_string()) {
      throw ParseError("SAN entries must be strings");
    }
    sans.emplace_back(s.get<std::string>());
  }
  return CertificateDescriptor(Hostname(j.at("subject").get<std::string>()), std::move(sans),
                               j.at("key_id").get<std::string>());
}

nlohmann::json cert_to_json(const CertificateDescriptor& cert) {
  nlohmann::json san = nlohmann::json::array();
  for (const auto& p : cert.san_list) {
    san.push_back(p.text());
  }
  return {{"subject", cert.subject_sni.str()}, {"san", san}, {"key_id", cert.key_id}};
}

} // namespace

DomainTree::DomainTree(Hostname root, std::vector<TreeNode> nodes) : root_(std::move(root)) {
  for (auto& n : nodes) {
    Hostname host = n.host;
    auto [it, inserted] = nodes_.emplace(host, std::move(n));
    if (!inserted) {
      // Each hostname appears once in a request-causality tree; a repeated
      // entry is an ingestion error even if the parents agree.
      throw ValidationError("duplicate hostname in tree: " + host.str());
    }
  }
  auto root_it = nodes_.find(root_);
  if (root_it == nodes_.end()) {
    throw ValidationError("root " + root_.str() + " missing from node list");
  }
  if (root_it->second.parent.has_value()) {
    throw ValidationError("root " + root_.str() + " must not have a parent");
  }
  for (const auto& [host, node] : nodes_) {
    if (host == root_) {
      continue;
    }
    if (!node.parent.has_value()) {
      throw ValidationError("non-root node " + host.str() + " has no parent");
    }
    if (!nodes_.count(*node.parent)) {
      throw ValidationError("node " + host.str() + " references unknown parent " +
                            node.parent->str());
    }
  }
  // Depth assignment doubles as the cycle/reachability check: a parent chain
  // that does not terminate at the root revisits a node.
  for (const auto& [host, node] : nodes_) {
    std::set<Hostname> seen;
    int hops = 1;
    Hostname cur = host;
    while (cur != root_) {
      if (!seen.insert(cur).second) {
        throw ValidationError("cycle detected at node " + cur.str());
      }
      cur = *nodes_.at(cur).parent;
      ++hops;
    }
    depth_[host] = hops;
  }
}

DomainTree DomainTree::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("root") || !doc.contains("nodes")) {
    throw ParseError("domain-tree document requires root and nodes");
  }
  if (!doc.at("root").is_string() || !doc.at("nodes").is_array()) {
    throw ParseError("malformed domain-tree document");
  }
  Hostname root(doc.at("root").get<std::string>());
  std::vector<TreeNode> nodes;
  for (const auto& jn : doc.at("nodes")) {
    if (!jn.is_object() || !jn.contains("host") || !jn.contains("parent") || !jn.contains("tls")) {
      throw ParseError("node object requires host, parent, tls");
    }
    if (!jn.at("host").is_string() || !jn.at("tls").is_boolean()) {
      throw ParseError("malformed node object");
    }
    TreeNode n{Hostname(jn.at("host").get<std::string>()), std::nullopt,
               jn.at("tls").get<bool>(), std::nullopt};
    const auto& parent = jn.at("parent");
    if (!parent.is_null()) {
      if (!parent.is_string()) {
        throw ParseError("node parent must be a hostname or null");
      }
      n.parent = Hostname(parent.get<std::string>());
    }
    if (jn.contains("cert") && !jn.at("cert").is_null()) {
      n.cert = cert_from_json(jn.at("cert"));
    }
    nodes.push_back(std::move(n));
  }
  return DomainTree(std::move(root), std::move(nodes));
}

DomainTree DomainTree::from_file(const std::filesystem::path& path) {
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
  try {
    return from_json(doc);
  } catch (const Error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

nlohmann::json DomainTree::to_json() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& [host, node] : nodes_) { // map order = sorted by host
    nlohmann::json jn{{"host", host.str()},
                      {"parent", node.parent ? nlohmann::json(node.parent->str())
                                             : nlohmann::json(nullptr)},
                      {"tls", node.tls},
                      {"cert", node.cert ? cert_to_json(*node.cert) : nlohmann::json(nullptr)}};
    nodes.push_back(std::move(jn));
  }
  return {{"root", root_.str()}, {"nodes", nodes}};
}

const TreeNode& DomainTree::node(const Hostname& host) const {
  auto it = nodes_.find(host);
  if (it == nodes_.end()) {
    throw ValidationError("unknown node " + host.str());
  }
  return it->second;
}

int DomainTree::depth(const Hostname& host) const {
  auto it = depth_.find(host);
  if (it == depth_.end()) {
    throw ValidationError("unknown node " + host.str());
  }
  return it->second;
}

int DomainTree::longest_path() const {
  int longest = 1;
  for (const auto& [host, node] : nodes_) {
    if (node.tls) {
      longest = std::max(longest, depth_.at(host));
    }
  }
  return longest;
}

int DomainTree::distinct_tls_hostnames() const {
  return static_cast<int>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const auto& kv) { return kv.second.tls; }));
}

std::set<Hostname> DomainTree::tls_hostnames() const {
  std::set<Hostname> out;
  for (const auto& [host, node] : nodes_) {
    if (node.tls) {
      out.insert(host);
    }
  }
  return out;
}

std::vector<Hostname> DomainTree::path_from_root(const Hostname& host) const {
  std::vector<Hostname> reversed;
  Hostname cur = host;
  reversed.push_back(cur);
  while (cur != root_) {
    cur = *node(cur).parent;
    reversed.push_back(cur);
  }
  return {reversed.rbegin(), reversed.rend()};
}

std::vector<DomainTree> load_corpus(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw ParseError("corpus directory not found: " + dir.string());
  }
  std::vector<DomainTree> corpus;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      corpus.push_back(DomainTree::from_file(entry.path()));
    }
  }
  if (corpus.empty()) {
    throw ParseError("corpus directory " + dir.string() + " contains no .json trees");
  }
  std::sort(corpus.begin(), corpus.end(),
            [](const DomainTree& a, const DomainTree& b) { return a.root() < b.root(); });
  for (std::size_t i = 1; i < corpus.size(); ++i) {
    if (corpus[i].root() == corpus[i - 1].root()) {
      throw ValidationError("duplicate site root in corpus: " + corpus[i].root().str());
    }
  }
  return corpus;
}

} // namespace xsni
