#include "xsni/trust.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

namespace xsni {

namespace {

// Index-based union-find with union by size and path compression.
class UnionFind {
public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) {
      return;
    }
    if (size_[a] < size_[b]) {
      std::swap(a, b);
    }
    parent_[b] = a;
    size_[a] += size_[b];
  }

private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

} // namespace

std::string to_string(TrustSource source) {
  switch (source) {
  case TrustSource::Certificate: return "certificate";
  case TrustSource::Resumption: return "resumption";
  case TrustSource::Union: return "union";
  }
  throw std::logic_error("unreachable trust source");
}

TrustSource trust_source_from_string(std::string_view s) {
  if (s == "certificate") return TrustSource::Certificate;
  if (s == "resumption") return TrustSource::Resumption;
  if (s == "union") return TrustSource::Union;
  throw ParseError("unknown trust source: \"" + std::string(s) + "\"");
}

void TrustRelationSet::add(const Hostname& a, const Hostname& b) {
  if (a == b) {
    return;
  }
  pairs_.insert(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
}

bool TrustRelationSet::related(const Hostname& a, const Hostname& b) const {
  if (a == b) {
    return true;
  }
  return pairs_.count(a < b ? std::make_pair(a, b) : std::make_pair(b, a)) != 0;
}

nlohmann::json TrustRelationSet::to_json() const {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [a, b] : pairs_) {
    pairs.push_back(nlohmann::json::array({a.str(), b.str()}));
  }
  return {{"source", to_string(source_)}, {"pairs", pairs}};
}

TrustRelationSet TrustRelationSet::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("source") || !doc.contains("pairs") ||
      !doc.at("pairs").is_array()) {
    throw ParseError("relation set requires source and pairs");
  }
  TrustRelationSet out(trust_source_from_string(doc.at("source").get<std::string>()));
  for (const auto& jp : doc.at("pairs")) {
    if (!jp.is_array() || jp.size() != 2 || !jp[0].is_string() || !jp[1].is_string()) {
      throw ParseError("relation pairs must be two-element hostname arrays");
    }
    out.add(Hostname(jp[0].get<std::string>()), Hostname(jp[1].get<std::string>()));
  }
  return out;
}

TrustRelationSet TrustRelationSet::from_file(const std::filesystem::path& path) {
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
  return from_json(doc);
}

TrustRelationSet cert_trust_relations(std::span<const DomainTree> corpus) {
  // Gather all TLS hostnames and all presented certificates first; a pair is
  // recorded when either side's observed certificate covers the other host.
  std::set<Hostname> tls_hosts;
  std::vector<const CertificateDescriptor*> observations;
  std::vector<Hostname> presenters;
  for (const auto& tree : corpus) {
    for (const auto& [host, node] : tree.nodes()) {
      if (!node.tls) {
        continue;
      }
      tls_hosts.insert(host);
      if (node.cert) {
        observations.push_back(&*node.cert);
        presenters.push_back(host);
      }
    }
  }
  TrustRelationSet out(TrustSource::Certificate);
  for (std::size_t i = 0; i < observations.size(); ++i) {
    for (const auto& other : tls_hosts) {
      if (other != presenters[i] && observations[i]->covers(other)) {
        out.add(presenters[i], other);
      }
    }
  }
  return out;
}

std::vector<ResumptionRecord> parse_resumption_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("resumption CSV is empty");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  if (line != "origin_host,target_host,resumed") {
    throw ParseError("resumption CSV must start with header origin_host,target_host,resumed");
  }
  std::vector<ResumptionRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw ParseError("resumption CSV line " + std::to_string(line_no) +
                       ": expected 3 fields, got " + std::to_string(fields.size()));
    }
    bool resumed = false;
    if (fields[2] == "true") {
      resumed = true;
    } else if (fields[2] == "false") {
      resumed = false;
    } else {
      throw ParseError("resumption CSV line " + std::to_string(line_no) +
                       ": resumed must be true or false");
    }
    records.push_back({Hostname(fields[0]), Hostname(fields[1]), resumed});
  }
  return records;
}

std::vector<ResumptionRecord> parse_resumption_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open " + path.string());
  }
  return parse_resumption_csv(in);
}

TrustRelationSet resumption_trust_relations(std::span<const ResumptionRecord> records,
                                            const std::set<Hostname>& known_hosts,
                                            ResumptionSymmetrization mode) {
  std::set<std::pair<Hostname, Hostname>> one_direction;
  TrustRelationSet out(TrustSource::Resumption);
  for (const auto& rec : records) {
    if (!known_hosts.count(rec.origin)) {
      throw ValidationError("resumption record references unknown hostname " + rec.origin.str());
    }
    if (!known_hosts.count(rec.target)) {
      throw ValidationError("resumption record references unknown hostname " + rec.target.str());
    }
    if (!rec.resumed || rec.origin == rec.target) {
      continue;
    }
    if (mode == ResumptionSymmetrization::EitherDirection) {
      out.add(rec.origin, rec.target);
    } else {
      if (one_direction.count({rec.target, rec.origin})) {
        out.add(rec.origin, rec.target);
      }
      one_direction.insert({rec.origin, rec.target});
    }
  }
  return out;
}

TrustRelationSet union_relations(const TrustRelationSet& r1, const TrustRelationSet& r2) {
  TrustRelationSet out(TrustSource::Union);
  for (const auto& [a, b] : r1.pairs()) {
    out.add(a, b);
  }
  for (const auto& [a, b] : r2.pairs()) {
    out.add(a, b);
  }
  return out;
}

TrustGroups::TrustGroups(std::set<Hostname> scope, const TrustRelationSet& relations) {
  std::vector<Hostname> hosts(scope.begin(), scope.end());
  std::map<Hostname, std::size_t> pos;
  for (std::size_t i = 0; i < hosts.size(); ++i) {
    pos[hosts[i]] = i;
  }
  UnionFind uf(hosts.size());
  for (const auto& [a, b] : relations.pairs()) {
    auto ia = pos.find(a);
    auto ib = pos.find(b);
    if (ia != pos.end() && ib != pos.end()) { // restrict to the scope
      uf.unite(ia->second, ib->second);
    }
  }
  std::map<std::size_t, std::size_t> root_to_group;
  for (std::size_t i = 0; i < hosts.size(); ++i) {
    std::size_t root = uf.find(i);
    auto [it, inserted] = root_to_group.emplace(root, groups_.size());
    if (inserted) {
      groups_.emplace_back();
    }
    groups_[it->second].insert(hosts[i]);
    index_[hosts[i]] = it->second;
  }
}

std::size_t TrustGroups::group_of(const Hostname& host) const {
  auto it = index_.find(host);
  if (it == index_.end()) {
    throw ValidationError("hostname " + host.str() + " outside the grouped scope");
  }
  return it->second;
}

const std::set<Hostname>& TrustGroups::group_containing(const Hostname& host) const {
  return groups_[group_of(host)];
}

TrustGroups trust_groups(const DomainTree& tree, const TrustRelationSet& relations) {
  return TrustGroups(tree.tls_hostnames(), relations);
}

GroupStats group_stats(std::span<const DomainTree> corpus, const TrustRelationSet& relations) {
  if (corpus.empty()) {
    throw ValidationError("group statistics need a non-empty corpus");
  }
  GroupStats stats;
  double total_groups = 0.0;
  double total_hosts = 0.0;
  for (const auto& tree : corpus) {
    TrustGroups groups = trust_groups(tree, relations);
    total_groups += static_cast<double>(groups.group_count());
    total_hosts += tree.distinct_tls_hostnames();
    int root_size = 0;
    if (groups.in_scope(tree.root())) {
      root_size = static_cast<int>(groups.group_containing(tree.root()).size());
    }
    stats.root_group_size_histogram[root_size] += 1;
  }
  const double sites = static_cast<double>(corpus.size());
  stats.mean_group_count = total_groups / sites;
  stats.mean_tls_hostnames = total_hosts / sites;
  // Ratio of means: mean hosts per site over mean groups per site, so that
  // mean_group_size * mean_group_count == mean_tls_hostnames exactly.
  stats.mean_group_size = total_groups > 0.0 ? total_hosts / total_groups : 0.0;
  return stats;
}

} // namespace xsni
