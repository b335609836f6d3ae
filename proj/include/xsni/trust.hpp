#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "xsni/domain_tree.hpp"

namespace xsni {

enum class TrustSource { Certificate, Resumption, Union };

std::string to_string(TrustSource source);
TrustSource trust_source_from_string(std::string_view s);

// Pairwise evidence that two hostnames share secret TLS state. Pairs are
// unordered and irreflexive; reflexivity is implicit.
class TrustRelationSet {
public:
  explicit TrustRelationSet(TrustSource source) : source_(source) {}

  TrustSource source() const { return source_; }
  const std::set<std::pair<Hostname, Hostname>>& pairs() const { return pairs_; }

  // Self-pairs are dropped silently; {a,b} and {b,a} are the same pair.
  void add(const Hostname& a, const Hostname& b);
  bool related(const Hostname& a, const Hostname& b) const;
  std::size_t size() const { return pairs_.size(); }

  // Sorted pair list, diffable as a golden.
  nlohmann::json to_json() const;
  static TrustRelationSet from_json(const nlohmann::json& doc);
  static TrustRelationSet from_file(const std::filesystem::path& path);

private:
  TrustSource source_;
  std::set<std::pair<Hostname, Hostname>> pairs_;
};

// A pair {A,B} is added when a certificate presented by one of them covers
// the other. Every (hostname, presented certificate) observation in the
// corpus is matched against every TLS hostname, so relations span sites.
TrustRelationSet cert_trust_relations(std::span<const DomainTree> corpus);

struct ResumptionRecord {
  Hostname origin;
  Hostname target;
  bool resumed = false;
};

// CSV format: header "origin_host,target_host,resumed", booleans true|false.
std::vector<ResumptionRecord> parse_resumption_csv(std::istream& in);
std::vector<ResumptionRecord> parse_resumption_csv_file(const std::filesystem::path& path);

enum class ResumptionSymmetrization {
  EitherDirection, // {A,B} related if at least one direction resumed
  BothDirections,  // sensitivity switch: require A->B and B->A
};

// Records referencing hostnames outside `known_hosts` are rejected.
TrustRelationSet resumption_trust_relations(
    std::span<const ResumptionRecord> records, const std::set<Hostname>& known_hosts,
    ResumptionSymmetrization mode = ResumptionSymmetrization::EitherDirection);

TrustRelationSet union_relations(const TrustRelationSet& r1, const TrustRelationSet& r2);

// Disjoint non-empty groups covering a hostname scope exactly: the
// connected components of the trust relation restricted to that scope.
class TrustGroups {
public:
  TrustGroups(std::set<Hostname> scope, const TrustRelationSet& relations);

  const std::vector<std::set<Hostname>>& groups() const { return groups_; }
  std::size_t group_count() const { return groups_.size(); }
  // Index of the group containing `host`; throws for hosts outside the scope.
  std::size_t group_of(const Hostname& host) const;
  const std::set<Hostname>& group_containing(const Hostname& host) const;
  bool in_scope(const Hostname& host) const { return index_.count(host) != 0; }

private:
  std::vector<std::set<Hostname>> groups_;
  std::map<Hostname, std::size_t> index_;
};

// Groups over one site's TLS hostnames.
TrustGroups trust_groups(const DomainTree& tree, const TrustRelationSet& relations);

struct GroupStats {
  double mean_group_count = 0.0;
  double mean_group_size = 0.0; // mean TLS hostnames per site / mean group count
  std::map<int, int> root_group_size_histogram; // size -> number of sites; 0 = non-TLS root
  double mean_tls_hostnames = 0.0;
};

GroupStats group_stats(std::span<const DomainTree> corpus, const TrustRelationSet& relations);

} // namespace xsni
