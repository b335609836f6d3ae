#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "xsni/cost_model.hpp"
#include "xsni/domain_tree.hpp"
#include "xsni/trust.hpp"

namespace xsni::sim {

enum class ResumptionPolicy {
  NoResumption,    // every connection is a full handshake
  SameHostname,    // resumption only on revisits to the same SNI
  AcrossHostnames, // one full handshake unlocks a whole trust group
};

// How a hop on the critical path qualifies for resumption.
enum class PathUnlockRule {
  AlongPath,   // an earlier hop on the same root path unlocked the group
  AnyShallower, // some group member sits strictly shallower anywhere in the tree
};

std::string to_string(ResumptionPolicy policy);
std::string to_string(PathUnlockRule rule);
ResumptionPolicy policy_from_string(std::string_view s);
PathUnlockRule rule_from_string(std::string_view s);

// First visit of one site: one connection per distinct hostname.
// longest_total_path is the deepest chain of dependent connections;
// longest_full_path counts the hops on that chain still needing a full
// handshake (non-TLS hops block the chain and are never resumable).
struct SiteLoadResult {
  Hostname site_root;
  int full_handshakes = 0;
  int resumed_handshakes = 0;
  int longest_full_path = 0;
  int longest_total_path = 0;
};

SiteLoadResult simulate_site(const DomainTree& tree, const TrustGroups& groups,
                             ResumptionPolicy policy, PathUnlockRule rule);

struct SimulationReport {
  ResumptionPolicy policy = ResumptionPolicy::NoResumption;
  PathUnlockRule rule = PathUnlockRule::AlongPath;
  std::vector<SiteLoadResult> per_site;

  double mean_full_handshakes = 0.0;
  double mean_resumed_handshakes = 0.0;
  double mean_longest_full_path = 0.0;
  double mean_longest_total_path = 0.0;
  double mean_full_path_along = 0.0;    // both unlock rules, side by side
  double mean_full_path_shallower = 0.0;

  std::map<int, int> full_handshake_histogram;   // full handshakes -> site count
  std::map<int, int> sequential_path_histogram;  // longest_full_path -> site count

  cost::CpuSavings cpu;
  double resumption_ratio = 0.0;
  cost::Bounds delta_connect_1rtt_ms;
  cost::Bounds delta_connect_0rtt_ms; // includes the configured RTT
  cost::Bounds connect_gain_percent;  // at the table's baseline latency row
  double rtt_ms = 0.0;
};

SimulationReport simulate_corpus(std::span<const DomainTree> corpus,
                                 const TrustRelationSet& relations, ResumptionPolicy policy,
                                 PathUnlockRule rule, const cost::HandshakeCostTable& table,
                                 double rtt_ms = 60.0);

// Full handshakes to different hostnames across visits to two sites.
// Trust groups span both sites' hostnames, so certificate relations between
// third parties of different sites pay off here.
int simulate_site_pair(const DomainTree& a, const DomainTree& b,
                       const TrustRelationSet& relations, ResumptionPolicy policy);

double pairwise_mean(std::span<const DomainTree> corpus, const TrustRelationSet& relations,
                     ResumptionPolicy policy);

// Total resumed handshakes per full handshake over the corpus.
double resumption_ratio(std::span<const DomainTree> corpus, const TrustRelationSet& relations,
                        ResumptionPolicy policy);

} // namespace xsni::sim
