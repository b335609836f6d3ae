#include "xsni/simulator.hpp"

#include <algorithm>
#include <set>

namespace xsni::sim {

namespace {

// Hops on the deepest dependency chain that still need a full handshake.
// The walk credits a resumed hop whenever the policy says its trust group
// was already unlocked; non-TLS hops count as blocking hops but cannot
// unlock anything. Ties between equally deep chains resolve to the worst one.
int full_hops_on_deepest_path(const DomainTree& tree, const TrustGroups& groups,
                              ResumptionPolicy policy, PathUnlockRule rule) {
  int deepest = tree.longest_path();
  // Minimum depth per group, for the AnyShallower rule.
  std::map<std::size_t, int> group_min_depth;
  if (policy == ResumptionPolicy::AcrossHostnames && rule == PathUnlockRule::AnyShallower) {
    for (const auto& [host, node] : tree.nodes()) {
      if (!node.tls) {
        continue;
      }
      auto [it, inserted] = group_min_depth.emplace(groups.group_of(host), tree.depth(host));
      if (!inserted) {
        it->second = std::min(it->second, tree.depth(host));
      }
    }
  }

  int worst = 0;
  bool found_deep_tls = false;
  for (const auto& [host, node] : tree.nodes()) {
    if (!node.tls || tree.depth(host) != deepest) {
      continue;
    }
    found_deep_tls = true;
    int fulls = 0;
    std::set<std::size_t> unlocked;
    for (const Hostname& hop : tree.path_from_root(host)) {
      const TreeNode& hop_node = tree.node(hop);
      if (!hop_node.tls) {
        ++fulls; // plain connection: blocks the chain, cannot be resumed
        continue;
      }
      if (policy != ResumptionPolicy::AcrossHostnames) {
        ++fulls; // first visit, distinct hostnames: nothing to resume
        continue;
      }
      std::size_t group = groups.group_of(hop);
      bool resumed = rule == PathUnlockRule::AlongPath
                         ? unlocked.count(group) != 0
                         : group_min_depth.at(group) < tree.depth(hop);
      if (!resumed) {
        ++fulls;
      }
      unlocked.insert(group);
    }
    worst = std::max(worst, fulls);
  }
  if (!found_deep_tls) {
    // Tree without TLS nodes: the chain is the root connection alone.
    return deepest;
  }
  return worst;
}

void check_partition(const DomainTree& tree, const TrustGroups& groups) {
  std::set<Hostname> tls = tree.tls_hostnames();
  std::size_t covered = 0;
  for (const auto& group : groups.groups()) {
    for (const auto& host : group) {
      if (!tls.count(host)) {
        throw ValidationError("trust groups cover " + host.str() +
                              " which is not a TLS hostname of site " + tree.root().str());
      }
      ++covered;
    }
  }
  if (covered != tls.size()) {
    throw ValidationError("trust groups do not partition the TLS hostnames of site " +
                          tree.root().str());
  }
}

} // namespace

std::string to_string(ResumptionPolicy policy) {
  switch (policy) {
  case ResumptionPolicy::NoResumption: return "none";
  case ResumptionPolicy::SameHostname: return "same";
  case ResumptionPolicy::AcrossHostnames: return "across";
  }
  throw std::logic_error("unreachable policy");
}

std::string to_string(PathUnlockRule rule) {
  return rule == PathUnlockRule::AlongPath ? "path" : "shallow";
}

ResumptionPolicy policy_from_string(std::string_view s) {
  if (s == "none") return ResumptionPolicy::NoResumption;
  if (s == "same") return ResumptionPolicy::SameHostname;
  if (s == "across") return ResumptionPolicy::AcrossHostnames;
  throw ParseError("unknown policy: \"" + std::string(s) + "\" (expected none|same|across)");
}

PathUnlockRule rule_from_string(std::string_view s) {
  if (s == "path") return PathUnlockRule::AlongPath;
  if (s == "shallow") return PathUnlockRule::AnyShallower;
  throw ParseError("unknown unlock rule: \"" + std::string(s) + "\" (expected path|shallow)");
}

SiteLoadResult simulate_site(const DomainTree& tree, const TrustGroups& groups,
                             ResumptionPolicy policy, PathUnlockRule rule) {
  check_partition(tree, groups);
  SiteLoadResult r;
  r.site_root = tree.root();
  const int distinct = tree.distinct_tls_hostnames();
  if (policy == ResumptionPolicy::AcrossHostnames) {
    // One full handshake per trust group touched by the site; everything
    // else in the group rides on the shared state.
    r.full_handshakes = static_cast<int>(groups.group_count());
    r.resumed_handshakes = distinct - r.full_handshakes;
  } else {
    // First visit and one connection per distinct hostname: per-SNI
    // resumption never fires, with or without a session cache.
    r.full_handshakes = distinct;
    r.resumed_handshakes = 0;
  }
  r.longest_total_path = tree.longest_path();
  r.longest_full_path = full_hops_on_deepest_path(tree, groups, policy, rule);
  return r;
}

SimulationReport simulate_corpus(std::span<const DomainTree> corpus,
                                 const TrustRelationSet& relations, ResumptionPolicy policy,
                                 PathUnlockRule rule, const cost::HandshakeCostTable& table,
                                 double rtt_ms) {
  if (corpus.empty()) {
    throw ValidationError("simulation needs a non-empty corpus");
  }
  SimulationReport rep;
  rep.policy = policy;
  rep.rule = rule;
  rep.rtt_ms = rtt_ms;

  double sum_full = 0.0;
  double sum_resumed = 0.0;
  double sum_full_path = 0.0;
  double sum_total_path = 0.0;
  double sum_along = 0.0;
  double sum_shallow = 0.0;
  for (const auto& tree : corpus) {
    TrustGroups groups = trust_groups(tree, relations);
    SiteLoadResult site = simulate_site(tree, groups, policy, rule);
    sum_full += site.full_handshakes;
    sum_resumed += site.resumed_handshakes;
    sum_full_path += site.longest_full_path;
    sum_total_path += site.longest_total_path;
    sum_along += full_hops_on_deepest_path(tree, groups, policy, PathUnlockRule::AlongPath);
    sum_shallow += full_hops_on_deepest_path(tree, groups, policy, PathUnlockRule::AnyShallower);
    rep.full_handshake_histogram[site.full_handshakes] += 1;
    rep.sequential_path_histogram[site.longest_full_path] += 1;
    rep.per_site.push_back(std::move(site));
  }
  const double sites = static_cast<double>(corpus.size());
  rep.mean_full_handshakes = sum_full / sites;
  rep.mean_resumed_handshakes = sum_resumed / sites;
  rep.mean_longest_full_path = sum_full_path / sites;
  rep.mean_longest_total_path = sum_total_path / sites;
  rep.mean_full_path_along = sum_along / sites;
  rep.mean_full_path_shallower = sum_shallow / sites;

  const double total_handshakes = rep.mean_full_handshakes + rep.mean_resumed_handshakes;
  if (total_handshakes > 0.0) {
    rep.cpu = cost::cpu_savings(rep.mean_resumed_handshakes, total_handshakes);
  }
  rep.resumption_ratio = sum_full > 0.0 ? sum_resumed / sum_full : 0.0;

  const double resumed_hops = rep.mean_longest_total_path - rep.mean_longest_full_path;
  rep.delta_connect_1rtt_ms =
      cost::delta_connect(resumed_hops, cost::derive_delta(table, cost::HandshakeMode::Tls13Resumed1Rtt));
  rep.delta_connect_0rtt_ms = cost::delta_connect(
      resumed_hops, cost::derive_delta(table, cost::HandshakeMode::Tls13Resumed0Rtt), rtt_ms);
  rep.connect_gain_percent =
      cost::connect_speedup(rep.mean_longest_total_path, rep.mean_longest_full_path, table,
                            table.baseline_latency_ms())
          .gain_percent;
  return rep;
}

int simulate_site_pair(const DomainTree& a, const DomainTree& b,
                       const TrustRelationSet& relations, ResumptionPolicy policy) {
  std::set<Hostname> hosts_a = a.tls_hostnames();
  std::set<Hostname> hosts_b = b.tls_hostnames();
  switch (policy) {
  case ResumptionPolicy::NoResumption:
    // A hostname serving both sites is contacted twice with no state reuse.
    return static_cast<int>(hosts_a.size() + hosts_b.size());
  case ResumptionPolicy::SameHostname: {
    int fresh_b = static_cast<int>(
        std::count_if(hosts_b.begin(), hosts_b.end(),
                      [&](const Hostname& h) { return hosts_a.count(h) == 0; }));
    return static_cast<int>(hosts_a.size()) + fresh_b;
  }
  case ResumptionPolicy::AcrossHostnames: {
    std::set<Hostname> scope = hosts_a;
    scope.insert(hosts_b.begin(), hosts_b.end());
    TrustGroups groups(scope, relations);
    std::set<std::size_t> unlocked_by_a;
    for (const auto& h : hosts_a) {
      unlocked_by_a.insert(groups.group_of(h));
    }
    std::set<std::size_t> fresh_b;
    for (const auto& h : hosts_b) {
      std::size_t g = groups.group_of(h);
      if (!unlocked_by_a.count(g)) {
        fresh_b.insert(g);
      }
    }
    return static_cast<int>(unlocked_by_a.size() + fresh_b.size());
  }
  }
  throw std::logic_error("unreachable policy");
}

double pairwise_mean(std::span<const DomainTree> corpus, const TrustRelationSet& relations,
                     ResumptionPolicy policy) {
  if (corpus.size() < 2) {
    throw ValidationError("pairwise simulation needs at least two sites");
  }
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (std::size_t j = i + 1; j < corpus.size(); ++j) {
      sum += simulate_site_pair(corpus[i], corpus[j], relations, policy);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

double resumption_ratio(std::span<const DomainTree> corpus, const TrustRelationSet& relations,
                        ResumptionPolicy policy) {
  if (corpus.empty()) {
    throw ValidationError("resumption ratio needs a non-empty corpus");
  }
  double full = 0.0;
  double resumed = 0.0;
  for (const auto& tree : corpus) {
    TrustGroups groups = trust_groups(tree, relations);
    SiteLoadResult site = simulate_site(tree, groups, policy, PathUnlockRule::AlongPath);
    full += site.full_handshakes;
    resumed += site.resumed_handshakes;
  }
  if (full <= 0.0) {
    throw ValidationError("resumption ratio undefined: corpus has no full handshakes");
  }
  return resumed / full;
}

} // namespace xsni::sim
