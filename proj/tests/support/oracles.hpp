#pragma once

// Independent recount oracles for the simulator and trust modules. These
// deliberately avoid the library's union-find and set arithmetic: components
// come from an adjacency BFS, handshake counts from replaying connections in
// BFS order against an explicit state cache, and path metrics from manually
// enumerated parent chains.

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <vector>

#include "xsni/simulator.hpp"

namespace oracle {

using xsni::DomainTree;
using xsni::Hostname;
using xsni::TrustRelationSet;

inline std::vector<std::set<Hostname>> components(const std::set<Hostname>& scope,
                                                  const TrustRelationSet& relations) {
  std::map<Hostname, std::vector<Hostname>> adjacency;
  for (const auto& [a, b] : relations.pairs()) {
    if (scope.count(a) && scope.count(b)) {
      adjacency[a].push_back(b);
      adjacency[b].push_back(a);
    }
  }
  std::vector<std::set<Hostname>> out;
  std::set<Hostname> seen;
  for (const auto& start : scope) {
    if (seen.count(start)) {
      continue;
    }
    std::set<Hostname> component;
    std::deque<Hostname> queue{start};
    while (!queue.empty()) {
      Hostname cur = queue.front();
      queue.pop_front();
      if (!component.insert(cur).second) {
        continue;
      }
      seen.insert(cur);
      for (const auto& next : adjacency[cur]) {
        if (!component.count(next)) {
          queue.push_back(next);
        }
      }
    }
    out.push_back(std::move(component));
  }
  return out;
}

inline std::map<Hostname, std::size_t> component_index(const std::set<Hostname>& scope,
                                                       const TrustRelationSet& relations) {
  std::map<Hostname, std::size_t> index;
  auto comps = components(scope, relations);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    for (const auto& h : comps[i]) {
      index[h] = i;
    }
  }
  return index;
}

// Nodes in breadth-first order, ties broken by hostname.
inline std::vector<Hostname> bfs_order(const DomainTree& tree) {
  std::vector<Hostname> order;
  for (const auto& [host, node] : tree.nodes()) {
    order.push_back(host);
  }
  std::sort(order.begin(), order.end(), [&](const Hostname& a, const Hostname& b) {
    int da = tree.depth(a);
    int db = tree.depth(b);
    return da != db ? da < db : a < b;
  });
  return order;
}

struct Counts {
  int full = 0;
  int resumed = 0;
};

// Replay of the first visit: establish one connection per hostname in BFS
// order, resume whenever the policy's cache already covers the hostname.
inline Counts event_ordered_counts(const DomainTree& tree, const TrustRelationSet& relations,
                                   xsni::sim::ResumptionPolicy policy) {
  using xsni::sim::ResumptionPolicy;
  Counts counts;
  std::set<Hostname> visited_hosts;
  std::set<std::size_t> unlocked_groups;
  auto groups = component_index(tree.tls_hostnames(), relations);
  for (const Hostname& host : bfs_order(tree)) {
    if (!tree.node(host).tls) {
      continue;
    }
    bool resumed = false;
    switch (policy) {
    case ResumptionPolicy::NoResumption:
      break;
    case ResumptionPolicy::SameHostname:
      resumed = visited_hosts.count(host) != 0;
      break;
    case ResumptionPolicy::AcrossHostnames:
      resumed = unlocked_groups.count(groups.at(host)) != 0;
      break;
    }
    if (resumed) {
      ++counts.resumed;
    } else {
      ++counts.full;
    }
    visited_hosts.insert(host);
    if (policy == ResumptionPolicy::AcrossHostnames) {
      unlocked_groups.insert(groups.at(host));
    }
  }
  return counts;
}

inline std::vector<Hostname> parent_chain(const DomainTree& tree, const Hostname& node) {
  std::vector<Hostname> chain;
  Hostname cur = node;
  while (true) {
    chain.push_back(cur);
    const auto& n = tree.nodes().at(cur);
    if (!n.parent) {
      break;
    }
    cur = *n.parent;
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

// Full (or blocking non-TLS) hops on the deepest dependency chain, counted
// per deepest node from a fresh unlock state; ties take the worst chain.
inline int full_hops_deepest(const DomainTree& tree, const TrustRelationSet& relations,
                             xsni::sim::ResumptionPolicy policy, xsni::sim::PathUnlockRule rule) {
  using xsni::sim::PathUnlockRule;
  using xsni::sim::ResumptionPolicy;
  auto groups = component_index(tree.tls_hostnames(), relations);
  std::map<std::size_t, int> min_depth;
  for (const auto& [host, group] : groups) {
    auto [it, inserted] = min_depth.emplace(group, tree.depth(host));
    if (!inserted) {
      it->second = std::min(it->second, tree.depth(host));
    }
  }

  int deepest = 1;
  for (const auto& [host, node] : tree.nodes()) {
    if (node.tls) {
      deepest = std::max(deepest, tree.depth(host));
    }
  }

  int worst = -1;
  for (const auto& [host, node] : tree.nodes()) {
    if (!node.tls || tree.depth(host) != deepest) {
      continue;
    }
    int fulls = 0;
    std::set<std::size_t> unlocked;
    for (const Hostname& hop : parent_chain(tree, host)) {
      if (!tree.nodes().at(hop).tls) {
        ++fulls;
        continue;
      }
      if (policy != ResumptionPolicy::AcrossHostnames) {
        ++fulls;
        continue;
      }
      std::size_t group = groups.at(hop);
      bool resumed = rule == PathUnlockRule::AlongPath ? unlocked.count(group) != 0
                                                       : min_depth.at(group) < tree.depth(hop);
      if (!resumed) {
        ++fulls;
      }
      unlocked.insert(group);
    }
    worst = std::max(worst, fulls);
  }
  return worst < 0 ? deepest : worst;
}

// Two consecutive site visits replayed against one cross-visit cache.
inline int pair_full_handshakes(const DomainTree& a, const DomainTree& b,
                                const TrustRelationSet& relations,
                                xsni::sim::ResumptionPolicy policy) {
  using xsni::sim::ResumptionPolicy;
  std::set<Hostname> scope = a.tls_hostnames();
  for (const auto& h : b.tls_hostnames()) {
    scope.insert(h);
  }
  auto groups = component_index(scope, relations);

  int full = 0;
  std::set<Hostname> visited_hosts;
  std::set<std::size_t> unlocked_groups;
  for (const DomainTree* tree : {&a, &b}) {
    for (const Hostname& host : bfs_order(*tree)) {
      if (!tree->node(host).tls) {
        continue;
      }
      bool resumed = false;
      switch (policy) {
      case ResumptionPolicy::NoResumption:
        break;
      case ResumptionPolicy::SameHostname:
        resumed = visited_hosts.count(host) != 0;
        break;
      case ResumptionPolicy::AcrossHostnames:
        resumed = unlocked_groups.count(groups.at(host)) != 0;
        break;
      }
      if (!resumed) {
        ++full;
      }
      visited_hosts.insert(host);
      unlocked_groups.insert(groups.at(host));
    }
  }
  return full;
}

} // namespace oracle
