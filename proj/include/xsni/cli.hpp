#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include <json.hpp>

#include "xsni/simulator.hpp"

namespace xsni::cli {

struct RelationSpec {
  TrustSource source = TrustSource::Certificate;
  std::filesystem::path file;
};

// Parses "cert=FILE" / "resumption=FILE".
RelationSpec parse_relation_spec(const std::string& text);

struct RunConfig {
  std::filesystem::path corpus_dir;
  std::vector<RelationSpec> relation_files;
  std::optional<std::filesystem::path> cost_table;
  int histogram_cutoff = 25;
  std::filesystem::path output;
  double rtt_ms = 60.0;
  std::optional<sim::ResumptionPolicy> policy; // simulate: nullopt = all three
  sim::PathUnlockRule rule = sim::PathUnlockRule::AlongPath;
  bool pairwise = true;
  unsigned seed = 0; // reserved for randomized fixtures; recorded in outputs
};

// The relation sets in play: per-source sets for the trust analysis plus the
// combined set driving simulations. Certificate relations are derived from
// the corpus certificates unless a cert=FILE override is given.
struct RelationBundle {
  std::map<TrustSource, TrustRelationSet> sources;
  TrustRelationSet combined{TrustSource::Union};
  std::vector<std::string> descriptions;
};

RelationBundle load_relations(std::span<const DomainTree> corpus,
                              std::span<const RelationSpec> specs);

// Report builders, exposed so tests can inspect exactly what the commands
// write to disk.
nlohmann::json build_analyze_report(const RunConfig& config, std::span<const DomainTree> corpus,
                                    const RelationBundle& relations);
nlohmann::json build_simulate_report(const RunConfig& config, std::span<const DomainTree> corpus,
                                     const RelationBundle& relations,
                                     const cost::HandshakeCostTable& table);

// Readers for the emitted CSVs, so every output round-trips.
std::map<int, int> read_histogram_csv(const std::filesystem::path& path);
// source -> (size -> count)
std::map<std::string, std::map<int, int>>
read_root_group_sizes_csv(const std::filesystem::path& path);

// Emit per-source trust-group statistics as JSON plus a root-group-size CSV.
int cmd_analyze(const RunConfig& config);

// Emit the page-load simulation report as JSON plus per-policy histogram CSVs.
int cmd_simulate(const RunConfig& config);

// Render a simulation report as an aligned policy-per-column table.
int cmd_report(const std::filesystem::path& report_path, std::ostream& out);

// Print the resumption-delay interval derivations from the active cost table.
int cmd_delta(const std::optional<std::filesystem::path>& cost_table, double rtt_ms,
              double resumed_hops, bool as_json, std::ostream& out);

// Replay a connection script against a configured server set and log one
// transcript line per handshake.
int cmd_protocol_demo(const std::filesystem::path& config_path,
                      const std::filesystem::path& script_path,
                      const std::optional<std::filesystem::path>& out_path, std::ostream& out);

} // namespace xsni::cli
