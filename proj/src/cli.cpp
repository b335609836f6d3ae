#include "xsni/cli.hpp"

#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include "xsni/protocol/harness.hpp"

namespace xsni::cli {

namespace {

nlohmann::json bounds_json(const cost::Bounds& b) {
  return {{"low", b.low_ms}, {"high", b.high_ms}};
}

nlohmann::json histogram_json(const std::map<int, int>& hist) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [bin, count] : hist) {
    out.push_back(nlohmann::json::array({bin, count}));
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ParseError("cannot write " + path.string());
  }
  out << text;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

std::filesystem::path sibling_csv(const std::filesystem::path& out_json,
                                  const std::string& suffix) {
  std::filesystem::path p = out_json;
  p.replace_filename(out_json.stem().string() + "_" + suffix + ".csv");
  return p;
}

std::string histogram_csv(const std::map<int, int>& hist, int cutoff) {
  std::ostringstream out;
  out << "bin,count\n";
  for (int bin = 1; bin <= cutoff; ++bin) {
    auto it = hist.find(bin);
    out << bin << ',' << (it == hist.end() ? 0 : it->second) << '\n';
  }
  return out.str();
}

std::set<Hostname> all_corpus_hostnames(std::span<const DomainTree> corpus) {
  std::set<Hostname> hosts;
  for (const auto& tree : corpus) {
    for (const auto& [host, node] : tree.nodes()) {
      hosts.insert(host);
    }
  }
  return hosts;
}

nlohmann::json config_json(const RunConfig& config, const RelationBundle& relations) {
  nlohmann::json relation_list = nlohmann::json::array();
  for (const auto& d : relations.descriptions) {
    relation_list.push_back(d);
  }
  return {{"corpus", config.corpus_dir.string()},
          {"cost_table", config.cost_table ? config.cost_table->string() : "bundled-default"},
          {"cutoff", config.histogram_cutoff},
          {"relations", relation_list},
          {"rtt_ms", config.rtt_ms},
          {"rule", sim::to_string(config.rule)},
          {"seed", config.seed}};
}

void validate_config(const RunConfig& config) {
  if (config.histogram_cutoff < 1) {
    throw ValidationError("histogram cutoff must be at least 1");
  }
  if (config.output.empty()) {
    throw ValidationError("an output path is required (--out)");
  }
}

cost::HandshakeCostTable load_table(const RunConfig& config) {
  return config.cost_table ? cost::HandshakeCostTable::from_csv_file(*config.cost_table)
                           : cost::HandshakeCostTable::bundled_default();
}

} // namespace

std::map<int, int> read_histogram_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) || line != "bin,count") {
    throw ParseError(path.string() + ": expected header bin,count");
  }
  std::map<int, int> hist;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ParseError(path.string() + ": malformed row \"" + line + "\"");
    }
    try {
      hist[std::stoi(line.substr(0, comma))] = std::stoi(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw ParseError(path.string() + ": malformed row \"" + line + "\"");
    }
  }
  return hist;
}

std::map<std::string, std::map<int, int>>
read_root_group_sizes_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) || line != "source,size,count") {
    throw ParseError(path.string() + ": expected header source,size,count");
  }
  std::map<std::string, std::map<int, int>> out;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    auto first = line.find(',');
    auto second = line.find(',', first + 1);
    if (first == std::string::npos || second == std::string::npos) {
      throw ParseError(path.string() + ": malformed row \"" + line + "\"");
    }
    try {
      out[line.substr(0, first)][std::stoi(line.substr(first + 1, second - first - 1))] =
          std::stoi(line.substr(second + 1));
    } catch (const std::exception&) {
      throw ParseError(path.string() + ": malformed row \"" + line + "\"");
    }
  }
  return out;
}

RelationSpec parse_relation_spec(const std::string& text) {
  auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
    throw ParseError("relation spec must look like cert=FILE or resumption=FILE, got \"" + text +
                     "\"");
  }
  std::string tag = text.substr(0, eq);
  RelationSpec spec;
  spec.file = text.substr(eq + 1);
  if (tag == "cert") {
    spec.source = TrustSource::Certificate;
  } else if (tag == "resumption") {
    spec.source = TrustSource::Resumption;
  } else {
    throw ParseError("relation source must be cert or resumption, got \"" + tag + "\"");
  }
  return spec;
}

RelationBundle load_relations(std::span<const DomainTree> corpus,
                              std::span<const RelationSpec> specs) {
  RelationBundle bundle;
  std::optional<TrustRelationSet> cert;
  std::optional<TrustRelationSet> resumption;
  const std::set<Hostname> known = all_corpus_hostnames(corpus);

  for (const auto& spec : specs) {
    if (spec.source == TrustSource::Certificate) {
      TrustRelationSet loaded = TrustRelationSet::from_file(spec.file);
      TrustRelationSet tagged(TrustSource::Certificate);
      for (const auto& [a, b] : loaded.pairs()) {
        tagged.add(a, b);
      }
      cert = cert ? union_relations(*cert, tagged) : tagged;
      bundle.descriptions.push_back("cert=" + spec.file.string());
    } else {
      auto records = parse_resumption_csv_file(spec.file);
      TrustRelationSet derived = resumption_trust_relations(records, known);
      resumption = resumption ? union_relations(*resumption, derived) : derived;
      bundle.descriptions.push_back("resumption=" + spec.file.string());
    }
  }
  if (!cert) {
    cert = cert_trust_relations(corpus);
    bundle.descriptions.insert(bundle.descriptions.begin(), "cert=<derived from corpus>");
  }
  bundle.sources.emplace(TrustSource::Certificate, *cert);
  if (resumption) {
    bundle.sources.emplace(TrustSource::Resumption, *resumption);
    bundle.combined = union_relations(*cert, *resumption);
  } else {
    TrustRelationSet combined(TrustSource::Union);
    for (const auto& [a, b] : cert->pairs()) {
      combined.add(a, b);
    }
    bundle.combined = combined;
  }
  return bundle;
}

nlohmann::json build_analyze_report(const RunConfig& config, std::span<const DomainTree> corpus,
                                    const RelationBundle& relations) {
  nlohmann::json sources = nlohmann::json::object();

  auto source_block = [&](const TrustRelationSet& set) {
    GroupStats stats = group_stats(corpus, set);
    nlohmann::json per_site = nlohmann::json::array();
    for (const auto& tree : corpus) {
      TrustGroups groups = trust_groups(tree, set);
      int root_size = groups.in_scope(tree.root())
                          ? static_cast<int>(groups.group_containing(tree.root()).size())
                          : 0;
      per_site.push_back({{"site_root", tree.root().str()},
                          {"tls_hostnames", tree.distinct_tls_hostnames()},
                          {"group_count", static_cast<int>(groups.group_count())},
                          {"root_group_size", root_size}});
    }
    return nlohmann::json{{"mean_group_count", stats.mean_group_count},
                          {"mean_group_size", stats.mean_group_size},
                          {"relation_pairs", set.to_json().at("pairs")},
                          {"root_group_size_histogram",
                           histogram_json(stats.root_group_size_histogram)},
                          {"per_site", per_site}};
  };

  for (const auto& [source, set] : relations.sources) {
    sources[to_string(source)] = source_block(set);
  }
  if (relations.sources.size() > 1) {
    sources["union"] = source_block(relations.combined);
  }

  double mean_hosts = 0.0;
  for (const auto& tree : corpus) {
    mean_hosts += tree.distinct_tls_hostnames();
  }
  mean_hosts /= static_cast<double>(corpus.size());

  return {{"config", config_json(config, relations)},
          {"corpus", {{"sites", corpus.size()}, {"mean_tls_hostnames", mean_hosts}}},
          {"sources", sources}};
}

nlohmann::json build_simulate_report(const RunConfig& config, std::span<const DomainTree> corpus,
                                     const RelationBundle& relations,
                                     const cost::HandshakeCostTable& table) {
  std::vector<sim::ResumptionPolicy> policies;
  if (config.policy) {
    policies.push_back(*config.policy);
  } else {
    policies = {sim::ResumptionPolicy::NoResumption, sim::ResumptionPolicy::SameHostname,
                sim::ResumptionPolicy::AcrossHostnames};
  }

  nlohmann::json blocks = nlohmann::json::object();
  for (sim::ResumptionPolicy policy : policies) {
    sim::SimulationReport rep = sim::simulate_corpus(corpus, relations.combined, policy,
                                                     config.rule, table, config.rtt_ms);
    nlohmann::json per_site = nlohmann::json::array();
    for (const auto& site : rep.per_site) {
      per_site.push_back({{"site_root", site.site_root.str()},
                          {"full_handshakes", site.full_handshakes},
                          {"resumed_handshakes", site.resumed_handshakes},
                          {"longest_full_path", site.longest_full_path},
                          {"longest_total_path", site.longest_total_path}});
    }
    nlohmann::json block{
        {"mean_full_handshakes", rep.mean_full_handshakes},
        {"mean_resumed_handshakes", rep.mean_resumed_handshakes},
        {"mean_longest_full_path", rep.mean_longest_full_path},
        {"mean_longest_total_path", rep.mean_longest_total_path},
        {"mean_full_path_by_rule",
         {{"path", rep.mean_full_path_along}, {"shallow", rep.mean_full_path_shallower}}},
        {"full_handshake_histogram", histogram_json(rep.full_handshake_histogram)},
        {"sequential_path_histogram", histogram_json(rep.sequential_path_histogram)},
        {"savings",
         {{"cpu_saved_ms_per_peer", rep.cpu.saved_ms_per_peer},
          {"cpu_saved_percent", rep.cpu.percent_of_full},
          {"resumption_ratio", rep.resumption_ratio},
          {"delta_connect_1rtt_ms", bounds_json(rep.delta_connect_1rtt_ms)},
          {"delta_connect_0rtt_ms", bounds_json(rep.delta_connect_0rtt_ms)},
          {"connect_gain_percent", bounds_json(rep.connect_gain_percent)}}},
        {"per_site", per_site}};
    if (config.pairwise && corpus.size() >= 2) {
      block["pairwise_mean_full_handshakes"] =
          sim::pairwise_mean(corpus, relations.combined, policy);
    }
    blocks[sim::to_string(policy)] = std::move(block);
  }
  return {{"config", config_json(config, relations)}, {"policies", blocks}};
}

int cmd_analyze(const RunConfig& config) {
  validate_config(config);
  std::vector<DomainTree> corpus = load_corpus(config.corpus_dir);
  RelationBundle relations = load_relations(corpus, config.relation_files);
  nlohmann::json report = build_analyze_report(config, corpus, relations);
  write_json_file(config.output, report);

  std::ostringstream csv;
  csv << "source,size,count\n";
  for (const auto& [source_name, block] : report.at("sources").items()) {
    for (const auto& entry : block.at("root_group_size_histogram")) {
      csv << source_name << ',' << entry[0].get<int>() << ',' << entry[1].get<int>() << '\n';
    }
  }
  write_text_file(sibling_csv(config.output, "root_group_sizes"), csv.str());
  return 0;
}

int cmd_simulate(const RunConfig& config) {
  validate_config(config);
  std::vector<DomainTree> corpus = load_corpus(config.corpus_dir);
  RelationBundle relations = load_relations(corpus, config.relation_files);
  cost::HandshakeCostTable table = load_table(config);
  nlohmann::json report = build_simulate_report(config, corpus, relations, table);
  write_json_file(config.output, report);

  for (const auto& [policy_name, block] : report.at("policies").items()) {
    std::map<int, int> full_hist;
    for (const auto& entry : block.at("full_handshake_histogram")) {
      full_hist[entry[0].get<int>()] = entry[1].get<int>();
    }
    std::map<int, int> path_hist;
    for (const auto& entry : block.at("sequential_path_histogram")) {
      path_hist[entry[0].get<int>()] = entry[1].get<int>();
    }
    write_text_file(sibling_csv(config.output, "hist_full_" + policy_name),
                    histogram_csv(full_hist, config.histogram_cutoff));
    write_text_file(sibling_csv(config.output, "hist_path_" + policy_name),
                    histogram_csv(path_hist, config.histogram_cutoff));
  }
  return 0;
}

int cmd_report(const std::filesystem::path& report_path, std::ostream& out) {
  std::ifstream in(report_path);
  if (!in) {
    throw ParseError("cannot open " + report_path.string());
  }
  nlohmann::json report;
  try {
    in >> report;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(report_path.string() + ": " + e.what());
  }
  if (!report.is_object() || !report.contains("policies") || !report.at("policies").is_object() ||
      report.at("policies").empty()) {
    throw ValidationError(report_path.string() + " is not a simulation report");
  }
  const auto& policies = report.at("policies");

  std::vector<std::string> columns;
  for (const char* name : {"none", "same", "across"}) {
    if (policies.contains(name)) {
      columns.push_back(name);
    }
  }

  auto fmt = [](double v) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(2) << v;
    return ss.str();
  };
  auto row = [&](const std::string& label,
                 const std::function<std::string(const nlohmann::json&)>& cell) {
    out << std::left << std::setw(34) << label;
    for (const auto& name : columns) {
      out << std::right << std::setw(16) << cell(policies.at(name));
    }
    out << '\n';
  };

  out << std::left << std::setw(34) << "metric";
  for (const auto& name : columns) {
    out << std::right << std::setw(16) << name;
  }
  out << '\n';
  row("full handshakes (mean)",
      [&](const nlohmann::json& b) { return fmt(b.at("mean_full_handshakes").get<double>()); });
  row("resumed handshakes (mean)",
      [&](const nlohmann::json& b) { return fmt(b.at("mean_resumed_handshakes").get<double>()); });
  row("longest full path (mean)",
      [&](const nlohmann::json& b) { return fmt(b.at("mean_longest_full_path").get<double>()); });
  row("longest total path (mean)",
      [&](const nlohmann::json& b) { return fmt(b.at("mean_longest_total_path").get<double>()); });
  bool any_pairwise = false;
  for (const auto& name : columns) {
    any_pairwise = any_pairwise || policies.at(name).contains("pairwise_mean_full_handshakes");
  }
  if (any_pairwise) {
    row("two-site full handshakes (mean)", [&](const nlohmann::json& b) {
      return b.contains("pairwise_mean_full_handshakes")
                 ? fmt(b.at("pairwise_mean_full_handshakes").get<double>())
                 : std::string("-");
    });
  }
  row("resumed/full ratio", [&](const nlohmann::json& b) {
    return fmt(b.at("savings").at("resumption_ratio").get<double>());
  });
  row("CPU saved per peer (ms)", [&](const nlohmann::json& b) {
    return fmt(b.at("savings").at("cpu_saved_ms_per_peer").get<double>());
  });
  row("CPU savings %", [&](const nlohmann::json& b) {
    return fmt(b.at("savings").at("cpu_saved_percent").get<double>());
  });
  row("delta_connect 1-RTT (ms)", [&](const nlohmann::json& b) {
    const auto& d = b.at("savings").at("delta_connect_1rtt_ms");
    return fmt(d.at("low").get<double>()) + ".." + fmt(d.at("high").get<double>());
  });
  row("connect gain % (baseline row)", [&](const nlohmann::json& b) {
    const auto& d = b.at("savings").at("connect_gain_percent");
    return fmt(d.at("low").get<double>()) + ".." + fmt(d.at("high").get<double>());
  });
  return 0;
}

int cmd_delta(const std::optional<std::filesystem::path>& cost_table, double rtt_ms,
              double resumed_hops, bool as_json, std::ostream& out) {
  cost::HandshakeCostTable table = cost_table
                                       ? cost::HandshakeCostTable::from_csv_file(*cost_table)
                                       : cost::HandshakeCostTable::bundled_default();
  cost::DeltaInterval d1 = cost::derive_delta(table, cost::HandshakeMode::Tls13Resumed1Rtt);
  cost::DeltaInterval d0 = cost::derive_delta(table, cost::HandshakeMode::Tls13Resumed0Rtt);
  cost::Bounds c1 = cost::delta_connect(resumed_hops, d1);
  cost::Bounds c0 = cost::delta_connect(resumed_hops, d0, rtt_ms);

  if (as_json) {
    nlohmann::json doc{
        {"delta_1rtt_ms", {{"low", d1.low_ms}, {"high", d1.high_ms}}},
        {"delta_0rtt_ms", {{"low", d0.low_ms}, {"high", d0.high_ms}, {"plus_rtt", true}}},
        {"delta_connect_1rtt_ms", bounds_json(c1)},
        {"delta_connect_0rtt_ms", bounds_json(c0)},
        {"resumed_hops", resumed_hops},
        {"rtt_ms", rtt_ms}};
    out << doc.dump(2) << '\n';
    return 0;
  }
  auto fmt = [](double v) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(2) << v;
    return ss.str();
  };
  out << "Delta_1RTT    = [" << fmt(d1.low_ms) << ", " << fmt(d1.high_ms) << "] ms\n";
  out << "Delta_0RTT    = [" << fmt(d0.low_ms) << ", " << fmt(d0.high_ms) << "] ms + RTT\n";
  out << "Delta_connect (1-RTT, " << resumed_hops << " resumed hops) = [" << fmt(c1.low_ms)
      << ", " << fmt(c1.high_ms) << "] ms\n";
  out << "Delta_connect (0-RTT, " << resumed_hops << " resumed hops, RTT " << fmt(rtt_ms)
      << " ms) = [" << fmt(c0.low_ms) << ", " << fmt(c0.high_ms) << "] ms\n";
  return 0;
}

int cmd_protocol_demo(const std::filesystem::path& config_path,
                      const std::filesystem::path& script_path,
                      const std::optional<std::filesystem::path>& out_path, std::ostream& out) {
  auto clock = std::make_shared<proto::VirtualClock>();
  proto::ServerSet servers = proto::server_set_from_file(config_path, clock);
  proto::ClientEndpoint client(clock);
  std::vector<std::string> script = proto::parse_script_file(script_path);
  std::vector<proto::Transcript> transcripts = proto::run_script(client, servers, script, *clock);

  std::ostringstream log;
  for (const auto& t : transcripts) {
    log << proto::transcript_line(t) << '\n';
  }
  out << log.str();
  if (out_path) {
    write_text_file(*out_path, log.str());
  }
  return 0;
}

} // namespace xsni::cli
