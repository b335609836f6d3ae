#include "xsni/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace xsni::cost {

namespace {

constexpr double kLatencyEpsilon = 1e-6;

constexpr HandshakeMode kAllModes[] = {
    HandshakeMode::Tls12Full,       HandshakeMode::Tls12Resumed, HandshakeMode::Tls13Full,
    HandshakeMode::Tls13Resumed1Rtt, HandshakeMode::Tls13Resumed0Rtt,
};

HandshakeMode full_counterpart(HandshakeMode mode) {
  switch (mode) {
  case HandshakeMode::Tls12Resumed: return HandshakeMode::Tls12Full;
  case HandshakeMode::Tls13Resumed1Rtt:
  case HandshakeMode::Tls13Resumed0Rtt: return HandshakeMode::Tls13Full;
  default: return mode;
  }
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    fields.push_back(field);
  }
  return fields;
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t consumed = 0;
    double v = std::stod(s, &consumed);
    if (consumed != s.size()) {
      throw std::invalid_argument(s);
    }
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string("cost table: bad ") + what + " value \"" + s + "\"");
  }
}

std::string format_ms(double v) {
  std::ostringstream ss;
  ss << std::setprecision(10) << v;
  return ss.str();
}

} // namespace

std::string to_string(HandshakeMode mode) {
  switch (mode) {
  case HandshakeMode::Tls12Full: return "tls12_full";
  case HandshakeMode::Tls12Resumed: return "tls12_resumed";
  case HandshakeMode::Tls13Full: return "tls13_full";
  case HandshakeMode::Tls13Resumed1Rtt: return "tls13_resumed_1rtt";
  case HandshakeMode::Tls13Resumed0Rtt: return "tls13_resumed_0rtt";
  }
  throw std::logic_error("unreachable handshake mode");
}

std::string to_string(Peer peer) {
  return peer == Peer::Client ? "client" : "server";
}

HandshakeMode handshake_mode_from_string(std::string_view s) {
  for (HandshakeMode m : kAllModes) {
    if (to_string(m) == s) {
      return m;
    }
  }
  throw ParseError("unknown handshake mode: \"" + std::string(s) + "\"");
}

Peer peer_from_string(std::string_view s) {
  if (s == "client") return Peer::Client;
  if (s == "server") return Peer::Server;
  throw ParseError("unknown peer: \"" + std::string(s) + "\"");
}

HandshakeCostTable HandshakeCostTable::bundled_default() {
  HandshakeCostTable t;
  struct Row {
    double latency;
    double v12_full, v12_res, v13_full, v13_1rtt, v13_0rtt;
  };
  // Mean connection establishment + short transfer, milliseconds.
  static constexpr Row kDurations[] = {
      {0.3, 26.66, 2.69, 29.17, 6.34, 6.57},
      {50.0, 237.86, 154.20, 190.06, 160.12, 109.61},
      {100.0, 439.08, 304.50, 340.81, 310.27, 209.72},
      {150.0, 639.15, 454.621, 490.87, 460.26, 309.44},
  };
  for (const Row& r : kDurations) {
    t.set_duration(HandshakeMode::Tls12Full, r.latency, r.v12_full);
    t.set_duration(HandshakeMode::Tls12Resumed, r.latency, r.v12_res);
    t.set_duration(HandshakeMode::Tls13Full, r.latency, r.v13_full);
    t.set_duration(HandshakeMode::Tls13Resumed1Rtt, r.latency, r.v13_1rtt);
    t.set_duration(HandshakeMode::Tls13Resumed0Rtt, r.latency, r.v13_0rtt);
  }
  // Mean CPU per peer, milliseconds.
  t.set_cpu(HandshakeMode::Tls12Full, Peer::Server, 8.02);
  t.set_cpu(HandshakeMode::Tls12Resumed, Peer::Server, 1.33);
  t.set_cpu(HandshakeMode::Tls13Full, Peer::Server, 7.84);
  t.set_cpu(HandshakeMode::Tls13Resumed1Rtt, Peer::Server, 2.33);
  t.set_cpu(HandshakeMode::Tls13Resumed0Rtt, Peer::Server, 2.62);
  t.set_cpu(HandshakeMode::Tls12Full, Peer::Client, 8.26);
  t.set_cpu(HandshakeMode::Tls12Resumed, Peer::Client, 0.76);
  t.set_cpu(HandshakeMode::Tls13Full, Peer::Client, 9.22);
  t.set_cpu(HandshakeMode::Tls13Resumed1Rtt, Peer::Client, 2.38);
  t.set_cpu(HandshakeMode::Tls13Resumed0Rtt, Peer::Client, 2.46);
  t.validate();
  return t;
}

long long HandshakeCostTable::latency_key(double latency_ms) {
  return std::llround(latency_ms * 1000.0);
}

void HandshakeCostTable::set_duration(HandshakeMode mode, double latency_ms, double ms) {
  duration_[{mode, latency_key(latency_ms)}] = ms;
  if (!std::any_of(latencies_.begin(), latencies_.end(), [&](double l) {
        return latency_key(l) == latency_key(latency_ms);
      })) {
    latencies_.push_back(latency_ms);
    std::sort(latencies_.begin(), latencies_.end());
  }
}

void HandshakeCostTable::set_cpu(HandshakeMode mode, Peer peer, double ms) {
  cpu_[{mode, peer}] = ms;
}

void HandshakeCostTable::validate() const {
  for (const auto& [key, value] : duration_) {
    if (value <= 0.0) {
      throw ValidationError("cost table: non-positive duration for " + to_string(key.first));
    }
  }
  for (const auto& [key, value] : cpu_) {
    if (value <= 0.0) {
      throw ValidationError("cost table: non-positive CPU time for " + to_string(key.first));
    }
  }
  for (double latency : latencies_) {
    for (HandshakeMode resumed : {HandshakeMode::Tls12Resumed, HandshakeMode::Tls13Resumed1Rtt,
                                  HandshakeMode::Tls13Resumed0Rtt}) {
      auto full_it = duration_.find({full_counterpart(resumed), latency_key(latency)});
      auto res_it = duration_.find({resumed, latency_key(latency)});
      if (full_it != duration_.end() && res_it != duration_.end() &&
          res_it->second >= full_it->second) {
        throw ValidationError("cost table: resumed " + to_string(resumed) + " at " +
                              format_ms(latency) + " ms is not faster than the full handshake");
      }
    }
  }
}

double HandshakeCostTable::duration_ms(HandshakeMode mode, double latency_ms) const {
  auto it = duration_.find({mode, latency_key(latency_ms)});
  if (it == duration_.end()) {
    throw ValidationError("cost table missing duration for " + to_string(mode) + " at " +
                          format_ms(latency_ms) + " ms");
  }
  return it->second;
}

double HandshakeCostTable::cpu_ms(HandshakeMode mode, Peer peer) const {
  auto it = cpu_.find({mode, peer});
  if (it == cpu_.end()) {
    throw ValidationError("cost table missing CPU time for " + to_string(mode) + "/" +
                          to_string(peer));
  }
  return it->second;
}

bool HandshakeCostTable::has_latency_row(double latency_ms) const {
  return std::any_of(latencies_.begin(), latencies_.end(), [&](double l) {
    return latency_key(l) == latency_key(latency_ms);
  });
}

double HandshakeCostTable::baseline_latency_ms() const {
  if (latencies_.empty()) {
    throw ValidationError("cost table has no latency rows");
  }
  return latencies_.front();
}

HandshakeCostTable HandshakeCostTable::from_csv(std::istream& in) {
  HandshakeCostTable t;
  std::string line;
  enum class Section { None, Duration, Cpu } section = Section::None;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty() || line.front() == '#') {
      continue;
    }
    if (line == "mode,latency_ms,duration_ms") {
      section = Section::Duration;
      continue;
    }
    if (line == "mode,peer,cpu_ms") {
      section = Section::Cpu;
      continue;
    }
    auto fields = split_fields(line);
    if (fields.size() != 3 || section == Section::None) {
      throw ParseError("cost table line " + std::to_string(line_no) + ": unrecognized row");
    }
    HandshakeMode mode = handshake_mode_from_string(fields[0]);
    if (section == Section::Duration) {
      t.set_duration(mode, parse_double(fields[1], "latency"), parse_double(fields[2], "duration"));
    } else {
      t.set_cpu(mode, peer_from_string(fields[1]), parse_double(fields[2], "cpu"));
    }
  }
  if (t.latencies_.empty()) {
    throw ParseError("cost table contains no duration rows");
  }
  t.validate();
  return t;
}

HandshakeCostTable HandshakeCostTable::from_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open " + path.string());
  }
  return from_csv(in);
}

void HandshakeCostTable::write_csv(std::ostream& out) const {
  out << "mode,latency_ms,duration_ms\n";
  for (HandshakeMode m : kAllModes) {
    for (double latency : latencies_) {
      auto it = duration_.find({m, latency_key(latency)});
      if (it != duration_.end()) {
        out << to_string(m) << ',' << format_ms(latency) << ',' << format_ms(it->second) << '\n';
      }
    }
  }
  out << "mode,peer,cpu_ms\n";
  for (HandshakeMode m : kAllModes) {
    for (Peer p : {Peer::Server, Peer::Client}) {
      auto it = cpu_.find({m, p});
      if (it != cpu_.end()) {
        out << to_string(m) << ',' << to_string(p) << ',' << format_ms(it->second) << '\n';
      }
    }
  }
}

Bounds latency_overhead_bounds(std::span<const double> rtts_ms) {
  if (rtts_ms.empty()) {
    throw ValidationError("latency bounds need at least one connection");
  }
  Bounds b{std::numeric_limits<double>::infinity(), 0.0};
  for (double rtt : rtts_ms) {
    b.low_ms = std::min(b.low_ms, rtt);
    b.high_ms += rtt;
  }
  return b;
}

Bounds latency_overhead_bounds(int n_connections, double rtt_ms) {
  if (n_connections < 1) {
    throw ValidationError("latency bounds need at least one connection");
  }
  std::vector<double> rtts(static_cast<std::size_t>(n_connections), rtt_ms);
  return latency_overhead_bounds(rtts);
}

DeltaInterval derive_delta(const HandshakeCostTable& table, HandshakeMode resumed_mode) {
  if (resumed_mode != HandshakeMode::Tls13Resumed1Rtt &&
      resumed_mode != HandshakeMode::Tls13Resumed0Rtt) {
    throw ValidationError("delta derivation requires a resumed TLS 1.3 mode, got " +
                          to_string(resumed_mode));
  }
  // The 0-RTT mode saves one round trip on top of the compute saving, so its
  // interval is expressed net of the row's RTT (the bundled table's baseline
  // row gives 29.17 - 6.57 - 0.30 = 22.30 for the low endpoint).
  const int c = resumed_mode == HandshakeMode::Tls13Resumed0Rtt ? 1 : 0;
  DeltaInterval delta{std::numeric_limits<double>::infinity(),
                      -std::numeric_limits<double>::infinity(), c};
  for (double latency : table.latency_rows()) {
    double d = table.duration_ms(HandshakeMode::Tls13Full, latency) -
               table.duration_ms(resumed_mode, latency) - c * latency;
    delta.low_ms = std::min(delta.low_ms, d);
    delta.high_ms = std::max(delta.high_ms, d);
  }
  return delta;
}

double overlap_gap(const HandshakeCostTable& table, double latency_ms, int payload_rtts) {
  if (!table.has_latency_row(latency_ms)) {
    throw ValidationError("cost table has no latency row at " + format_ms(latency_ms) + " ms");
  }
  const double base = table.baseline_latency_ms();
  if (std::abs(latency_ms - base) < kLatencyEpsilon) {
    return 0.0; // the baseline row compared against itself
  }
  return table.duration_ms(HandshakeMode::Tls13Full, latency_ms) - payload_rtts * latency_ms -
         table.duration_ms(HandshakeMode::Tls13Full, base) - payload_rtts * base;
}

Bounds delta_connect(double resumed_hops, const DeltaInterval& delta, double rtt_ms) {
  if (resumed_hops < 0.0) {
    throw ValidationError("resumed hop count must be non-negative");
  }
  const double rtt_part = delta.rtt_coefficient * rtt_ms;
  return {resumed_hops * (delta.low_ms + rtt_part), resumed_hops * (delta.high_ms + rtt_part)};
}

CpuCostParams CpuCostParams::from_table(const HandshakeCostTable& table, HandshakeMode full_mode,
                                        HandshakeMode resumed_mode, Peer peer) {
  CpuCostParams p;
  p.full_handshake_ms = table.cpu_ms(full_mode, peer);
  p.saving_per_conversion_ms = p.full_handshake_ms - table.cpu_ms(resumed_mode, peer);
  return p;
}

CpuSavings cpu_savings(double n_converted, double n_total_full, CpuCostParams params) {
  if (n_converted < 0.0) {
    throw ValidationError("converted handshake count must be non-negative");
  }
  if (n_total_full <= 0.0) {
    throw ValidationError("CPU savings undefined for zero full handshakes");
  }
  CpuSavings s;
  s.saved_ms_per_peer = n_converted * params.saving_per_conversion_ms;
  s.percent_of_full = 100.0 * s.saved_ms_per_peer / (n_total_full * params.full_handshake_ms);
  return s;
}

ConnectSpeedup connect_speedup(double total_path_hops, double full_path_hops,
                               const HandshakeCostTable& table, double latency_ms) {
  if (total_path_hops <= 0.0) {
    throw ValidationError("the critical path needs at least one hop");
  }
  if (full_path_hops > total_path_hops) {
    throw ValidationError("full-handshake path cannot exceed the total path");
  }
  ConnectSpeedup s;
  const double resumed_hops = total_path_hops - full_path_hops;
  s.delta_connect_ms = delta_connect(resumed_hops, derive_delta(table, HandshakeMode::Tls13Resumed1Rtt));
  s.baseline_total_ms = total_path_hops * table.duration_ms(HandshakeMode::Tls13Full, latency_ms);
  s.gain_percent = {100.0 * s.delta_connect_ms.low_ms / s.baseline_total_ms,
                    100.0 * s.delta_connect_ms.high_ms / s.baseline_total_ms};
  return s;
}

} // namespace xsni::cost
