#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "xsni/errors.hpp"

namespace xsni::cost {

enum class HandshakeMode {
  Tls12Full,
  Tls12Resumed,
  Tls13Full,
  Tls13Resumed1Rtt,
  Tls13Resumed0Rtt,
};

enum class Peer { Client, Server };

std::string to_string(HandshakeMode mode);
std::string to_string(Peer peer);
HandshakeMode handshake_mode_from_string(std::string_view s);
Peer peer_from_string(std::string_view s);

// Benchmark figures for TLS connection establishment plus a short transfer:
// mean duration per (mode, network latency) and mean CPU time per
// (mode, peer). The numbers are input data; nothing here measures anything.
class HandshakeCostTable {
public:
  static HandshakeCostTable bundled_default();

  // Override file: a duration section and a CPU section, each with its own
  // header line:
  //   mode,latency_ms,duration_ms
  //   ...
  //   mode,peer,cpu_ms
  //   ...
  static HandshakeCostTable from_csv(std::istream& in);
  static HandshakeCostTable from_csv_file(const std::filesystem::path& path);
  void write_csv(std::ostream& out) const;

  double duration_ms(HandshakeMode mode, double latency_ms) const;
  double cpu_ms(HandshakeMode mode, Peer peer) const;
  std::span<const double> latency_rows() const { return latencies_; }
  bool has_latency_row(double latency_ms) const;

  // Shortest network latency in the table; the near-zero reference row used
  // for compute-overlap comparisons.
  double baseline_latency_ms() const;

private:
  HandshakeCostTable() = default;
  void set_duration(HandshakeMode mode, double latency_ms, double ms);
  void set_cpu(HandshakeMode mode, Peer peer, double ms);
  void validate() const;
  // Latency rows are keyed in whole microseconds so that 0.3 from a CSV and
  // 0.3 as a literal land on the same row.
  static long long latency_key(double latency_ms);

  std::vector<double> latencies_; // sorted, derived from the duration keys
  std::map<std::pair<HandshakeMode, long long>, double> duration_;
  std::map<std::pair<HandshakeMode, Peer>, double> cpu_;
};

struct Bounds {
  double low_ms = 0.0;
  double high_ms = 0.0;
};

// Delay saved by a resumed TLS 1.3 handshake relative to the full handshake.
// For the 0-RTT mode one round trip is saved on top, so the interval is
// "plus RTT" (rtt_coefficient 1); the 1-RTT interval is absolute.
struct DeltaInterval {
  double low_ms = 0.0;
  double high_ms = 0.0;
  int rtt_coefficient = 0;
};

// Page-load latency overhead of full handshakes: min RTT if all connections
// run in parallel, sum of RTTs if fully sequential.
Bounds latency_overhead_bounds(std::span<const double> rtts_ms);
Bounds latency_overhead_bounds(int n_connections, double rtt_ms);

// Row-wise reconstruction of the saving interval: for every latency row L,
// duration(full, L) - duration(resumed, L) - c*L with c the mode's saved
// round trips; the interval is the min/max over rows.
DeltaInterval derive_delta(const HandshakeCostTable& table, HandshakeMode resumed_mode);

// Compute-overlap gap between a latency row and the near-zero baseline row:
// duration(full13, L) - n*L - duration(full13, base) - n*base, with n the
// payload round trips of the full handshake. The baseline row compared
// against itself is zero by definition.
double overlap_gap(const HandshakeCostTable& table, double latency_ms, int payload_rtts);

// Reduced delay until all sequential connections are established, given the
// mean number of handshakes converted from full to resumed along the
// critical path.
Bounds delta_connect(double resumed_hops, const DeltaInterval& delta, double rtt_ms = 0.0);

struct CpuCostParams {
  double full_handshake_ms = 8.0;       // per peer
  double saving_per_conversion_ms = 6.0; // per peer, full -> resumed

  static CpuCostParams from_table(const HandshakeCostTable& table, HandshakeMode full_mode,
                                  HandshakeMode resumed_mode, Peer peer);
};

struct CpuSavings {
  double saved_ms_per_peer = 0.0;
  double percent_of_full = 0.0;
};

CpuSavings cpu_savings(double n_converted, double n_total_full, CpuCostParams params = {});

// Speedup of the sequential connection chain at one latency row: the
// critical path shrinks from total_path_hops full handshakes to
// full_path_hops full plus (total - full) resumed ones.
struct ConnectSpeedup {
  Bounds delta_connect_ms;     // 1-RTT resumption
  double baseline_total_ms = 0.0;
  Bounds gain_percent;
};

ConnectSpeedup connect_speedup(double total_path_hops, double full_path_hops,
                               const HandshakeCostTable& table, double latency_ms);

} // namespace xsni::cost
