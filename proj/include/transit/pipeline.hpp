#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "transit/common.hpp"
#include "transit/model.hpp"

namespace transit {

struct RunConfig {
  std::string stops_path;
  std::string lines_path;
  std::string routes_path;
  std::string demand_path;
  std::string windows_spec;  // empty: default schedule
  std::size_t n_bins = 50;
  double sweep_lo = 0.05;
  double sweep_hi = 20.0;
  std::size_t sweep_n = 32;
  std::uint64_t seed = 42;
  std::string out_dir = ".";
  bool zero_fill = false;
  enum class FitMethod { Ols, Mle } fit = FitMethod::Ols;
  bool verbose = false;
};

int exit_code_for(ErrorKind kind);

/// Build full-day (and, when demand is timestamped, per-window) networks and
/// serialize them to network_<slug>.json under out_dir.
int cmd_build(const RunConfig& config, std::ostream& log);

/// Distribution fits, CDF crossings, communities and the modularity curve
/// for every serialized network in out_dir.
int cmd_characterize(const RunConfig& config, std::ostream& log);

/// Bottleneck and waste diagnosis with line attribution for every serialized
/// network in out_dir.
int cmd_diagnose(const RunConfig& config, std::ostream& log);

/// Concatenate the stage summaries in out_dir into report.md.
int cmd_report(const RunConfig& config, std::ostream& log);

struct StoredNetwork {
  PairedNetwork net;
  std::string slug;
  std::string apportionment;  // daily | explicit | uniform | mixed
};

/// network_<slug>.json serialization (format_version 1).
void write_network(const PairedNetwork& net, const std::string& slug,
                   const std::string& apportionment, const std::string& path);
StoredNetwork read_network(const std::string& path);

/// network_*.json files under dir, full-day first, then windows by slug.
std::vector<std::string> discover_networks(const std::string& dir);

}  // namespace transit
