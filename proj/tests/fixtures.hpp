#pragma once

// Synthetic inputs shared by the unit and acceptance suites.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "transit/common.hpp"
#include "transit/community.hpp"

namespace fixtures {

/// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    const unsigned id = counter++;
    dir_ = std::filesystem::temp_directory_path() /
           ("transit_fixture_" + std::to_string(id) + "_" +
            std::to_string(std::random_device{}()));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string root() const { return dir_.string(); }

 private:
  std::filesystem::path dir_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Graph over nodes "0".."n-1" from (u, v, w) triples plus optional
/// (u, w) self-loops.
inline transit::UndirectedWeightedGraph make_graph(
    std::uint32_t n, const std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>& edges,
    const std::vector<std::pair<std::uint32_t, double>>& self_loops = {}) {
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  transit::UndirectedWeightedGraph g(std::move(ids));
  for (const auto& [u, v, w] : edges) g.add_edge(u, v, w);
  for (const auto& [u, w] : self_loops) g.add_self_loop(u, w);
  g.finalize();
  return g;
}

/// K_n block on nodes [first, first + size) with unit weights.
inline void add_clique(std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>& edges,
                       std::uint32_t first, std::uint32_t size, double w = 1.0) {
  for (std::uint32_t i = 0; i < size; ++i) {
    for (std::uint32_t j = i + 1; j < size; ++j) {
      edges.emplace_back(first + i, first + j, w);
    }
  }
}

/// Erdos-Renyi weighted graph; guaranteed at least one edge.
inline transit::UndirectedWeightedGraph random_graph(std::mt19937_64& rng, std::uint32_t n,
                                                     double p) {
  std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> edges;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      if (transit::uniform01(rng()) < p) {
        edges.emplace_back(i, j, 0.25 + 1.75 * transit::uniform01(rng()));
      }
    }
  }
  if (edges.empty()) edges.emplace_back(0, n > 1 ? 1 : 0, 1.0);
  return make_graph(n, edges);
}

/// i.i.d. samples with density proportional to w^alpha on [a, b], via the
/// inverse CDF of the truncated Pareto: with p = alpha + 1,
/// w = (a^p + u (b^p - a^p))^(1/p).
inline std::vector<double> pareto_sample(std::mt19937_64& rng, std::size_t n, double alpha,
                                         double a, double b) {
  const double p = alpha + 1.0;
  const double ap = std::pow(a, p);
  const double bp = std::pow(b, p);
  std::vector<double> out(n);
  for (double& w : out) {
    const double u = transit::uniform01(rng());
    w = std::pow(ap + u * (bp - ap), 1.0 / p);
  }
  return out;
}

/// 50-stop, 10-line city: two sides of four stop clusters each, chained by
/// loop lines into a ring per side, one weak bridge between the sides.
/// Non-bridge demand is exactly twice supply, so every non-bridge edge has
/// identical supply and demand shares and only the bridge can be flagged.
struct PlantedCity {
  std::string stops_csv;
  std::string lines_csv;
  std::string routes_csv;
  std::string demand_csv;

  std::string bridge_origin = "L0_0";
  std::string bridge_destination = "R0_0";
  double bridge_is = 0.0;  // expected overload index of the bridge
  double bridge_id = 0.0;  // expected waste index of the bridge

  // collapsed description: 8 clusters, L0..L3 then R0..R3
  std::vector<double> quotient_self;  // summed undirected intra-cluster weight
  std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> quotient_edges;
  std::map<std::string, std::uint32_t> cluster_of;  // stop id -> cluster index
};

inline PlantedCity planted_city(bool waste_variant) {
  PlantedCity city;
  const std::uint32_t cluster_sizes[4] = {6, 6, 6, 7};
  const char sides[2] = {'L', 'R'};

  std::ostringstream stops;
  stops << "stop_id,lat,lon\n";
  std::vector<std::vector<std::string>> cluster_stops(8);
  int stop_counter = 0;
  for (int s = 0; s < 2; ++s) {
    for (std::uint32_t c = 0; c < 4; ++c) {
      for (std::uint32_t i = 0; i < cluster_sizes[c]; ++i) {
        std::string id = std::string(1, sides[s]) + std::to_string(c) + "_" + std::to_string(i);
        const std::uint32_t cluster = static_cast<std::uint32_t>(4 * s + c);
        cluster_stops[cluster].push_back(id);
        city.cluster_of[id] = cluster;
        stops << id << "," << transit::format_double(-3.0 - 0.001 * stop_counter) << ","
              << transit::format_double(-60.0 + 0.001 * stop_counter) << "\n";
        ++stop_counter;
      }
    }
  }
  city.stops_csv = stops.str();

  struct Line {
    std::string id;
    int vehicles;
    int trips;
    std::vector<std::string> route;
  };
  std::vector<Line> lines;
  for (int s = 0; s < 2; ++s) {
    for (std::uint32_t c = 0; c < 4; ++c) {
      Line line;
      line.id = std::string("loop_") + sides[s] + std::to_string(c);
      line.vehicles = 10;
      line.trips = 6;
      // two passes through the cluster, then one hop to the next cluster:
      // internal edges end up twice as heavy as the boundary edges, so the
      // planted communities are the unique weakest-cut partition
      const auto& members = cluster_stops[4 * s + c];
      line.route = members;
      line.route.insert(line.route.end(), members.begin(), members.end());
      line.route.push_back(cluster_stops[4 * s + (c + 1) % 4].front());
      lines.push_back(std::move(line));
    }
  }
  lines.push_back({"express_L0", 5, 4, {"L0_0", "L0_2", "L0_4"}});
  const int bridge_vehicles = waste_variant ? 10 : 1;
  const int bridge_trips = waste_variant ? 6 : 1;
  lines.push_back({"bridge", bridge_vehicles, bridge_trips, {"L0_0", "R0_0"}});

  std::ostringstream lines_csv;
  lines_csv << "line_id,vehicles,trips_per_vehicle\n";
  for (const Line& line : lines) {
    lines_csv << line.id << "," << line.vehicles << "," << line.trips << "\n";
  }
  city.lines_csv = lines_csv.str();

  std::ostringstream routes;
  routes << "line_id,seq,stop_id\n";
  for (const Line& line : lines) {
    for (std::size_t i = 0; i < line.route.size(); ++i) {
      routes << line.id << "," << i << "," << line.route[i] << "\n";
    }
  }
  city.routes_csv = routes.str();

  // demand: exactly twice the supply on every edge except the bridge
  std::map<std::pair<std::string, std::string>, long> demand;
  for (const Line& line : lines) {
    const long w = static_cast<long>(line.vehicles) * line.trips;
    for (std::size_t i = 0; i + 1 < line.route.size(); ++i) {
      demand[{line.route[i], line.route[i + 1]}] += 2 * w;
    }
  }
  const long bridge_demand = waste_variant ? 1 : 100;
  demand[{"L0_0", "R0_0"}] = bridge_demand;
  std::ostringstream demand_csv;
  demand_csv << "origin_stop,destination_stop,count\n";
  for (const auto& [key, count] : demand) {
    demand_csv << key.first << "," << key.second << "," << count << "\n";
  }
  city.demand_csv = demand_csv.str();

  // expected indices: w_smax = 120 (doubled path edges), w_dmax = 240
  const double bridge_supply = static_cast<double>(bridge_vehicles) * bridge_trips;
  city.bridge_is = bridge_supply / 120.0 - static_cast<double>(bridge_demand) / 240.0;
  city.bridge_id = -city.bridge_is;

  // collapsed quotient of the symmetrized supply layer: a size-n cluster holds
  // n-1 doubled path edges plus the single wrap edge; L0 adds the express
  city.quotient_self = {700.0, 660.0, 660.0, 780.0, 660.0, 660.0, 660.0, 780.0};
  for (std::uint32_t s = 0; s < 2; ++s) {
    for (std::uint32_t c = 0; c < 4; ++c) {
      city.quotient_edges.emplace_back(4 * s + c, 4 * s + (c + 1) % 4, 60.0);
    }
  }
  city.quotient_edges.emplace_back(0, 4, bridge_supply);
  return city;
}

inline void write_city(const PlantedCity& city, const TempDir& dir) {
  write_file(dir.path("stops.csv"), city.stops_csv);
  write_file(dir.path("lines.csv"), city.lines_csv);
  write_file(dir.path("routes.csv"), city.routes_csv);
  write_file(dir.path("demand.csv"), city.demand_csv);
}

}  // namespace fixtures
