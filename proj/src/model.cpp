#include "transit/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "transit/common.hpp"

namespace transit {

namespace {

void check_weight(const EdgeKey& key, double w, Layer layer) {
  if (!std::isfinite(w)) {
    fail_input("non-finite " + std::string(layer_name(layer)) + " weight on edge " + key.origin +
               " -> " + key.destination);
  }
  if (w < 0.0) {
    fail_input("negative " + std::string(layer_name(layer)) + " weight " + format_double(w) +
               " on edge " + key.origin + " -> " + key.destination);
  }
}

std::string list_offenders(const std::vector<EdgeKey>& keys) {
  std::ostringstream out;
  std::size_t shown = std::min<std::size_t>(keys.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i > 0) out << ", ";
    out << keys[i].origin << " -> " << keys[i].destination;
  }
  if (keys.size() > shown) out << ", ... (" << keys.size() - shown << " more)";
  return out.str();
}

}  // namespace

PairedNetwork PairedNetwork::build(std::vector<Stop> stops, const WeightMap& supply,
                                   const WeightMap& demand, std::string window_label,
                                   bool zero_fill) {
  std::sort(stops.begin(), stops.end(), [](const Stop& a, const Stop& b) { return a.id < b.id; });

  PairedNetwork net;
  net.window_ = std::move(window_label);
  net.stops_ = std::move(stops);
  net.index_.reserve(net.stops_.size());
  for (std::uint32_t i = 0; i < net.stops_.size(); ++i) {
    const Stop& s = net.stops_[i];
    if (s.id.empty()) fail_input("empty stop id");
    if (!net.index_.emplace(s.id, i).second) fail_input("duplicate stop id " + s.id);
    if (s.lat.has_value() != s.lon.has_value()) {
      fail_input("stop " + s.id + " has only one coordinate");
    }
    if (s.has_coords()) {
      if (!std::isfinite(*s.lat) || !std::isfinite(*s.lon)) {
        fail_input("stop " + s.id + " has non-finite coordinates");
      }
      if (*s.lat < -90.0 || *s.lat > 90.0) {
        fail_input("stop " + s.id + " latitude out of range: " + format_double(*s.lat));
      }
      if (*s.lon < -180.0 || *s.lon > 180.0) {
        fail_input("stop " + s.id + " longitude out of range: " + format_double(*s.lon));
      }
    }
  }

  std::vector<EdgeKey> keys;
  if (zero_fill) {
    std::set<EdgeKey> all;
    for (const auto& [key, w] : supply) all.insert(key);
    for (const auto& [key, w] : demand) all.insert(key);
    keys.assign(all.begin(), all.end());
  } else {
    keys = assert_paired(supply, demand);
  }

  net.edges_.reserve(keys.size());
  for (const EdgeKey& key : keys) {
    if (key.origin == key.destination) {
      fail_input("self-edge at stop " + key.origin);
    }
    auto oi = net.stop_index(key.origin);
    if (!oi) fail_input("edge references unknown stop " + key.origin);
    auto di = net.stop_index(key.destination);
    if (!di) fail_input("edge references unknown stop " + key.destination);

    PairedEdge e;
    e.origin = *oi;
    e.destination = *di;
    if (auto it = supply.find(key); it != supply.end()) {
      check_weight(key, it->second, Layer::Supply);
      e.supply = it->second;
    } else {
      ++net.zero_filled_supply_;
    }
    if (auto it = demand.find(key); it != demand.end()) {
      check_weight(key, it->second, Layer::Demand);
      e.demand = it->second;
    } else {
      ++net.zero_filled_demand_;
    }
    net.edges_.push_back(e);
  }

  std::sort(net.edges_.begin(), net.edges_.end(), [](const PairedEdge& a, const PairedEdge& b) {
    return std::pair(a.origin, a.destination) < std::pair(b.origin, b.destination);
  });
  return net;
}

std::optional<std::uint32_t> PairedNetwork::stop_index(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<double> PairedNetwork::layer_weights(Layer layer) const {
  std::vector<double> w;
  w.reserve(edges_.size());
  for (const PairedEdge& e : edges_) w.push_back(e.weight(layer));
  return w;
}

double normalized_weight(double w, double w_max) {
  if (w_max <= 0.0) fail_degenerate("cannot normalize: empty layer (max weight is 0)");
  if (w > w_max) {
    fail_input("inconsistent maximum: weight " + format_double(w) + " exceeds " +
               format_double(w_max));
  }
  if (w < 0.0) fail_input("negative weight " + format_double(w));
  return w / w_max;
}

double layer_max(const PairedNetwork& net, Layer layer) {
  if (net.n_edges() == 0) {
    fail_degenerate(std::string("no edges in ") + layer_name(layer) + " layer of window " +
                    net.window());
  }
  double best = 0.0;
  for (const PairedEdge& e : net.edges()) best = std::max(best, e.weight(layer));
  return best;
}

std::vector<EdgeKey> assert_paired(const WeightMap& supply, const WeightMap& demand) {
  std::vector<EdgeKey> only_supply;
  std::vector<EdgeKey> only_demand;
  std::vector<EdgeKey> common;
  auto si = supply.begin();
  auto di = demand.begin();
  while (si != supply.end() || di != demand.end()) {
    if (di == demand.end() || (si != supply.end() && si->first < di->first)) {
      only_supply.push_back(si->first);
      ++si;
    } else if (si == supply.end() || di->first < si->first) {
      only_demand.push_back(di->first);
      ++di;
    } else {
      common.push_back(si->first);
      ++si;
      ++di;
    }
  }
  if (!only_supply.empty() || !only_demand.empty()) {
    std::string msg = "edge sets differ between layers;";
    if (!only_supply.empty()) {
      msg += " supply-only: " + list_offenders(only_supply) + ";";
    }
    if (!only_demand.empty()) {
      msg += " demand-only: " + list_offenders(only_demand) + ";";
    }
    msg += " rerun with --zero-fill to take the union";
    fail_input(msg);
  }
  return common;
}

}  // namespace transit
