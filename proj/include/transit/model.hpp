#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace transit {

/// A bus stop. Coordinates are optional but come as a pair.
struct Stop {
  std::string id;
  std::optional<double> lat;
  std::optional<double> lon;

  bool has_coords() const { return lat.has_value() && lon.has_value(); }
};

/// Ordered stop pair identifying a directed edge. The graph is simple:
/// at most one edge per ordered pair, never a self-edge.
struct EdgeKey {
  std::string origin;
  std::string destination;

  auto operator<=>(const EdgeKey&) const = default;
};

enum class Layer { Supply, Demand };

inline const char* layer_name(Layer layer) { return layer == Layer::Supply ? "supply" : "demand"; }

/// One directed edge carrying both weight layers. Endpoints are indices into
/// PairedNetwork::stops.
struct PairedEdge {
  std::uint32_t origin = 0;
  std::uint32_t destination = 0;
  double supply = 0.0;
  double demand = 0.0;

  double weight(Layer layer) const { return layer == Layer::Supply ? supply : demand; }
};

using WeightMap = std::map<EdgeKey, double>;

/// Both-layer directed network for one time window (or the full day).
/// Immutable after construction; all views are safe for concurrent reads.
class PairedNetwork {
 public:
  /// An edgeless, stopless placeholder; fill it via build().
  PairedNetwork() = default;

  /// Validates stops and layers and assembles the network. With
  /// `zero_fill` the union of the two edge sets is used and the missing
  /// layer gets weight 0; otherwise the edge sets must match exactly.
  static PairedNetwork build(std::vector<Stop> stops, const WeightMap& supply,
                             const WeightMap& demand, std::string window_label,
                             bool zero_fill = false);

  const std::vector<Stop>& stops() const { return stops_; }
  const std::vector<PairedEdge>& edges() const { return edges_; }
  const std::string& window() const { return window_; }

  std::size_t n_stops() const { return stops_.size(); }
  std::size_t n_edges() const { return edges_.size(); }

  std::optional<std::uint32_t> stop_index(const std::string& id) const;
  const Stop& stop(std::uint32_t index) const { return stops_[index]; }

  EdgeKey key_of(const PairedEdge& e) const {
    return {stops_[e.origin].id, stops_[e.destination].id};
  }

  /// One layer's weights, aligned with edges().
  std::vector<double> layer_weights(Layer layer) const;

  /// How many edges were materialized with weight 0 in the given layer.
  std::size_t zero_filled(Layer layer) const {
    return layer == Layer::Supply ? zero_filled_supply_ : zero_filled_demand_;
  }

 private:
  std::vector<Stop> stops_;
  std::vector<PairedEdge> edges_;  // sorted by (origin, destination)
  std::string window_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::size_t zero_filled_supply_ = 0;
  std::size_t zero_filled_demand_ = 0;
};

/// w / w_max. Errors: "empty layer" when w_max = 0, "inconsistent maximum"
/// when w > w_max.
double normalized_weight(double w, double w_max);

/// Largest weight of one layer. Errors on an edgeless network.
double layer_max(const PairedNetwork& net, Layer layer);

/// Gate for pairing the two layers: returns the common edge set if the key
/// sets are identical, otherwise reports up to 20 offending keys.
std::vector<EdgeKey> assert_paired(const WeightMap& supply, const WeightMap& demand);

}  // namespace transit
