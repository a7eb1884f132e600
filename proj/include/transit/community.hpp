#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "transit/model.hpp"

namespace transit {

/// Undirected weighted graph with per-node self-loops, the shape the
/// aggregation phase produces. Finalize before reading strengths.
class UndirectedWeightedGraph {
 public:
  UndirectedWeightedGraph() = default;
  explicit UndirectedWeightedGraph(std::vector<std::string> node_ids);

  void add_edge(std::uint32_t u, std::uint32_t v, double w);  // accumulates, w > 0
  void add_self_loop(std::uint32_t u, double w);              // accumulates, w >= 0
  void finalize();

  std::size_t n() const { return ids_.size(); }
  const std::vector<std::string>& node_ids() const { return ids_; }
  std::span<const std::pair<std::uint32_t, double>> neighbors(std::uint32_t u) const;
  double self_loop(std::uint32_t u) const { return self_[u]; }
  /// k_u = sum of incident edge weights + 2 * self-loop.
  double strength(std::uint32_t u) const { return strength_[u]; }
  /// 2m: sum of all strengths.
  double total_weight() const { return total_weight_; }
  std::size_t n_edges() const { return n_edges_; }

 private:
  std::vector<std::string> ids_;
  std::vector<std::map<std::uint32_t, double>> building_;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj_;
  std::vector<double> self_;
  std::vector<double> strength_;
  double total_weight_ = 0.0;
  std::size_t n_edges_ = 0;
  bool finalized_ = false;
};

/// Collapse the two directions of each stop pair: weight of {a,b} is
/// w(a->b) + w(b->a). Stops with no positive incident weight in the layer are
/// left out of the graph.
UndirectedWeightedGraph symmetrize(const PairedNetwork& net, Layer layer);

struct CommunityPartition {
  std::vector<std::uint32_t> assignment;  // node index -> community, dense 0..k-1
  std::uint32_t k = 0;
  double q = 0.0;  // modularity of the partition at resolution 1
};

/// Newman-Girvan weighted modularity with resolution gamma. The all-in-one
/// partition evaluates to exactly 0 at gamma = 1.
double modularity(const UndirectedWeightedGraph& g, std::span<const std::uint32_t> assignment,
                  double resolution = 1.0);

/// Serial reference for the modularity kernel; same contract.
double modularity_serial(const UndirectedWeightedGraph& g,
                         std::span<const std::uint32_t> assignment, double resolution = 1.0);

/// One local-move phase: sweep nodes in visit_order, moving each to the
/// neighbor community with the best strictly positive gain (ties to the
/// lowest community id), until a full pass makes no move. Returns a dense
/// partition; sets *improved when at least one move happened.
std::vector<std::uint32_t> louvain_level(const UndirectedWeightedGraph& g, double resolution,
                                         std::span<const std::uint32_t> visit_order,
                                         bool* improved);

/// Community supergraph: inter-community weights summed, intra-community
/// weights folded into self-loops. Assignment must be dense.
UndirectedWeightedGraph aggregate(const UndirectedWeightedGraph& g,
                                  std::span<const std::uint32_t> assignment);

/// Full two-phase loop. Deterministic for a given seed; q_trace, when given,
/// receives the resolution-gamma modularity after each outer iteration.
/// The returned q is always evaluated at resolution 1.
CommunityPartition louvain(const UndirectedWeightedGraph& g, double resolution = 1.0,
                           std::uint64_t seed = 42, std::vector<double>* q_trace = nullptr);

struct ModularityCurvePoint {
  double resolution = 0.0;
  std::uint32_t k = 0;
  double q = 0.0;  // standard (resolution-1) modularity
};

/// louvain at each resolution (ascending), deduplicated to one point per
/// community count keeping the best q, sorted by k. Runs resolutions in
/// parallel, each with a seed derived from `seed` by index.
std::vector<ModularityCurvePoint> modularity_curve(const UndirectedWeightedGraph& g,
                                                   std::span<const double> resolutions,
                                                   std::uint64_t seed);

/// Directed edges of net whose endpoints fall in different communities.
/// Every edge endpoint must be present in the map.
std::vector<EdgeKey> inter_community_edges(
    const PairedNetwork& net, const std::unordered_map<std::string, std::uint32_t>& community);

/// Community ids keyed by stop id, for a partition of the given graph.
std::unordered_map<std::string, std::uint32_t> community_by_stop(
    const UndirectedWeightedGraph& g, const CommunityPartition& partition);

}  // namespace transit
