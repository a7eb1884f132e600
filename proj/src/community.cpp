#include "transit/community.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "transit/common.hpp"
#include "transit/parallel.hpp"

namespace transit {

UndirectedWeightedGraph::UndirectedWeightedGraph(std::vector<std::string> node_ids)
    : ids_(std::move(node_ids)), building_(ids_.size()), self_(ids_.size(), 0.0) {}

void UndirectedWeightedGraph::add_edge(std::uint32_t u, std::uint32_t v, double w) {
  if (u == v) fail_input("self-edges go through add_self_loop");
  if (u >= n() || v >= n()) fail_input("edge endpoint out of range");
  if (!(w > 0.0)) fail_input("edge weights must be positive");
  building_[u][v] += w;
  building_[v][u] += w;
}

void UndirectedWeightedGraph::add_self_loop(std::uint32_t u, double w) {
  if (u >= n()) fail_input("node out of range");
  if (w < 0.0) fail_input("self-loop weights must be non-negative");
  self_[u] += w;
}

void UndirectedWeightedGraph::finalize() {
  adj_.assign(n(), {});
  strength_.assign(n(), 0.0);
  n_edges_ = 0;
  for (std::uint32_t u = 0; u < n(); ++u) {
    adj_[u].assign(building_[u].begin(), building_[u].end());
    double k = 2.0 * self_[u];
    for (const auto& [v, w] : adj_[u]) {
      k += w;
      if (v > u) ++n_edges_;
    }
    strength_[u] = k;
  }
  total_weight_ = 0.0;
  for (std::uint32_t u = 0; u < n(); ++u) total_weight_ += strength_[u];
  building_.clear();
  building_.shrink_to_fit();
  finalized_ = true;
}

std::span<const std::pair<std::uint32_t, double>> UndirectedWeightedGraph::neighbors(
    std::uint32_t u) const {
  return adj_[u];
}

UndirectedWeightedGraph symmetrize(const PairedNetwork& net, Layer layer) {
  std::map<std::pair<std::string, std::string>, double> pairs;
  for (const PairedEdge& e : net.edges()) {
    const double w = e.weight(layer);
    if (w <= 0.0) continue;
    std::string a = net.stop(e.origin).id;
    std::string b = net.stop(e.destination).id;
    if (b < a) std::swap(a, b);
    pairs[{std::move(a), std::move(b)}] += w;
  }
  if (pairs.empty()) {
    fail_degenerate(std::string("no positive ") + layer_name(layer) + " edges to symmetrize");
  }

  std::map<std::string, std::uint32_t> index;
  for (const auto& [key, w] : pairs) {
    index.emplace(key.first, 0);
    index.emplace(key.second, 0);
  }
  std::vector<std::string> ids;
  ids.reserve(index.size());
  for (auto& [id, slot] : index) {
    slot = static_cast<std::uint32_t>(ids.size());
    ids.push_back(id);
  }

  UndirectedWeightedGraph g(std::move(ids));
  for (const auto& [key, w] : pairs) g.add_edge(index[key.first], index[key.second], w);
  g.finalize();
  return g;
}

namespace {

std::vector<double> community_strengths(const UndirectedWeightedGraph& g,
                                        std::span<const std::uint32_t> assignment,
                                        std::uint32_t n_comms) {
  std::vector<double> s(n_comms, 0.0);
  for (std::uint32_t u = 0; u < g.n(); ++u) s[assignment[u]] += g.strength(u);
  return s;
}

std::uint32_t check_assignment(const UndirectedWeightedGraph& g,
                               std::span<const std::uint32_t> assignment) {
  if (assignment.size() != g.n()) fail_input("partition does not cover every node");
  std::uint32_t max_id = 0;
  for (std::uint32_t c : assignment) max_id = std::max(max_id, c);
  return max_id + 1;
}

template <bool Parallel>
double modularity_impl(const UndirectedWeightedGraph& g, std::span<const std::uint32_t> assignment,
                       double resolution) {
  const std::uint32_t n_comms = check_assignment(g, assignment);
  const double two_m = g.total_weight();
  if (!(two_m > 0.0)) fail_degenerate("graph has no weight");
  const std::vector<double> s = community_strengths(g, assignment, n_comms);

  auto node_term = [&](std::size_t u) {
    const std::uint32_t c = assignment[u];
    double intra = 2.0 * g.self_loop(static_cast<std::uint32_t>(u));
    for (const auto& [v, w] : g.neighbors(static_cast<std::uint32_t>(u))) {
      if (assignment[v] == c) intra += w;
    }
    return intra - resolution * g.strength(static_cast<std::uint32_t>(u)) * (s[c] / two_m);
  };
  const double total = Parallel ? indexed_sum_chunked(g.n(), node_term)
                                : indexed_sum_serial(g.n(), node_term);
  return total / two_m;
}

std::vector<std::uint32_t> compact_labels(std::span<const std::uint32_t> raw) {
  std::vector<std::uint32_t> remap(raw.size(), UINT32_MAX);
  std::vector<std::uint32_t> dense(raw.size());
  std::uint32_t next = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (remap[raw[i]] == UINT32_MAX) remap[raw[i]] = next++;
    dense[i] = remap[raw[i]];
  }
  return dense;
}

std::vector<std::uint32_t> shuffled_order(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

}  // namespace

double modularity(const UndirectedWeightedGraph& g, std::span<const std::uint32_t> assignment,
                  double resolution) {
  return modularity_impl<true>(g, assignment, resolution);
}

double modularity_serial(const UndirectedWeightedGraph& g,
                         std::span<const std::uint32_t> assignment, double resolution) {
  return modularity_impl<false>(g, assignment, resolution);
}

std::vector<std::uint32_t> louvain_level(const UndirectedWeightedGraph& g, double resolution,
                                         std::span<const std::uint32_t> visit_order,
                                         bool* improved) {
  const std::size_t n = g.n();
  if (visit_order.size() != n) fail_input("visit order does not cover every node");
  const double two_m = g.total_weight();
  if (!(two_m > 0.0)) fail_degenerate("graph has no weight");

  std::vector<std::uint32_t> comm(n);
  std::iota(comm.begin(), comm.end(), 0u);
  std::vector<double> s_tot(n, 0.0);
  for (std::uint32_t u = 0; u < n; ++u) s_tot[u] = g.strength(u);

  bool any_move = false;
  std::vector<std::pair<std::uint32_t, double>> links;  // community -> weight to it
  for (int pass = 0; pass < 1000; ++pass) {
    std::size_t moves = 0;
    for (std::uint32_t u : visit_order) {
      const std::uint32_t home = comm[u];
      links.clear();
      for (const auto& [v, w] : g.neighbors(u)) links.emplace_back(comm[v], w);
      std::sort(links.begin(), links.end());
      // collapse duplicates, keeping community order
      std::size_t out = 0;
      for (std::size_t i = 0; i < links.size(); ++i) {
        if (out > 0 && links[out - 1].first == links[i].first) {
          links[out - 1].second += links[i].second;
        } else {
          links[out++] = links[i];
        }
      }
      links.resize(out);

      const double k_u = g.strength(u);
      s_tot[home] -= k_u;
      double stay_gain = -resolution * k_u * s_tot[home] / two_m;
      double best_gain = stay_gain;
      std::uint32_t best = home;
      for (const auto& [c, w] : links) {
        const double gain = w - resolution * k_u * s_tot[c] / two_m;
        if (c == home) {
          // staying keeps these links; fold them into the baseline
          stay_gain = gain;
          if (best == home) best_gain = gain;
          continue;
        }
        if (gain > best_gain || (gain == best_gain && best != home && c < best)) {
          best_gain = gain;
          best = c;
        }
      }
      if (best != home && best_gain > stay_gain) {
        comm[u] = best;
        s_tot[best] += k_u;
        ++moves;
      } else {
        comm[u] = home;
        s_tot[home] += k_u;
      }
    }
    if (moves == 0) break;
    any_move = true;
  }
  if (improved) *improved = any_move;
  return compact_labels(comm);
}

UndirectedWeightedGraph aggregate(const UndirectedWeightedGraph& g,
                                  std::span<const std::uint32_t> assignment) {
  const std::uint32_t n_comms = check_assignment(g, assignment);
  std::vector<std::string> ids(n_comms);
  for (std::uint32_t c = 0; c < n_comms; ++c) ids[c] = std::to_string(c);
  UndirectedWeightedGraph agg(std::move(ids));
  for (std::uint32_t u = 0; u < g.n(); ++u) {
    const std::uint32_t cu = assignment[u];
    if (g.self_loop(u) > 0.0) agg.add_self_loop(cu, g.self_loop(u));
    for (const auto& [v, w] : g.neighbors(u)) {
      if (v < u) continue;  // each undirected pair once
      const std::uint32_t cv = assignment[v];
      if (cu == cv) {
        agg.add_self_loop(cu, w);
      } else {
        agg.add_edge(cu, cv, w);
      }
    }
  }
  agg.finalize();
  return agg;
}

CommunityPartition louvain(const UndirectedWeightedGraph& g, double resolution, std::uint64_t seed,
                           std::vector<double>* q_trace) {
  if (!(resolution > 0.0)) fail_input("resolution must be positive");
  if (g.n() == 0) fail_input("empty graph");
  if (q_trace) q_trace->clear();

  std::mt19937_64 rng(seed);
  std::vector<std::uint32_t> flat(g.n());
  std::iota(flat.begin(), flat.end(), 0u);

  UndirectedWeightedGraph level_graph = g;
  for (int level = 0; level < 128; ++level) {
    const std::vector<std::uint32_t> order = shuffled_order(level_graph.n(), rng);
    bool improved = false;
    const std::vector<std::uint32_t> dense =
        louvain_level(level_graph, resolution, order, &improved);
    if (!improved) break;
    for (std::uint32_t& c : flat) c = dense[c];
    if (q_trace) q_trace->push_back(modularity(g, flat, resolution));
    level_graph = aggregate(level_graph, dense);
  }

  CommunityPartition part;
  part.assignment = compact_labels(flat);
  part.k = *std::max_element(part.assignment.begin(), part.assignment.end()) + 1;
  part.q = modularity(g, part.assignment, 1.0);
  return part;
}

std::vector<ModularityCurvePoint> modularity_curve(const UndirectedWeightedGraph& g,
                                                   std::span<const double> resolutions,
                                                   std::uint64_t seed) {
  if (resolutions.empty()) fail_input("empty resolution sweep");
  if (!std::is_sorted(resolutions.begin(), resolutions.end())) {
    fail_input("resolutions must be sorted ascending");
  }
  std::vector<ModularityCurvePoint> raw(resolutions.size());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < static_cast<long long>(resolutions.size()); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const CommunityPartition part =
        louvain(g, resolutions[idx], derive_seed(seed, idx), nullptr);
    raw[idx] = {resolutions[idx], part.k, part.q};
  }

  std::map<std::uint32_t, ModularityCurvePoint> by_k;
  for (const ModularityCurvePoint& p : raw) {
    auto [it, inserted] = by_k.emplace(p.k, p);
    if (!inserted && p.q > it->second.q) it->second = p;
  }
  std::vector<ModularityCurvePoint> curve;
  curve.reserve(by_k.size());
  for (const auto& [k, p] : by_k) curve.push_back(p);
  return curve;
}

std::vector<EdgeKey> inter_community_edges(
    const PairedNetwork& net, const std::unordered_map<std::string, std::uint32_t>& community) {
  std::vector<EdgeKey> cut;
  for (const PairedEdge& e : net.edges()) {
    const std::string& a = net.stop(e.origin).id;
    const std::string& b = net.stop(e.destination).id;
    const auto ca = community.find(a);
    if (ca == community.end()) fail_input("partition does not cover stop " + a);
    const auto cb = community.find(b);
    if (cb == community.end()) fail_input("partition does not cover stop " + b);
    if (ca->second != cb->second) cut.push_back({a, b});
  }
  return cut;
}

std::unordered_map<std::string, std::uint32_t> community_by_stop(
    const UndirectedWeightedGraph& g, const CommunityPartition& partition) {
  if (partition.assignment.size() != g.n()) fail_input("partition does not cover every node");
  std::unordered_map<std::string, std::uint32_t> out;
  out.reserve(g.n());
  for (std::uint32_t u = 0; u < g.n(); ++u) out.emplace(g.node_ids()[u], partition.assignment[u]);
  return out;
}

}  // namespace transit
