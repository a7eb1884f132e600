#include "transit/diagnose.hpp"

#include <algorithm>
#include <cmath>

#include "transit/common.hpp"

namespace transit {

namespace {

constexpr double kBalancedEps = 1e-12;

double share(double w, double w_max, Layer layer) {
  if (!(w_max > 0.0)) {
    fail_degenerate(std::string("empty ") + layer_name(layer) + " layer (max weight is 0)");
  }
  if (w < 0.0 || w > w_max) {
    fail_input(std::string(layer_name(layer)) + " weight " + format_double(w) +
               " outside [0, " + format_double(w_max) + "]");
  }
  return w / w_max;
}

bool severity_order(const DiagnosisRecord& a, const DiagnosisRecord& b, Layer partition) {
  const double ia = partition == Layer::Supply ? a.is_value : a.id_value;
  const double ib = partition == Layer::Supply ? b.is_value : b.id_value;
  if (ia != ib) return ia < ib;
  return a.edge < b.edge;
}

DiagnosisResult diagnose(const PairedNetwork& net, Layer partition_layer, std::uint64_t seed) {
  DiagnosisResult result;
  UndirectedWeightedGraph g = symmetrize(net, partition_layer);
  result.partition = louvain(g, 1.0, seed);
  result.graph_nodes = g.node_ids();
  const auto community = community_by_stop(g, result.partition);
  const std::vector<EdgeKey> cut = inter_community_edges(net, community);

  const double w_smax = layer_max(net, Layer::Supply);
  const double w_dmax = layer_max(net, Layer::Demand);

  const auto& edges = net.edges();
  for (const EdgeKey& key : cut) {
    const std::uint32_t oi = *net.stop_index(key.origin);
    const std::uint32_t di = *net.stop_index(key.destination);
    const auto it = std::lower_bound(edges.begin(), edges.end(), std::pair(oi, di),
                                     [](const PairedEdge& e, const std::pair<std::uint32_t, std::uint32_t>& k) {
                                       return std::pair(e.origin, e.destination) < k;
                                     });
    const PairedEdge* edge = &*it;
    DiagnosisRecord rec;
    rec.edge = key;
    rec.is_value = overload_index(edge->supply, w_smax, edge->demand, w_dmax);
    rec.id_value = waste_index(edge->supply, w_smax, edge->demand, w_dmax);
    rec.source_partition = partition_layer;

    const double index = partition_layer == Layer::Supply ? rec.is_value : rec.id_value;
    if (std::fabs(index) < kBalancedEps) {
      rec.classification = EdgeClass::Balanced;
      result.rest.push_back(std::move(rec));
    } else if (index < 0.0) {
      rec.classification =
          partition_layer == Layer::Supply ? EdgeClass::Bottleneck : EdgeClass::Waste;
      result.flagged.push_back(std::move(rec));
    } else {
      rec.classification = EdgeClass::Unclassified;
      result.rest.push_back(std::move(rec));
    }
  }

  std::sort(result.flagged.begin(), result.flagged.end(),
            [&](const DiagnosisRecord& a, const DiagnosisRecord& b) {
              return severity_order(a, b, partition_layer);
            });
  std::sort(result.rest.begin(), result.rest.end(),
            [](const DiagnosisRecord& a, const DiagnosisRecord& b) { return a.edge < b.edge; });
  return result;
}

}  // namespace

const char* edge_class_name(EdgeClass c) {
  switch (c) {
    case EdgeClass::Bottleneck: return "bottleneck";
    case EdgeClass::Waste: return "waste";
    case EdgeClass::Balanced: return "balanced";
    case EdgeClass::Unclassified: return "unclassified";
  }
  return "unclassified";
}

double overload_index(double w_s, double w_smax, double w_d, double w_dmax) {
  return share(w_s, w_smax, Layer::Supply) - share(w_d, w_dmax, Layer::Demand);
}

double waste_index(double w_s, double w_smax, double w_d, double w_dmax) {
  return share(w_d, w_dmax, Layer::Demand) - share(w_s, w_smax, Layer::Supply);
}

DiagnosisResult find_bottlenecks(const PairedNetwork& net, std::uint64_t seed) {
  return diagnose(net, Layer::Supply, seed);
}

DiagnosisResult find_waste(const PairedNetwork& net, std::uint64_t seed) {
  return diagnose(net, Layer::Demand, seed);
}

std::size_t attribute_lines(std::vector<DiagnosisRecord>& records,
                            const std::vector<LineRecord>& lines) {
  std::size_t unattributed = 0;
  for (DiagnosisRecord& rec : records) {
    rec.lines.clear();
    for (const LineRecord& line : lines) {
      for (std::size_t i = 0; i + 1 < line.route.size(); ++i) {
        if (line.route[i] == rec.edge.origin && line.route[i + 1] == rec.edge.destination) {
          rec.lines.push_back(line.line_id);
          break;
        }
      }
    }
    std::sort(rec.lines.begin(), rec.lines.end());
    if (rec.lines.empty()) ++unattributed;
  }
  return unattributed;
}

}  // namespace transit
