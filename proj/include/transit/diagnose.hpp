#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "transit/community.hpp"
#include "transit/ingest.hpp"
#include "transit/model.hpp"

namespace transit {

enum class EdgeClass { Bottleneck, Waste, Balanced, Unclassified };

const char* edge_class_name(EdgeClass c);

/// A cut edge with its imbalance indices. lines is filled by attribute_lines.
struct DiagnosisRecord {
  EdgeKey edge;
  double is_value = 0.0;  // supply share minus demand share
  double id_value = 0.0;  // demand share minus supply share, exactly -is_value
  EdgeClass classification = EdgeClass::Balanced;
  Layer source_partition = Layer::Supply;
  std::vector<std::string> lines;
};

/// IS = w_s/w_smax - w_d/w_dmax. Negative when the edge carries a larger
/// share of demand than of supply.
double overload_index(double w_s, double w_smax, double w_d, double w_dmax);

/// ID = w_d/w_dmax - w_s/w_smax. Negative when supply share exceeds demand
/// share.
double waste_index(double w_s, double w_smax, double w_d, double w_dmax);

struct DiagnosisResult {
  std::vector<DiagnosisRecord> flagged;  // sorted ascending by index, then edge
  std::vector<DiagnosisRecord> rest;     // balanced / opposite-sign cut edges
  CommunityPartition partition;
  std::vector<std::string> graph_nodes;  // node ids of the partitioned graph
};

/// Community detection on the supply layer, IS on every cut edge; records
/// with IS < 0 are the bottleneck candidates, most negative first.
DiagnosisResult find_bottlenecks(const PairedNetwork& net, std::uint64_t seed = 42);

/// Community detection on the demand layer, ID on every cut edge; records
/// with ID < 0 are the waste candidates, most negative first.
DiagnosisResult find_waste(const PairedNetwork& net, std::uint64_t seed = 42);

/// Attach to each record every line whose route traverses the edge's ordered
/// pair. Returns the number of records left without any line.
std::size_t attribute_lines(std::vector<DiagnosisRecord>& records,
                            const std::vector<LineRecord>& lines);

}  // namespace transit
