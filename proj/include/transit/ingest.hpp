#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "transit/model.hpp"

namespace transit {

/// A bus line: fleet size, trips per vehicle, ordered stop sequence.
/// Optional per-window trip counts override the uniform split of
/// trips_per_vehicle when building windowed supply layers.
struct LineRecord {
  std::string line_id;
  std::int64_t vehicles = 0;
  std::int64_t trips_per_vehicle = 0;
  std::map<std::string, double> window_trips;  // window label -> trips
  std::vector<std::string> route;              // >= 2 stops, consecutive entries distinct
};

/// One pre-reconstructed passenger traversal of a consecutive stop pair.
struct TraversalEvent {
  std::string origin;
  std::string destination;
  std::int64_t count = 0;
  std::optional<int> minute;  // minute of day, 0..1439
};

/// Half-open (start, end] slot at minute resolution. end <= start marks the
/// window that wraps past midnight.
struct TimeWindow {
  std::string label;
  std::string slug;  // filename-safe form
  int start = 0;     // exclusive
  int end = 0;       // inclusive

  bool wraps() const { return end <= start; }
  bool contains(int minute) const {
    return wraps() ? (minute > start || minute <= end) : (minute > start && minute <= end);
  }
  int duration() const { return (end - start + 1440 - 1) % 1440 + 1; }
};

/// The eight 3-hour windows of the reference schedule, "2:01 às 5:00"
/// through the wrap-around "23:01 as 2:00".
std::vector<TimeWindow> default_windows();

/// Parse a schedule spec "HH:MM-HH:MM,..." where each segment names its first
/// and last minute inclusively, e.g. "02:01-05:00,05:01-02:00". Segments must
/// tile the 24h day contiguously.
std::vector<TimeWindow> parse_windows_spec(const std::string& spec);

/// Scheduled traversals contributed by one line: vehicles * trips_per_vehicle.
double line_weight(const LineRecord& line);

/// Full-day supply layer: every consecutive stop pair of every route
/// accumulates that line's weight, once per occurrence.
WeightMap build_supply_layer(const std::vector<LineRecord>& lines);

struct WindowedSupply {
  WeightMap weights;
  std::size_t explicit_lines = 0;  // lines with a trip count for this window
  std::size_t uniform_lines = 0;   // lines falling back to trips/n_windows
};

/// Supply layer for one window. Lines without an explicit trip count for the
/// window spread trips_per_vehicle uniformly over n_windows.
WindowedSupply build_supply_layer(const std::vector<LineRecord>& lines, const TimeWindow& window,
                                  std::size_t n_windows);

/// Demand layer: per ordered pair, the sum of event counts.
WeightMap build_demand_layer(const std::vector<TraversalEvent>& events);

/// Assign every event to the unique window containing its minute. All events
/// must carry a timestamp.
std::map<std::string, std::vector<TraversalEvent>> slice_by_window(
    const std::vector<TraversalEvent>& events, const std::vector<TimeWindow>& schedule);

struct ParsedInputs {
  std::vector<Stop> stops;
  std::vector<LineRecord> lines;
  std::vector<TraversalEvent> events;
  std::size_t timed_events = 0;
};

std::vector<Stop> parse_stops(const std::string& path);
std::vector<LineRecord> parse_lines(const std::string& path);
void parse_routes(const std::string& path, const std::vector<Stop>& stops,
                  std::vector<LineRecord>& lines);
std::vector<TraversalEvent> parse_demand(const std::string& path, const std::vector<Stop>& stops);

/// Parse and cross-validate all four input files.
ParsedInputs parse_inputs(const std::string& stops_path, const std::string& lines_path,
                          const std::string& routes_path, const std::string& demand_path);

}  // namespace transit
