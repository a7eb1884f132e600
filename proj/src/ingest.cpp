#include "transit/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "transit/common.hpp"

namespace transit {

namespace {

struct CsvRow {
  std::size_t number = 0;  // 1-based, header is row 1
  std::vector<std::string> cells;
};

std::vector<CsvRow> read_csv(const std::string& path, const std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) fail_io("cannot open " + path);
  std::vector<CsvRow> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    CsvRow row;
    row.number = number;
    std::size_t pos = 0;
    while (true) {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) {
        row.cells.push_back(line.substr(pos));
        break;
      }
      row.cells.push_back(line.substr(pos, comma - pos));
      pos = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  if (in.bad()) fail_io("read failure on " + path);
  if (rows.empty()) fail_input(path + ": missing header row");
  const CsvRow& head = rows.front();
  if (head.cells.size() < header.size()) {
    fail_input(path + ": header must start with " + header.front() + ",...");
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (head.cells[i] != header[i]) {
      fail_input(path + ": expected header column '" + header[i] + "', found '" + head.cells[i] +
                 "'");
    }
  }
  rows.erase(rows.begin());
  return rows;
}

std::int64_t parse_int(const std::string& cell, const std::string& path, std::size_t row,
                       const std::string& what) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    fail_input(path + ": row " + std::to_string(row) + ": bad " + what + " '" + cell + "'");
  }
  return value;
}

double parse_real(const std::string& cell, const std::string& path, std::size_t row,
                  const std::string& what) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
    fail_input(path + ": row " + std::to_string(row) + ": bad " + what + " '" + cell + "'");
  }
  return value;
}

int parse_hhmm(const std::string& cell, const std::string& path, std::size_t row) {
  if (cell.size() != 4 || !std::all_of(cell.begin(), cell.end(), [](char c) {
        return c >= '0' && c <= '9';
      })) {
    fail_input(path + ": row " + std::to_string(row) + ": bad hhmm '" + cell + "'");
  }
  int hh = (cell[0] - '0') * 10 + (cell[1] - '0');
  int mm = (cell[2] - '0') * 10 + (cell[3] - '0');
  if (hh > 23 || mm > 59) {
    fail_input(path + ": row " + std::to_string(row) + ": bad hhmm '" + cell + "'");
  }
  return hh * 60 + mm;
}

int parse_minute_of_day(const std::string& text, const std::string& what) {
  auto colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 >= text.size()) {
    fail_input("bad " + what + " '" + text + "' (expected HH:MM)");
  }
  int hh = 0;
  int mm = 0;
  auto parse_part = [&](const std::string& part, int& out) {
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    return ec == std::errc() && ptr == part.data() + part.size();
  };
  if (!parse_part(text.substr(0, colon), hh) || !parse_part(text.substr(colon + 1), mm) ||
      hh < 0 || hh > 23 || mm < 0 || mm > 59) {
    fail_input("bad " + what + " '" + text + "' (expected HH:MM)");
  }
  return hh * 60 + mm;
}

std::string two_digits(int v) {
  std::string s = std::to_string(v);
  return v < 10 ? "0" + s : s;
}

std::string slug_for(int first_minute, int end_minute) {
  return two_digits(first_minute / 60) + two_digits(first_minute % 60) + "-" +
         two_digits(end_minute / 60) + two_digits(end_minute % 60);
}

void validate_schedule(const std::vector<TimeWindow>& windows) {
  if (windows.empty()) fail_input("empty window schedule");
  int total = 0;
  std::set<std::string> labels;
  std::set<std::string> slugs;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const TimeWindow& w = windows[i];
    if (w.duration() <= 0) fail_input("window " + w.label + " has no duration");
    total += w.duration();
    if (!labels.insert(w.label).second) fail_input("duplicate window label " + w.label);
    if (!slugs.insert(w.slug).second) fail_input("duplicate window slug " + w.slug);
    const TimeWindow& next = windows[(i + 1) % windows.size()];
    if (next.start != w.end) {
      fail_input("windows " + w.label + " and " + next.label +
                 " do not tile the day: a window must start the minute after the previous one "
                 "ends");
    }
  }
  if (total != 1440) fail_input("window schedule covers " + std::to_string(total) +
                                " minutes, expected 1440");
}

}  // namespace

std::vector<TimeWindow> default_windows() {
  // First minute 02:01, then 3-hour slots around the clock; the label of the
  // last slot spells "as" without the accent.
  std::vector<TimeWindow> windows;
  const char* labels[8] = {"2:01 às 5:00",   "5:01 às 8:00",   "8:01 às 11:00",
                           "11:01 às 14:00", "14:01 às 17:00", "17:01 às 20:00",
                           "20:01 às 23:00", "23:01 as 2:00"};
  for (int i = 0; i < 8; ++i) {
    TimeWindow w;
    w.label = labels[i];
    w.start = (120 + i * 180) % 1440;
    w.end = (120 + (i + 1) * 180) % 1440;
    w.slug = slug_for((w.start + 1) % 1440, w.end);
    windows.push_back(std::move(w));
  }
  validate_schedule(windows);
  return windows;
}

std::vector<TimeWindow> parse_windows_spec(const std::string& spec) {
  if (spec.empty()) fail_input("empty --windows spec");
  std::vector<TimeWindow> windows;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    std::size_t comma = spec.find(',', pos);
    std::string segment =
        comma == std::string::npos ? spec.substr(pos) : spec.substr(pos, comma - pos);
    if (segment.empty()) fail_input("empty segment in --windows spec");
    auto dash = segment.find('-');
    if (dash == std::string::npos) {
      fail_input("bad window segment '" + segment + "' (expected HH:MM-HH:MM)");
    }
    int first = parse_minute_of_day(segment.substr(0, dash), "window start");
    int last = parse_minute_of_day(segment.substr(dash + 1), "window end");
    TimeWindow w;
    w.label = segment;
    w.slug = slug_for(first, last);
    w.start = (first + 1440 - 1) % 1440;  // segment bounds are inclusive
    w.end = last;
    windows.push_back(std::move(w));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  validate_schedule(windows);
  return windows;
}

double line_weight(const LineRecord& line) {
  return static_cast<double>(line.vehicles) * static_cast<double>(line.trips_per_vehicle);
}

namespace {

void accumulate_route(WeightMap& weights, const LineRecord& line, double w) {
  for (std::size_t i = 0; i + 1 < line.route.size(); ++i) {
    weights[{line.route[i], line.route[i + 1]}] += w;
  }
}

}  // namespace

WeightMap build_supply_layer(const std::vector<LineRecord>& lines) {
  if (lines.empty()) fail_input("no lines to build a supply layer from");
  WeightMap weights;
  for (const LineRecord& line : lines) accumulate_route(weights, line, line_weight(line));
  return weights;
}

WindowedSupply build_supply_layer(const std::vector<LineRecord>& lines, const TimeWindow& window,
                                  std::size_t n_windows) {
  if (lines.empty()) fail_input("no lines to build a supply layer from");
  if (n_windows == 0) fail_input("window count must be positive");
  WindowedSupply out;
  for (const LineRecord& line : lines) {
    double trips;
    if (auto it = line.window_trips.find(window.label); it != line.window_trips.end()) {
      trips = it->second;
      ++out.explicit_lines;
    } else {
      trips = static_cast<double>(line.trips_per_vehicle) / static_cast<double>(n_windows);
      ++out.uniform_lines;
    }
    double w = static_cast<double>(line.vehicles) * trips;
    if (w > 0.0) accumulate_route(out.weights, line, w);
  }
  return out;
}

WeightMap build_demand_layer(const std::vector<TraversalEvent>& events) {
  WeightMap weights;
  for (const TraversalEvent& e : events) {
    weights[{e.origin, e.destination}] += static_cast<double>(e.count);
  }
  return weights;
}

std::map<std::string, std::vector<TraversalEvent>> slice_by_window(
    const std::vector<TraversalEvent>& events, const std::vector<TimeWindow>& schedule) {
  validate_schedule(schedule);
  std::map<std::string, std::vector<TraversalEvent>> slices;
  for (const TimeWindow& w : schedule) slices[w.label];
  for (const TraversalEvent& e : events) {
    if (!e.minute) {
      fail_input("untimed record " + e.origin + " -> " + e.destination +
                 " cannot be sliced into windows");
    }
    const TimeWindow* home = nullptr;
    for (const TimeWindow& w : schedule) {
      if (w.contains(*e.minute)) {
        home = &w;
        break;
      }
    }
    if (!home) fail_input("minute " + std::to_string(*e.minute) + " outside every window");
    slices[home->label].push_back(e);
  }
  return slices;
}

std::vector<Stop> parse_stops(const std::string& path) {
  auto rows = read_csv(path, {"stop_id", "lat", "lon"});
  std::vector<Stop> stops;
  std::unordered_set<std::string> seen;
  for (const CsvRow& row : rows) {
    if (row.cells.size() != 3) {
      fail_input(path + ": row " + std::to_string(row.number) + ": expected 3 columns, found " +
                 std::to_string(row.cells.size()));
    }
    Stop stop;
    stop.id = row.cells[0];
    if (stop.id.empty()) fail_input(path + ": row " + std::to_string(row.number) + ": empty stop_id");
    if (!seen.insert(stop.id).second) {
      fail_input(path + ": row " + std::to_string(row.number) + ": duplicate stop id " + stop.id);
    }
    bool has_lat = !row.cells[1].empty();
    bool has_lon = !row.cells[2].empty();
    if (has_lat != has_lon) {
      fail_input(path + ": row " + std::to_string(row.number) + ": stop " + stop.id +
                 " has only one coordinate");
    }
    if (has_lat) {
      stop.lat = parse_real(row.cells[1], path, row.number, "lat");
      stop.lon = parse_real(row.cells[2], path, row.number, "lon");
      if (*stop.lat < -90.0 || *stop.lat > 90.0) {
        fail_input(path + ": row " + std::to_string(row.number) + ": lat out of range");
      }
      if (*stop.lon < -180.0 || *stop.lon > 180.0) {
        fail_input(path + ": row " + std::to_string(row.number) + ": lon out of range");
      }
    }
    stops.push_back(std::move(stop));
  }
  return stops;
}

std::vector<LineRecord> parse_lines(const std::string& path) {
  auto rows = read_csv(path, {"line_id", "vehicles", "trips_per_vehicle"});
  std::vector<LineRecord> lines;
  std::unordered_set<std::string> seen;
  for (const CsvRow& row : rows) {
    if (row.cells.size() < 3) {
      fail_input(path + ": row " + std::to_string(row.number) + ": expected at least 3 columns");
    }
    LineRecord line;
    line.line_id = row.cells[0];
    if (line.line_id.empty()) {
      fail_input(path + ": row " + std::to_string(row.number) + ": empty line_id");
    }
    if (!seen.insert(line.line_id).second) {
      fail_input(path + ": row " + std::to_string(row.number) + ": duplicate line id " +
                 line.line_id);
    }
    line.vehicles = parse_int(row.cells[1], path, row.number, "vehicles");
    line.trips_per_vehicle = parse_int(row.cells[2], path, row.number, "trips_per_vehicle");
    if (line.vehicles < 1) {
      fail_input(path + ": row " + std::to_string(row.number) + ": vehicles must be >= 1");
    }
    if (line.trips_per_vehicle < 1) {
      fail_input(path + ": row " + std::to_string(row.number) +
                 ": trips_per_vehicle must be >= 1");
    }
    // optional trailing cells: "<window label>:<trips>"; labels may contain
    // colons, so split on the last one
    for (std::size_t i = 3; i < row.cells.size(); ++i) {
      const std::string& cell = row.cells[i];
      if (cell.empty()) continue;
      auto colon = cell.rfind(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == cell.size()) {
        fail_input(path + ": row " + std::to_string(row.number) + ": bad window cell '" + cell +
                   "' (expected label:trips)");
      }
      std::string label = cell.substr(0, colon);
      double trips = parse_real(cell.substr(colon + 1), path, row.number, "window trips");
      if (trips < 0.0) {
        fail_input(path + ": row " + std::to_string(row.number) + ": negative trips in '" + cell +
                   "'");
      }
      if (!line.window_trips.emplace(label, trips).second) {
        fail_input(path + ": row " + std::to_string(row.number) + ": duplicate window label '" +
                   label + "'");
      }
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

void parse_routes(const std::string& path, const std::vector<Stop>& stops,
                  std::vector<LineRecord>& lines) {
  auto rows = read_csv(path, {"line_id", "seq", "stop_id"});
  std::unordered_set<std::string> stop_ids;
  for (const Stop& s : stops) stop_ids.insert(s.id);
  std::unordered_map<std::string, LineRecord*> by_id;
  for (LineRecord& line : lines) by_id[line.line_id] = &line;

  std::unordered_map<std::string, std::vector<std::pair<std::int64_t, std::string>>> sequences;
  for (const CsvRow& row : rows) {
    if (row.cells.size() != 3) {
      fail_input(path + ": row " + std::to_string(row.number) + ": expected 3 columns");
    }
    const std::string& line_id = row.cells[0];
    if (!by_id.count(line_id)) {
      fail_input(path + ": row " + std::to_string(row.number) + ": unknown line " + line_id);
    }
    std::int64_t seq = parse_int(row.cells[1], path, row.number, "seq");
    if (seq < 0) fail_input(path + ": row " + std::to_string(row.number) + ": negative seq");
    const std::string& stop_id = row.cells[2];
    if (!stop_ids.count(stop_id)) {
      fail_input(path + ": row " + std::to_string(row.number) + ": unknown stop " + stop_id);
    }
    sequences[line_id].emplace_back(seq, stop_id);
  }

  for (LineRecord& line : lines) {
    auto it = sequences.find(line.line_id);
    if (it == sequences.end()) fail_input(path + ": line " + line.line_id + " has no route");
    auto& seq = it->second;
    std::sort(seq.begin(), seq.end());
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (seq[i].first != static_cast<std::int64_t>(i)) {
        fail_input(path + ": line " + line.line_id + ": seq values must be 0.." +
                   std::to_string(seq.size() - 1) + " without gaps or repeats");
      }
    }
    if (seq.size() < 2) fail_input(path + ": line " + line.line_id + ": route needs >= 2 stops");
    line.route.clear();
    for (auto& [s, stop_id] : seq) {
      if (!line.route.empty() && line.route.back() == stop_id) {
        fail_input(path + ": line " + line.line_id + ": stop " + stop_id +
                   " repeats immediately at seq " + std::to_string(s));
      }
      line.route.push_back(std::move(stop_id));
    }
  }
}

std::vector<TraversalEvent> parse_demand(const std::string& path, const std::vector<Stop>& stops) {
  auto rows = read_csv(path, {"origin_stop", "destination_stop", "count"});
  std::unordered_set<std::string> stop_ids;
  for (const Stop& s : stops) stop_ids.insert(s.id);
  std::vector<TraversalEvent> events;
  for (const CsvRow& row : rows) {
    if (row.cells.size() != 3 && row.cells.size() != 4) {
      fail_input(path + ": row " + std::to_string(row.number) + ": expected 3 or 4 columns");
    }
    TraversalEvent e;
    e.origin = row.cells[0];
    e.destination = row.cells[1];
    if (!stop_ids.count(e.origin)) {
      fail_input(path + ": row " + std::to_string(row.number) + ": unknown stop " + e.origin);
    }
    if (!stop_ids.count(e.destination)) {
      fail_input(path + ": row " + std::to_string(row.number) + ": unknown stop " + e.destination);
    }
    if (e.origin == e.destination) {
      fail_input(path + ": row " + std::to_string(row.number) + ": origin equals destination");
    }
    e.count = parse_int(row.cells[2], path, row.number, "count");
    if (e.count < 1) {
      fail_input(path + ": row " + std::to_string(row.number) + ": count must be >= 1");
    }
    if (row.cells.size() == 4 && !row.cells[3].empty()) {
      e.minute = parse_hhmm(row.cells[3], path, row.number);
    }
    events.push_back(std::move(e));
  }
  return events;
}

ParsedInputs parse_inputs(const std::string& stops_path, const std::string& lines_path,
                          const std::string& routes_path, const std::string& demand_path) {
  ParsedInputs parsed;
  parsed.stops = parse_stops(stops_path);
  parsed.lines = parse_lines(lines_path);
  parse_routes(routes_path, parsed.stops, parsed.lines);
  parsed.events = parse_demand(demand_path, parsed.stops);
  for (const TraversalEvent& e : parsed.events) {
    if (e.minute) ++parsed.timed_events;
  }
  return parsed;
}

}  // namespace transit
