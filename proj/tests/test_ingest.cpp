#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "transit/ingest.hpp"

using namespace transit;
using fixtures::TempDir;
using fixtures::write_file;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Input;
}

std::string error_text(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  FAIL("expected an Error");
  return "";
}

LineRecord line(const std::string& id, std::int64_t v, std::int64_t c,
                std::vector<std::string> route) {
  LineRecord r;
  r.line_id = id;
  r.vehicles = v;
  r.trips_per_vehicle = c;
  r.route = std::move(route);
  return r;
}

}  // namespace

TEST_CASE("line_weight is vehicles times trips") {
  CHECK(line_weight(line("l", 2, 3, {"a", "b"})) == 6.0);
  CHECK(line_weight(line("l", 1, 1, {"a", "b"})) == 1.0);
}

TEST_CASE("supply layer accumulates consecutive pairs") {
  const auto weights = build_supply_layer({line("l", 2, 3, {"a", "b", "c"})});
  REQUIRE(weights.size() == 2);
  CHECK(weights.at({"a", "b"}) == 6.0);
  CHECK(weights.at({"b", "c"}) == 6.0);
}

TEST_CASE("lines sharing a pair sum their weights") {
  const auto weights = build_supply_layer(
      {line("l1", 2, 3, {"a", "b", "c"}), line("l2", 1, 4, {"a", "b"})});
  CHECK(weights.at({"a", "b"}) == 10.0);
  CHECK(weights.at({"b", "c"}) == 6.0);
}

TEST_CASE("a route that revisits a stop feeds both directions") {
  const auto weights = build_supply_layer({line("l", 1, 5, {"a", "b", "a"})});
  REQUIRE(weights.size() == 2);
  CHECK(weights.at({"a", "b"}) == 5.0);
  CHECK(weights.at({"b", "a"}) == 5.0);
}

TEST_CASE("supply totals are conserved across accumulation") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<LineRecord> lines;
    double expected = 0.0;
    const int n_lines = 1 + static_cast<int>(rng() % 5);
    for (int li = 0; li < n_lines; ++li) {
      const int v = 1 + static_cast<int>(rng() % 9);
      const int c = 1 + static_cast<int>(rng() % 9);
      const int len = 2 + static_cast<int>(rng() % 6);
      std::vector<std::string> route;
      int last = -1;
      for (int s = 0; s < len; ++s) {
        int stop = static_cast<int>(rng() % 12);
        if (stop == last) stop = (stop + 1) % 12;
        route.push_back("s" + std::to_string(stop));
        last = stop;
      }
      expected += static_cast<double>(v) * c * (len - 1);
      lines.push_back(line("l" + std::to_string(li), v, c, std::move(route)));
    }
    double total = 0.0;
    for (const auto& [key, w] : build_supply_layer(lines)) total += w;
    CHECK(total == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("demand layer sums counts per ordered pair") {
  std::vector<TraversalEvent> events{{"a", "b", 3, {}}, {"a", "b", 2, {}}, {"b", "a", 4, {}}};
  const auto weights = build_demand_layer(events);
  REQUIRE(weights.size() == 2);
  CHECK(weights.at({"a", "b"}) == 5.0);
  CHECK(weights.at({"b", "a"}) == 4.0);
  CHECK(build_demand_layer({}).empty());
}

TEST_CASE("the default schedule is eight 3-hour windows") {
  const auto windows = default_windows();
  REQUIRE(windows.size() == 8);
  CHECK(windows.front().label == "2:01 às 5:00");
  CHECK(windows[1].label == "5:01 às 8:00");
  CHECK(windows.back().label == "23:01 as 2:00");
  CHECK(windows.front().slug == "0201-0500");
  CHECK(windows.back().slug == "2301-0200");
  for (const auto& w : windows) CHECK(w.duration() == 180);
  CHECK(windows.back().wraps());
}

TEST_CASE("every minute of the day belongs to exactly one default window") {
  const auto windows = default_windows();
  for (int minute = 0; minute < 1440; ++minute) {
    int hits = 0;
    for (const auto& w : windows) {
      if (w.contains(minute)) ++hits;
    }
    CHECK(hits == 1);
  }
}

TEST_CASE("window membership is half-open on the left") {
  const auto windows = default_windows();
  const auto& first = windows.front();  // 2:01 as 5:00 -> (120, 300]
  CHECK(first.contains(121));
  CHECK(first.contains(300));
  CHECK_FALSE(first.contains(120));
  CHECK_FALSE(first.contains(301));
  const auto& wrap = windows.back();  // (1380, 120]
  CHECK(wrap.contains(1381));
  CHECK(wrap.contains(0));
  CHECK(wrap.contains(120));
  CHECK_FALSE(wrap.contains(121));
  CHECK_FALSE(wrap.contains(1380));
}

TEST_CASE("parse_windows_spec accepts a contiguous circular tiling") {
  const auto windows = parse_windows_spec("02:01-05:00,05:01-02:00");
  REQUIRE(windows.size() == 2);
  CHECK(windows[0].label == "02:01-05:00");
  CHECK(windows[0].slug == "0201-0500");
  CHECK(windows[0].start == 120);
  CHECK(windows[0].end == 300);
  CHECK(windows[1].wraps());
  CHECK(windows[0].duration() + windows[1].duration() == 1440);
}

TEST_CASE("parse_windows_spec rejects gaps, overlaps and malformed segments") {
  CHECK(kind_of([] { parse_windows_spec(""); }) == ErrorKind::Input);
  CHECK(kind_of([] { parse_windows_spec("02:01-05:00,06:01-02:00"); }) == ErrorKind::Input);
  CHECK(kind_of([] { parse_windows_spec("02:01-05:00,04:01-02:00"); }) == ErrorKind::Input);
  CHECK(kind_of([] { parse_windows_spec("02:01-05:00"); }) == ErrorKind::Input);
  CHECK(kind_of([] { parse_windows_spec("0201-0500,05:01-02:00"); }) == ErrorKind::Input);
  CHECK(kind_of([] { parse_windows_spec("02:01-25:00,25:01-02:00"); }) == ErrorKind::Input);
}

TEST_CASE("a single window spanning the whole day is allowed") {
  const auto windows = parse_windows_spec("00:01-00:00");
  REQUIRE(windows.size() == 1);
  CHECK(windows[0].duration() == 1440);
  for (int minute = 0; minute < 1440; ++minute) CHECK(windows[0].contains(minute));
}

TEST_CASE("slice_by_window partitions timed events") {
  const auto windows = default_windows();
  std::vector<TraversalEvent> events;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    events.push_back({"a", "b", 1, static_cast<int>(rng() % 1440)});
  }
  const auto slices = slice_by_window(events, windows);
  REQUIRE(slices.size() == windows.size());
  std::size_t total = 0;
  for (const auto& w : windows) {
    for (const auto& event : slices.at(w.label)) CHECK(w.contains(*event.minute));
    total += slices.at(w.label).size();
  }
  CHECK(total == events.size());
}

TEST_CASE("slice_by_window seeds empty windows and rejects untimed events") {
  const auto windows = default_windows();
  const auto slices = slice_by_window({{"a", "b", 1, 300}}, windows);
  REQUIRE(slices.size() == 8);
  CHECK(slices.at("2:01 às 5:00").size() == 1);
  CHECK(slices.at("5:01 às 8:00").empty());
  CHECK(kind_of([&] { slice_by_window({{"a", "b", 1, {}}}, windows); }) == ErrorKind::Input);
}

TEST_CASE("windowed supply prefers explicit trip counts") {
  const auto windows = default_windows();
  LineRecord with = line("l1", 10, 8, {"a", "b"});
  with.window_trips[windows[0].label] = 5.0;
  LineRecord without = line("l2", 2, 8, {"a", "b"});
  const WindowedSupply supply = build_supply_layer({with, without}, windows[0], windows.size());
  CHECK(supply.explicit_lines == 1);
  CHECK(supply.uniform_lines == 1);
  // 10 * 5 explicit + 2 * (8 / 8) uniform
  CHECK(supply.weights.at({"a", "b"}) == doctest::Approx(52.0));
}

TEST_CASE("a zero-trip window contributes no edges") {
  const auto windows = default_windows();
  LineRecord l = line("l1", 10, 8, {"a", "b"});
  l.window_trips[windows[0].label] = 0.0;
  const WindowedSupply supply = build_supply_layer({l}, windows[0], windows.size());
  CHECK(supply.weights.empty());
}

TEST_CASE("parse_stops reads ids and optional coordinates") {
  TempDir dir;
  write_file(dir.path("stops.csv"), "stop_id,lat,lon\na,-3.0,-60.0\nb,,\n");
  const auto stops = parse_stops(dir.path("stops.csv"));
  REQUIRE(stops.size() == 2);
  CHECK(stops[0].has_coords());
  CHECK_FALSE(stops[1].has_coords());
}

TEST_CASE("parse_stops reports the offending row") {
  TempDir dir;
  write_file(dir.path("stops.csv"), "stop_id,lat,lon\na,-3.0,-60.0\na,-3.1,-60.1\n");
  const std::string what = error_text([&] { parse_stops(dir.path("stops.csv")); });
  CHECK(what.find("row 3") != std::string::npos);
  CHECK(what.find("duplicate") != std::string::npos);

  write_file(dir.path("one_coord.csv"), "stop_id,lat,lon\na,-3.0,\n");
  CHECK(kind_of([&] { parse_stops(dir.path("one_coord.csv")); }) == ErrorKind::Input);
  write_file(dir.path("bad_lat.csv"), "stop_id,lat,lon\na,91.0,-60.0\n");
  CHECK(kind_of([&] { parse_stops(dir.path("bad_lat.csv")); }) == ErrorKind::Input);
  CHECK(kind_of([&] { parse_stops(dir.path("missing.csv")); }) == ErrorKind::Io);
}

TEST_CASE("parse_lines reads fleet counts and window trips") {
  TempDir dir;
  write_file(dir.path("lines.csv"),
             "line_id,vehicles,trips_per_vehicle\nl1,10,6\nl2,5,4,5:01 às 8:00:12.5\n");
  const auto lines = parse_lines(dir.path("lines.csv"));
  REQUIRE(lines.size() == 2);
  CHECK(lines[0].vehicles == 10);
  CHECK(lines[0].window_trips.empty());
  REQUIRE(lines[1].window_trips.size() == 1);
  // the window label itself contains colons; the split happens on the last one
  CHECK(lines[1].window_trips.at("5:01 às 8:00") == 12.5);
}

TEST_CASE("parse_lines rejects malformed rows") {
  TempDir dir;
  write_file(dir.path("bad_count.csv"), "line_id,vehicles,trips_per_vehicle\nl1,x,6\n");
  const std::string what = error_text([&] { parse_lines(dir.path("bad_count.csv")); });
  CHECK(what.find("row 2") != std::string::npos);

  write_file(dir.path("zero.csv"), "line_id,vehicles,trips_per_vehicle\nl1,0,6\n");
  CHECK(kind_of([&] { parse_lines(dir.path("zero.csv")); }) == ErrorKind::Input);
  write_file(dir.path("dup.csv"), "line_id,vehicles,trips_per_vehicle\nl1,1,6\nl1,2,3\n");
  CHECK(kind_of([&] { parse_lines(dir.path("dup.csv")); }) == ErrorKind::Input);
  write_file(dir.path("neg_trips.csv"),
             "line_id,vehicles,trips_per_vehicle\nl1,1,6,5:01 às 8:00:-2\n");
  CHECK(kind_of([&] { parse_lines(dir.path("neg_trips.csv")); }) == ErrorKind::Input);
  write_file(dir.path("bad_header.csv"), "id,vehicles,trips\nl1,1,6\n");
  CHECK(kind_of([&] { parse_lines(dir.path("bad_header.csv")); }) == ErrorKind::Input);
}

TEST_CASE("parse_routes builds ordered routes and validates sequences") {
  TempDir dir;
  const std::vector<Stop> stops{{"a", {}, {}}, {"b", {}, {}}, {"c", {}, {}}};
  auto lines = std::vector<LineRecord>{line("l1", 1, 1, {})};

  write_file(dir.path("routes.csv"), "line_id,seq,stop_id\nl1,1,b\nl1,0,a\nl1,2,c\n");
  parse_routes(dir.path("routes.csv"), stops, lines);
  CHECK(lines[0].route == std::vector<std::string>{"a", "b", "c"});

  auto reset = [&] { lines[0].route.clear(); };

  reset();
  write_file(dir.path("gap.csv"), "line_id,seq,stop_id\nl1,0,a\nl1,2,c\n");
  CHECK(kind_of([&] { parse_routes(dir.path("gap.csv"), stops, lines); }) == ErrorKind::Input);
  reset();
  write_file(dir.path("dup_seq.csv"), "line_id,seq,stop_id\nl1,0,a\nl1,0,b\n");
  CHECK(kind_of([&] { parse_routes(dir.path("dup_seq.csv"), stops, lines); }) ==
        ErrorKind::Input);
  reset();
  write_file(dir.path("short.csv"), "line_id,seq,stop_id\nl1,0,a\n");
  CHECK(kind_of([&] { parse_routes(dir.path("short.csv"), stops, lines); }) == ErrorKind::Input);
  reset();
  write_file(dir.path("repeat.csv"), "line_id,seq,stop_id\nl1,0,a\nl1,1,a\n");
  CHECK(kind_of([&] { parse_routes(dir.path("repeat.csv"), stops, lines); }) ==
        ErrorKind::Input);
  reset();
  write_file(dir.path("unknown_stop.csv"), "line_id,seq,stop_id\nl1,0,a\nl1,1,zz\n");
  CHECK(kind_of([&] { parse_routes(dir.path("unknown_stop.csv"), stops, lines); }) ==
        ErrorKind::Input);
  reset();
  write_file(dir.path("unknown_line.csv"), "line_id,seq,stop_id\nl9,0,a\nl9,1,b\n");
  CHECK(kind_of([&] { parse_routes(dir.path("unknown_line.csv"), stops, lines); }) ==
        ErrorKind::Input);
  reset();
  write_file(dir.path("no_route.csv"), "line_id,seq,stop_id\n");
  CHECK(kind_of([&] { parse_routes(dir.path("no_route.csv"), stops, lines); }) ==
        ErrorKind::Input);
}

TEST_CASE("parse_demand reads counts and optional timestamps") {
  TempDir dir;
  const std::vector<Stop> stops{{"a", {}, {}}, {"b", {}, {}}};
  write_file(dir.path("demand.csv"),
             "origin_stop,destination_stop,count,hhmm\na,b,3,0730\nb,a,2,2359\n");
  const auto events = parse_demand(dir.path("demand.csv"), stops);
  REQUIRE(events.size() == 2);
  CHECK(events[0].count == 3);
  CHECK(*events[0].minute == 7 * 60 + 30);
  CHECK(*events[1].minute == 23 * 60 + 59);

  write_file(dir.path("untimed.csv"), "origin_stop,destination_stop,count\na,b,3\n");
  const auto untimed = parse_demand(dir.path("untimed.csv"), stops);
  CHECK_FALSE(untimed[0].minute.has_value());
}

TEST_CASE("parse_demand rejects malformed rows") {
  TempDir dir;
  const std::vector<Stop> stops{{"a", {}, {}}, {"b", {}, {}}};
  auto expect_input = [&](const std::string& name, const std::string& body) {
    write_file(dir.path(name), body);
    CHECK(kind_of([&] { parse_demand(dir.path(name), stops); }) == ErrorKind::Input);
  };
  expect_input("unknown.csv", "origin_stop,destination_stop,count\na,zz,3\n");
  expect_input("selfloop.csv", "origin_stop,destination_stop,count\na,a,3\n");
  expect_input("zero.csv", "origin_stop,destination_stop,count\na,b,0\n");
  expect_input("badtime.csv", "origin_stop,destination_stop,count,hhmm\na,b,3,2460\n");
  expect_input("colontime.csv", "origin_stop,destination_stop,count,hhmm\na,b,3,12:34\n");
  expect_input("shorttime.csv", "origin_stop,destination_stop,count,hhmm\na,b,3,123\n");
}

TEST_CASE("parse_inputs cross-validates the four files") {
  TempDir dir;
  write_file(dir.path("stops.csv"), "stop_id,lat,lon\na,-3.0,-60.0\nb,-3.1,-60.1\n");
  write_file(dir.path("lines.csv"), "line_id,vehicles,trips_per_vehicle\nl1,2,3\n");
  write_file(dir.path("routes.csv"), "line_id,seq,stop_id\nl1,0,a\nl1,1,b\n");
  write_file(dir.path("demand.csv"), "origin_stop,destination_stop,count\na,b,5\n");
  const ParsedInputs parsed = parse_inputs(dir.path("stops.csv"), dir.path("lines.csv"),
                                           dir.path("routes.csv"), dir.path("demand.csv"));
  CHECK(parsed.stops.size() == 2);
  CHECK(parsed.lines.size() == 1);
  CHECK(parsed.lines[0].route.size() == 2);
  CHECK(parsed.events.size() == 1);
  CHECK(parsed.timed_events == 0);
}
