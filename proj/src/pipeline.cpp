#include "transit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "transit/community.hpp"
#include "transit/diagnose.hpp"
#include "transit/ingest.hpp"
#include "transit/stats.hpp"

namespace transit {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

int exit_code_for(ErrorKind kind) { return kind == ErrorKind::Degenerate ? 1 : 2; }

namespace {

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_io("cannot open " + path + " for writing");
  out << content;
  if (!out) fail_io("write failure on " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_io("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail_io("read failure on " + path);
  return buf.str();
}

json parse_json_file(const std::string& path) {
  json j = json::parse(read_text(path), nullptr, false);
  if (j.is_discarded()) fail_input(path + ": not valid JSON");
  return j;
}

void require_path(const std::string& value, const std::string& flag) {
  if (value.empty()) fail_input(flag + " is required for this command");
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi >= lo)) fail_input("sweep bounds must satisfy 0 < lo <= hi");
  if (n == 0) fail_input("sweep needs at least one resolution");
  std::vector<double> out;
  out.reserve(n);
  if (n == 1) {
    out.push_back(lo);
    return out;
  }
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                                     static_cast<double>(n - 1)));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<TimeWindow> schedule_from(const RunConfig& config) {
  return config.windows_spec.empty() ? default_windows() : parse_windows_spec(config.windows_spec);
}

std::string network_filename(const std::string& slug) { return "network_" + slug + ".json"; }

json summary_path_load(const std::string& dir, const std::string& name) {
  const fs::path p = fs::path(dir) / name;
  if (!fs::exists(p)) return json();
  return parse_json_file(p.string());
}

struct LayerCharacterization {
  bool ok = false;
  std::string error;
  double alpha = 0.0;
  double r_squared = 0.0;
  std::size_t zeros_excluded = 0;
  std::uint32_t k = 0;
  double q = 0.0;
};

const char* crossing_kind_name(CdfCrossing::Kind kind) {
  switch (kind) {
    case CdfCrossing::Kind::Crossing: return "crossing";
    case CdfCrossing::Kind::NoCrossing: return "no_crossing";
    case CdfCrossing::Kind::Coincident: return "coincident";
  }
  return "no_crossing";
}

}  // namespace

void write_network(const PairedNetwork& net, const std::string& slug,
                   const std::string& apportionment, const std::string& path) {
  json j;
  j["format_version"] = 1;
  j["window"] = net.window();
  j["slug"] = slug;
  j["supply_apportionment"] = apportionment;
  j["zero_filled_supply"] = net.zero_filled(Layer::Supply);
  j["zero_filled_demand"] = net.zero_filled(Layer::Demand);
  json stops = json::array();
  for (const Stop& s : net.stops()) {
    json stop;
    stop["id"] = s.id;
    if (s.has_coords()) {
      stop["lat"] = *s.lat;
      stop["lon"] = *s.lon;
    } else {
      stop["lat"] = nullptr;
      stop["lon"] = nullptr;
    }
    stops.push_back(std::move(stop));
  }
  j["stops"] = std::move(stops);
  json edges = json::array();
  for (const PairedEdge& e : net.edges()) {
    json edge;
    edge["origin"] = net.stop(e.origin).id;
    edge["destination"] = net.stop(e.destination).id;
    edge["supply"] = e.supply;
    edge["demand"] = e.demand;
    edges.push_back(std::move(edge));
  }
  j["edges"] = std::move(edges);
  write_text(path, j.dump(2) + "\n");
}

StoredNetwork read_network(const std::string& path) {
  const json j = parse_json_file(path);
  if (!j.is_object() || !j.contains("format_version")) {
    fail_input(path + ": not a network file");
  }
  if (j["format_version"] != 1) {
    fail_input(path + ": unsupported format_version");
  }
  StoredNetwork stored;
  stored.slug = j.value("slug", "");
  stored.apportionment = j.value("supply_apportionment", "");
  if (stored.slug.empty()) fail_input(path + ": missing slug");

  std::vector<Stop> stops;
  for (const json& js : j.at("stops")) {
    Stop s;
    s.id = js.at("id").get<std::string>();
    if (js.contains("lat") && !js["lat"].is_null()) {
      s.lat = js["lat"].get<double>();
      s.lon = js.at("lon").get<double>();
    }
    stops.push_back(std::move(s));
  }
  WeightMap supply;
  WeightMap demand;
  for (const json& je : j.at("edges")) {
    EdgeKey key{je.at("origin").get<std::string>(), je.at("destination").get<std::string>()};
    supply[key] = je.at("supply").get<double>();
    demand[key] = je.at("demand").get<double>();
  }
  stored.net = PairedNetwork::build(std::move(stops), supply, demand,
                                    j.at("window").get<std::string>());
  return stored;
}

std::vector<std::string> discover_networks(const std::string& dir) {
  if (!fs::is_directory(dir)) fail_input(dir + " is not a directory");
  std::vector<std::string> windows;
  std::string full_day;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("network_", 0) != 0 || name.size() < 14 ||
        name.substr(name.size() - 5) != ".json") {
      continue;
    }
    if (name == "network_full-day.json") {
      full_day = entry.path().string();
    } else {
      windows.push_back(entry.path().string());
    }
  }
  std::sort(windows.begin(), windows.end());
  std::vector<std::string> out;
  if (!full_day.empty()) out.push_back(full_day);
  out.insert(out.end(), windows.begin(), windows.end());
  return out;
}

namespace {

struct BuiltWindow {
  std::string slug;
  PairedNetwork net;
  std::string apportionment;
};

std::string apportionment_name(const WindowedSupply& supply) {
  if (supply.uniform_lines == 0) return "explicit";
  if (supply.explicit_lines == 0) return "uniform";
  return "mixed";
}

}  // namespace

int cmd_build(const RunConfig& config, std::ostream& log) {
  require_path(config.stops_path, "--stops");
  require_path(config.lines_path, "--lines");
  require_path(config.routes_path, "--routes");
  require_path(config.demand_path, "--demand");

  const ParsedInputs parsed =
      parse_inputs(config.stops_path, config.lines_path, config.routes_path, config.demand_path);
  const std::vector<TimeWindow> schedule = schedule_from(config);
  fs::create_directories(config.out_dir);

  std::vector<BuiltWindow> built;
  {
    BuiltWindow full;
    full.slug = "full-day";
    full.apportionment = "daily";
    full.net = PairedNetwork::build(parsed.stops, build_supply_layer(parsed.lines),
                                    build_demand_layer(parsed.events), "full-day",
                                    config.zero_fill);
    built.push_back(std::move(full));
  }

  const bool all_timed = parsed.timed_events == parsed.events.size() && !parsed.events.empty();
  if (!all_timed && parsed.timed_events > 0) {
    fail_input(std::to_string(parsed.events.size() - parsed.timed_events) + " of " +
               std::to_string(parsed.events.size()) +
               " demand records lack a timestamp; windowing needs all of them timed");
  }
  if (!all_timed && !config.windows_spec.empty()) {
    fail_input("--windows given but the demand records carry no timestamps");
  }

  if (all_timed) {
    auto slices = slice_by_window(parsed.events, schedule);
    std::size_t uniform_lines = 0;
    for (const TimeWindow& window : schedule) {
      WindowedSupply supply = build_supply_layer(parsed.lines, window, schedule.size());
      uniform_lines = std::max(uniform_lines, supply.uniform_lines);
      BuiltWindow bw;
      bw.slug = window.slug;
      bw.apportionment = apportionment_name(supply);
      bw.net = PairedNetwork::build(parsed.stops, supply.weights,
                                    build_demand_layer(slices.at(window.label)), window.label,
                                    config.zero_fill);
      built.push_back(std::move(bw));
    }
    if (uniform_lines > 0) {
      log << "warning: " << uniform_lines
          << " line(s) have no per-window trip counts; their daily trips were spread uniformly "
             "across "
          << schedule.size() << " windows\n";
    }
  } else {
    log << "note: demand records carry no timestamps; building the full-day network only\n";
  }

  json summary;
  summary["windows"] = json::array();
  for (const BuiltWindow& bw : built) {
    const fs::path path = fs::path(config.out_dir) / network_filename(bw.slug);
    write_network(bw.net, bw.slug, bw.apportionment, path.string());
    const std::size_t zs = bw.net.zero_filled(Layer::Supply);
    const std::size_t zd = bw.net.zero_filled(Layer::Demand);
    if (config.zero_fill && zs + zd > 0) {
      log << "note: [" << bw.slug << "] zero-filled " << zs << " supply and " << zd
          << " demand edge weights\n";
    }
    log << "window=" << bw.slug << " stops=" << bw.net.n_stops() << " edges=" << bw.net.n_edges()
        << "\n";
    json w;
    w["slug"] = bw.slug;
    w["window"] = bw.net.window();
    w["stops"] = bw.net.n_stops();
    w["edges"] = bw.net.n_edges();
    w["supply_apportionment"] = bw.apportionment;
    w["zero_filled_supply"] = zs;
    w["zero_filled_demand"] = zd;
    double total_supply = 0.0;
    double total_demand = 0.0;
    for (const PairedEdge& e : bw.net.edges()) {
      total_supply += e.supply;
      total_demand += e.demand;
    }
    w["total_supply"] = total_supply;
    w["total_demand"] = total_demand;
    summary["windows"].push_back(std::move(w));
  }
  write_text((fs::path(config.out_dir) / "summary_build.json").string(), summary.dump(2) + "\n");
  return 0;
}

namespace {

LayerCharacterization characterize_layer(const StoredNetwork& stored, Layer layer,
                                         const RunConfig& config, std::ostream& log,
                                         std::vector<double>* normalized_out) {
  LayerCharacterization out;
  const PairedNetwork& net = stored.net;
  const double w_max = layer_max(net, layer);
  std::vector<double> normalized;
  normalized.reserve(net.n_edges());
  for (const PairedEdge& e : net.edges()) {
    normalized.push_back(normalized_weight(e.weight(layer), w_max));
  }
  if (normalized_out) *normalized_out = normalized;

  const BinnedDistribution dist = log_binned_density(normalized, config.n_bins);
  const PowerLawFit fit = config.fit == RunConfig::FitMethod::Mle
                              ? fit_power_law_mle(normalized, dist)
                              : fit_power_law(dist);

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < dist.n_bins(); ++i) {
    if (dist.counts[i] == 0) continue;
    lx.push_back(std::log(dist.center(i)));
    ly.push_back(std::log(dist.densities[i]));
  }
  std::vector<double> grid;
  grid.reserve(dist.n_bins());
  for (std::size_t i = 0; i < dist.n_bins(); ++i) grid.push_back(std::log(dist.center(i)));
  const SmoothedCurve band = nadaraya_watson(lx, ly, 0.0, grid);

  std::ostringstream csv;
  csv << "bin_center,density,fit_value,ci_low,ci_high\n";
  for (std::size_t i = 0; i < dist.n_bins(); ++i) {
    const double center = dist.center(i);
    csv << format_double(center) << "," << format_double(dist.densities[i]) << ","
        << format_double(fit.density_at(center)) << ",";
    if (band.defined[i]) {
      csv << format_double(std::exp(band.ci_low[i])) << ","
          << format_double(std::exp(band.ci_high[i]));
    } else {
      csv << ",";
    }
    csv << "\n";
  }
  const std::string layer_tag = layer_name(layer);
  write_text((fs::path(config.out_dir) / ("dist_" + layer_tag + "_" + stored.slug + ".csv"))
                 .string(),
             csv.str());

  const EmpiricalCdf cdf(normalized);
  std::ostringstream cdf_csv;
  cdf_csv << "weight,cdf\n";
  const std::vector<double>& sorted = cdf.sorted();
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    cdf_csv << format_double(sorted[i]) << "," << format_double(cdf(sorted[i])) << "\n";
  }
  write_text((fs::path(config.out_dir) / ("cdf_" + layer_tag + "_" + stored.slug + ".csv"))
                 .string(),
             cdf_csv.str());

  const UndirectedWeightedGraph g = symmetrize(net, layer);
  const CommunityPartition part = louvain(g, 1.0, config.seed);
  std::ostringstream comm_csv;
  comm_csv << "stop_id,community_id\n";
  for (std::uint32_t u = 0; u < g.n(); ++u) {
    comm_csv << g.node_ids()[u] << "," << part.assignment[u] << "\n";
  }
  write_text((fs::path(config.out_dir) / ("communities_" + layer_tag + "_" + stored.slug +
                                          ".csv"))
                 .string(),
             comm_csv.str());

  out.ok = true;
  out.alpha = fit.alpha;
  out.r_squared = fit.r_squared;
  out.zeros_excluded = dist.zeros_excluded;
  out.k = part.k;
  out.q = part.q;
  log << "[" << stored.slug << "] alpha[" << layer_tag << "]=" << format_double(fit.alpha)
      << " r2=" << format_double(fit.r_squared) << " k=" << part.k
      << " q=" << format_double(part.q) << " zeros_excluded=" << dist.zeros_excluded << "\n";
  return out;
}

json characterize_window(const StoredNetwork& stored, const RunConfig& config,
                         std::ostream& log, bool& any_ok) {
  json w;
  w["slug"] = stored.slug;
  w["window"] = stored.net.window();

  std::vector<double> normalized_supply;
  std::vector<double> normalized_demand;
  LayerCharacterization results[2];
  const Layer layers[2] = {Layer::Supply, Layer::Demand};
  std::vector<double>* sinks[2] = {&normalized_supply, &normalized_demand};
  for (int i = 0; i < 2; ++i) {
    try {
      results[i] = characterize_layer(stored, layers[i], config, log, sinks[i]);
      any_ok = true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Degenerate) throw;
      results[i].error = e.what();
      log << "warning: [" << stored.slug << "] " << layer_name(layers[i])
          << " layer skipped: " << e.what() << "\n";
    }
    json layer_json;
    if (results[i].ok) {
      layer_json["alpha"] = results[i].alpha;
      layer_json["r_squared"] = results[i].r_squared;
      layer_json["zeros_excluded"] = results[i].zeros_excluded;
      layer_json["communities"] = results[i].k;
      layer_json["modularity"] = results[i].q;
    } else {
      layer_json["error"] = results[i].error;
    }
    w[layer_name(layers[i])] = std::move(layer_json);
  }

  if (results[0].ok && results[1].ok) {
    const EmpiricalCdf supply_cdf(normalized_supply);
    const EmpiricalCdf demand_cdf(normalized_demand);
    const CdfCrossing crossing = cdf_crossing(demand_cdf, supply_cdf);
    w["crossing"] = crossing_kind_name(crossing.kind);
    if (crossing.kind == CdfCrossing::Kind::Crossing) {
      w["crossing_weight"] = crossing.weight;
      log << "[" << stored.slug << "] crossing=" << format_double(crossing.weight) << "\n";
    } else {
      log << "[" << stored.slug << "] crossing=" << crossing_kind_name(crossing.kind) << "\n";
    }
  }

  try {
    std::vector<double> xs;
    std::vector<double> ys;
    xs.reserve(stored.net.n_edges());
    ys.reserve(stored.net.n_edges());
    for (const PairedEdge& e : stored.net.edges()) {
      xs.push_back(e.supply);
      ys.push_back(e.demand);
    }
    const AllometricFit fit = allometric_fit(xs, ys);

    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] > 0.0 && ys[i] > 0.0) pairs.emplace_back(xs[i], ys[i]);
    }
    std::sort(pairs.begin(), pairs.end());
    std::vector<double> lx, ly, grid;
    lx.reserve(pairs.size());
    ly.reserve(pairs.size());
    for (const auto& [x, y] : pairs) {
      lx.push_back(std::log(x));
      ly.push_back(std::log(y));
    }
    grid = lx;
    const SmoothedCurve band = nadaraya_watson(lx, ly, 0.0, grid);

    std::ostringstream csv;
    csv << "x,y,fit,ci_low,ci_high\n";
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      csv << format_double(pairs[i].first) << "," << format_double(pairs[i].second) << ","
          << format_double(fit.a * std::pow(pairs[i].first, fit.beta)) << ",";
      if (band.defined[i]) {
        csv << format_double(std::exp(band.ci_low[i])) << ","
            << format_double(std::exp(band.ci_high[i]));
      } else {
        csv << ",";
      }
      csv << "\n";
    }
    write_text((fs::path(config.out_dir) / ("allometry_" + stored.slug + ".csv")).string(),
               csv.str());
    json aj;
    aj["a"] = fit.a;
    aj["beta"] = fit.beta;
    aj["r_squared"] = fit.r_squared;
    aj["excluded_pairs"] = fit.excluded_pairs;
    w["allometry"] = std::move(aj);
    any_ok = true;
    log << "[" << stored.slug << "] allometry beta=" << format_double(fit.beta)
        << " a=" << format_double(fit.a) << " r2=" << format_double(fit.r_squared)
        << " excluded=" << fit.excluded_pairs << "\n";
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Degenerate) throw;
    w["allometry"] = json{{"error", e.what()}};
    log << "warning: [" << stored.slug << "] allometric fit skipped: " << e.what() << "\n";
  }
  return w;
}

}  // namespace

int cmd_characterize(const RunConfig& config, std::ostream& log) {
  const std::vector<std::string> files = discover_networks(config.out_dir);
  if (files.empty()) {
    fail_input("no network_*.json in " + config.out_dir + "; run the build command first");
  }

  bool any_ok = false;
  json summary;
  summary["windows"] = json::array();
  std::vector<StoredNetwork> stored;
  stored.reserve(files.size());
  for (const std::string& file : files) stored.push_back(read_network(file));

  for (const StoredNetwork& s : stored) {
    summary["windows"].push_back(characterize_window(s, config, log, any_ok));
  }

  // resolution sweep on the full-day network, one curve per layer
  const StoredNetwork* full_day = nullptr;
  for (const StoredNetwork& s : stored) {
    if (s.slug == "full-day") {
      full_day = &s;
      break;
    }
  }
  if (full_day) {
    const std::vector<double> resolutions =
        log_spaced(config.sweep_lo, config.sweep_hi, config.sweep_n);
    for (Layer layer : {Layer::Supply, Layer::Demand}) {
      try {
        const UndirectedWeightedGraph g = symmetrize(full_day->net, layer);
        const std::vector<ModularityCurvePoint> curve =
            modularity_curve(g, resolutions, config.seed);
        std::ostringstream csv;
        csv << "resolution,k,q\n";
        for (const ModularityCurvePoint& p : curve) {
          csv << format_double(p.resolution) << "," << p.k << "," << format_double(p.q) << "\n";
        }
        const std::string layer_tag = layer_name(layer);
        write_text((fs::path(config.out_dir) / ("modularity_curve_" + layer_tag + ".csv"))
                       .string(),
                   csv.str());
        const auto peak = std::max_element(
            curve.begin(), curve.end(),
            [](const ModularityCurvePoint& a, const ModularityCurvePoint& b) {
              return a.q < b.q;
            });
        json cj;
        cj["layer"] = layer_tag;
        cj["points"] = curve.size();
        cj["k_min"] = curve.front().k;
        cj["k_max"] = curve.back().k;
        cj["peak_q"] = peak->q;
        cj["peak_k"] = peak->k;
        summary["modularity_curves"].push_back(std::move(cj));
        any_ok = true;
        log << "modularity curve[" << layer_tag << "]: points=" << curve.size() << " k=["
            << curve.front().k << "," << curve.back().k << "] peak q=" << format_double(peak->q)
            << " at k=" << peak->k << "\n";
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Degenerate) throw;
        log << "warning: modularity curve skipped for " << layer_name(layer) << ": " << e.what()
            << "\n";
      }
    }
  }

  write_text((fs::path(config.out_dir) / "summary_characterize.json").string(),
             summary.dump(2) + "\n");
  if (!any_ok) fail_degenerate("every layer of every window was degenerate");
  return 0;
}

namespace {

json record_json(const DiagnosisRecord& rec) {
  json j;
  j["origin"] = rec.edge.origin;
  j["destination"] = rec.edge.destination;
  j["is"] = rec.is_value;
  j["id"] = rec.id_value;
  j["classification"] = edge_class_name(rec.classification);
  j["source_partition"] = layer_name(rec.source_partition);
  j["lines"] = rec.lines;
  return j;
}

void append_record_csv(std::ostringstream& csv, const DiagnosisRecord& rec) {
  csv << rec.edge.origin << "," << rec.edge.destination << "," << format_double(rec.is_value)
      << "," << format_double(rec.id_value) << "," << edge_class_name(rec.classification) << ","
      << layer_name(rec.source_partition) << ",";
  for (std::size_t i = 0; i < rec.lines.size(); ++i) {
    if (i > 0) csv << ";";
    csv << rec.lines[i];
  }
  csv << "\n";
}

bool geojson_feature(const PairedNetwork& net, const DiagnosisRecord& rec, json& features) {
  const Stop& a = net.stop(*net.stop_index(rec.edge.origin));
  const Stop& b = net.stop(*net.stop_index(rec.edge.destination));
  if (!a.has_coords() || !b.has_coords()) return false;
  json f;
  f["type"] = "Feature";
  f["geometry"] = json{{"type", "LineString"},
                       {"coordinates", json::array({json::array({*a.lon, *a.lat}),
                                                    json::array({*b.lon, *b.lat})})}};
  json props;
  props["origin"] = rec.edge.origin;
  props["destination"] = rec.edge.destination;
  props["is"] = rec.is_value;
  props["id"] = rec.id_value;
  props["classification"] = edge_class_name(rec.classification);
  props["source_partition"] = layer_name(rec.source_partition);
  std::string joined;
  for (std::size_t i = 0; i < rec.lines.size(); ++i) {
    if (i > 0) joined += ";";
    joined += rec.lines[i];
  }
  props["lines"] = joined;
  f["properties"] = std::move(props);
  features.push_back(std::move(f));
  return true;
}

}  // namespace

int cmd_diagnose(const RunConfig& config, std::ostream& log) {
  const std::vector<std::string> files = discover_networks(config.out_dir);
  if (files.empty()) {
    fail_input("no network_*.json in " + config.out_dir + "; run the build command first");
  }

  std::vector<StoredNetwork> stored;
  stored.reserve(files.size());
  for (const std::string& file : files) stored.push_back(read_network(file));

  std::vector<LineRecord> lines;
  bool attribution = false;
  if (!config.lines_path.empty() && !config.routes_path.empty()) {
    lines = parse_lines(config.lines_path);
    parse_routes(config.routes_path, stored.front().net.stops(), lines);
    attribution = true;
  } else {
    log << "warning: --lines/--routes not given; line attribution skipped\n";
  }

  bool any_ok = false;
  json summary;
  summary["windows"] = json::array();
  for (const StoredNetwork& s : stored) {
    json w;
    w["slug"] = s.slug;
    w["window"] = s.net.window();
    try {
      DiagnosisResult bottlenecks = find_bottlenecks(s.net, config.seed);
      DiagnosisResult waste = find_waste(s.net, config.seed);
      std::size_t unattributed = 0;
      if (attribution) {
        unattributed += attribute_lines(bottlenecks.flagged, lines);
        unattributed += attribute_lines(waste.flagged, lines);
        if (config.verbose) {
          attribute_lines(bottlenecks.rest, lines);
          attribute_lines(waste.rest, lines);
        }
      }

      std::ostringstream csv;
      csv << "origin,destination,is,id,classification,source_partition,lines\n";
      for (const DiagnosisRecord& rec : bottlenecks.flagged) append_record_csv(csv, rec);
      for (const DiagnosisRecord& rec : waste.flagged) append_record_csv(csv, rec);
      if (config.verbose) {
        for (const DiagnosisRecord& rec : bottlenecks.rest) append_record_csv(csv, rec);
        for (const DiagnosisRecord& rec : waste.rest) append_record_csv(csv, rec);
      }
      write_text((fs::path(config.out_dir) / ("diagnosis_" + s.slug + ".csv")).string(),
                 csv.str());

      json features = json::array();
      bool coords_ok = true;
      for (const DiagnosisRecord& rec : bottlenecks.flagged) {
        coords_ok = coords_ok && geojson_feature(s.net, rec, features);
      }
      for (const DiagnosisRecord& rec : waste.flagged) {
        coords_ok = coords_ok && geojson_feature(s.net, rec, features);
      }
      if (coords_ok) {
        json geo;
        geo["type"] = "FeatureCollection";
        geo["features"] = std::move(features);
        write_text((fs::path(config.out_dir) / ("diagnosis_" + s.slug + ".geojson")).string(),
                   geo.dump(2) + "\n");
      } else {
        log << "note: [" << s.slug << "] some flagged stops lack coordinates; GeoJSON skipped\n";
      }

      std::set<std::string> distinct_lines;
      for (const DiagnosisRecord& rec : bottlenecks.flagged) {
        distinct_lines.insert(rec.lines.begin(), rec.lines.end());
      }
      for (const DiagnosisRecord& rec : waste.flagged) {
        distinct_lines.insert(rec.lines.begin(), rec.lines.end());
      }
      log << "[" << s.slug << "] bottlenecks=" << bottlenecks.flagged.size()
          << " waste=" << waste.flagged.size() << " attributed_lines=" << distinct_lines.size()
          << "\n";
      if (attribution && unattributed > 0) {
        log << "warning: [" << s.slug << "] " << unattributed
            << " flagged edge(s) belong to no line route\n";
      }

      w["bottlenecks"] = json::array();
      for (const DiagnosisRecord& rec : bottlenecks.flagged) {
        w["bottlenecks"].push_back(record_json(rec));
      }
      w["waste"] = json::array();
      for (const DiagnosisRecord& rec : waste.flagged) w["waste"].push_back(record_json(rec));
      w["supply_communities"] = bottlenecks.partition.k;
      w["demand_communities"] = waste.partition.k;
      w["attributed_lines"] = json::array();
      for (const std::string& id : distinct_lines) w["attributed_lines"].push_back(id);
      any_ok = true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Degenerate) throw;
      w["error"] = e.what();
      log << "warning: [" << s.slug << "] diagnosis skipped: " << e.what() << "\n";
    }
    summary["windows"].push_back(std::move(w));
  }

  write_text((fs::path(config.out_dir) / "summary_diagnose.json").string(),
             summary.dump(2) + "\n");
  if (!any_ok) fail_degenerate("diagnosis was degenerate for every window");
  return 0;
}

namespace {

void report_build_section(const json& build, std::ostringstream& md) {
  md << "## Networks\n\n";
  md << "| window | stops | edges | total supply | total demand | supply apportionment |\n";
  md << "|---|---|---|---|---|---|\n";
  for (const json& w : build.at("windows")) {
    md << "| " << w.at("window").get<std::string>() << " | " << w.at("stops") << " | "
       << w.at("edges") << " | " << format_double(w.at("total_supply").get<double>()) << " | "
       << format_double(w.at("total_demand").get<double>()) << " | "
       << w.at("supply_apportionment").get<std::string>() << " |\n";
  }
  md << "\n";
}

void report_characterize_section(const json& chr, std::ostringstream& md) {
  md << "## Weight distributions\n\n";
  md << "| window | layer | alpha | r² | zeros excluded | communities | q |\n";
  md << "|---|---|---|---|---|---|---|\n";
  for (const json& w : chr.at("windows")) {
    for (const char* layer : {"supply", "demand"}) {
      if (!w.contains(layer)) continue;
      const json& lj = w[layer];
      md << "| " << w.at("window").get<std::string>() << " | " << layer << " | ";
      if (lj.contains("error")) {
        md << "degenerate: " << lj["error"].get<std::string>() << " | | | | |\n";
      } else {
        md << format_double(lj.at("alpha").get<double>()) << " | "
           << format_double(lj.at("r_squared").get<double>()) << " | "
           << lj.at("zeros_excluded") << " | " << lj.at("communities") << " | "
           << format_double(lj.at("modularity").get<double>()) << " |\n";
      }
    }
  }
  md << "\n### Supply vs demand\n\n";
  md << "| window | crossing | beta | a | r² |\n";
  md << "|---|---|---|---|---|\n";
  for (const json& w : chr.at("windows")) {
    md << "| " << w.at("window").get<std::string>() << " | ";
    if (w.contains("crossing_weight")) {
      md << format_double(w["crossing_weight"].get<double>());
    } else if (w.contains("crossing")) {
      md << w["crossing"].get<std::string>();
    } else {
      md << "-";
    }
    md << " | ";
    if (w.contains("allometry") && !w["allometry"].contains("error")) {
      const json& aj = w["allometry"];
      md << format_double(aj.at("beta").get<double>()) << " | "
         << format_double(aj.at("a").get<double>()) << " | "
         << format_double(aj.at("r_squared").get<double>()) << " |\n";
    } else {
      md << "- | - | - |\n";
    }
  }
  if (chr.contains("modularity_curves")) {
    md << "\n### Modularity curves\n\n";
    md << "| layer | points | k range | peak q | at k |\n";
    md << "|---|---|---|---|---|\n";
    for (const json& cj : chr["modularity_curves"]) {
      md << "| " << cj.at("layer").get<std::string>() << " | " << cj.at("points") << " | "
         << cj.at("k_min") << ".." << cj.at("k_max") << " | "
         << format_double(cj.at("peak_q").get<double>()) << " | " << cj.at("peak_k") << " |\n";
    }
  }
  md << "\n";
}

void report_diagnose_section(const json& diag, std::ostringstream& md) {
  md << "## Imbalance diagnosis\n\n";
  for (const json& w : diag.at("windows")) {
    md << "### " << w.at("window").get<std::string>() << "\n\n";
    if (w.contains("error")) {
      md << "Diagnosis degenerate: " << w["error"].get<std::string>() << "\n\n";
      continue;
    }
    md << "Bottlenecks: " << w.at("bottlenecks").size() << ", waste: " << w.at("waste").size()
       << ", supply communities: " << w.at("supply_communities")
       << ", demand communities: " << w.at("demand_communities") << "\n\n";
    for (const char* kind : {"bottlenecks", "waste"}) {
      const json& records = w.at(kind);
      if (records.empty()) continue;
      md << "Top " << kind << ":\n\n";
      md << "| origin | destination | IS | ID | lines |\n";
      md << "|---|---|---|---|---|\n";
      std::size_t shown = 0;
      for (const json& r : records) {
        if (++shown > 5) break;
        std::string joined;
        for (const json& l : r.at("lines")) {
          if (!joined.empty()) joined += ";";
          joined += l.get<std::string>();
        }
        md << "| " << r.at("origin").get<std::string>() << " | "
           << r.at("destination").get<std::string>() << " | "
           << format_double(r.at("is").get<double>()) << " | "
           << format_double(r.at("id").get<double>()) << " | " << joined << " |\n";
      }
      md << "\n";
    }
    if (!w.at("attributed_lines").empty()) {
      md << "Lines attributed to flagged segments: ";
      bool first = true;
      for (const json& l : w["attributed_lines"]) {
        if (!first) md << ", ";
        md << l.get<std::string>();
        first = false;
      }
      md << "\n\n";
    }
  }
}

}  // namespace

int cmd_report(const RunConfig& config, std::ostream& log) {
  const json build = summary_path_load(config.out_dir, "summary_build.json");
  const json chr = summary_path_load(config.out_dir, "summary_characterize.json");
  const json diag = summary_path_load(config.out_dir, "summary_diagnose.json");
  if (build.is_null() && chr.is_null() && diag.is_null()) {
    fail_input("no stage summaries in " + config.out_dir +
               "; run build/characterize/diagnose first");
  }

  std::ostringstream md;
  md << "# Transit balance report\n\n";
  if (!build.is_null()) report_build_section(build, md);
  if (!chr.is_null()) report_characterize_section(chr, md);
  if (!diag.is_null()) report_diagnose_section(diag, md);

  const fs::path path = fs::path(config.out_dir) / "report.md";
  write_text(path.string(), md.str());
  log << "report written to " << path.string() << "\n";
  return 0;
}

}  // namespace transit
