#include <charconv>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "transit/pipeline.hpp"

namespace {

double parse_num(const std::string& text, const std::string& what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    transit::fail_input("malformed " + what + " in --sweep: '" + text + "'");
  }
  return value;
}

void apply_sweep(const std::string& spec, transit::RunConfig& config) {
  const auto first = spec.find(':');
  const auto second = spec.find(':', first == std::string::npos ? first : first + 1);
  if (first == std::string::npos || second == std::string::npos ||
      spec.find(':', second + 1) != std::string::npos) {
    transit::fail_input("--sweep expects lo:hi:n, got '" + spec + "'");
  }
  config.sweep_lo = parse_num(spec.substr(0, first), "lower bound");
  config.sweep_hi = parse_num(spec.substr(first + 1, second - first - 1), "upper bound");
  const std::string n_text = spec.substr(second + 1);
  std::size_t n = 0;
  const auto [ptr, ec] = std::from_chars(n_text.data(), n_text.data() + n_text.size(), n);
  if (ec != std::errc() || ptr != n_text.data() + n_text.size() || n == 0) {
    transit::fail_input("malformed point count in --sweep: '" + n_text + "'");
  }
  if (!(config.sweep_lo > 0.0) || !(config.sweep_hi >= config.sweep_lo)) {
    transit::fail_input("--sweep bounds must satisfy 0 < lo <= hi");
  }
  config.sweep_n = n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"paired supply/demand transit networks: build, characterize, diagnose, report"};
  app.require_subcommand(1);

  transit::RunConfig config;
  std::string fit_name = "ols";
  std::string sweep_spec;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--stops", config.stops_path, "stops.csv: stop_id,lat,lon");
    cmd->add_option("--lines", config.lines_path,
                    "lines.csv: line_id,vehicles,trips_per_vehicle[,window:trips ...]");
    cmd->add_option("--routes", config.routes_path, "routes.csv: line_id,seq,stop_id");
    cmd->add_option("--demand", config.demand_path,
                    "demand.csv: origin_stop,destination_stop,count[,hhmm]");
    cmd->add_option("--windows", config.windows_spec,
                    "time windows as HH:MM-HH:MM,... (default: eight 3-hour windows)");
    cmd->add_option("--bins", config.n_bins, "log-spaced bins for weight distributions")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--sweep", sweep_spec, "resolution sweep lo:hi:n (default 0.05:20:32)");
    cmd->add_option("--seed", config.seed, "seed for community detection shuffles");
    cmd->add_option("--out", config.out_dir, "output directory (default .)");
    cmd->add_flag("--zero-fill", config.zero_fill,
                  "pair layers on the union of their edges, missing weights become 0");
    cmd->add_option("--fit", fit_name, "power-law estimator: ols | mle")
        ->check(CLI::IsMember({"ols", "mle"}));
    cmd->add_flag("--verbose", config.verbose, "also emit balanced/unclassified segments");
    return cmd;
  };

  CLI::App* build = add_common(app.add_subcommand("build", "parse inputs, emit networks"));
  CLI::App* characterize = add_common(
      app.add_subcommand("characterize", "distributions, crossings, communities, sweeps"));
  CLI::App* diagnose =
      add_common(app.add_subcommand("diagnose", "flag bottleneck and waste segments"));
  CLI::App* report = add_common(app.add_subcommand("report", "summarize prior stages"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    config.fit = fit_name == "mle" ? transit::RunConfig::FitMethod::Mle
                                   : transit::RunConfig::FitMethod::Ols;
    if (!sweep_spec.empty()) apply_sweep(sweep_spec, config);
    if (build->parsed()) return transit::cmd_build(config, std::cout);
    if (characterize->parsed()) return transit::cmd_characterize(config, std::cout);
    if (diagnose->parsed()) return transit::cmd_diagnose(config, std::cout);
    if (report->parsed()) return transit::cmd_report(config, std::cout);
  } catch (const transit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return transit::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
