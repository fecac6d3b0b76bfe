// Command-line front end: one subcommand per experiment kind.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/algorithm/string.hpp>

#include "lrtrunc/config.hpp"
#include "lrtrunc/experiments.hpp"
#include "lrtrunc/percolation.hpp"
#include "lrtrunc/table.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitResource = 3;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::string out;
  std::string plot;
  std::string plot_x;
  std::string plot_y;
  std::string path_out;
};

const std::map<std::string, std::pair<std::string, std::string>> kDefaultPlot = {
    {"truncation-curve", {"radius", "theta_hat,ci_low,ci_high"}},
    {"overlap-curve", {"n", "estimate,ci_low,ci_high"}},
    {"dispersion-suite", {"n", "max_point_mass,sqrt_bound"}},
    {"potts-report", {"R", "bound"}},
    {"counterexample-scan", {"K", "phi,sigma"}},
};

int execute(const std::string& subcommand, const Options& opt) {
  using namespace lrtrunc;
  ExperimentConfig config = load_config(opt.config_path);
  const auto kind = kind_for_subcommand(subcommand);
  if (config.has("experiment", "kind") && config.get("experiment", "kind") != kind)
    throw ConfigError("config kind '" + config.get("experiment", "kind") +
                      "' does not match subcommand '" + subcommand + "'");
  config.set("experiment", "kind", kind);
  if (opt.seed) config.set("experiment", "seed", std::to_string(*opt.seed));
  if (opt.workers) config.set("experiment", "workers", std::to_string(*opt.workers));
  if (!opt.out.empty()) config.set("experiment", "output", opt.out);

  // Resolve everything that can fail on input before running.
  validate_keys(config);
  std::string plot_x = opt.plot_x, plot_y = opt.plot_y;
  if (!opt.plot.empty() && (plot_x.empty() || plot_y.empty())) {
    auto it = kDefaultPlot.find(kind);
    if (it == kDefaultPlot.end()) throw ConfigError("--plot needs --plot-x and --plot-y for " + kind);
    if (plot_x.empty()) plot_x = it->second.first;
    if (plot_y.empty()) plot_y = it->second.second;
  }
  std::vector<std::string> ys;
  if (!plot_y.empty()) boost::split(ys, plot_y, boost::is_any_of(","));

  const ResultTable table = run(config);
  std::string plot_text;
  if (!opt.plot.empty()) {
    try {
      plot_text = plotdata(table, plot_x, ys);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  std::string path_text;
  if (!opt.path_out.empty()) {
    const Kernel kernel = kernel_from_config(config);
    const PathMeasure measure = measure_from_config(config, kernel);
    const auto steps = static_cast<std::size_t>(config.get_i64("params", "horizon_first"));
    path_text = path_csv(measure.sample(steps, config.seed()));
  }

  const auto output = config.output();
  if (output.empty()) std::cout << table.csv();
  else write_atomic(output, table.csv());
  if (!opt.plot.empty()) write_atomic(opt.plot, plot_text);
  if (!opt.path_out.empty()) write_atomic(opt.path_out, path_text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Long-range percolation truncation experiments"};
  app.set_version_flag("--version", lrtrunc::version_string());
  app.require_subcommand(1);

  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "theta-hat under a sequence of truncation radii"},
      {"dispersion", "exact signed-sum bounds and cosine moments"},
      {"tree", "ternary spin tree level sums and predictability"},
      {"pathmeasure", "intersection probability of two path measures"},
      {"overlap", "expected weighted overlap of two independent paths"},
      {"potts", "Potts bound report for a pair potential"},
      {"counterexample", "phi functional scan for the counterexample kernel"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config_path, "INI experiment file")->required();
    sub->add_option("--seed", opt.seed, "master seed");
    sub->add_option("--workers", opt.workers, "worker threads");
    sub->add_option("--out", opt.out, "CSV output path (stdout if omitted)");
    sub->add_option("--plot", opt.plot, "plot data output path");
    sub->add_option("--plot-x", opt.plot_x, "x column for --plot");
    sub->add_option("--plot-y", opt.plot_y, "comma-separated y columns for --plot");
    if (name == "pathmeasure")
      sub->add_option("--path-out", opt.path_out, "CSV of one sampled path of the first measure");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  const std::string subcommand = app.get_subcommands().front()->get_name();
  try {
    return execute(subcommand, opt);
  } catch (const lrtrunc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const lrtrunc::ResourceLimitError& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return kExitResource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
