#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "eulerblow/app.hpp"

namespace {

using namespace eulerblow;

template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const PositivityFault& e) {
    std::cerr << "solver fault: " << e.what() << '\n';
    return kExitSolverFault;
  }
}

RunConfig load_with_override(const std::string& path, const std::string& output) {
  RunConfig c = load_config(path);
  if (!output.empty()) c.output = output;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blow-up checks for radially symmetric compressible Euler flow with vacuum"};
  app.require_subcommand(1);

  double r_min = 0.1, r_max = 10.0;
  std::size_t n = 100;
  auto* table = app.add_subcommand("bessel-table", "Tabulate K0, K0' and the small-radius bounds as CSV");
  table->add_option("--r-min", r_min, "smallest radius")->capture_default_str();
  table->add_option("--r-max", r_max, "largest radius")->capture_default_str();
  table->add_option("-n,--n", n, "number of rows")->capture_default_str();

  std::string config_path, output;
  bool plot = false;
  unsigned jobs = 0;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "run configuration (JSON)")->required();
  };
  auto* check = app.add_subcommand("check", "Check the blow-up conditions on the initial data");
  add_config(check);
  auto* predict = app.add_subcommand("predict", "Print only the blow-up time bound t*");
  add_config(predict);
  auto* simulate = app.add_subcommand("simulate", "Run the solver and write series and snapshot CSVs");
  add_config(simulate);
  auto* verify = app.add_subcommand("verify", "Simulate and check the inequality chain");
  add_config(verify);
  auto* sweep = app.add_subcommand("sweep", "Verify every (gamma, m/m_min) pair of the sweep block");
  add_config(sweep);
  sweep->add_option("-j,--jobs", jobs, "concurrent cases (0: all cores)");
  for (auto* sub : {simulate, verify, sweep}) {
    sub->add_option("-o,--output", output, "override the output directory");
    sub->add_flag("--plot-script", plot, "also write a matplotlib script next to the CSVs");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadConfig;
  }

  if (*table) return guarded([&] { return cmd_bessel_table(r_min, r_max, n, std::cout, std::cerr); });
  return guarded([&] {
    const RunConfig cfg = load_with_override(config_path, output);
    if (*check) return cmd_check(cfg, std::cout, std::cerr);
    if (*predict) return cmd_predict(cfg, std::cout, std::cerr);
    if (*simulate) return cmd_simulate(cfg, std::cout, std::cerr, {plot});
    if (*verify) return cmd_verify(cfg, std::cout, std::cerr, plot);
    return cmd_sweep(cfg, std::cout, std::cerr, {jobs, plot});
  });
}
