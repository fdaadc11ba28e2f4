#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nsdc/costmodel.hpp"
#include "nsdc/errors.hpp"
#include "nsdc/stencil.hpp"
#include "nsdc/study.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIntegration = 3;

int cmd_run(const std::string& config_path) {
  const nsdc::StudyConfig cfg = nsdc::load_study_config(config_path);
  nsdc::run_study(cfg);
  return kExitOk;
}

int cmd_cost(long long n, double flops, double bandwidth) {
  const nsdc::MachineModel m{flops, bandwidth};
  const long long narrow = nsdc::narrow_flops(n);
  const long long wide = nsdc::wide_flops(n);
  std::printf("N                    %lld\n", n);
  std::printf("narrow flops/point   %lld\n", narrow);
  std::printf("wide flops/point     %lld\n", wide);
  std::printf("extra narrow flops   %lld\n", narrow - wide);
  std::printf("extra-flop time      %.5g s\n", static_cast<double>(narrow - wide) / flops);
  std::printf("extra-comm time      %.5g s\n", 64.0 / bandwidth);
  const double delta = nsdc::time_delta(n, m);
  std::printf("time delta           %.5g s (%s)\n", delta,
              delta > 0.0 ? "narrow slower" : "wide slower");
  std::printf("crossover bandwidth  %.5g B/s\n", nsdc::crossover_bandwidth(n, flops));
  return kExitOk;
}

int cmd_optimize(int order) {
  const std::vector<double> p = nsdc::optimize_params(order);
  const double bound = nsdc::truncation_bound(order, p);
  if (order == 8)
    std::printf("order 8: m47 = %.17g, m48 = %.17g\n", p[0], p[1]);
  else
    std::printf("order 6: m36 = %.17g\n", p[0]);
  std::printf("truncation bound = %.17g\n", bound);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Narrow-stencil diffusion operators with single- and multirate "
               "spectral deferred corrections"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "Run a convergence study from a JSON config");
  run->add_option("--config", config_path, "Path to the study config")->required();

  long long cost_n = 64;
  double cost_flops = 460.8e9;
  double cost_bandwidth = 8.0e9;
  CLI::App* cost = app.add_subcommand("cost", "Evaluate the narrow-vs-wide cost model");
  cost->add_option("--N", cost_n, "Coupled components per point");
  cost->add_option("--flops", cost_flops, "Machine flop rate, flop/s");
  cost->add_option("--bandwidth", cost_bandwidth, "Network bandwidth, byte/s");

  int order = 8;
  CLI::App* opt = app.add_subcommand("optimize", "Minimize the truncation bound");
  opt->add_option("--order", order, "Stencil order (6 or 8)")->check(CLI::IsMember({6, 8}));

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(config_path);
    if (cost->parsed()) return cmd_cost(cost_n, cost_flops, cost_bandwidth);
    return cmd_optimize(order);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_name() == "CallForHelp" ? kExitOk : kExitConfig;
  } catch (const nsdc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nsdc::IntegrationError& e) {
    std::cerr << "integration failure: " << e.what() << '\n';
    return kExitIntegration;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIntegration;
  }
}
