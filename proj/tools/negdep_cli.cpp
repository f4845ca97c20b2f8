// Command line front end for the experiment harness.

#include "negdep/lab/config.hpp"
#include "negdep/lab/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool exact = false;
  bool mc = false;
  std::optional<std::uint64_t> trials;
};

}  // namespace

int main(int argc, char** argv) {
  using negdep::lab::ExperimentKind;
  CLI::App app{"negdep: concentration experiments for negatively dependent measures on the cube"};
  app.require_subcommand(1);

  const std::map<std::string, std::pair<ExperimentKind, std::string>> commands = {
      {"audit-generator", {ExperimentKind::generator_audit, "structural checks of the recursive generator"}},
      {"audit-coupling", {ExperimentKind::coupling_audit, "exact audit of the monotone coupling kernels"}},
      {"audit-martingale", {ExperimentKind::martingale_audit, "martingale increments against the Lipschitz bounds"}},
      {"tails", {ExperimentKind::lipschitz_tail, "scalar Lipschitz tails against the sub-Gaussian bound"}},
      {"talagrand", {ExperimentKind::talagrand, "convex distance functional over sets A"}},
      {"poly-tails", {ExperimentKind::polynomial_tail, "polynomial tails against the norm-based bound"}},
      {"matrix-tails", {ExperimentKind::matrix_tail, "lambda_max tails against the matrix bounds"}},
      {"norms", {ExperimentKind::norms, "injective norms of mean derivative tensors"}},
  };

  Overrides o;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.second);
    sub->add_option("--config", o.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--out", o.out, "output directory");
    auto* exact = sub->add_flag("--exact", o.exact, "exhaustive enumeration");
    auto* mc = sub->add_flag("--mc", o.mc, "Monte Carlo");
    exact->excludes(mc);
    sub->add_option("--trials", o.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    subs[name] = sub;
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& [name, sub] : subs) {
      if (!sub->parsed()) continue;
      auto config = negdep::lab::load_config(o.config);
      const auto kind = commands.at(name).first;
      if (config.kind != kind) {
        std::cerr << "config kind '" << negdep::lab::kind_name(config.kind) << "' does not match subcommand '" << name
                  << "'\n";
        return 2;
      }
      if (o.seed) config.seed = *o.seed;
      if (o.out) config.out_dir = *o.out;
      if (o.exact) config.exact = true;
      if (o.mc) config.exact = false;
      if (o.trials) config.trials = *o.trials;
      const auto result = negdep::lab::run(config);
      for (const auto& f : result.files) std::cout << "wrote " << f << '\n';
      std::cout << result.summary << '\n';
      return result.exit_code;
    }
  } catch (const negdep::lab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
