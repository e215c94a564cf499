#include "fcalc/xlab/xlab.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace fcalc;

namespace {

xlab::json read_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DomainError("cannot open '" + path + "'");
  return xlab::json::parse(is);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional calculus experiments"};
  app.require_subcommand(1);

  std::string config_path, quad_path, out_dir;
  std::uint64_t seed = 42;
  double tol = 0.0;
  auto* seed_opt = app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--config", config_path, "experiment config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "directory for the JSON report and CSV tables");
  auto* tol_opt = app.add_option("--tol", tol, "refinement tolerance");
  app.add_option("--quad", quad_path, "quadrature spec overrides (JSON)")->check(CLI::ExistingFile);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "print only the summary line");
  app.fallthrough();

  for (const std::string& verb : xlab::verbs()) app.add_subcommand(verb, "run the " + verb + " experiment");

  CLI11_PARSE(app, argc, argv);
  const std::string verb = app.get_subcommands().front()->get_name();

  try {
    xlab::ExperimentConfig c = config_path.empty() ? xlab::ExperimentConfig{} : xlab::config_from_json(read_json(config_path));
    // flags win over the config file
    if (seed_opt->count()) c.seed = seed;
    if (tol_opt->count()) c.tol = tol;
    if (!quad_path.empty()) c.quad = quad::spec_from_json(read_json(quad_path), c.quad.value_or(quad::QuadratureSpec{}));
    if (!out_dir.empty()) c.out_dir = out_dir;

    const xlab::Report r = xlab::run(verb, c);
    if (!quiet && c.out_dir.empty()) std::cout << r.to_json().dump(2) << '\n';
    int failed = 0;
    for (const auto& ch : r.checks) failed += !ch.pass;
    if (!quiet)
      for (const auto& ch : r.checks)
        if (!ch.pass) std::cerr << "FAIL " << ch.name << ": error " << ch.error << " > " << ch.tolerance << '\n';
    std::cerr << verb << ": " << r.checks.size() - failed << "/" << r.checks.size() << " checks pass\n";
    return failed == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << verb << ": error: " << e.what() << '\n';
    return 2;
  }
}
