#pragma once

// Named experiments over the calculus, each producing a report of checks.

#include "fcalc/calculus/calculus.hpp"

#include <json.hpp>

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fcalc::xlab {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

struct ExperimentConfig {
  std::string experiment;
  json params = json::object();  // experiment-specific keys, see each run_*
  std::uint64_t seed = 42;
  std::optional<double> tol;               // refinement target override
  std::optional<quad::QuadratureSpec> quad;  // per-plane spec override
  std::string out_dir;                     // empty: nothing written

  /// params[key] if present, else fallback.
  template <class T>
  T get(const std::string& key, T fallback) const {
    return params.contains(key) ? params.at(key).get<T>() : fallback;
  }
  /// Tolerance of check `name`, overridable through params.tolerances.
  double tolerance(const std::string& name, double fallback) const;
  calculus::CalculusOptions options() const;
  json resolved() const;
};

/// Reads {experiment, seed, quad, tol, ...}; everything else lands in params.
ExperimentConfig config_from_json(const json& j);

struct Check {
  std::string name;
  json computed;
  json oracle;
  double error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double runtime = 0.0;  // seconds
  long nodes = 0;
  std::string mode = "oracle";  // or "consistency-only"
};

/// A table written as CSV next to the report.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Report {
  std::string experiment;
  json config;
  std::deque<Check> checks;  // stable references while checks are added
  std::vector<Table> tables;
  json summary = json::object();

  bool all_pass() const;
  const Check* find(const std::string& name) const;
  /// Checks whose name starts with prefix.
  std::vector<const Check*> with_prefix(const std::string& prefix) const;
  json to_json() const;  // checks sorted by name
};

/// Adds a check with pass = (error <= tolerance).
Check& add_check(Report& r, std::string name, double error, double tolerance, json computed = {}, json oracle = {});

void write_csv(std::ostream& os, const Table& t);
/// <out>/<experiment>.json plus <out>/<experiment>_<table>.csv.
void write_report(const Report& r, const std::string& out_dir);

Report run_apply(const ExperimentConfig& c);
Report run_oracle_suite(const ExperimentConfig& c);
Report run_perturbation(const ExperimentConfig& c);
Report run_commutator_bound(const ExperimentConfig& c);
Report run_cayley_check(const ExperimentConfig& c);
Report run_recovery(const ExperimentConfig& c);
Report run_composition(const ExperimentConfig& c);
Report run_support_scan(const ExperimentConfig& c);
Report run_convergence(const ExperimentConfig& c);

/// CLI verb -> experiment; throws DomainError for unknown names.
Report run(const std::string& verb, const ExperimentConfig& c);
std::vector<std::string> verbs();

// Building blocks shared by the experiments.

/// A bump scaled to 1 at its center.
SmoothFunction unit_bump(double center, double halfwidth);
/// The 2x2 pair A = diag(1, 0), A_eps = U^{-1} A U with U the rotation by -eps.
std::pair<Matrix, Matrix> example_pair(double eps);
/// x -> g(u(x)) with u = 1 - 2/(1 + x^2), the real part of the Cayley image,
/// and g a bump in u ending at u_end < 1. Its circle pullback has wide ramps
/// in the angle, so its Laurent coefficients fall off quickly.
SmoothFunction circle_friendly(double u_end = 0.8, double u_start = -1.9);

/// Operator sources: inline JSON or a path to a JSON file.
Matrix load_matrix(const json& j);
std::vector<Matrix> load_matrices(const json& j);

}  // namespace fcalc::xlab
