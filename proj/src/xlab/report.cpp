#include "fcalc/xlab/xlab.hpp"

#include "fcalc/linop/json_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace fcalc::xlab {

double ExperimentConfig::tolerance(const std::string& name, double fallback) const {
  if (params.contains("tolerances") && params["tolerances"].contains(name))
    return params["tolerances"][name].get<double>();
  return fallback;
}

calculus::CalculusOptions ExperimentConfig::options() const {
  calculus::CalculusOptions o;
  if (params.contains("method")) o.extension.method = ahx::method_from_string(params["method"].get<std::string>());
  if (quad) o.spec = *quad;
  if (tol) o.tolerance = *tol;
  return o;
}

json ExperimentConfig::resolved() const {
  json j = params;
  j["experiment"] = experiment;
  j["seed"] = seed;
  if (tol) j["tol"] = *tol;
  if (quad) j["quad"] = quad::to_json(*quad);
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw DomainError("config must be a JSON object");
  ExperimentConfig c;
  for (const auto& [k, v] : j.items()) {
    if (k == "experiment") c.experiment = v.get<std::string>();
    else if (k == "seed") c.seed = v.get<std::uint64_t>();
    else if (k == "tol") c.tol = v.get<double>();
    else if (k == "quad") c.quad = quad::spec_from_json(v);
    else if (k == "out") c.out_dir = v.get<std::string>();
    else c.params[k] = v;
  }
  return c;
}

namespace {

json inline_or_file(const json& j) {
  if (!j.is_string()) return j;
  std::ifstream is(j.get<std::string>());
  if (!is) throw DomainError("cannot read operator file '" + j.get<std::string>() + "'");
  return json::parse(is);
}

}  // namespace

Matrix load_matrix(const json& j) { return io::matrix_from_json(inline_or_file(j)); }

std::vector<Matrix> load_matrices(const json& j) {
  std::vector<Matrix> out;
  for (const json& m : inline_or_file(j)) out.push_back(load_matrix(m));
  return out;
}

bool Report::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* Report::find(const std::string& name) const {
  for (const Check& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<const Check*> Report::with_prefix(const std::string& prefix) const {
  std::vector<const Check*> out;
  for (const Check& c : checks)
    if (c.name.rfind(prefix, 0) == 0) out.push_back(&c);
  return out;
}

json Report::to_json() const {
  std::vector<const Check*> sorted;
  for (const Check& c : checks) sorted.push_back(&c);
  std::stable_sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->name < b->name; });
  json cs = json::array();
  int failed = 0;
  for (const Check* c : sorted) {
    failed += !c->pass;
    cs.push_back({{"name", c->name},
                  {"computed", c->computed},
                  {"oracle", c->oracle},
                  {"error", c->error},
                  {"tolerance", c->tolerance},
                  {"pass", c->pass},
                  {"runtime", c->runtime},
                  {"nodes", c->nodes},
                  {"mode", c->mode}});
  }
  json tabs = json::array();
  for (const Table& t : tables) tabs.push_back(t.name);
  return {{"format_version", kFormatVersion},
          {"experiment", experiment},
          {"config", config},
          {"pass", failed == 0},
          {"failed", failed},
          {"checks", cs},
          {"tables", tabs},
          {"summary", summary}};
}

Check& add_check(Report& r, std::string name, double error, double tolerance, json computed, json oracle) {
  Check c;
  c.name = std::move(name);
  c.error = error;
  c.tolerance = tolerance;
  // NaN errors fail
  c.pass = error <= tolerance;
  c.computed = std::move(computed);
  c.oracle = std::move(oracle);
  r.checks.push_back(std::move(c));
  return r.checks.back();
}

void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  os.precision(17);
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
}

void write_report(const Report& r, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::ofstream js(fs::path(out_dir) / (r.experiment + ".json"));
  js << r.to_json().dump(2) << '\n';
  for (const Table& t : r.tables) {
    std::ofstream cs(fs::path(out_dir) / (r.experiment + "_" + t.name + ".csv"));
    write_csv(cs, t);
  }
  if (!js) throw Error("failed to write report to " + out_dir);
}

}  // namespace fcalc::xlab
