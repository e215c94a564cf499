// One PASS/FAIL line per acceptance criterion. Tolerances are pinned here and
// every check is re-judged against them, not against the experiment defaults.

#include "fcalc/xlab/xlab.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

using namespace fcalc;
using xlab::Check;
using xlab::Report;

namespace {

std::map<std::string, Report> cache;

const Report& report(const std::string& verb) {
  auto it = cache.find(verb);
  if (it != cache.end()) return it->second;
  xlab::ExperimentConfig c;
  c.experiment = verb;
  return cache.emplace(verb, xlab::run(verb, c)).first->second;
}

struct Verdict {
  bool ok = true;
  int checks = 0;
  double worst = 0.0;  // worst error / tolerance over bounded checks
  std::string why;
  std::string detail;

  void note(const std::string& s) { detail += (detail.empty() ? "" : " ") + s; }

  void fail(const std::string& s) {
    if (ok) why = s;
    ok = false;
  }
};

// every check under prefix must have error <= tol
void bounded(Verdict& v, const Report& r, const std::string& prefix, double tol, int at_least_n = 1) {
  const auto cs = r.with_prefix(prefix);
  if (static_cast<int>(cs.size()) < at_least_n) {
    v.fail(prefix + ": expected " + std::to_string(at_least_n) + " checks, found " + std::to_string(cs.size()));
    return;
  }
  for (const Check* c : cs) {
    ++v.checks;
    if (!(c->error <= tol)) v.fail(c->name + " error " + std::to_string(c->error) + " > " + std::to_string(tol));
    if (tol > 0.0 && std::isfinite(c->error)) v.worst = std::max(v.worst, c->error / tol);
  }
}

// computed value of a single check must be >= bound
void threshold(Verdict& v, const Report& r, const std::string& name, double bound) {
  const Check* c = r.find(name);
  ++v.checks;
  if (!c || !c->computed.is_number()) {
    v.fail(name + " missing");
    return;
  }
  const double x = c->computed.get<double>();
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s=%.3g", name.c_str(), x);
  v.note(buf);
  if (!(x >= bound)) v.fail(name + " = " + std::to_string(x) + " < " + std::to_string(bound));
}

void runtime_below(Verdict& v, const Report& r, const std::string& prefix, double seconds) {
  double slowest = 0.0;
  for (const Check* c : r.with_prefix(prefix)) {
    slowest = std::max(slowest, c->runtime);
    if (!(c->runtime < seconds)) v.fail(c->name + " took " + std::to_string(c->runtime) + " s");
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "slowest case %.2fs", slowest);
  v.note(buf);
}

Verdict criterion(int k) {
  Verdict v;
  switch (k) {
    case 1: {
      const Report& r = report("oracle-suite");
      bounded(v, r, "scalar/", 1e-7, 10);
      const Check* t = r.find("scalar_runtime");
      if (!t || !(t->computed.get<double>() < 2.0)) v.fail("scalar cases exceed 2 s");
      if (t) v.note("total " + std::to_string(t->computed.get<double>()).substr(0, 4) + "s");
      break;
    }
    case 2: {
      const Report& r = report("oracle-suite");
      bounded(v, r, "eigen/", 1e-5, 2);
      runtime_below(v, r, "eigen/", 10.0);
      break;
    }
    case 3: bounded(v, report("oracle-suite"), "independence/", 1e-5); break;
    case 4: {
      const Report& r = report("convergence");
      threshold(v, r, "decay/fourier", 4.0);
      threshold(v, r, "decay/taylor", 4.0);
      break;
    }
    case 5: bounded(v, report("oracle-suite"), "tensor/", 1e-5); break;
    case 6: bounded(v, report("oracle-suite"), "diagonal/", 1e-5); break;
    case 7: {
      const Report& r = report("perturb");
      bounded(v, r, "entry21/eps=0.1", 1e-4);
      bounded(v, r, "entry22/eps=0.1", 1e-4);
      bounded(v, r, "peak/", 1e-4, 4);
      bounded(v, r, "peak_count", 0.0);
      bounded(v, r, "floor", 1e-6);
      bounded(v, r, "log_slope", 0.1);
      break;
    }
    case 8: {
      const Report& r = report("commutator");
      bounded(v, r, "ratio_stability", 5.0);
      bounded(v, r, "resolvent_identity", 1e-10);
      bounded(v, r, "commuting_pair", 1e-6);
      break;
    }
    case 9: bounded(v, report("cayley"), "line_vs_circle/", 1e-5); break;
    case 10: {
      const Report& r = report("apply");
      bounded(v, r, "e_exact", 1e-14);
      bounded(v, r, "e_integral", 1e-4);
      bounded(v, r, "e_multiplicativity/", 1e-6, 2);
      break;
    }
    case 11: {
      const Report& r = report("recover");
      bounded(v, r, "exact", 1e-10);
      bounded(v, r, "integral", 1e-5);
      bounded(v, r, "z_independence/exact", 1e-8);
      break;
    }
    case 12: {
      const Report& r = report("compose");
      bounded(v, r, "lhs_vs_rhs/", 1e-4);
      bounded(v, r, "lhs_vs_oracle/", 1e-4);
      bounded(v, r, "rhs_vs_oracle/", 1e-4);
      break;
    }
    case 13: {
      const Report& r = report("support-scan");
      bounded(v, r, "product_law", 1e-5);
      bounded(v, r, "peaks", 0.0);
      bounded(v, r, "floor", 1e-6);
      bounded(v, r, "joint_spectral_mapping", 1e-8);
      break;
    }
    case 14: {
      const Report& r = report("convergence");
      bounded(v, r, "cauchy_green/", 1e-6, 2);
      threshold(v, r, "convergence_slope/cauchy_green", 4.0);
      bounded(v, r, "bit_identical", 0.0);
      threshold(v, r, "honest_estimates", 0.95);
      break;
    }
    default: v.fail("unknown criterion");
  }
  return v;
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  int failed = 0;
  for (int k = 1; k <= 14; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criterion(k);
    } catch (const std::exception& e) {
      v.fail(std::string("threw: ") + e.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !v.ok;
    // s covers the experiments first used by this criterion
    std::printf("criterion %2d: %s  checks=%d worst=%.3g of tolerance  %s  [run %.1fs]%s%s\n", k,
                v.ok ? "PASS" : "FAIL", v.checks, v.worst, v.detail.c_str(), s, v.ok ? "" : "  ", v.why.c_str());
  }
  std::printf("%d/14 criteria pass\n", 14 - failed);
  return failed ? 1 : 0;
}
