#include "fcalc/quad/plane.hpp"

#include <algorithm>
#include <map>

namespace fcalc::quad {

namespace {

void check_order(const std::vector<int>& order, std::size_t m) {
  if (order.size() != m) throw DomainError("integrate_multi: order must list every variable once");
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t j = 0; j < m; ++j)
    if (sorted[j] != static_cast<int>(j)) throw DomainError("integrate_multi: order is not a permutation");
}

const QuadratureSpec& spec_for(const std::vector<QuadratureSpec>& specs, std::size_t j) {
  return specs.size() == 1 ? specs.front() : specs.at(j);
}

PlaneIntegral brute_force(const std::vector<MultiTerm>& terms, const std::vector<const MatrixField*>& ms,
                          const std::vector<int>& order, const std::vector<QuadratureSpec>& specs) {
  if (ms.size() != 2) throw DomainError("integrate_multi: the brute-force path handles m = 2 only");
  const Index n = ms[0]->dim();
  PlaneIntegral out;
  out.spec = spec_for(specs, 0);
  PairwiseSum fine_terms, coarse_terms;
  for (const MultiTerm& t : terms) {
    Matrix results[2];
    for (int rule = 0; rule < 2; ++rule) {
      std::vector<Node> nodes[2];
      std::vector<cplx> wts[2];
      std::vector<Matrix> mats[2];
      for (int j = 0; j < 2; ++j) {
        const QuadratureSpec& s = spec_for(specs, j);
        const Layout lay = plan_layout(*t.factors[j], *ms[j], s);
        if (rule == 0) out.neglected += lay.neglected();
        nodes[j] = layout_nodes(lay, rule == 0 ? s.q : s.coarse_q());
        wts[j] = node_weights(*t.factors[j], nodes[j]);
        mats[j].reserve(nodes[j].size());
        for (std::size_t k = 0; k < nodes[j].size(); ++k) {
          wts[j][k] *= nodes[j][k].w;
          mats[j].push_back(ms[j]->value(nodes[j][k].z));
        }
      }
      const int a = order[0], b = order[1];
      PairwiseSum sum;
      for (std::size_t i = 0; i < nodes[a].size(); ++i)
        for (std::size_t k = 0; k < nodes[b].size(); ++k)
          sum.add((wts[a][i] * wts[b][k]) * (mats[a][i] * mats[b][k]));
      if (rule == 0) out.node_count += static_cast<long>(nodes[a].size() * nodes[b].size());
      results[rule] = sum.result(n, n);
    }
    fine_terms.add(t.weight * results[0]);
    coarse_terms.add(t.weight * results[1]);
  }
  out.value = fine_terms.result(n, n);
  out.coarse = coarse_terms.result(n, n);
  out.error_estimate = norm2(out.value - out.coarse);
  out.trace.push_back({0, out.node_count, out.error_estimate});
  return out;
}

}  // namespace

PlaneIntegral integrate_multi(const std::vector<MultiTerm>& terms, const std::vector<const MatrixField*>& ms,
                              const std::vector<int>& order, const std::vector<QuadratureSpec>& specs,
                              MultiPath path) {
  const std::size_t m = ms.size();
  if (m == 0 || m > 3) throw DomainError("integrate_multi: need 1 <= m <= 3");
  if (specs.size() != 1 && specs.size() != m) throw DomainError("integrate_multi: one spec or one per variable");
  check_order(order, m);
  const Index n = ms[0]->dim();
  for (const auto* f : ms)
    if (f->dim() != n) throw DomainError("integrate_multi: matrix fields differ in dimension");
  for (const MultiTerm& t : terms)
    if (t.factors.size() != m) throw DomainError("integrate_multi: term arity mismatch");

  if (path == MultiPath::brute_force) return brute_force(terms, ms, order, specs);

  // one plane integral per distinct (factor, variable)
  std::map<std::pair<const WeightField*, std::size_t>, PlaneIntegral> cache;
  PlaneIntegral out;
  out.spec = spec_for(specs, 0);
  long budget = out.spec.node_budget;
  auto single = [&](const WeightField* f, std::size_t j) -> const PlaneIntegral& {
    auto key = std::make_pair(f, j);
    auto it = cache.find(key);
    if (it == cache.end()) {
      it = cache.emplace(key, integrate_plane(*f, *ms[j], spec_for(specs, j))).first;
      out.node_count += it->second.node_count;
      out.layers += it->second.layers;
      out.skipped_layers += it->second.skipped_layers;
      if (out.node_count > budget) throw ConvergenceError("integrate_multi: node budget exceeded", 0.0);
    }
    return it->second;
  };

  PairwiseSum fine, coarse;
  for (const MultiTerm& t : terms) {
    Matrix cf = Matrix::Identity(n, n), cc = Matrix::Identity(n, n);
    std::vector<double> norms(m), negl(m);
    bool first = true;
    for (const int j : order) {
      const PlaneIntegral& p = single(t.factors[j], static_cast<std::size_t>(j));
      if (first) {
        cf = p.value;
        cc = p.coarse;
        first = false;
      } else {
        cf = cf * p.value;
        cc = cc * p.coarse;
      }
      norms[j] = norm2(p.value) / pi;
      negl[j] = p.neglected;
    }
    // first-order propagation of each factor's neglected part through the chain
    double tn = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double prod = negl[j];
      for (std::size_t k = 0; k < m; ++k)
        if (k != j) prod *= norms[k] + negl[k];
      tn += prod;
    }
    out.neglected += std::abs(t.weight) * tn;
    if (m == 1 && t.weight == cplx(1.0)) {
      fine.add(cf);
      coarse.add(cc);
    } else {
      fine.add(t.weight * cf);
      coarse.add(t.weight * cc);
    }
  }
  out.value = fine.result(n, n);
  out.coarse = coarse.result(n, n);
  out.error_estimate = norm2(out.value - out.coarse);
  out.trace.push_back({0, out.node_count, out.error_estimate});
  return out;
}

}  // namespace fcalc::quad
