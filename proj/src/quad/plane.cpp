#include "fcalc/quad/plane.hpp"

#include "fcalc/quad/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

namespace fcalc::quad {

namespace {

double safe_product(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * b;
}

// Bernstein-ellipse model of the relative Gauss error on a panel of width
// beta * y whose nearest singularity sits a distance y below it.
double panel_error_model(double beta, int q) {
  const double a = 2.0 / beta;
  return std::pow(a + std::sqrt(1.0 + a * a), -2.0 * q);
}

struct Rect {
  double x0, x1, y0, y1;
  bool contains(cplx s) const { return s.real() >= x0 && s.real() <= x1 && s.imag() >= y0 && s.imag() <= y1; }
  double distance(cplx s) const {
    const double dx = std::max({x0 - s.real(), 0.0, s.real() - x1});
    const double dy = std::max({y0 - s.imag(), 0.0, s.imag() - y1});
    return std::hypot(dx, dy);
  }
  double max_side() const { return std::max(x1 - x0, y1 - y0); }
  double min_side() const { return std::min(x1 - x0, y1 - y0); }
};

struct NodeList {
  std::vector<cplx> z;
  std::vector<double> w;
};

void tensor_nodes(const Rect& r, const GaussRule& g, NodeList& out) {
  const double hx = 0.5 * (r.x1 - r.x0), hy = 0.5 * (r.y1 - r.y0);
  const double mx = 0.5 * (r.x0 + r.x1), my = 0.5 * (r.y0 + r.y1);
  const std::size_t q = g.nodes.size();
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t a = 0; a < q; ++a) {
      out.z.emplace_back(mx + hx * g.nodes[a], my + hy * g.nodes[i]);
      out.w.push_back(hx * hy * g.weights[a] * g.weights[i]);
    }
}

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

// Duffy map of the triangle (s, a, b) onto the unit square; the Jacobian
// vanishes linearly at s and cancels a 1/|z - s| singularity.
void duffy_triangle(cplx s, cplx a, cplx b, const GaussRule& g, NodeList& out) {
  const double area2 = std::abs(cross(a - s, b - a));
  if (area2 == 0.0) return;
  const std::size_t q = g.nodes.size();
  for (std::size_t i = 0; i < q; ++i) {
    const double u = 0.5 * (1.0 + g.nodes[i]);
    for (std::size_t k = 0; k < q; ++k) {
      const double v = 0.5 * (1.0 + g.nodes[k]);
      out.z.push_back(s + u * ((a - s) + v * (b - a)));
      out.w.push_back(0.25 * g.weights[i] * g.weights[k] * u * area2);
    }
  }
}

void rect_nodes(const Rect& r, const GaussRule& g, const std::vector<cplx>& sing, int depth, NodeList& out);

// r has the singular point s as one of its corners
void corner_rect(const Rect& r, cplx s, const GaussRule& g, const std::vector<cplx>& sing, int depth,
                 NodeList& out) {
  const double w = r.x1 - r.x0, h = r.y1 - r.y0;
  if (w <= 0.0 || h <= 0.0) return;
  const bool left = s.real() == r.x0, bottom = s.imag() == r.y0;
  if (std::max(w, h) > 2.0 * std::min(w, h)) {
    const double m = std::min(w, h);
    Rect sq = r, rest = r;
    if (w > h) {
      if (left) { sq.x1 = r.x0 + m; rest.x0 = sq.x1; }
      else { sq.x0 = r.x1 - m; rest.x1 = sq.x0; }
    } else {
      if (bottom) { sq.y1 = r.y0 + m; rest.y0 = sq.y1; }
      else { sq.y0 = r.y1 - m; rest.y1 = sq.y0; }
    }
    corner_rect(sq, s, g, sing, depth, out);
    rect_nodes(rest, g, sing, depth + 1, out);
    return;
  }
  const double xo = left ? r.x1 : r.x0, yo = bottom ? r.y1 : r.y0;
  const cplx u(xo, s.imag()), o(xo, yo), v(s.real(), yo);
  duffy_triangle(s, u, o, g, out);
  duffy_triangle(s, o, v, g, out);
}

void rect_nodes(const Rect& r, const GaussRule& g, const std::vector<cplx>& sing, int depth, NodeList& out) {
  constexpr int kMaxDepth = 30;
  if (depth < kMaxDepth) {
    for (const cplx s : sing)
      if (r.contains(s)) {
        corner_rect({r.x0, s.real(), r.y0, s.imag()}, s, g, sing, depth, out);
        corner_rect({s.real(), r.x1, r.y0, s.imag()}, s, g, sing, depth, out);
        corner_rect({r.x0, s.real(), s.imag(), r.y1}, s, g, sing, depth, out);
        corner_rect({s.real(), r.x1, s.imag(), r.y1}, s, g, sing, depth, out);
        return;
      }
    for (const cplx s : sing)
      if (r.distance(s) < r.max_side()) {
        const double mx = 0.5 * (r.x0 + r.x1), my = 0.5 * (r.y0 + r.y1);
        rect_nodes({r.x0, mx, r.y0, my}, g, sing, depth + 1, out);
        rect_nodes({mx, r.x1, r.y0, my}, g, sing, depth + 1, out);
        rect_nodes({r.x0, mx, my, r.y1}, g, sing, depth + 1, out);
        rect_nodes({mx, r.x1, my, r.y1}, g, sing, depth + 1, out);
        return;
      }
  }
  tensor_nodes(r, g, out);
}

bool near_singular(const Rect& r, const std::vector<cplx>& sing) {
  for (const cplx s : sing)
    if (r.contains(s) || r.distance(s) < r.max_side()) return true;
  return false;
}

struct LayerSums {
  Matrix fine, coarse;
  long nodes = 0;
};

Matrix layer_rule(const WeightField& wf, const MatrixField& mf, const Layer& layer,
                  const GaussRule& g, const std::vector<cplx>& sing, long& nodes) {
  const Index n = mf.dim();
  const int np = layer.panels;
  const std::size_t q = g.nodes.size();
  const std::vector<double>& xb = layer.xb;
  const double hy = 0.5 * (layer.y_hi - layer.y_lo), my = 0.5 * (layer.y_hi + layer.y_lo);

  std::vector<double> xs(static_cast<std::size_t>(np) * q);
  for (int p = 0; p < np; ++p)
    for (std::size_t a = 0; a < q; ++a)
      xs[p * q + a] = xb[p] + (xb[p + 1] - xb[p]) * 0.5 * (1.0 + g.nodes[a]);
  std::vector<double> ys(q);
  for (std::size_t i = 0; i < q; ++i) ys[i] = layer.side * (my + hy * g.nodes[i]);

  // rows of constant Im z, batched through the weight field
  std::vector<cplx> w(q * xs.size());
  wf.weight_rows(xs, ys, w);

  PairwiseSum sum;
  std::vector<cplx> pz(q * q), pw(q * q);
  NodeList special;
  for (int p = 0; p < np; ++p) {
    const double px0 = xb[p], px1 = xb[p + 1];
    Rect r{px0, px1, layer.side > 0 ? layer.y_lo : -layer.y_hi, layer.side > 0 ? layer.y_hi : -layer.y_lo};
    Matrix acc = Matrix::Zero(n, n);
    if (!sing.empty() && near_singular(r, sing)) {
      special.z.clear();
      special.w.clear();
      rect_nodes(r, g, sing, 0, special);
      std::vector<cplx> sw(special.z.size());
      for (std::size_t k = 0; k < special.z.size(); ++k) sw[k] = wf.weight(special.z[k]) * special.w[k];
      mf.accumulate(special.z, sw, acc);
      nodes += static_cast<long>(special.z.size());
    } else {
      const double jac = 0.5 * (px1 - px0) * hy;
      for (std::size_t i = 0; i < q; ++i)
        for (std::size_t a = 0; a < q; ++a) {
          const std::size_t k = i * q + a;
          pz[k] = cplx(xs[p * q + a], ys[i]);
          pw[k] = w[i * xs.size() + p * q + a] * (jac * g.weights[a] * g.weights[i]);
        }
      mf.accumulate(pz, pw, acc);
      nodes += static_cast<long>(q * q);
    }
    sum.add(std::move(acc));
  }
  return sum.result(n, n);
}

}  // namespace

void PairwiseSum::add(Matrix m) {
  stack_.push_back(std::move(m));
  level_.push_back(0);
  while (level_.size() >= 2 && level_[level_.size() - 1] == level_[level_.size() - 2]) {
    Matrix top = std::move(stack_.back());
    stack_.pop_back();
    level_.pop_back();
    stack_.back() += top;
    ++level_.back();
  }
}

Matrix PairwiseSum::result(Index rows, Index cols) const {
  if (stack_.empty()) return Matrix::Zero(rows, cols);
  Matrix acc = stack_.back();
  for (std::size_t k = stack_.size() - 1; k-- > 0;) acc = stack_[k] + acc;
  return acc;
}

long Layout::node_count(int q) const {
  long n = 0;
  for (const Layer& l : layers)
    if (!l.skipped) n += static_cast<long>(l.panels) * q * q;
  return n;
}

Layout plan_layout(const WeightField& w, const MatrixField& m, const QuadratureSpec& spec) {
  spec.validate();
  Layout lay;
  const WeightRegion r = w.region();
  lay.x0 = std::max(r.x0, r.core_x0 - spec.x_margin);
  lay.x1 = std::min(r.x1, r.core_x1 + spec.x_margin);
  if (w.is_zero() || !(lay.x1 > lay.x0)) return lay;

  const double y_top = std::min(spec.y_max, r.y_max);
  const double y_stop = std::max(spec.y_min, r.y_floor);

  auto both_sides = [&](double x0, double x1, double lo, double hi) {
    return m.norm_integral_bound(x0, x1, lo, hi) + m.norm_integral_bound(x0, x1, -hi, -lo);
  };
  if (lay.x0 > r.x0)
    lay.neglected_clip += safe_product(w.bound(0.0, r.y_max), both_sides(r.x0, lay.x0, 0.0, r.y_max)) / pi;
  if (lay.x1 < r.x1)
    lay.neglected_clip += safe_product(w.bound(0.0, r.y_max), both_sides(lay.x1, r.x1, 0.0, r.y_max)) / pi;
  if (y_top <= y_stop) {
    lay.neglected_floor = safe_product(w.bound(0.0, y_top), both_sides(lay.x0, lay.x1, 0.0, y_top)) / pi;
    return lay;
  }
  const double floor_w = w.bound(0.0, y_stop);
  if (floor_w > 0.0) {
    double a = both_sides(lay.x0, lay.x1, 0.0, y_stop);
    if (!(a < WeightField::kInf)) {
      // no closed-form route through the axis: dyadic strips via the growth bound
      a = 0.0;
      double hi = y_stop;
      for (int k = 0; k < 60; ++k, hi *= 0.5) a += both_sides(lay.x0, lay.x1, 0.5 * hi, hi);
    }
    lay.neglected_floor = floor_w * a / pi;
  }

  const int needed = static_cast<int>(std::ceil(std::log(y_top / y_stop) / std::log(spec.ratio) - 1e-9));
  const int nl = std::max(spec.ny, std::max(needed, 1));
  const double rr = std::pow(y_top / y_stop, 1.0 / nl);
  const double X = lay.x1 - lay.x0;
  const int j_max = static_cast<int>(std::floor(std::log2(spec.max_aspect / spec.aspect) + 1e-12));
  constexpr int kJMin = -6;

  // x segments between the weight's breakpoints
  std::vector<double> xcuts = {lay.x0};
  for (double b : w.x_breakpoints())
    if (b > lay.x0 && b < lay.x1) xcuts.push_back(b);
  std::sort(xcuts.begin(), xcuts.end());
  xcuts.push_back(lay.x1);

  // geometric levels, split at the weight's non-analytic levels
  std::vector<std::pair<double, double>> bands;
  for (int k = 0; k < nl; ++k) {
    const double hi = y_top / std::pow(rr, k);
    const double lo = k == nl - 1 ? y_stop : hi / rr;
    std::vector<double> cuts = w.y_breakpoints(lo, hi);
    std::sort(cuts.begin(), cuts.end(), std::greater<>());
    double top = hi;
    for (double c : cuts)
      if (c < top && c > lo) {
        bands.emplace_back(c, top);
        top = c;
      }
    bands.emplace_back(lo, top);
  }
  const double layer_tol = 0.1 * spec.tolerance / (2.0 * static_cast<double>(bands.size()));
  if (spec.subdivide > 1) {
    std::vector<std::pair<double, double>> split;
    for (const auto& [lo, hi] : bands) {
      const double step = std::pow(hi / lo, 1.0 / spec.subdivide);
      double top = hi;
      for (int k = 1; k < spec.subdivide; ++k) {
        const double c = hi / std::pow(step, k);
        split.emplace_back(c, top);
        top = c;
      }
      split.emplace_back(lo, top);
    }
    bands = std::move(split);
  }

  for (int side : {1, -1})
    for (const auto& [lo, hi] : bands) {
      Layer l;
      l.side = side;
      l.y_hi = hi;
      l.y_lo = lo;
      const double wb = w.bound(l.y_lo, l.y_hi);
      const double ab = side > 0 ? m.norm_integral_bound(lay.x0, lay.x1, l.y_lo, l.y_hi)
                                 : m.norm_integral_bound(lay.x0, lay.x1, -l.y_hi, -l.y_lo);
      l.bound = safe_product(wb, ab) / pi;
      if (l.bound <= spec.skip_tolerance) {
        l.skipped = true;
        lay.neglected_skip += l.bound;
        lay.layers.push_back(l);
        continue;
      }
      int j = j_max;
      for (; j > kJMin; --j)
        if (l.bound * panel_error_model(spec.aspect * std::ldexp(1.0, j), spec.q) <= layer_tol) break;
      l.beta = spec.aspect * std::ldexp(1.0, j);
      const double width0 = std::min(X / spec.nx, l.beta * l.y_lo);
      l.xb.push_back(lay.x0);
      for (std::size_t s = 0; s + 1 < xcuts.size(); ++s) {
        const double len = xcuts[s + 1] - xcuts[s];
        const double width = std::min(width0, w.x_scale(xcuts[s], xcuts[s + 1]));
        const double cnt = std::max(1.0, std::ceil(len / width - 1e-9)) * spec.subdivide;
        if (cnt > 1e8) throw ConvergenceError("quadrature layout: panel count overflow", l.bound);
        const int c = static_cast<int>(cnt);
        for (int p = 1; p <= c; ++p) l.xb.push_back(p == c ? xcuts[s + 1] : xcuts[s] + len * p / c);
      }
      l.panels = static_cast<int>(l.xb.size()) - 1;
      lay.layers.push_back(l);
    }
  return lay;
}

PlaneIntegral integrate_plane(const WeightField& w, const MatrixField& m, const QuadratureSpec& spec) {
  const Layout lay = plan_layout(w, m, spec);
  const Index n = m.dim();
  PlaneIntegral out;
  out.spec = spec;
  out.neglected = lay.neglected();
  if (lay.node_count(spec.q) > spec.node_budget)
    throw ConvergenceError("quadrature layout exceeds the node budget", out.neglected);

  const GaussRule& gf = gauss_legendre(spec.q);
  const GaussRule& gc = gauss_legendre(spec.coarse_q());
  const std::vector<cplx> sing = m.singular_points();

  std::vector<std::size_t> active;
  for (std::size_t k = 0; k < lay.layers.size(); ++k) {
    if (lay.layers[k].skipped) ++out.skipped_layers;
    else active.push_back(k);
  }
  out.layers = static_cast<int>(active.size());

  std::vector<LayerSums> sums(active.size());
  auto work = [&](std::size_t t, std::size_t stride) {
    for (std::size_t a = t; a < active.size(); a += stride) {
      const Layer& l = lay.layers[active[a]];
      long nodes = 0, scratch = 0;
      sums[a].fine = layer_rule(w, m, l, gf, sing, nodes);
      sums[a].coarse = layer_rule(w, m, l, gc, sing, scratch);
      sums[a].nodes = nodes;
    }
  };
  const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(spec.threads), active.size());
  if (nthreads <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(work, t, nthreads);
    for (auto& th : pool) th.join();
  }

  PairwiseSum fine, coarse;
  for (auto& s : sums) {
    out.node_count += s.nodes;
    fine.add(std::move(s.fine));
    coarse.add(std::move(s.coarse));
  }
  out.value = m.finalize(fine.result(n, n));
  out.coarse = m.finalize(coarse.result(n, n));
  out.error_estimate = norm2(out.value - out.coarse);
  out.trace.push_back({0, out.node_count, out.error_estimate});
  return out;
}

std::vector<Node> layout_nodes(const Layout& lay, int q) {
  const GaussRule& g = gauss_legendre(q);
  std::vector<Node> nodes;
  nodes.reserve(static_cast<std::size_t>(lay.node_count(q)));
  for (const Layer& l : lay.layers) {
    if (l.skipped) continue;
    const double hy = 0.5 * (l.y_hi - l.y_lo), my = 0.5 * (l.y_hi + l.y_lo);
    for (int i = 0; i < q; ++i) {
      const double y = l.side * (my + hy * g.nodes[i]);
      for (int p = 0; p < l.panels; ++p) {
        const double hx = l.xb[p + 1] - l.xb[p];
        for (int a = 0; a < q; ++a)
          nodes.push_back({cplx(l.xb[p] + 0.5 * hx * (1.0 + g.nodes[a]), y),
                           0.5 * hx * hy * g.weights[a] * g.weights[i]});
      }
    }
  }
  return nodes;
}

std::vector<cplx> node_weights(const WeightField& w, const std::vector<Node>& nodes) {
  std::vector<cplx> out(nodes.size());
  std::vector<double> xs;
  std::size_t k = 0;
  while (k < nodes.size()) {
    const double y = nodes[k].z.imag();
    std::size_t e = k;
    xs.clear();
    while (e < nodes.size() && nodes[e].z.imag() == y) xs.push_back(nodes[e++].z.real());
    w.weight_row(xs, y, std::span<cplx>(out.data() + k, e - k));
    k = e;
  }
  return out;
}

PlaneIntegral integrate_annulus(const std::function<cplx(cplx)>& w, const MatrixField& m,
                                const AnnulusRule& rule) {
  if (!(rule.r_out > rule.r_in) || rule.r_in < 0.0 || rule.angles < 4 || rule.q < 3 || rule.radial_panels < 1)
    throw DomainError("annulus rule: bad parameters");
  const Index n = m.dim();
  auto run = [&](int q, int angles, long& nodes) {
    const GaussRule& g = gauss_legendre(q);
    const double hr = (rule.r_out - rule.r_in) / rule.radial_panels;
    const double dt = 2.0 * pi / angles;
    PairwiseSum sum;
    std::vector<cplx> z(static_cast<std::size_t>(angles)), wz(static_cast<std::size_t>(angles));
    for (int p = 0; p < rule.radial_panels; ++p)
      for (int i = 0; i < q; ++i) {
        const double r = rule.r_in + hr * (p + 0.5 * (1.0 + g.nodes[i]));
        const double base = 0.5 * hr * g.weights[i] * r * dt;
        for (int k = 0; k < angles; ++k) {
          z[k] = rule.center + std::polar(r, dt * k);
          wz[k] = w(z[k]) * base;
        }
        Matrix acc = Matrix::Zero(n, n);
        m.accumulate(z, wz, acc);
        sum.add(std::move(acc));
        nodes += angles;
      }
    return m.finalize(sum.result(n, n));
  };
  PlaneIntegral out;
  long scratch = 0;
  out.value = run(rule.q, rule.angles, out.node_count);
  out.coarse = run(rule.q - 2, rule.angles / 2, scratch);
  out.error_estimate = norm2(out.value - out.coarse);
  out.layers = rule.radial_panels;
  out.trace.push_back({0, out.node_count, out.error_estimate});
  return out;
}

PlaneIntegral refine_until(const QuadTask& task, const QuadratureSpec& start, double tol, long budget) {
  std::vector<TraceRow> trace;
  QuadratureSpec s = start;
  long spent = 0;
  double achieved = WeightField::kInf;
  for (int level = 0; level <= start.max_refinements; ++level) {
    s.node_budget = std::min(s.node_budget, std::max(1L, budget - spent));
    PlaneIntegral r;
    try {
      r = task(s);
    } catch (const RefinementFailure&) {
      throw;
    } catch (const ConvergenceError& e) {
      throw RefinementFailure(std::string("refinement stopped: ") + e.what(), achieved, trace);
    }
    spent += r.node_count;
    achieved = r.error_estimate + r.neglected;
    trace.push_back({level, r.node_count, r.error_estimate});
    if (achieved <= tol) {
      r.trace = trace;
      return r;
    }
    if (spent >= budget) break;
    s = s.refined();
  }
  throw RefinementFailure("quadrature did not reach the requested tolerance", achieved, trace);
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  os << "level,nodes,error_estimate\n";
  os.precision(17);
  for (const TraceRow& t : trace) os << t.level << ',' << t.nodes << ',' << t.error_estimate << '\n';
}

}  // namespace fcalc::quad
