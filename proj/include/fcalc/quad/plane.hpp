#pragma once

#include "fcalc/quad/fields.hpp"
#include "fcalc/quad/spec.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace fcalc::quad {

struct Layer {
  int side = 1;  // +1 upper half-plane, -1 lower
  double y_lo = 0.0, y_hi = 0.0;  // |Im z| range
  int panels = 0;
  std::vector<double> xb;  // panel boundaries, panels + 1 entries
  double beta = 0.0;   // panel width / y_lo
  double bound = 0.0;  // a-priori bound of the layer's contribution (with the 1/pi factor)
  bool skipped = false;
};

struct Layout {
  double x0 = 0.0, x1 = 0.0;
  std::vector<Layer> layers;
  double neglected_skip = 0.0;   // sum of bounds of skipped layers
  double neglected_floor = 0.0;  // |Im z| below the lowest layer
  double neglected_clip = 0.0;   // x outside the clipped interval
  double neglected() const { return neglected_skip + neglected_floor + neglected_clip; }
  long node_count(int q) const;
};

Layout plan_layout(const WeightField& w, const MatrixField& m, const QuadratureSpec& spec);

struct TraceRow {
  int level = 0;
  long nodes = 0;
  double error_estimate = 0.0;
};

struct PlaneIntegral {
  Matrix value;                 // raw integral of w * M (no -1/pi factor)
  Matrix coarse;                // same panels, Gauss order q - 2
  double error_estimate = 0.0;  // ||value - coarse||
  double neglected = 0.0;       // bound of what the layout leaves out (with 1/pi)
  long node_count = 0;
  int layers = 0, skipped_layers = 0;
  QuadratureSpec spec;
  std::vector<TraceRow> trace;
};

PlaneIntegral integrate_plane(const WeightField& w, const MatrixField& m, const QuadratureSpec& spec);

struct Node {
  cplx z;
  double w;  // Gauss weight times Jacobian
};
/// All nodes of the non-skipped layers for Gauss order q. Within a layer the
/// nodes come row by row (constant Im z), rows in a fixed order.
std::vector<Node> layout_nodes(const Layout& layout, int q);
/// weight(z) at the nodes, evaluated row-wise.
std::vector<cplx> node_weights(const WeightField& w, const std::vector<Node>& nodes);

/// Deterministic pairwise-tree sum of a stream of matrices.
class PairwiseSum {
 public:
  void add(Matrix m);
  Matrix result(Index rows, Index cols) const;

 private:
  std::vector<Matrix> stack_;
  std::vector<int> level_;
};

// Polar rule on the annulus r_in <= |z - center| <= r_out.
struct AnnulusRule {
  cplx center;
  double r_in = 0.0, r_out = 0.0;
  int radial_panels = 16;
  int q = 8;
  int angles = 192;
};

/// Integral of w(z) M(z) over the annulus; the estimate compares against
/// order q - 2 in the radius and half the angles.
PlaneIntegral integrate_annulus(const std::function<cplx(cplx)>& w, const MatrixField& m,
                                const AnnulusRule& rule);

struct MultiTerm {
  cplx weight = 1.0;
  std::vector<const WeightField*> factors;  // one per variable
};

enum class MultiPath { factorized, brute_force };

/// Sum over terms of weight * I_{order[0]} * I_{order[1]} * ..., where I_j is
/// the plane integral of (factor j) * Ms[j]. The brute-force path forms the
/// same sum over the full product node set (m = 2 only).
PlaneIntegral integrate_multi(const std::vector<MultiTerm>& terms, const std::vector<const MatrixField*>& ms,
                              const std::vector<int>& order, const std::vector<QuadratureSpec>& specs,
                              MultiPath path = MultiPath::factorized);

using QuadTask = std::function<PlaneIntegral(const QuadratureSpec&)>;

class RefinementFailure : public ConvergenceError {
 public:
  RefinementFailure(const std::string& what, double achieved, std::vector<TraceRow> trace)
      : ConvergenceError(what, achieved), trace_(std::move(trace)) {}
  const std::vector<TraceRow>& trace() const { return trace_; }

 private:
  std::vector<TraceRow> trace_;
};

/// Refines from `start` until error_estimate + neglected <= tol; throws
/// ConvergenceError when max_refinements or the node budget runs out.
PlaneIntegral refine_until(const QuadTask& task, const QuadratureSpec& start, double tol, long budget);

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace);

}  // namespace fcalc::quad
