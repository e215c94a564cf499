#include "fcalc/ahx/extension.hpp"

#include "fcalc/funcalg/mollifier.hpp"
#include "fcalc/quad/gauss.hpp"
#include "fcalc/simd/phase_kernels.hpp"

#include <algorithm>
#include <cmath>

namespace fcalc::ahx {

namespace {

struct Samples {
  std::vector<double> x;
  std::vector<cplx> c;  // Gauss weight * f(x)
};

Samples support_nodes(const SmoothFunction& f, double xi_max, int order) {
  const auto& g = quad::gauss_legendre(order);
  Samples s;
  const IntervalSet supp = f.support();
  for (const Interval& part : supp.parts()) {
    const double w = part.hi - part.lo;
    if (!(w > 0.0)) continue;
    const double hp = std::min(w / 64.0, 4.0 / xi_max);
    const int np = static_cast<int>(std::ceil(w / hp));
    const double h = w / np;
    for (int p = 0; p < np; ++p)
      for (int a = 0; a < order; ++a) {
        const double x = part.lo + h * (p + 0.5 * (1.0 + g.nodes[a]));
        s.x.push_back(x);
        s.c.push_back(0.5 * h * g.weights[a] * f(x));
      }
  }
  return s;
}

std::vector<cplx> transform(const Samples& s, long K, double dxi) {
  std::vector<cplx> out(static_cast<std::size_t>(2 * K + 1), cplx(0.0));
  simd::kernels().phase_accumulate(s.x, s.c, -1.0, -static_cast<double>(K) * dxi, dxi, out);
  return out;
}

double bracket(double xi) { return std::sqrt(1.0 + xi * xi); }

class FourierExtension final : public Extension1D {
 public:
  FourierExtension(const SmoothFunction& f, const FourierOptions& opt) : opt_(opt) {
    if (f.support().empty()) throw DomainError("extend_fourier: empty support");
    if (!f.support().bounded()) throw DomainError("extend_fourier: support must be bounded");
    const Interval h = f.support().hull();
    s0_ = h.lo;
    s1_ = h.hi;
    const double wf = s1_ - s0_;
    const double wpsi = wf + 2.0 * opt.outer_margin;
    if (!(opt.outer_margin > opt.inner_margin) || opt.inner_margin < 0.0)
      throw DomainError("extend_fourier: need 0 <= inner margin < outer margin");
    dxi_ = opt.dxi > 0.0 ? opt.dxi : std::min(2.0, 2.0 * pi / (wpsi + wf));
    psi_ = SmoothFunction::plateau(s0_ - opt.inner_margin, s1_ + opt.inner_margin,
                                   opt.outer_margin - opt.inner_margin);

    // restriction probe points
    std::vector<double> probe(128);
    std::vector<cplx> exact(probe.size());
    double fsup = 0.0;
    for (std::size_t i = 0; i < probe.size(); ++i) {
      probe[i] = s0_ + wf * (i + 0.5) / probe.size();
      exact[i] = f(probe[i]);
      fsup = std::max(fsup, std::abs(exact[i]));
    }
    const double thr = opt.restriction_tol * std::max(1.0, fsup);

    double xi_max = opt.xi_max;
    for (;;) {
      K_ = std::max<long>(1, std::lround(xi_max / dxi_));
      fhat_ = transform(support_nodes(f, K_ * dxi_, opt.gauss_order), K_, dxi_);
      std::vector<cplx> coef(fhat_.size()), fd(probe.size());
      for (std::size_t k = 0; k < fhat_.size(); ++k) coef[k] = fhat_[k] * (dxi_ / (2.0 * pi));
      simd::kernels().phase_sum(probe, -K_ * dxi_, dxi_, coef, fd, false);
      restriction_ = 0.0;
      for (std::size_t i = 0; i < probe.size(); ++i) restriction_ = std::max(restriction_, std::abs(fd[i] - exact[i]));
      if (restriction_ <= thr || !opt.auto_extend || xi_max >= opt.xi_cap) break;
      xi_max = std::min(opt.xi_cap, 1.25 * xi_max);
      ++extensions_;
    }
    const long tail_from = K_ - std::max<long>(1, K_ / 20);
    for (long k = tail_from; k <= K_; ++k)
      tail_ = std::max({tail_, std::abs(fhat_[K_ + k]), std::abs(fhat_[K_ - k])});
    y_band_ = 0.5 / bracket(K_ * dxi_);
    {
      double peak = 0.0;
      for (const cplx v : fhat_) peak = std::max(peak, std::abs(v));
      long k_sig = 0;
      for (long k = 0; k <= K_; ++k)
        if (std::max(std::abs(fhat_[K_ + k]), std::abs(fhat_[K_ - k])) >= kFineRel * peak) k_sig = k;
      fine_floor_ = std::max(y_band_, 0.5 / bracket(k_sig * dxi_));
    }

    for (int i = 0; i <= 2000; ++i) {
      const double x = s0_ - opt.outer_margin + (opt.outer_margin - opt.inner_margin) * i / 2000.0;
      psi_prime_sup_ = std::max(psi_prime_sup_, std::abs(psi_.eval(x, 1)));
    }
    psi_prime_sup_ *= 1.01;
  }

  Method method() const override { return Method::fourier; }
  double decay_order() const override { return 1e300; }
  double restriction_error() const override { return restriction_; }

  quad::WeightRegion region() const override {
    quad::WeightRegion r;
    r.x0 = s0_ - opt_.outer_margin;
    r.x1 = s1_ + opt_.outer_margin;
    r.y_max = 1.0;
    r.y_floor = y_band_;
    r.core_x0 = s0_;
    r.core_x1 = s1_;
    return r;
  }

  // the ramps of psi need resolving; inside them the band term sets the scale
  double x_scale(double x0, double x1) const override {
    if (x0 >= s0_ - opt_.inner_margin && x1 <= s1_ + opt_.inner_margin) return kInf;
    return 0.125 * (opt_.outer_margin - opt_.inner_margin);
  }

  std::vector<double> x_breakpoints() const override { return {s0_ - opt_.inner_margin, s1_ + opt_.inner_margin}; }

  static constexpr double kDenseRatio = 0.8408964152537145;  // 2^(-1/4)
  static constexpr int kSparseSplit = 8;  // pieces per octave
  static constexpr double kFineRel = 1e-5;  // relative transform size below which layers stay coarse

  // Levels where chi(<xi_k> y) has its flat joints. Only sparse frequencies
  // get cuts: once consecutive levels are within 10% the sum over k smooths the
  // joints out, but the kernel tails still oscillate in y, so the dense range
  // gets four layers per octave. Gaps between sparse cuts get eight pieces per octave.
  std::vector<double> y_breakpoints(double lo, double hi) const override {
    std::vector<double> levels = {1.0};
    for (long k = 0; k <= K_; ++k) {
      const double b = bracket(k * dxi_), next = bracket((k + 1) * dxi_);
      if (next <= 1.1 * b) break;
      levels.push_back(1.0 / b);
      levels.push_back(0.5 / b);
    }
    std::sort(levels.begin(), levels.end(), std::greater<>());
    std::vector<double> cuts;
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
      const double a = levels[i], c = levels[i + 1];
      if (a < c * 1.01) continue;
      const int pieces = std::max(1, static_cast<int>(std::ceil(kSparseSplit * std::log2(a / c) - 1e-9)));
      for (int s = 0; s < pieces; ++s) cuts.push_back(a * std::pow(c / a, s / static_cast<double>(pieces)));
    }
    // dense region: fixed geometric ratio down to where the transform is negligible
    for (double y = levels.back(); y > fine_floor_; y *= kDenseRatio) cuts.push_back(y);
    std::vector<double> kept;
    for (double y : cuts)
      if (y > lo * 1.001 && y < hi * 0.999) kept.push_back(y);
    return kept;
  }

  cplx value(cplx z) const override {
    const double x = z.real();
    const cplx p = psi_(x);
    if (p == cplx(0.0)) return 0.0;
    cplx out = 0.0;
    check_row(std::span<const double>(&x, 1), z.imag(), std::span<cplx>(&out, 1));
    return p * out;
  }

  cplx dbar(cplx z) const override {
    const double x = z.real();
    cplx out = 0.0;
    weight_row(std::span<const double>(&x, 1), z.imag(), std::span<cplx>(&out, 1));
    return out;
  }

  void weight_row(std::span<const double> xs, double y, std::span<cplx> out) const override {
    weight_rows(xs, std::span<const double>(&y, 1), out);
  }

  void weight_rows(std::span<const double> xs, std::span<const double> ys, std::span<cplx> out) const override {
    std::fill(out.begin(), out.end(), cplx(0.0));
    // psi and psi' depend on x only: split the points once for all rows
    std::vector<double> inner, ramp;
    std::vector<std::size_t> inner_at, ramp_at;
    std::vector<double> psi_vals, dpsi_vals;
    inner.reserve(xs.size());
    inner_at.reserve(xs.size());
    psi_vals.reserve(xs.size());
    const double a = s0_ - opt_.inner_margin, b = s1_ + opt_.inner_margin;
    const double ramp_w = opt_.outer_margin - opt_.inner_margin;
    double jet[2];
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const double x = xs[j];
      if (x >= a && x <= b) {
        inner.push_back(x);
        inner_at.push_back(j);
        psi_vals.push_back(1.0);
        continue;
      }
      const double u = (x < a ? a - x : x - b) / ramp_w;
      if (u >= 1.0) continue;
      mollifier::step_jet(u, std::span<double>(jet, 2));
      if (jet[0] != 0.0) {
        inner.push_back(x);
        inner_at.push_back(j);
        psi_vals.push_back(jet[0]);
      }
      const double d = jet[1] * (x < a ? -1.0 : 1.0) / ramp_w;
      if (d != 0.0) {
        ramp.push_back(x);
        ramp_at.push_back(j);
        dpsi_vals.push_back(d);
      }
    }
    std::vector<cplx> t(std::max(inner.size(), ramp.size()));
    for (std::size_t i = 0; i < ys.size(); ++i) {
      const double y = ys[i];
      if (std::abs(y) >= 1.0) continue;
      cplx* row = out.data() + i * xs.size();
      if (!inner.empty() && dchi_row(inner, y, std::span<cplx>(t.data(), inner.size())))
        for (std::size_t j = 0; j < inner.size(); ++j) row[inner_at[j]] += psi_vals[j] * t[j];
      if (!ramp.empty()) {
        check_row(ramp, y, std::span<cplx>(t.data(), ramp.size()));
        for (std::size_t j = 0; j < ramp.size(); ++j) row[ramp_at[j]] += 0.5 * dpsi_vals[j] * t[j];
      }
    }
  }

  double bound(double y_lo, double y_hi) const override {
    if (y_lo >= 1.0) return 0.0;
    y_hi = std::min(y_hi, 1.0);
    // chi' band: 1/2 <= <xi>|y| <= 1 for some |y| in [y_lo, y_hi]
    double band = 0.0;
    const double b_lo = 0.5 / y_hi, b_hi = y_lo > 0.0 ? 1.0 / y_lo : 1e300;
    for (long k = -K_; k <= K_; ++k) {
      const double xi = k * dxi_, b = bracket(xi);
      if (b < b_lo || b > b_hi) continue;
      band += std::abs(fhat_[K_ + k]) * std::exp(std::min(std::abs(xi) * y_hi, 1.0)) * b;
    }
    band *= dxi_ / (2.0 * pi) * 0.5 * mollifier::chi_prime_sup();

    // psi' term: sampled on the ramps, doubled
    const double y_eff = y_lo > 0.0 ? y_lo : 0.5 * y_hi;
    const double sp = std::min(0.01, 0.5 * y_eff);
    std::vector<double> xs;
    const double ramp = opt_.outer_margin - opt_.inner_margin;
    const int per = std::max(2, static_cast<int>(std::ceil(ramp / sp)));
    for (int side = 0; side < 2; ++side) {
      const double a = side == 0 ? s0_ - opt_.outer_margin : s1_ + opt_.inner_margin;
      for (int i = 0; i <= per; ++i) xs.push_back(a + ramp * i / per);
    }
    std::vector<double> ys = {y_lo, std::sqrt(std::max(y_lo, 1e-300) * y_hi), y_hi};
    if (y_lo == 0.0) ys = {0.0, 0.5 * y_hi, y_hi};
    double fsup = 0.0;
    std::vector<cplx> t(xs.size());
    for (double y : ys)
      for (double sgn : {1.0, -1.0}) {
        check_row(xs, sgn * y, t);
        for (const cplx v : t) fsup = std::max(fsup, std::abs(v));
      }
    return band + 0.5 * psi_prime_sup_ * 2.0 * fsup;
  }

  nlohmann::json diagnostics() const override {
    return {{"method", "fourier"},
            {"xi_max", K_ * dxi_},
            {"dxi", dxi_},
            {"frequencies", 2 * K_ + 1},
            {"xi_extensions", extensions_},
            {"restriction_error", restriction_},
            {"tail_max", tail_},
            {"zero_strip", y_band_}};
  }

 private:
  // k range with <xi_k>|y| < 1
  long kmax_for(double ay) const {
    if (ay >= 1.0) return -1;
    if (ay <= 0.0) return K_;
    const double xi = std::sqrt(1.0 / (ay * ay) - 1.0);
    return std::min<long>(K_, static_cast<long>(std::floor(xi / dxi_)));
  }

  // f-check(x + i y) = (dxi/2pi) sum e^{i z xi} chi(<xi> y) f^(xi)
  void check_row(std::span<const double> xs, double y, std::span<cplx> out) const {
    const long km = kmax_for(std::abs(y));
    if (km < 0) {
      std::fill(out.begin(), out.end(), cplx(0.0));
      return;
    }
    band_sum(xs, 0, km, out, [&](double xi) {
      return dxi_ / (2.0 * pi) * std::exp(-y * xi) * mollifier::chi(bracket(xi) * y);
    });
  }

  // (dxi/2pi) sum e^{i z xi} <xi> (i/2) chi'(<xi> y) f^(xi); false when the band is empty
  bool dchi_row(std::span<const double> xs, double y, std::span<cplx> out) const {
    const double ay = std::abs(y);
    // chi' vanishes below 1/2: nothing in the band on or right next to the axis
    if (ay * bracket(K_ * dxi_) < 0.5) return false;
    const long km = kmax_for(ay);
    if (km < 0) return false;
    long ka = 0;
    if (0.5 / ay > 1.0) ka = static_cast<long>(std::ceil(std::sqrt(0.25 / (ay * ay) - 1.0) / dxi_));
    if (ka > km) return false;
    band_sum(xs, ka, km, out, [&](double xi) {
      const double b = bracket(xi);
      return dxi_ / (2.0 * pi) * std::exp(-y * xi) * b * 0.5 * mollifier::chi_prime(b * y);
    });
    for (auto& v : out) v *= I;
    return true;
  }

  // sum over ka <= |k| <= km of fhat_k e^{i x xi_k} scale(xi_k); +k and -k share one phase chain
  template <class Scale>
  void band_sum(std::span<const double> xs, long ka, long km, std::span<cplx> out, Scale scale) const {
    const std::size_t n = static_cast<std::size_t>(km - ka + 1);
    std::vector<cplx> pos(n), neg(n);
    for (long k = ka; k <= km; ++k) {
      const double xi = k * dxi_;
      pos[k - ka] = fhat_[K_ + k] * scale(xi);
      neg[k - ka] = k == 0 ? cplx(0.0) : fhat_[K_ - k] * scale(-xi);
    }
    simd::kernels().phase_sum_sym(xs, ka * dxi_, dxi_, pos, neg, out, false);
  }

  FourierOptions opt_;
  double s0_ = 0.0, s1_ = 0.0, dxi_ = 0.5;
  long K_ = 0;
  std::vector<cplx> fhat_;
  SmoothFunction psi_;
  double restriction_ = 0.0, tail_ = 0.0, y_band_ = 0.0, fine_floor_ = 0.0, psi_prime_sup_ = 0.0;
  int extensions_ = 0;
};

}  // namespace

std::vector<cplx> fourier_samples(const SmoothFunction& f, double xi_max, double dxi, int gauss_order) {
  if (!(dxi > 0.0) || !(xi_max > 0.0)) throw DomainError("fourier_samples: bad grid");
  if (!f.support().bounded()) throw DomainError("fourier_samples: support must be bounded");
  const long K = std::lround(xi_max / dxi);
  if (f.support().empty()) return std::vector<cplx>(static_cast<std::size_t>(2 * K + 1), cplx(0.0));
  return transform(support_nodes(f, K * dxi, gauss_order), K, dxi);
}

Extension1DPtr extend_fourier(const SmoothFunction& f, const FourierOptions& opt) {
  return std::make_shared<FourierExtension>(f, opt);
}

}  // namespace fcalc::ahx
