#include "fcalc/ahx/extension.hpp"

#include "fcalc/funcalg/mollifier.hpp"

#include <algorithm>
#include <cmath>

namespace fcalc::ahx {

namespace {

class TaylorExtension final : public Extension1D {
 public:
  TaylorExtension(const SmoothFunction& f, const TaylorOptions& opt) : f_(f), n_(opt.order) {
    if (n_ < 0) throw DomainError("extend_taylor: negative order");
    if (f.support().empty()) throw DomainError("extend_taylor: empty support");
    if (!f.support().bounded()) throw DomainError("extend_taylor: support must be bounded");
    if (f.max_order() != kUnboundedOrder && f.max_order() < n_ + 1)
      throw DomainError("extend_taylor: order " + std::to_string(n_) + " needs derivatives to " +
                        std::to_string(n_ + 1) + ", function provides " + std::to_string(f.max_order()));
    const Interval hull = f.support().hull();
    s0_ = hull.lo;
    s1_ = hull.hi;
    sup_.assign(static_cast<std::size_t>(n_ + 2), 0.0);
    std::vector<cplx> j(static_cast<std::size_t>(n_ + 2));
    for (int i = 0; i <= opt.sup_samples; ++i) {
      f_.jet(s0_ + (s1_ - s0_) * i / opt.sup_samples, j);
      for (int k = 0; k <= n_ + 1; ++k) sup_[k] = std::max(sup_[k], std::abs(j[k]));
    }
    for (double& s : sup_) s *= 1.25;
    fact_.assign(static_cast<std::size_t>(n_ + 2), 1.0);
    for (int k = 1; k <= n_ + 1; ++k) fact_[k] = fact_[k - 1] * k;

    // Keep every jet term S_k h^k / k! below S_0: wider strips make the
    // truncated series a sum of huge cancelling terms.
    double h = std::min(0.5 * (s1_ - s0_), 1.0);
    if (sup_[0] > 0.0)
      for (int k = 1; k <= n_ + 1; ++k)
        if (sup_[k] > 0.0) h = std::min(h, 0.6 * std::pow(fact_[k] * sup_[0] / sup_[k], 1.0 / k));
    h_ = opt.h > 0.0 ? opt.h : h;
    if (!(h_ > 0.0)) throw DomainError("extend_taylor: strip half-width must be positive");
  }

  Method method() const override { return Method::taylor; }
  double decay_order() const override { return n_; }

  quad::WeightRegion region() const override {
    quad::WeightRegion r;
    r.x0 = s0_;
    r.x1 = s1_;
    r.y_max = h_;
    r.core_x0 = s0_;
    r.core_x1 = s1_;
    return r;
  }
  double x_scale(double, double) const override { return 0.01 * (s1_ - s0_); }
  // chi'(y/h) lives on [h/2, h]: eight geometric pieces there
  std::vector<double> y_breakpoints(double lo, double hi) const override {
    std::vector<double> out;
    for (int s = 0; s <= 8; ++s) {
      const double y = 0.5 * h_ * std::pow(2.0, s / 8.0);
      if (y > lo * 1.001 && y < hi * 0.999) out.push_back(y);
    }
    return out;
  }

  cplx value(cplx z) const override {
    const double y = z.imag();
    const double th = mollifier::chi(y / h_);
    if (th == 0.0) return 0.0;
    std::vector<cplx> j(static_cast<std::size_t>(n_ + 1));
    f_.jet(z.real(), j);
    cplx s = 0.0, p = 1.0;
    for (int k = 0; k <= n_; ++k) {
      s += j[k] * p / fact_[k];
      p *= cplx(0.0, y);
    }
    return th * s;
  }

  cplx dbar(cplx z) const override {
    const double y = z.imag();
    const double t = y / h_;
    if (std::abs(t) >= 1.0) return 0.0;
    std::vector<cplx> j(static_cast<std::size_t>(n_ + 2));
    f_.jet(z.real(), j);
    const cplx iy(0.0, y);
    cplx out = 0.5 * j[n_ + 1] * std::pow(iy, n_) / fact_[n_] * mollifier::chi(t);
    const double dth = mollifier::chi_prime(t);
    if (dth != 0.0) {
      cplx s = 0.0, p = 1.0;
      for (int k = 0; k <= n_; ++k) {
        s += j[k] * p / fact_[k];
        p *= iy;
      }
      out += cplx(0.0, 0.5 / h_) * dth * s;
    }
    return out;
  }

  double bound(double y_lo, double y_hi) const override {
    if (y_lo >= h_) return 0.0;
    y_hi = std::min(y_hi, h_);
    double b = 0.5 * sup_[n_ + 1] * std::pow(y_hi, n_) / fact_[n_];
    if (y_hi > 0.5 * h_) {
      double s = 0.0;
      for (int k = 0; k <= n_; ++k) s += sup_[k] * std::pow(y_hi, k) / fact_[k];
      b += 0.5 / h_ * mollifier::chi_prime_sup() * s;
    }
    return b;
  }

  nlohmann::json diagnostics() const override {
    return {{"method", "taylor"}, {"order", n_}, {"strip", h_}, {"sup_top_derivative", sup_[n_ + 1]}};
  }

 private:
  SmoothFunction f_;
  int n_;
  double s0_ = 0.0, s1_ = 0.0, h_ = 1.0;
  std::vector<double> sup_, fact_;
};

}  // namespace

Extension1DPtr extend_taylor(const SmoothFunction& f, const TaylorOptions& opt) {
  return std::make_shared<TaylorExtension>(f, opt);
}

}  // namespace fcalc::ahx
