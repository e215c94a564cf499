#pragma once

// Jets of the two elementary C-infinity profiles everything else is built on:
//   bump(t)  = exp(-1/(1-t^2)) on |t|<1
//   step(s)  = h(1-s) / (h(1-s) + h(s)),  h(u) = exp(-1/u) for u>0
// step is 1 for s<=0 and 0 for s>=1.

#include <span>

namespace fcalc::mollifier {

/// d^n/dt^n bump(t) for n = 0..out.size()-1.
void bump_jet(double t, std::span<double> out);

/// d^n/ds^n step(s) for n = 0..out.size()-1.
void step_jet(double s, std::span<double> out);

double bump(double t);
double step(double s);

/// Even cutoff: 1 on |t|<=1/2, 0 on |t|>=1.
double chi(double t);
double chi_prime(double t);
void chi_jet(double t, std::span<double> out);

/// sup|chi'| (attained inside (1/2, 1)); used for a-priori bounds.
double chi_prime_sup();

}  // namespace fcalc::mollifier
