#include "relstoch/kinematics.hpp"

#include <cassert>
#include <cmath>
#include <string>

#include "relstoch/errors.hpp"

namespace relstoch {

namespace {

// -(1/mc^2) dS/dt, the common denominator of every drift.
double energy_factor(const FieldJet& jet, const PhysicalConstants& k) {
  const double e = -jet.dt_S / (k.mass * k.c * k.c);
  if (!(e > 0.0) || !std::isfinite(e))
    throw NonAdmissiblePoint("dS/dt = " + std::to_string(jet.dt_S) + " is not negative");
  return e;
}

}  // namespace

LocalCoefficients local_coefficients(const FieldJet& jet, const PhysicalConstants& k) {
  const double e = energy_factor(jet, k);
  LocalCoefficients lc;
  lc.b_plus = (jet.grad_S / k.mass + (k.hbar / k.mass) * jet.grad_R) / e;
  lc.sigma2 = k.hbar / (-jet.dt_S / (k.c * k.c));
  lc.rate = 1.0 / e;
  return lc;
}

DriftDiffusion forward_coefficients(const WaveField& field, const Vec3& x, double t) {
  const LocalCoefficients lc = local_coefficients(field.evaluate(x, t), field.constants());
  return DriftDiffusion{lc.b_plus, lc.sigma2};
}

CurrentOsmotic current_and_osmotic(const WaveField& field, const Vec3& x, double t) {
  const PhysicalConstants& k = field.constants();
  const FieldJet jet = field.evaluate(x, t);
  const double e = energy_factor(jet, k);
  return CurrentOsmotic{(jet.grad_S / k.mass) / e, ((k.hbar / k.mass) * jet.grad_R) / e};
}

double proper_time_rate(const WaveField& field, const Vec3& x, double t) {
  const PhysicalConstants& k = field.constants();
  const FieldJet jet = field.evaluate(x, t);
  const double rate = 1.0 / energy_factor(jet, k);
#ifndef NDEBUG
  const Vec3 v = (jet.grad_S / k.mass) * rate;
  const double lorentz = std::sqrt(1.0 - dot(v, v) / (k.c * k.c));
  assert(std::abs(rate - lorentz) <= 1e-10 && "proper-time identity violated");
#endif
  return rate;
}

}  // namespace relstoch
