#pragma once

#include "relstoch/kg_waves.hpp"
#include "relstoch/vec3.hpp"

namespace relstoch {

/// Forward drift b+ and scalar diffusion coefficient sigma^2 of the fixed-frame SDE.
struct DriftDiffusion {
  Vec3 b_plus;
  double sigma2 = 0.0;
};

/// Current drift v and osmotic drift u; b+ = v + u.
struct CurrentOsmotic {
  Vec3 v;
  Vec3 u;
};

/// Everything the integrator needs at one point, from a single field evaluation.
struct LocalCoefficients {
  Vec3 b_plus;
  double sigma2 = 0.0;
  double rate = 0.0;  // d<M>/dt = 1 / (-(1/mc^2) dS/dt)
};

/// Throws NonAdmissiblePoint when dS/dt >= 0 (or is not finite).
LocalCoefficients local_coefficients(const FieldJet& jet, const PhysicalConstants& k);

DriftDiffusion forward_coefficients(const WaveField& field, const Vec3& x, double t);
CurrentOsmotic current_and_osmotic(const WaveField& field, const Vec3& x, double t);

/// Proper-time rate mc^2 / (-dS/dt), in (0, 1] on admissible fields. Debug builds
/// assert that it equals sqrt(1 - v.v/c^2) to 1e-10.
double proper_time_rate(const WaveField& field, const Vec3& x, double t);

}  // namespace relstoch
