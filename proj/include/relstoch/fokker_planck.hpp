#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "relstoch/kg_waves.hpp"
#include "relstoch/vec3.hpp"

namespace relstoch {

/// Uniform periodic grid on [0, length) with cell-centred unknowns.
struct Grid1D {
  double length = 1.0;
  std::size_t n_cells = 128;
  double dt_pde = 1e-4;

  double dx() const { return length / static_cast<double>(n_cells); }
  double center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * dx(); }
};

/// Cell values of a density on a Grid1D.
struct DensityField {
  std::vector<double> values;
  double dx = 0.0;

  double mass() const;
  static DensityField sample(const Grid1D& grid, const std::function<double(double)>& fn);
};

struct FpOptions {
  /// Multiplies sigma^2; 0 gives pure advection.
  double diffusion_scale = 1.0;
  /// Transverse coordinates of the line x = (s, y, z) the field is restricted to.
  double y = 0.0;
  double z = 0.0;
  double t0 = 0.0;
};

struct FpResult {
  DensityField density;
  std::size_t steps = 0;
  double dt_used = 0.0;
  double min_value = 0.0;
  /// Some value fell below -1e-12 during the run.
  bool negativity_flagged = false;
  double mass_drift = 0.0;  // |mass(t) - mass(0)| / mass(0)
};

/// d rho/dt + d/dx (b rho) = (1/2) d^2/dx^2 (sigma^2 rho) along axis 0 with the
/// forward coefficients of `field`, explicit Euler in time, conservative flux
/// form. Face values are central when the cell Peclet number |b| dx / (sigma^2/2)
/// is at most 2 and upwind otherwise. The step is t_final / ceil(t_final / dt_pde).
///
/// Throws CflViolation when dt > 0.4 dx^2 / max sigma^2 or |b| dt / dx > 1.
FpResult evolve_fp(const WaveField& field, const DensityField& init, const Grid1D& grid,
                   double t_final, const FpOptions& opt = {});

/// Largest dt_pde satisfying both stability bounds for the coefficients of a
/// plane wave, times `safety`.
double stable_fp_dt(const WaveField& field, const Grid1D& grid, double diffusion_scale = 1.0,
                    double safety = 0.9);

/// sum_k N(x + k L; mean, var) truncated where the tail is below 1e-17.
double wrapped_gaussian(double x, double length, double mean, double var);

/// sum |a - b| dx.
double l1_distance(const DensityField& a, const DensityField& b);

struct ContinuityOptions {
  /// Multiplies div j; anything but 1 is a negative control.
  double j_scale = 1.0;
};

/// sup over the grid of |d rho/dt + div j| from the analytic field derivatives.
double continuity_residual(const WaveField& field, const SpaceTimeGrid& grid,
                           const ContinuityOptions& opt = {});

}  // namespace relstoch
