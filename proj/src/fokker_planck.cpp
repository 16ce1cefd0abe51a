#include "relstoch/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "relstoch/errors.hpp"
#include "relstoch/kernels.hpp"
#include "relstoch/kinematics.hpp"

namespace relstoch {

double DensityField::mass() const { return kernels::sum(values) * dx; }

DensityField DensityField::sample(const Grid1D& grid, const std::function<double(double)>& fn) {
  DensityField d;
  d.dx = grid.dx();
  d.values.resize(grid.n_cells);
  for (std::size_t i = 0; i < grid.n_cells; ++i) d.values[i] = fn(grid.center(i));
  return d;
}

namespace {

struct CellCoefficients {
  std::vector<double> b;
  std::vector<double> s;  // sigma^2 * diffusion_scale
  double max_b = 0.0;
  double max_s = 0.0;
};

CellCoefficients cell_coefficients(const WaveField& field, const Grid1D& grid,
                                   const FpOptions& opt, double t) {
  CellCoefficients cc;
  const std::size_t n = grid.n_cells;
  cc.b.resize(n);
  cc.s.resize(n);
  if (field.has_constant_coefficients()) {
    const auto dd = forward_coefficients(field, Vec3{0.0, opt.y, opt.z}, t);
    std::fill(cc.b.begin(), cc.b.end(), dd.b_plus[0]);
    std::fill(cc.s.begin(), cc.s.end(), dd.sigma2 * opt.diffusion_scale);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const auto dd = forward_coefficients(field, Vec3{grid.center(i), opt.y, opt.z}, t);
      cc.b[i] = dd.b_plus[0];
      cc.s[i] = dd.sigma2 * opt.diffusion_scale;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    cc.max_b = std::max(cc.max_b, std::abs(cc.b[i]));
    cc.max_s = std::max(cc.max_s, cc.s[i]);
  }
  return cc;
}

void check_cfl(const CellCoefficients& cc, double dx, double dt) {
  if (cc.max_s > 0.0 && dt > 0.4 * dx * dx / cc.max_s) {
    std::ostringstream os;
    os << "diffusive CFL violated: dt = " << dt << " > " << 0.4 * dx * dx / cc.max_s;
    throw CflViolation(os.str());
  }
  if (cc.max_b * dt / dx > 1.0) {
    std::ostringstream os;
    os << "advective CFL violated: |b| dt / dx = " << cc.max_b * dt / dx;
    throw CflViolation(os.str());
  }
}

// Face i separates cell i-1 (periodic) from cell i; faces 0 and n coincide.
void face_weights(const CellCoefficients& cc, double dx, std::vector<double>& cl,
                  std::vector<double>& cr) {
  const std::size_t n = cc.b.size();
  cl.resize(n + 1);
  cr.resize(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t left = i == 0 ? n - 1 : i - 1;
    const double b = 0.5 * (cc.b[left] + cc.b[i]);
    const double s = 0.5 * (cc.s[left] + cc.s[i]);
    const double dl = cc.s[left] / (2.0 * dx);
    const double dr = cc.s[i] / (2.0 * dx);
    const bool central = s > 0.0 && std::abs(b) * dx / (0.5 * s) <= 2.0;
    if (central) {
      cl[i] = 0.5 * b + dl;
      cr[i] = 0.5 * b - dr;
    } else if (b >= 0.0) {
      cl[i] = b + dl;
      cr[i] = -dr;
    } else {
      cl[i] = dl;
      cr[i] = b - dr;
    }
  }
  cl[n] = cl[0];
  cr[n] = cr[0];
}

}  // namespace

FpResult evolve_fp(const WaveField& field, const DensityField& init, const Grid1D& grid,
                   double t_final, const FpOptions& opt) {
  const std::size_t n = grid.n_cells;
  if (n < 3) throw PreconditionError("evolve_fp: need at least 3 cells");
  if (init.values.size() != n) throw PreconditionError("evolve_fp: density does not match grid");
  if (!(grid.length > 0.0) || !(grid.dt_pde > 0.0) || !(t_final >= 0.0))
    throw PreconditionError("evolve_fp: invalid grid or horizon");
  if (!(opt.diffusion_scale >= 0.0)) throw PreconditionError("evolve_fp: negative diffusion scale");

  const double dx = grid.dx();
  const auto steps = static_cast<std::size_t>(std::ceil(t_final / grid.dt_pde - 1e-12));
  const double dt = steps == 0 ? 0.0 : t_final / static_cast<double>(steps);

  FpResult res;
  res.steps = steps;
  res.dt_used = dt;
  std::vector<double> rho = init.values;
  std::vector<double> next(n), ext(n + 2), face(n + 1), cl, cr;
  const double mass0 = kernels::sum(rho) * dx;
  res.min_value = *std::min_element(rho.begin(), rho.end());

  CellCoefficients cc = cell_coefficients(field, grid, opt, opt.t0);
  check_cfl(cc, dx, steps == 0 ? grid.dt_pde : dt);
  face_weights(cc, dx, cl, cr);
  const auto& kt = kernels::active();
  double t = opt.t0;
  for (std::size_t step = 0; step < steps; ++step) {
    if (!field.has_constant_coefficients() && step > 0) {
      cc = cell_coefficients(field, grid, opt, t);
      check_cfl(cc, dx, dt);
      face_weights(cc, dx, cl, cr);
    }
    ext[0] = rho[n - 1];
    std::copy(rho.begin(), rho.end(), ext.begin() + 1);
    ext[n + 1] = rho[0];
    kt.two_point_flux(face.data(), cl.data(), cr.data(), ext.data(), n + 1);
    kt.conservative_update(next.data(), rho.data(), face.data(), dt / dx, n);
    rho.swap(next);
    const double lo = *std::min_element(rho.begin(), rho.end());
    res.min_value = std::min(res.min_value, lo);
    if (!std::isfinite(lo)) throw NumericalBreakdown("evolve_fp: non-finite density");
    t = opt.t0 + static_cast<double>(step + 1) * dt;
  }
  res.negativity_flagged = res.min_value < -1e-12;
  res.density.dx = dx;
  res.density.values = std::move(rho);
  const double mass1 = res.density.mass();
  res.mass_drift = mass0 != 0.0 ? std::abs(mass1 - mass0) / std::abs(mass0) : std::abs(mass1);
  return res;
}

double stable_fp_dt(const WaveField& field, const Grid1D& grid, double diffusion_scale,
                    double safety) {
  FpOptions opt;
  opt.diffusion_scale = diffusion_scale;
  const CellCoefficients cc = cell_coefficients(field, grid, opt, 0.0);
  const double dx = grid.dx();
  double dt = std::numeric_limits<double>::infinity();
  if (cc.max_s > 0.0) dt = std::min(dt, 0.4 * dx * dx / cc.max_s);
  if (cc.max_b > 0.0) dt = std::min(dt, dx / cc.max_b);
  return dt * safety;
}

double wrapped_gaussian(double x, double length, double mean, double var) {
  if (!(var > 0.0) || !(length > 0.0)) throw PreconditionError("wrapped_gaussian: bad parameters");
  const double sd = std::sqrt(var);
  const auto reach = static_cast<long>(std::ceil(9.0 * sd / length)) + 1;
  const double norm = 1.0 / (sd * std::sqrt(2.0 * std::numbers::pi));
  double s = 0.0;
  for (long k = -reach; k <= reach; ++k) {
    const double d = x - mean + static_cast<double>(k) * length;
    s += std::exp(-0.5 * d * d / var);
  }
  return s * norm;
}

double l1_distance(const DensityField& a, const DensityField& b) {
  if (a.values.size() != b.values.size()) throw PreconditionError("l1_distance: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += std::abs(a.values[i] - b.values[i]);
  return s * a.dx;
}

double continuity_residual(const WaveField& field, const SpaceTimeGrid& grid,
                           const ContinuityOptions& opt) {
  const PhysicalConstants& k = field.constants();
  const double mc2 = k.mass * k.c * k.c;
  double worst = 0.0;
  grid.for_each([&](const Vec3& x, double t) {
    const FieldJet j = field.evaluate(x, t);
    const double w = j.modulus_sq();
    // rho = -w S_t / mc^2, j = w grad S / m, with w_t = 2 R_t w and div w = 2 w grad R.
    const double drho_dt = -w * (2.0 * j.dt_R * j.dt_S + j.dtt_S) / mc2;
    const double div_j = w * (2.0 * dot(j.grad_R, j.grad_S) + j.lap_S) / k.mass;
    worst = std::max(worst, std::abs(drho_dt + opt.j_scale * div_j));
  });
  return worst;
}

}  // namespace relstoch
