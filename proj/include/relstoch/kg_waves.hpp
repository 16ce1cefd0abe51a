#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "relstoch/vec3.hpp"

namespace relstoch {

/// hbar, m and c. Natural units by default.
struct PhysicalConstants {
  double hbar = 1.0;
  double mass = 1.0;
  double c = 1.0;

  /// Throws PreconditionError unless all three are finite and strictly positive.
  void validate() const;

  friend bool operator==(const PhysicalConstants&, const PhysicalConstants&) = default;
};

/// Positive-frequency plane wave exp[(i/hbar)(p.x - p0 t)].
struct PlaneWaveSpec {
  Vec3 momentum;
  PhysicalConstants constants;

  /// p0 = +c sqrt(p.p + m^2 c^2).
  double energy() const;
};

/// Local 1-jet (plus the second derivatives the residual checks need) of
/// log(phi) = R + (i/hbar) S at one space-time point.
struct FieldJet {
  std::complex<double> phi;
  double R = 0.0;
  double S = 0.0;
  Vec3 grad_R;
  Vec3 grad_S;
  double dt_R = 0.0;
  double dt_S = 0.0;
  double lap_R = 0.0;  // spatial Laplacian
  double lap_S = 0.0;
  double dtt_R = 0.0;
  double dtt_S = 0.0;

  double modulus_sq() const { return std::norm(phi); }
};

enum class FieldKind { plane_wave, superposition };

struct WaveTerm {
  PlaneWaveSpec wave;
  std::complex<double> weight{1.0, 0.0};
};

/// Klein-Gordon solution phi = exp[R + (i/hbar) S] built from plane waves.
///
/// A plane-wave field is evaluated from closed forms (R = 0, S = p.x - p0 t,
/// no trigonometry in the derivatives). A superposition is evaluated from the
/// complex sum and its analytic derivatives: the log-derivatives d(phi)/phi
/// give grad R (real part) and grad S / hbar (imaginary part). S itself is the
/// principal branch hbar*arg(phi); only its derivatives enter the dynamics.
///
/// Immutable after construction; evaluation is safe from any number of threads.
class WaveField {
 public:
  FieldKind kind() const { return kind_; }
  const PhysicalConstants& constants() const { return constants_; }
  std::span<const WaveTerm> terms() const { return terms_; }

  /// Throws SingularNode where |phi| is below the node threshold.
  FieldJet evaluate(const Vec3& x, double t) const;

  /// phi and Box(phi) - (m c / hbar)^2 phi from the analytic second derivatives.
  std::complex<double> phi(const Vec3& x, double t) const;
  std::complex<double> klein_gordon_residual(const Vec3& x, double t) const;

  /// |phi| below this is treated as a node of the superposition.
  double node_threshold() const { return node_threshold_; }

  /// True when every coefficient is independent of x (plane waves).
  bool has_constant_coefficients() const { return kind_ == FieldKind::plane_wave; }

 private:
  friend WaveField make_plane_wave(const Vec3& p, const PhysicalConstants& constants);
  friend WaveField superpose(std::span<const PlaneWaveSpec> waves,
                             std::span<const std::complex<double>> weights);

  FieldKind kind_ = FieldKind::plane_wave;
  PhysicalConstants constants_;
  std::vector<WaveTerm> terms_;
  std::vector<double> energies_;
  double node_threshold_ = 0.0;
};

WaveField make_plane_wave(const Vec3& p, const PhysicalConstants& constants = {});

/// Numeric superposition sum_i w_i phi_i. All waves must share their constants.
WaveField superpose(std::span<const PlaneWaveSpec> waves,
                    std::span<const std::complex<double>> weights);

/// Rectangular space-time lattice; both end points of every axis are nodes.
struct SpaceTimeGrid {
  Vec3 lo{-1.0, -1.0, -1.0};
  Vec3 hi{1.0, 1.0, 1.0};
  std::array<std::size_t, 3> n{5, 5, 5};
  double t0 = 0.0;
  double t1 = 1.0;
  std::size_t nt = 5;

  std::size_t size() const { return n[0] * n[1] * n[2] * nt; }
  /// Calls fn(x, t) for every node in a fixed order.
  template <class Fn>
  void for_each(Fn&& fn) const;
};

struct AdmissibilityReport {
  double z0_residual_max = 0.0;
  double kg_residual_max = 0.0;
  double rho_min = 0.0;
  double j_identity_residual_max = 0.0;
  std::size_t nodes = 0;
  bool admissible = false;
};

/// Sup residuals of the Hamilton-Jacobi constraint dS/dt + c sqrt(m^2c^2 + |grad S|^2) = 0,
/// of the Klein-Gordon equation (relative to |phi| (mc/hbar)^2), the sign of rho and of
/// j.j - c^2 rho^2 + c^2 |phi|^4 over the grid. Throws SingularNode on a node of phi.
AdmissibilityReport check_admissibility(const WaveField& field, const SpaceTimeGrid& grid,
                                        double tol);

struct DensityCurrent {
  double rho = 0.0;
  Vec3 j;
};

/// rho = |phi|^2 (-dS/dt)/(m c^2), j = |phi|^2 grad S / m.
DensityCurrent rho_and_current(const WaveField& field, const Vec3& x, double t);
DensityCurrent rho_and_current(const FieldJet& jet, const PhysicalConstants& k);

// ---------------------------------------------------------------------------

template <class Fn>
void SpaceTimeGrid::for_each(Fn&& fn) const {
  auto node = [](double a, double b, std::size_t count, std::size_t i) {
    return count == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
  };
  for (std::size_t it = 0; it < nt; ++it) {
    const double t = node(t0, t1, nt, it);
    for (std::size_t i = 0; i < n[0]; ++i)
      for (std::size_t j = 0; j < n[1]; ++j)
        for (std::size_t k = 0; k < n[2]; ++k)
          fn(Vec3{node(lo[0], hi[0], n[0], i), node(lo[1], hi[1], n[1], j),
                  node(lo[2], hi[2], n[2], k)},
             t);
  }
}

}  // namespace relstoch
