#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "relstoch/kg_waves.hpp"
#include "relstoch/sde_engine.hpp"
#include "relstoch/vec3.hpp"

namespace relstoch {

/// T(tau) = inf{s >= 0 : <M>(s) >= tau} for the piecewise-linear interpolant of
/// a nondecreasing <M> series sampled on t_grid. Throws OutOfHorizon when tau
/// exceeds the last sample.
double stopping_time(std::span<const double> qv, std::span<const double> t_grid, double tau);

/// <M>(t) by linear interpolation (the inverse of stopping_time on its range).
double qv_at(std::span<const double> qv, std::span<const double> t_grid, double t);

enum class ShortPathPolicy {
  truncate_to_min,  // tau_max = min over paths of <M>(horizon)
  drop,             // keep the requested tau_max, drop paths that fall short
};

/// How X and M are evaluated between retained grid times.
enum class Interpolation {
  linear,
  /// Brownian bridge of the driving noise, conditioned on the grid values. With
  /// coefficients frozen over each step this is the exact law of the continuous
  /// Euler interpolant, so M(T(tau)) has exactly Gaussian increments.
  brownian_bridge,
};

struct TimeChangeOptions {
  double dtau = 1e-3;
  std::optional<double> tau_max;
  ShortPathPolicy policy = ShortPathPolicy::truncate_to_min;
  Interpolation interpolation = Interpolation::brownian_bridge;
  std::uint64_t bridge_seed = 42;
};

/// Paths re-indexed by proper time.
///
/// Storage mirrors PathEnsemble: per-path series of length n_tau, component-major.
class TimeChangedEnsemble {
 public:
  TimeChangedEnsemble(std::vector<double> tau_grid, std::vector<std::size_t> path_ids);

  std::span<const double> tau_grid() const { return tau_grid_; }
  std::size_t n_tau() const { return tau_grid_.size(); }
  std::size_t n_paths() const { return path_ids_.size(); }
  /// Source path index in the originating PathEnsemble.
  std::size_t path_id(std::size_t i) const { return path_ids_[i]; }

  std::span<const double> x_tilde(std::size_t comp, std::size_t i) const;
  std::span<const double> stopping_times(std::size_t i) const;
  /// W~(tau_k) - W~(tau_{k-1}); entry 0 is 0.
  std::span<const double> w_tilde_increments(std::size_t comp, std::size_t i) const;

  std::span<double> x_tilde_mut(std::size_t comp, std::size_t i);
  std::span<double> stopping_times_mut(std::size_t i);
  std::span<double> w_tilde_increments_mut(std::size_t comp, std::size_t i);

  Vec3 x_tilde_at(std::size_t i, std::size_t k) const;
  std::size_t dropped_paths() const { return dropped_; }
  void set_dropped(std::size_t d) { dropped_ = d; }

  /// All increments of one W~ component pooled over paths and tau steps (k >= 1).
  std::vector<double> pooled_increments(std::size_t comp) const;

 private:
  std::vector<double> tau_grid_;
  std::vector<std::size_t> path_ids_;
  std::array<std::vector<double>, 3> x_;
  std::array<std::vector<double>, 3> w_;
  std::vector<double> t_;
  std::size_t dropped_ = 0;
};

/// Time-changes every non-aborted path onto tau_k = k * dtau, k = 0..floor(tau_max/dtau).
TimeChangedEnsemble time_change_ensemble(const PathEnsemble& ens, const TimeChangeOptions& opt);

/// Real-coordinate four-vector (x, c t) with metric (+,+,+,-).
struct FourVector {
  Vec3 spatial;
  double time_like = 0.0;

  double minkowski_square() const { return dot(spatial, spatial) - time_like * time_like; }
};

/// Per path, per tau: (X~(tau), c T(tau)).
std::vector<std::vector<FourVector>> four_vector_process(const TimeChangedEnsemble& tc,
                                                         const PhysicalConstants& k);

/// max |grad S . grad S - (dS/dt)^2 / c^2 + m^2 c^2| over the points.
double minkowski_gradient_identity(const WaveField& field, std::span<const Vec3> xs,
                                   std::span<const double> ts);

struct InvariantMeasureReport {
  double a11_residual_max = 0.0;
  double a12_residual_max = 0.0;
  double covariant_continuity_residual_max = 0.0;
  double minkowski_gradient_norm_error_max = 0.0;
  std::size_t nodes = 0;
};

/// Pointwise residuals of the tau-domain stationarity equations, written in the
/// real metric: with Box f = Lap f - f_tt / c^2 and <A,B> = grad A . grad B - A_t B_t / c^2,
///   -<S,S>/(2m) + hbar^2/(2m) (<R,R> + Box R) - m c^2 / 2
///   <S,R>/m + Box S / (2m)
///   div_nu(|phi|^2 grad_nu S / m) = |phi|^2 (2 <R,S> + Box S) / m
/// and of <S,S> + m^2 c^2.
InvariantMeasureReport invariant_measure_checks(const WaveField& field, const SpaceTimeGrid& grid);

/// Empirical dT/dtau against -(1/mc^2) dS/dt at (X~(tau_k), T(tau_k)), max over
/// all paths and tau steps (left-endpoint prediction).
double z6_residual_max(const TimeChangedEnsemble& tc, const WaveField& field);

struct TauStatistic {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Realized QV of X~ component over [0, tau_max] for each path.
std::vector<double> tau_realized_qv(const TimeChangedEnsemble& tc, std::size_t comp);

/// Ensemble mean of (X~(tau_max) - X~(0)) / tau_max with its standard error.
TauStatistic tau_drift_estimate(const TimeChangedEnsemble& tc, std::size_t comp);

struct RoundtripErrors {
  double qv_of_T_max = 0.0;  // max |<M>(T(tau)) - tau|
  double T_of_qv_max = 0.0;  // max |T(<M>(t)) - t|
};

/// Both halves of the roundtrip identity over every grid tau and grid t that lies
/// within the path's proper-time horizon.
RoundtripErrors roundtrip_errors(const PathEnsemble& ens, std::span<const double> tau_grid);

// ---------------------------------------------------------------------------
// Generator of the tau-domain process and its adjoint w.r.t. |phi|^2 dx dy.

/// Separable smooth bump on (x1, x2, x3, y) with y = c t:
/// amplitude * prod_a psi((z_a - center_a) / half_width_a), psi(r) = exp(-1/(1 - r^2)).
struct SeparableBump {
  std::array<double, 4> center{};
  std::array<double, 4> half_width{1.0, 1.0, 1.0, 1.0};
  double amplitude = 1.0;

  struct Jet {
    double value = 0.0;
    std::array<double, 4> grad{};
    double spatial_laplacian = 0.0;
  };
  Jet evaluate(const std::array<double, 4>& z) const;
};

struct Box4 {
  std::array<double, 4> lo{};
  std::array<double, 4> hi{};
};

struct BumpPair {
  SeparableBump f;
  SeparableBump g;
};

/// Two slightly offset bumps of half-width 0.85 inside [-1, 1]^4, the pair the
/// verification suite uses. At 24/48 nodes per axis the plane-wave defect is
/// about 2e-8 and the relative Richardson gap about 2e-4.
BumpPair default_bump_pair();

struct AdjointReport {
  /// max over pairs of |<Lf, g>_mu + <f, L* g>_mu| at the fine resolution, where
  /// L* = (grad S / m - Sigma^2 grad R) . grad - Sigma^2 Lap / 2 is the backward
  /// generator; the L^2(mu) adjoint of L is -L*.
  double defect_fine = 0.0;
  double defect_coarse = 0.0;
  /// max over pairs of |<Lf, g>_fine - <Lf, g>_coarse| / |<Lf, g>_fine|
  double richardson_rel_gap = 0.0;
  /// <Lf, g>_mu at the fine resolution for the last pair (diagnostic scale).
  double pairing_fine = 0.0;
  std::size_t resolution_coarse = 0;
  std::size_t resolution_fine = 0;
};

/// Tensor-product midpoint quadrature with `resolution` and 2*`resolution`
/// nodes per axis. Throws SupportViolation when f or g exceeds 1e-12 on the box
/// boundary.
AdjointReport generator_adjoint_check(const WaveField& field, std::span<const BumpPair> pairs,
                                      const Box4& box, std::size_t resolution);

/// L f and L* g at one point, exposed for tests.
struct GeneratorValues {
  double forward = 0.0;   // L f
  double backward = 0.0;  // L* f
};
GeneratorValues apply_generators(const FieldJet& jet, const PhysicalConstants& k,
                                 const SeparableBump::Jet& f);

}  // namespace relstoch
