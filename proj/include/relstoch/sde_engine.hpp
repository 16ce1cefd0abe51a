#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relstoch/kg_waves.hpp"
#include "relstoch/vec3.hpp"

namespace relstoch {

enum class Scheme { euler_maruyama };

/// Test modes for the driving noise. `duplicated_axis` forces dW^2 := dW^1,
/// which breaks the orthogonality of M^1 and M^2 on purpose.
enum class NoiseMode { gaussian, zero, duplicated_axis };

struct IntegratorConfig {
  double dt = 1e-3;
  std::size_t n_steps = 1000;
  std::size_t n_paths = 1000;
  std::uint64_t base_seed = 42;
  Scheme scheme = Scheme::euler_maruyama;
  /// Retain every `stride`-th step (step 0 and the last step are always kept
  /// when n_steps is a multiple of stride).
  std::size_t stride = 1;
  unsigned workers = 1;
  NoiseMode noise = NoiseMode::gaussian;

  double horizon() const { return dt * static_cast<double>(n_steps); }
  void validate() const;
};

/// Cube [0, side)^3 with periodic identification.
struct PeriodicBox {
  double side = 1.0;
  Vec3 wrap(const Vec3& x) const;
  double wrap(double x) const;
};

class GaussianStream;

/// Law of X(0).
class InitialSampler {
 public:
  enum class Kind { point_mass, uniform_box, gaussian, custom_density };

  static InitialSampler point_mass(const Vec3& x0);
  static InitialSampler uniform_box();
  /// Isotropic normal N(center, width^2 I); wrapped onto the box if there is one.
  static InitialSampler gaussian(const Vec3& center, double width);
  /// Rejection sampling of an unnormalized density bounded by `density_max` on the box.
  static InitialSampler custom_density(std::function<double(const Vec3&)> density,
                                       double density_max);

  Kind kind() const { return kind_; }
  Vec3 sample(GaussianStream& stream, const std::optional<PeriodicBox>& box) const;

 private:
  Kind kind_ = Kind::point_mass;
  Vec3 center_;
  double width_ = 0.0;
  std::function<double(const Vec3&)> density_;
  double density_max_ = 0.0;
};

enum class PathStatus : std::uint8_t { ok, aborted_inadmissible };

/// Simulated trajectories, retained on the grid t_grid.
///
/// Storage is component-major: component c of path p at retained index k is
/// at [c][p * n_keep + k], so every per-path series is contiguous.
class PathEnsemble {
 public:
  PathEnsemble(std::size_t n_paths, std::size_t n_keep, const PhysicalConstants& k, double dt,
               std::size_t stride);

  std::size_t n_paths() const { return n_paths_; }
  std::size_t n_keep() const { return n_keep_; }
  double dt() const { return dt_; }
  std::size_t stride() const { return stride_; }
  const PhysicalConstants& constants() const { return constants_; }
  /// Law of the driving noise; interpolation between grid times must respect it.
  NoiseMode noise() const { return noise_; }
  void set_noise(NoiseMode n) { noise_ = n; }

  std::span<const double> t_grid() const { return t_grid_; }
  std::span<double> t_grid_mut() { return t_grid_; }

  /// Per-path series (length n_keep).
  std::span<const double> x(std::size_t comp, std::size_t path) const;
  std::span<const double> martingale(std::size_t comp, std::size_t path) const;
  /// Wiener increment accumulated over the retained interval ending at k; entry 0 is 0.
  std::span<const double> dw(std::size_t comp, std::size_t path) const;
  std::span<const double> qv(std::size_t path) const;

  std::span<double> x_mut(std::size_t comp, std::size_t path);
  std::span<double> martingale_mut(std::size_t comp, std::size_t path);
  std::span<double> dw_mut(std::size_t comp, std::size_t path);
  std::span<double> qv_mut(std::size_t path);

  Vec3 state(std::size_t path, std::size_t k) const;

  PathStatus status(std::size_t path) const { return status_[path]; }
  void set_status(std::size_t path, PathStatus s) { status_[path] = s; }
  std::size_t aborted_count() const;
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }
  void add_diagnostic(std::string d) { diagnostics_.push_back(std::move(d)); }

 private:
  std::size_t n_paths_;
  std::size_t n_keep_;
  PhysicalConstants constants_;
  double dt_;
  std::size_t stride_;
  NoiseMode noise_ = NoiseMode::gaussian;
  std::vector<double> t_grid_;
  std::array<std::vector<double>, 3> x_, m_, dw_;
  std::vector<double> qv_;
  std::vector<PathStatus> status_;
  std::vector<std::string> diagnostics_;
};

/// Euler-Maruyama integration of the forward SDE, accumulating the proper-time
/// process <M> (left-endpoint rule) and the martingales M^i alongside X.
///
/// The time grid is the running sum t_{k+1} = t_k + dt, the same rounding the
/// <M> accumulator sees, so <M>(t_k) <= t_k holds exactly whenever the rate
/// does not exceed one. Fields are evaluated at box-wrapped positions; stored
/// positions are unwrapped so path increments stay continuous.
///
/// A path that visits a point with dS/dt >= 0 is frozen and marked aborted.
/// NaN or infinite states throw NumericalBreakdown.
PathEnsemble simulate_forward(const WaveField& field, const InitialSampler& init,
                              const IntegratorConfig& cfg,
                              const std::optional<PeriodicBox>& box = std::nullopt);

/// Row-major per-path series (n_paths x n_keep).
struct PathSeries {
  std::size_t n_paths = 0;
  std::size_t n_keep = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t p) const {
    return std::span<const double>(values).subspan(p * n_keep, n_keep);
  }
  double final_value(std::size_t p) const { return values[p * n_keep + n_keep - 1]; }
};

/// Running sum of (dM^i)^2 along each path.
PathSeries realized_quadratic_variation(const PathEnsemble& ens, std::size_t component);

/// Running sum of dM^i dM^j along each path. Throws PreconditionError when i == j.
PathSeries cross_variation(const PathEnsemble& ens, std::size_t i, std::size_t j);

/// Partition of one spatial axis into bins.
struct Binning {
  std::size_t axis = 0;
  std::vector<double> edges;  // strictly increasing, size = bins + 1

  static Binning uniform(std::size_t axis, double lo, double hi, std::size_t bins);
  std::size_t bins() const { return edges.empty() ? 0 : edges.size() - 1; }
  /// Bin index of v, or bins() when outside.
  std::size_t locate(double v) const;
};

struct BinEstimate {
  std::size_t count = 0;
  Vec3 mean;
  Vec3 std_error;
  bool missing() const { return count == 0; }
};

/// Binned E{(X(t+h) - X(t-h)) / (2h) | X(t) in bin} at retained index k with
/// lag `lag` retained steps (h = lag * stride * dt). With a box, X(t) is
/// wrapped before binning (increments stay unwrapped), so the conditioning is
/// on the position in the torus. Throws PreconditionError if k lacks
/// neighbours on either side.
std::vector<BinEstimate> conditional_symmetric_increment(
    const PathEnsemble& ens, std::size_t k, std::size_t lag, const Binning& bins,
    const std::optional<PeriodicBox>& box = std::nullopt);

}  // namespace relstoch
