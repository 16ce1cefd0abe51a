#include "relstoch/sde_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "relstoch/errors.hpp"
#include "relstoch/kernels.hpp"
#include "relstoch/kinematics.hpp"
#include "relstoch/rng.hpp"

namespace relstoch {

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("integrator: dt must be > 0");
  if (n_steps == 0) throw PreconditionError("integrator: n_steps must be >= 1");
  if (n_paths == 0) throw PreconditionError("integrator: n_paths must be >= 1");
  if (stride == 0 || n_steps % stride != 0)
    throw PreconditionError("integrator: stride must divide n_steps");
  if (workers == 0) throw PreconditionError("integrator: workers must be >= 1");
}

double PeriodicBox::wrap(double x) const {
  double r = std::fmod(x, side);
  if (r < 0.0) r += side;
  if (r >= side) r = 0.0;
  return r;
}

Vec3 PeriodicBox::wrap(const Vec3& x) const { return {wrap(x[0]), wrap(x[1]), wrap(x[2])}; }

// ---------------------------------------------------------------------------
// InitialSampler

InitialSampler InitialSampler::point_mass(const Vec3& x0) {
  InitialSampler s;
  s.kind_ = Kind::point_mass;
  s.center_ = x0;
  return s;
}

InitialSampler InitialSampler::uniform_box() {
  InitialSampler s;
  s.kind_ = Kind::uniform_box;
  return s;
}

InitialSampler InitialSampler::gaussian(const Vec3& center, double width) {
  if (!(width > 0.0)) throw PreconditionError("gaussian initial law: width must be > 0");
  InitialSampler s;
  s.kind_ = Kind::gaussian;
  s.center_ = center;
  s.width_ = width;
  return s;
}

InitialSampler InitialSampler::custom_density(std::function<double(const Vec3&)> density,
                                              double density_max) {
  if (!density || !(density_max > 0.0))
    throw PreconditionError("custom initial density needs a callable and a positive bound");
  InitialSampler s;
  s.kind_ = Kind::custom_density;
  s.density_ = std::move(density);
  s.density_max_ = density_max;
  return s;
}

Vec3 InitialSampler::sample(GaussianStream& stream, const std::optional<PeriodicBox>& box) const {
  switch (kind_) {
    case Kind::point_mass:
      return center_;
    case Kind::gaussian: {
      Vec3 x;
      for (std::size_t a = 0; a < 3; ++a) x[a] = center_[a] + width_ * stream.normal();
      return x;
    }
    case Kind::uniform_box:
    case Kind::custom_density:
      break;
  }
  if (!box) throw PreconditionError("initial law on the box requires a periodic box");
  auto uniform_point = [&] {
    Vec3 x;
    for (std::size_t a = 0; a < 3; ++a) x[a] = box->side * stream.uniform();
    return x;
  };
  if (kind_ == Kind::uniform_box) return uniform_point();
  for (;;) {
    const Vec3 x = uniform_point();
    const double d = density_(x);
    if (d > density_max_ * (1.0 + 1e-12))
      throw PreconditionError("custom initial density exceeds its declared bound");
    if (stream.uniform() * density_max_ < d) return x;
  }
}

// ---------------------------------------------------------------------------
// PathEnsemble

PathEnsemble::PathEnsemble(std::size_t n_paths, std::size_t n_keep, const PhysicalConstants& k,
                           double dt, std::size_t stride)
    : n_paths_(n_paths),
      n_keep_(n_keep),
      constants_(k),
      dt_(dt),
      stride_(stride),
      t_grid_(n_keep, 0.0),
      qv_(n_paths * n_keep, 0.0),
      status_(n_paths, PathStatus::ok) {
  for (std::size_t c = 0; c < 3; ++c) {
    x_[c].assign(n_paths * n_keep, 0.0);
    m_[c].assign(n_paths * n_keep, 0.0);
    dw_[c].assign(n_paths * n_keep, 0.0);
  }
}

namespace {
template <class V>
auto row(V& v, std::size_t path, std::size_t n) {
  return std::span(v).subspan(path * n, n);
}
}  // namespace

std::span<const double> PathEnsemble::x(std::size_t c, std::size_t p) const {
  return row(x_[c], p, n_keep_);
}
std::span<const double> PathEnsemble::martingale(std::size_t c, std::size_t p) const {
  return row(m_[c], p, n_keep_);
}
std::span<const double> PathEnsemble::dw(std::size_t c, std::size_t p) const {
  return row(dw_[c], p, n_keep_);
}
std::span<const double> PathEnsemble::qv(std::size_t p) const { return row(qv_, p, n_keep_); }
std::span<double> PathEnsemble::x_mut(std::size_t c, std::size_t p) {
  return row(x_[c], p, n_keep_);
}
std::span<double> PathEnsemble::martingale_mut(std::size_t c, std::size_t p) {
  return row(m_[c], p, n_keep_);
}
std::span<double> PathEnsemble::dw_mut(std::size_t c, std::size_t p) {
  return row(dw_[c], p, n_keep_);
}
std::span<double> PathEnsemble::qv_mut(std::size_t p) { return row(qv_, p, n_keep_); }

Vec3 PathEnsemble::state(std::size_t p, std::size_t k) const {
  const std::size_t i = p * n_keep_ + k;
  return {x_[0][i], x_[1][i], x_[2][i]};
}

std::size_t PathEnsemble::aborted_count() const {
  return static_cast<std::size_t>(
      std::count_if(status_.begin(), status_.end(), [](PathStatus s) { return s != PathStatus::ok; }));
}

// ---------------------------------------------------------------------------
// simulate_forward

namespace {

constexpr std::size_t kBlock = 256;

// Structure-of-arrays state of one block of paths.
struct BlockState {
  explicit BlockState(std::size_t n) : qv(n), diff(n), gain(n), rate(n), alive(n, 1) {
    for (auto* arr : {&x, &m, &drift, &dw, &dw_acc})
      for (auto& v : *arr) v.assign(n, 0.0);
  }
  std::array<std::vector<double>, 3> x, m, drift, dw, dw_acc;
  std::vector<double> qv, diff, gain, rate;
  std::vector<char> alive;
};

struct BlockContext {
  const WaveField& field;
  const InitialSampler& init;
  const IntegratorConfig& cfg;
  const std::optional<PeriodicBox>& box;
  std::span<const double> t_full;
  std::optional<LocalCoefficients> constant;
};

void set_coefficients(BlockState& s, std::size_t i, const LocalCoefficients& lc) {
  for (std::size_t c = 0; c < 3; ++c) s.drift[c][i] = lc.b_plus[c];
  s.diff[i] = std::sqrt(lc.sigma2);
  s.gain[i] = std::sqrt(lc.rate);
  s.rate[i] = lc.rate;
}

void freeze(BlockState& s, std::size_t i) {
  for (std::size_t c = 0; c < 3; ++c) s.drift[c][i] = 0.0;
  s.diff[i] = s.gain[i] = s.rate[i] = 0.0;
  s.alive[i] = 0;
}

void store(PathEnsemble& ens, const BlockState& s, std::size_t p0, std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t p = p0 + i;
    for (std::size_t c = 0; c < 3; ++c) {
      const double xv = s.x[c][i];
      if (!std::isfinite(xv) || !std::isfinite(s.m[c][i])) {
        std::ostringstream os;
        os << "non-finite state on path " << p << " at retained index " << k;
        throw NumericalBreakdown(os.str());
      }
      ens.x_mut(c, p)[k] = xv;
      ens.martingale_mut(c, p)[k] = s.m[c][i];
      ens.dw_mut(c, p)[k] = s.dw_acc[c][i];
    }
    ens.qv_mut(p)[k] = s.qv[i];
  }
}

void run_block(const BlockContext& ctx, PathEnsemble& ens, std::size_t p0, std::size_t n,
               std::vector<std::string>& path_diag) {
  const IntegratorConfig& cfg = ctx.cfg;
  const PhysicalConstants& k = ctx.field.constants();
  const auto& kt = kernels::active();
  BlockState s(n);
  std::vector<GaussianStream> streams;
  streams.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    streams.emplace_back(cfg.base_seed, StreamPurpose::path_increments, p0 + i);
    const Vec3 x0 = ctx.init.sample(streams.back(), ctx.box);
    for (std::size_t c = 0; c < 3; ++c) s.x[c][i] = x0[c];
    if (ctx.constant) set_coefficients(s, i, *ctx.constant);
  }
  store(ens, s, p0, n, 0);

  const double sqdt = std::sqrt(cfg.dt);
  for (std::size_t step = 0; step < cfg.n_steps; ++step) {
    const double t = ctx.t_full[step];
    if (!ctx.constant) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!s.alive[i]) continue;
        Vec3 x{s.x[0][i], s.x[1][i], s.x[2][i]};
        if (ctx.box) x = ctx.box->wrap(x);
        try {
          set_coefficients(s, i, local_coefficients(ctx.field.evaluate(x, t), k));
        } catch (const std::domain_error& e) {
          freeze(s, i);
          std::ostringstream os;
          os << "path " << (p0 + i) << " aborted at step " << step << " (t=" << t
             << "): " << e.what();
          path_diag[p0 + i] = os.str();
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      switch (cfg.noise) {
        case NoiseMode::gaussian:
          for (std::size_t c = 0; c < 3; ++c) s.dw[c][i] = sqdt * streams[i].normal();
          break;
        case NoiseMode::zero:
          for (std::size_t c = 0; c < 3; ++c) s.dw[c][i] = 0.0;
          break;
        case NoiseMode::duplicated_axis:
          s.dw[0][i] = sqdt * streams[i].normal();
          s.dw[1][i] = s.dw[0][i];
          s.dw[2][i] = sqdt * streams[i].normal();
          break;
      }
    }
    for (std::size_t c = 0; c < 3; ++c) {
      kt.euler_update(s.x[c].data(), s.drift[c].data(), cfg.dt, s.diff.data(), s.dw[c].data(), n);
      kt.mul_accumulate(s.m[c].data(), s.gain.data(), s.dw[c].data(), n);
      kt.scale_accumulate(s.dw_acc[c].data(), s.dw[c].data(), 1.0, n);
    }
    kt.scale_accumulate(s.qv.data(), s.rate.data(), cfg.dt, n);

    if ((step + 1) % cfg.stride == 0) {
      store(ens, s, p0, n, (step + 1) / cfg.stride);
      for (auto& v : s.dw_acc) std::fill(v.begin(), v.end(), 0.0);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!s.alive[i]) ens.set_status(p0 + i, PathStatus::aborted_inadmissible);
}

}  // namespace

PathEnsemble simulate_forward(const WaveField& field, const InitialSampler& init,
                              const IntegratorConfig& cfg, const std::optional<PeriodicBox>& box) {
  cfg.validate();
  if (box && !(box->side > 0.0)) throw PreconditionError("periodic box side must be > 0");
  const std::size_t n_keep = cfg.n_steps / cfg.stride + 1;
  PathEnsemble ens(cfg.n_paths, n_keep, field.constants(), cfg.dt, cfg.stride);
  ens.set_noise(cfg.noise);

  std::vector<double> t_full(cfg.n_steps + 1, 0.0);
  for (std::size_t s = 0; s < cfg.n_steps; ++s) t_full[s + 1] = t_full[s] + cfg.dt;
  auto tg = ens.t_grid_mut();
  for (std::size_t k = 0; k < n_keep; ++k) tg[k] = t_full[k * cfg.stride];

  BlockContext ctx{field, init, cfg, box, t_full, std::nullopt};
  if (field.has_constant_coefficients())
    ctx.constant = local_coefficients(field.evaluate(Vec3{}, 0.0), field.constants());

  std::vector<std::string> path_diag(cfg.n_paths);
  const std::size_t n_blocks = (cfg.n_paths + kBlock - 1) / kBlock;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      const std::size_t p0 = b * kBlock;
      try {
        run_block(ctx, ens, p0, std::min(kBlock, cfg.n_paths - p0), path_diag);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_blocks);
        return;
      }
    }
  };
  const unsigned n_workers = static_cast<unsigned>(std::min<std::size_t>(cfg.workers, n_blocks));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  for (auto& d : path_diag)
    if (!d.empty()) ens.add_diagnostic(std::move(d));
  return ens;
}

// ---------------------------------------------------------------------------
// Variation estimators

namespace {

PathSeries running_products(const PathEnsemble& ens, std::size_t i, std::size_t j) {
  if (i > 2 || j > 2) throw PreconditionError("component index out of range");
  PathSeries out{ens.n_paths(), ens.n_keep(), std::vector<double>(ens.n_paths() * ens.n_keep())};
  for (std::size_t p = 0; p < ens.n_paths(); ++p) {
    const auto a = ens.martingale(i, p);
    const auto b = ens.martingale(j, p);
    double acc = 0.0;
    out.values[p * ens.n_keep()] = 0.0;
    for (std::size_t k = 1; k < ens.n_keep(); ++k) {
      acc += (a[k] - a[k - 1]) * (b[k] - b[k - 1]);
      out.values[p * ens.n_keep() + k] = acc;
    }
  }
  return out;
}

}  // namespace

PathSeries realized_quadratic_variation(const PathEnsemble& ens, std::size_t component) {
  return running_products(ens, component, component);
}

PathSeries cross_variation(const PathEnsemble& ens, std::size_t i, std::size_t j) {
  if (i == j) throw PreconditionError("cross_variation requires distinct components");
  return running_products(ens, i, j);
}

// ---------------------------------------------------------------------------
// Binned symmetric increments

Binning Binning::uniform(std::size_t axis, double lo, double hi, std::size_t bins) {
  if (bins == 0 || !(hi > lo)) throw PreconditionError("uniform binning needs hi > lo, bins >= 1");
  Binning b;
  b.axis = axis;
  b.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i)
    b.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  return b;
}

std::size_t Binning::locate(double v) const {
  if (edges.size() < 2 || !(v >= edges.front()) || !(v < edges.back())) return bins();
  const auto it = std::upper_bound(edges.begin(), edges.end(), v);
  return static_cast<std::size_t>(it - edges.begin()) - 1;
}

std::vector<BinEstimate> conditional_symmetric_increment(const PathEnsemble& ens, std::size_t k,
                                                         std::size_t lag, const Binning& bins,
                                                         const std::optional<PeriodicBox>& box) {
  if (lag == 0 || k < lag || k + lag >= ens.n_keep())
    throw PreconditionError("symmetric increment needs retained neighbours at k - lag and k + lag");
  if (bins.axis > 2 || bins.bins() == 0) throw PreconditionError("invalid binning");
  const double h = ens.t_grid()[k + lag] - ens.t_grid()[k];
  const double h_back = ens.t_grid()[k] - ens.t_grid()[k - lag];
  const double two_h = h + h_back;

  const std::size_t nb = bins.bins();
  std::vector<std::size_t> count(nb, 0);
  std::vector<Vec3> s1(nb), s2(nb);
  for (std::size_t p = 0; p < ens.n_paths(); ++p) {
    if (ens.status(p) != PathStatus::ok) continue;
    const double xk = ens.x(bins.axis, p)[k];
    const std::size_t b = bins.locate(box ? box->wrap(xk) : xk);
    if (b >= nb) continue;
    const Vec3 d = (ens.state(p, k + lag) - ens.state(p, k - lag)) / two_h;
    ++count[b];
    for (std::size_t c = 0; c < 3; ++c) {
      s1[b][c] += d[c];
      s2[b][c] += d[c] * d[c];
    }
  }
  std::vector<BinEstimate> out(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    out[b].count = count[b];
    if (count[b] == 0) continue;
    const double n = static_cast<double>(count[b]);
    for (std::size_t c = 0; c < 3; ++c) {
      const double mean = s1[b][c] / n;
      const double var = count[b] > 1 ? std::max(0.0, (s2[b][c] - n * mean * mean) / (n - 1.0)) : 0.0;
      out[b].mean[c] = mean;
      out[b].std_error[c] = std::sqrt(var / n);
    }
  }
  return out;
}

}  // namespace relstoch
