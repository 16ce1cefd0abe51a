#include "relstoch/time_change.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "relstoch/errors.hpp"
#include "relstoch/kernels.hpp"
#include "relstoch/rng.hpp"

namespace relstoch {

double stopping_time(std::span<const double> qv, std::span<const double> t_grid, double tau) {
  if (qv.empty() || qv.size() != t_grid.size())
    throw PreconditionError("stopping_time: qv and t_grid must be non-empty and aligned");
  if (!(tau <= qv.back())) {
    std::ostringstream os;
    os << "tau = " << tau << " exceeds accumulated proper time " << qv.back();
    throw OutOfHorizon(os.str());
  }
  if (tau <= qv.front()) return t_grid.front();
  const auto it = std::lower_bound(qv.begin(), qv.end(), tau);
  const auto j = static_cast<std::size_t>(it - qv.begin());
  const double f = (tau - qv[j - 1]) / (qv[j] - qv[j - 1]);
  return t_grid[j - 1] + f * (t_grid[j] - t_grid[j - 1]);
}

double qv_at(std::span<const double> qv, std::span<const double> t_grid, double t) {
  if (qv.empty() || qv.size() != t_grid.size())
    throw PreconditionError("qv_at: qv and t_grid must be non-empty and aligned");
  if (t > t_grid.back() || t < t_grid.front()) throw OutOfHorizon("qv_at: t outside the grid");
  const auto it = std::upper_bound(t_grid.begin(), t_grid.end(), t);
  if (it == t_grid.end()) return qv.back();
  const auto j = static_cast<std::size_t>(it - t_grid.begin());
  const double f = (t - t_grid[j - 1]) / (t_grid[j] - t_grid[j - 1]);
  return qv[j - 1] + f * (qv[j] - qv[j - 1]);
}

// ---------------------------------------------------------------------------

TimeChangedEnsemble::TimeChangedEnsemble(std::vector<double> tau_grid,
                                         std::vector<std::size_t> path_ids)
    : tau_grid_(std::move(tau_grid)), path_ids_(std::move(path_ids)) {
  const std::size_t n = tau_grid_.size() * path_ids_.size();
  for (std::size_t c = 0; c < 3; ++c) {
    x_[c].assign(n, 0.0);
    w_[c].assign(n, 0.0);
  }
  t_.assign(n, 0.0);
}

std::span<const double> TimeChangedEnsemble::x_tilde(std::size_t c, std::size_t i) const {
  return std::span(x_[c]).subspan(i * n_tau(), n_tau());
}
std::span<const double> TimeChangedEnsemble::stopping_times(std::size_t i) const {
  return std::span(t_).subspan(i * n_tau(), n_tau());
}
std::span<const double> TimeChangedEnsemble::w_tilde_increments(std::size_t c,
                                                                std::size_t i) const {
  return std::span(w_[c]).subspan(i * n_tau(), n_tau());
}
std::span<double> TimeChangedEnsemble::x_tilde_mut(std::size_t c, std::size_t i) {
  return std::span(x_[c]).subspan(i * n_tau(), n_tau());
}
std::span<double> TimeChangedEnsemble::stopping_times_mut(std::size_t i) {
  return std::span(t_).subspan(i * n_tau(), n_tau());
}
std::span<double> TimeChangedEnsemble::w_tilde_increments_mut(std::size_t c, std::size_t i) {
  return std::span(w_[c]).subspan(i * n_tau(), n_tau());
}

Vec3 TimeChangedEnsemble::x_tilde_at(std::size_t i, std::size_t k) const {
  const std::size_t idx = i * n_tau() + k;
  return {x_[0][idx], x_[1][idx], x_[2][idx]};
}

std::vector<double> TimeChangedEnsemble::pooled_increments(std::size_t comp) const {
  std::vector<double> out;
  if (n_tau() < 2) return out;
  out.reserve(n_paths() * (n_tau() - 1));
  for (std::size_t i = 0; i < n_paths(); ++i) {
    const auto w = w_tilde_increments(comp, i);
    out.insert(out.end(), w.begin() + 1, w.end());
  }
  return out;
}

namespace {

// Sequential Brownian-bridge sampler of the driving noise inside one grid interval.
struct BridgeState {
  std::size_t segment = std::numeric_limits<std::size_t>::max();
  double s_prev = 0.0;
  Vec3 d_prev;
};

}  // namespace

TimeChangedEnsemble time_change_ensemble(const PathEnsemble& ens, const TimeChangeOptions& opt) {
  if (!(opt.dtau > 0.0)) throw PreconditionError("time change: dtau must be > 0");
  std::vector<std::size_t> candidates;
  double min_total = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < ens.n_paths(); ++p) {
    if (ens.status(p) != PathStatus::ok) continue;
    candidates.push_back(p);
    min_total = std::min(min_total, ens.qv(p).back());
  }
  if (candidates.empty()) throw PreconditionError("time change: no usable paths");

  double tau_max = opt.tau_max.value_or(min_total);
  std::vector<std::size_t> kept;
  if (opt.policy == ShortPathPolicy::truncate_to_min) {
    tau_max = std::min(tau_max, min_total);
    kept = candidates;
  } else {
    for (std::size_t p : candidates)
      if (ens.qv(p).back() >= tau_max) kept.push_back(p);
    if (kept.empty()) throw OutOfHorizon("time change: every path falls short of tau_max");
  }
  const auto n_tau = static_cast<std::size_t>(std::floor(tau_max / opt.dtau * (1.0 + 1e-12))) + 1;
  std::vector<double> tau_grid(n_tau);
  for (std::size_t k = 0; k < n_tau; ++k)
    tau_grid[k] = std::min(static_cast<double>(k) * opt.dtau, tau_max);

  TimeChangedEnsemble tc(tau_grid, kept);
  tc.set_dropped(candidates.size() - kept.size());

  const PhysicalConstants& kc = ens.constants();
  const double diffusion_unit = kc.hbar / kc.mass;
  const bool duplicated = ens.noise() == NoiseMode::duplicated_axis;
  const bool silent = ens.noise() == NoiseMode::zero;
  const auto tg = ens.t_grid();
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const std::size_t p = kept[i];
    const auto qv = ens.qv(p);
    GaussianStream stream(opt.bridge_seed, StreamPurpose::bridge, p);
    BridgeState bridge;
    auto T_out = tc.stopping_times_mut(i);
    Vec3 m_prev;
    for (std::size_t k = 0; k < n_tau; ++k) {
      const double tau = tau_grid[k];
      const double T = stopping_time(qv, tg, tau);
      T_out[k] = T;

      // Segment [a, b] of the grid containing T (b >= 1).
      auto it = std::upper_bound(tg.begin(), tg.end(), T);
      std::size_t b = it == tg.end() ? tg.size() - 1 : static_cast<std::size_t>(it - tg.begin());
      b = std::max<std::size_t>(b, 1);
      const std::size_t a = b - 1;
      const double span_t = tg[b] - tg[a];
      const double f = std::clamp((T - tg[a]) / span_t, 0.0, 1.0);

      Vec3 noise;
      if (opt.interpolation == Interpolation::brownian_bridge) {
        if (bridge.segment != a) {
          bridge.segment = a;
          bridge.s_prev = tg[a];
          bridge.d_prev = Vec3{};
        }
        const double s = std::max(T, bridge.s_prev);
        const double denom = tg[b] - bridge.s_prev;
        for (std::size_t c = 0; c < 3; ++c) {
          const double z = stream.normal();
          if (silent) continue;
          if (c == 1 && duplicated) {
            noise[1] = noise[0];
            continue;
          }
          if (denom > 0.0) {
            const double mean = bridge.d_prev[c] * (tg[b] - s) / denom;
            const double var = std::max(0.0, (s - bridge.s_prev) * (tg[b] - s) / denom);
            noise[c] = mean + std::sqrt(var) * z;
          }
        }
        bridge.s_prev = s;
        bridge.d_prev = noise;
      }
      const double rate = (qv[b] - qv[a]) / span_t;
      const double sigma = std::sqrt(diffusion_unit * rate);
      const double gain = std::sqrt(rate);
      Vec3 m_now;
      for (std::size_t c = 0; c < 3; ++c) {
        const auto xs = ens.x(c, p);
        const auto ms = ens.martingale(c, p);
        tc.x_tilde_mut(c, i)[k] = xs[a] + f * (xs[b] - xs[a]) + sigma * noise[c];
        m_now[c] = ms[a] + f * (ms[b] - ms[a]) + gain * noise[c];
        tc.w_tilde_increments_mut(c, i)[k] = k == 0 ? 0.0 : m_now[c] - m_prev[c];
      }
      m_prev = m_now;
    }
  }
  return tc;
}

std::vector<std::vector<FourVector>> four_vector_process(const TimeChangedEnsemble& tc,
                                                         const PhysicalConstants& k) {
  std::vector<std::vector<FourVector>> out(tc.n_paths());
  for (std::size_t i = 0; i < tc.n_paths(); ++i) {
    const auto T = tc.stopping_times(i);
    out[i].reserve(tc.n_tau());
    for (std::size_t j = 0; j < tc.n_tau(); ++j)
      out[i].push_back(FourVector{tc.x_tilde_at(i, j), k.c * T[j]});
  }
  return out;
}

double z6_residual_max(const TimeChangedEnsemble& tc, const WaveField& field) {
  const PhysicalConstants& k = field.constants();
  const double mc2 = k.mass * k.c * k.c;
  const auto tau = tc.tau_grid();
  double worst = 0.0;
  for (std::size_t i = 0; i < tc.n_paths(); ++i) {
    const auto T = tc.stopping_times(i);
    for (std::size_t j = 0; j + 1 < tc.n_tau(); ++j) {
      const double slope = (T[j + 1] - T[j]) / (tau[j + 1] - tau[j]);
      const double predicted = -field.evaluate(tc.x_tilde_at(i, j), T[j]).dt_S / mc2;
      worst = std::max(worst, std::abs(slope - predicted));
    }
  }
  return worst;
}

std::vector<double> tau_realized_qv(const TimeChangedEnsemble& tc, std::size_t comp) {
  std::vector<double> out(tc.n_paths());
  for (std::size_t i = 0; i < tc.n_paths(); ++i)
    out[i] = kernels::sum_sq_increments(tc.x_tilde(comp, i));
  return out;
}

TauStatistic tau_drift_estimate(const TimeChangedEnsemble& tc, std::size_t comp) {
  if (tc.n_tau() < 2 || tc.n_paths() == 0) throw InsufficientSamples("tau drift: empty ensemble");
  const double span = tc.tau_grid().back() - tc.tau_grid().front();
  std::vector<double> v(tc.n_paths());
  for (std::size_t i = 0; i < tc.n_paths(); ++i) {
    const auto x = tc.x_tilde(comp, i);
    v[i] = (x.back() - x.front()) / span;
  }
  const auto ps = kernels::power_sums(v);
  const double n = static_cast<double>(v.size());
  const double mean = ps.s1 / n;
  const double var = n > 1 ? std::max(0.0, (ps.s2 - n * mean * mean) / (n - 1.0)) : 0.0;
  return {mean, std::sqrt(var / n), v.size()};
}

RoundtripErrors roundtrip_errors(const PathEnsemble& ens, std::span<const double> tau_grid) {
  RoundtripErrors err;
  const auto tg = ens.t_grid();
  for (std::size_t p = 0; p < ens.n_paths(); ++p) {
    if (ens.status(p) != PathStatus::ok) continue;
    const auto qv = ens.qv(p);
    for (double tau : tau_grid) {
      if (tau > qv.back()) break;
      const double T = stopping_time(qv, tg, tau);
      err.qv_of_T_max = std::max(err.qv_of_T_max, std::abs(qv_at(qv, tg, T) - tau));
    }
    for (std::size_t k = 0; k < tg.size(); ++k) {
      const double T = stopping_time(qv, tg, qv[k]);
      err.T_of_qv_max = std::max(err.T_of_qv_max, std::abs(T - tg[k]));
    }
  }
  return err;
}

// ---------------------------------------------------------------------------
// Covariant identities

double minkowski_gradient_identity(const WaveField& field, std::span<const Vec3> xs,
                                   std::span<const double> ts) {
  if (xs.size() != ts.size()) throw PreconditionError("minkowski identity: points misaligned");
  const PhysicalConstants& k = field.constants();
  const double mc = k.mass * k.c;
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const FieldJet jet = field.evaluate(xs[i], ts[i]);
    const double r = dot(jet.grad_S, jet.grad_S) - jet.dt_S * jet.dt_S / (k.c * k.c) + mc * mc;
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

InvariantMeasureReport invariant_measure_checks(const WaveField& field,
                                                const SpaceTimeGrid& grid) {
  if (grid.size() == 0) throw PreconditionError("invariant measure checks: empty grid");
  const PhysicalConstants& k = field.constants();
  const double m = k.mass;
  const double c2 = k.c * k.c;
  const double hbar2 = k.hbar * k.hbar;
  InvariantMeasureReport rep;
  grid.for_each([&](const Vec3& x, double t) {
    const FieldJet j = field.evaluate(x, t);
    const double ss = dot(j.grad_S, j.grad_S) - j.dt_S * j.dt_S / c2;
    const double rr = dot(j.grad_R, j.grad_R) - j.dt_R * j.dt_R / c2;
    const double sr = dot(j.grad_S, j.grad_R) - j.dt_S * j.dt_R / c2;
    const double box_R = j.lap_R - j.dtt_R / c2;
    const double box_S = j.lap_S - j.dtt_S / c2;
    const double a11 = -ss / (2.0 * m) + hbar2 / (2.0 * m) * (rr + box_R) - m * c2 / 2.0;
    const double a12 = sr / m + box_S / (2.0 * m);
    const double cov = j.modulus_sq() * (2.0 * sr + box_S) / m;
    const double mink = ss + m * m * c2;
    rep.a11_residual_max = std::max(rep.a11_residual_max, std::abs(a11));
    rep.a12_residual_max = std::max(rep.a12_residual_max, std::abs(a12));
    rep.covariant_continuity_residual_max =
        std::max(rep.covariant_continuity_residual_max, std::abs(cov));
    rep.minkowski_gradient_norm_error_max =
        std::max(rep.minkowski_gradient_norm_error_max, std::abs(mink));
    ++rep.nodes;
  });
  return rep;
}

// ---------------------------------------------------------------------------
// Generator / adjoint

namespace {

struct BumpFactor {
  double psi = 0.0, d1 = 0.0, d2 = 0.0;
};

// psi(r) = exp(-1/(1-r^2)) and its first two derivatives in r.
BumpFactor bump_factor(double r) {
  if (!(std::abs(r) < 1.0)) return {};
  const double u = 1.0 - r * r;
  const double psi = std::exp(-1.0 / u);
  const double g1 = -2.0 * r / (u * u);
  const double g2 = -2.0 / (u * u) - 8.0 * r * r / (u * u * u);
  return {psi, g1 * psi, (g2 + g1 * g1) * psi};
}

}  // namespace

SeparableBump::Jet SeparableBump::evaluate(const std::array<double, 4>& z) const {
  std::array<BumpFactor, 4> fa{};
  for (std::size_t a = 0; a < 4; ++a) fa[a] = bump_factor((z[a] - center[a]) / half_width[a]);
  Jet jet;
  jet.value = amplitude * fa[0].psi * fa[1].psi * fa[2].psi * fa[3].psi;
  for (std::size_t a = 0; a < 4; ++a) {
    double rest = amplitude;
    for (std::size_t b = 0; b < 4; ++b)
      if (b != a) rest *= fa[b].psi;
    jet.grad[a] = rest * fa[a].d1 / half_width[a];
    if (a < 3) jet.spatial_laplacian += rest * fa[a].d2 / (half_width[a] * half_width[a]);
  }
  return jet;
}

GeneratorValues apply_generators(const FieldJet& jet, const PhysicalConstants& k,
                                 const SeparableBump::Jet& f) {
  const double m = k.mass;
  // Drift (1/m) grad_nu S . grad_nu f in the real metric; dS/dy = (1/c) dS/dt.
  double transport = 0.0;
  for (std::size_t a = 0; a < 3; ++a) transport += jet.grad_S[a] * f.grad[a];
  transport -= (jet.dt_S / k.c) * f.grad[3];
  transport /= m;
  double osmotic = 0.0;
  for (std::size_t a = 0; a < 3; ++a) osmotic += jet.grad_R[a] * f.grad[a];
  osmotic *= k.hbar / m;
  const double diffusion = 0.5 * (k.hbar / m) * f.spatial_laplacian;
  return {transport + osmotic + diffusion, transport - osmotic - diffusion};
}

namespace {

void check_support(const SeparableBump& f, const Box4& box) {
  constexpr double kBoundaryTol = 1e-12;
  // The other three factors are bounded by psi(0) = e^-1.
  const double others = std::exp(-3.0);
  for (std::size_t a = 0; a < 4; ++a) {
    for (double face : {box.lo[a], box.hi[a]}) {
      const double v = std::abs(f.amplitude) * bump_factor((face - f.center[a]) / f.half_width[a]).psi * others;
      if (v > kBoundaryTol) {
        std::ostringstream os;
        os << "test function reaches " << v << " on the boundary of axis " << a;
        throw SupportViolation(os.str());
      }
    }
  }
}

struct Pairings {
  double forward = 0.0;   // <Lf, g>
  double backward = 0.0;  // <f, L* g>
};

std::vector<Pairings> quadrature(const WaveField& field, std::span<const BumpPair> pairs,
                                 const Box4& box, std::size_t n) {
  const PhysicalConstants& k = field.constants();
  std::array<double, 4> h{};
  double cell = 1.0;
  for (std::size_t a = 0; a < 4; ++a) {
    h[a] = (box.hi[a] - box.lo[a]) / static_cast<double>(n);
    cell *= h[a];
  }
  auto node = [&](std::size_t a, std::size_t i) {
    return box.lo[a] + (static_cast<double>(i) + 0.5) * h[a];
  };

  // Per-axis factor tables for every bump: [pair][f|g][axis][node].
  using Table = std::array<std::vector<BumpFactor>, 4>;
  std::vector<std::array<Table, 2>> tables(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (int which = 0; which < 2; ++which) {
      const SeparableBump& b = which == 0 ? pairs[p].f : pairs[p].g;
      for (std::size_t a = 0; a < 4; ++a) {
        auto& col = tables[p][which][a];
        col.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
          BumpFactor bf = bump_factor((node(a, i) - b.center[a]) / b.half_width[a]);
          bf.d1 /= b.half_width[a];
          bf.d2 /= b.half_width[a] * b.half_width[a];
          col[i] = bf;
        }
      }
    }
  }
  auto jet_of = [&](const SeparableBump& b, const Table& tab, const std::array<std::size_t, 4>& idx) {
    std::array<BumpFactor, 4> fa{};
    for (std::size_t a = 0; a < 4; ++a) fa[a] = tab[a][idx[a]];
    SeparableBump::Jet j;
    j.value = b.amplitude * fa[0].psi * fa[1].psi * fa[2].psi * fa[3].psi;
    for (std::size_t a = 0; a < 4; ++a) {
      double rest = b.amplitude;
      for (std::size_t c = 0; c < 4; ++c)
        if (c != a) rest *= fa[c].psi;
      j.grad[a] = rest * fa[a].d1;
      if (a < 3) j.spatial_laplacian += rest * fa[a].d2;
    }
    return j;
  };

  std::optional<FieldJet> constant_jet;
  if (field.has_constant_coefficients()) constant_jet = field.evaluate(Vec3{}, 0.0);

  std::vector<Pairings> acc(pairs.size());
  std::array<std::size_t, 4> idx{};
  for (idx[3] = 0; idx[3] < n; ++idx[3]) {
    const double t = node(3, idx[3]) / k.c;
    for (idx[0] = 0; idx[0] < n; ++idx[0])
      for (idx[1] = 0; idx[1] < n; ++idx[1])
        for (idx[2] = 0; idx[2] < n; ++idx[2]) {
          const FieldJet jet = constant_jet
                                   ? *constant_jet
                                   : field.evaluate(Vec3{node(0, idx[0]), node(1, idx[1]),
                                                         node(2, idx[2])},
                                                    t);
          // R = 0 for the constant (plane-wave) case, so |phi|^2 = 1.
          const double weight = constant_jet ? 1.0 : jet.modulus_sq();
          for (std::size_t p = 0; p < pairs.size(); ++p) {
            const auto fj = jet_of(pairs[p].f, tables[p][0], idx);
            const auto gj = jet_of(pairs[p].g, tables[p][1], idx);
            if (fj.value == 0.0 && gj.value == 0.0) continue;
            const GeneratorValues lf = apply_generators(jet, k, fj);
            const GeneratorValues lg = apply_generators(jet, k, gj);
            acc[p].forward += lf.forward * gj.value * weight;
            acc[p].backward += fj.value * lg.backward * weight;
          }
        }
  }
  for (auto& a : acc) {
    a.forward *= cell;
    a.backward *= cell;
  }
  return acc;
}

}  // namespace

BumpPair default_bump_pair() {
  SeparableBump f{{-0.02, 0.01, 0.0, 0.0}, {0.85, 0.85, 0.85, 0.85}, 1.0};
  SeparableBump g{{0.02, -0.01, 0.01, 0.02}, {0.85, 0.85, 0.85, 0.85}, 1.0};
  return {f, g};
}

AdjointReport generator_adjoint_check(const WaveField& field, std::span<const BumpPair> pairs,
                                      const Box4& box, std::size_t resolution) {
  if (pairs.empty()) throw PreconditionError("generator_adjoint_check: no test function pairs");
  if (resolution < 2) throw PreconditionError("generator_adjoint_check: resolution must be >= 2");
  for (std::size_t a = 0; a < 4; ++a)
    if (!(box.hi[a] > box.lo[a])) throw PreconditionError("generator_adjoint_check: empty box");
  for (const auto& p : pairs) {
    check_support(p.f, box);
    check_support(p.g, box);
  }
  const auto coarse = quadrature(field, pairs, box, resolution);
  const auto fine = quadrature(field, pairs, box, 2 * resolution);
  AdjointReport rep;
  rep.resolution_coarse = resolution;
  rep.resolution_fine = 2 * resolution;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    rep.defect_coarse = std::max(rep.defect_coarse, std::abs(coarse[p].forward + coarse[p].backward));
    rep.defect_fine = std::max(rep.defect_fine, std::abs(fine[p].forward + fine[p].backward));
    const double scale = std::max(std::abs(fine[p].forward), std::numeric_limits<double>::min());
    rep.richardson_rel_gap =
        std::max(rep.richardson_rel_gap, std::abs(fine[p].forward - coarse[p].forward) / scale);
    rep.pairing_fine = fine[p].forward;
  }
  return rep;
}

}  // namespace relstoch
