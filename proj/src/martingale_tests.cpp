#include "relstoch/martingale_tests.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "relstoch/errors.hpp"
#include "relstoch/kernels.hpp"
#include "relstoch/kinematics.hpp"

namespace relstoch {

namespace {

constexpr std::size_t kMinSamples = 10000;

Gate gate(std::string name, double value, double bound) {
  return {std::move(name), value, bound, std::abs(value) <= bound};
}

}  // namespace

TestReport make_report(std::string name, std::vector<Gate> gates, std::size_t n_samples) {
  TestReport r;
  r.name = std::move(name);
  r.n_samples = n_samples;
  r.threshold = 1.0;
  double worst = 0.0;
  for (const Gate& g : gates) {
    const double ratio = std::abs(g.value) / g.bound;
    worst = std::isnan(ratio) ? std::numeric_limits<double>::infinity() : std::max(worst, ratio);
  }
  r.statistic = worst;
  r.gates = std::move(gates);
  r.passed = r.statistic <= r.threshold;
  for (const Gate& g : r.gates) r.passed = r.passed && g.passed;
  return r;
}

TestReport wiener_check(std::span<const double> increments, double dtau) {
  if (!(dtau > 0.0)) throw PreconditionError("wiener_check: dtau must be > 0");
  const std::size_t n = increments.size();
  if (n < kMinSamples) {
    std::ostringstream os;
    os << "wiener_check needs >= " << kMinSamples << " increments, got " << n;
    throw InsufficientSamples(os.str());
  }
  std::vector<double> z(increments.begin(), increments.end());
  const double scale = 1.0 / std::sqrt(dtau);
  for (double& v : z) v *= scale;
  const auto ps = kernels::power_sums(z);
  const double N = static_cast<double>(n);
  const double mu = ps.s1 / N;
  const double e2 = ps.s2 / N, e3 = ps.s3 / N, e4 = ps.s4 / N;
  const double m2 = e2 - mu * mu;
  const double m4 = e4 - 4.0 * mu * e3 + 6.0 * mu * mu * e2 - 3.0 * mu * mu * mu * mu;
  const double var = m2 * N / (N - 1.0);
  const double kurt = m4 / (m2 * m2) - 3.0;

  std::vector<Gate> gates;
  gates.push_back(gate("mean", mu, 3.0 / std::sqrt(N)));
  gates.push_back(gate("variance-1", var - 1.0, 3.0 * std::sqrt(2.0 / N)));
  gates.push_back(gate("excess_kurtosis", kurt, 3.0 * std::sqrt(24.0 / N)));
  return make_report("wiener", std::move(gates), n);
}

TestReport wiener_check(const TimeChangedEnsemble& tc, std::size_t comp) {
  if (comp > 2) throw PreconditionError("wiener_check: component out of range");
  if (tc.n_tau() < 2) throw InsufficientSamples("wiener_check: tau grid has no increments");
  const auto inc = tc.pooled_increments(comp);
  auto r = wiener_check(inc, tc.tau_grid()[1] - tc.tau_grid()[0]);
  r.name = "wiener[" + std::to_string(comp + 1) + "]";
  return r;
}

TestReport knight_independence(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw PreconditionError("knight_independence: length mismatch");
  const std::size_t n = a.size();
  if (n < kMinSamples) {
    std::ostringstream os;
    os << "knight_independence needs >= " << kMinSamples << " pairs, got " << n;
    throw InsufficientSamples(os.str());
  }
  const auto cs = kernels::cross_sums(a, b);
  const double N = static_cast<double>(n);
  auto corr = [N](double sx, double sy, double sxx, double syy, double sxy) {
    const double mx = sx / N, my = sy / N;
    const double cov = sxy / N - mx * my;
    const double vx = sxx / N - mx * mx;
    const double vy = syy / N - my * my;
    return cov / std::sqrt(vx * vy);
  };
  const double r1 = corr(cs.a, cs.b, cs.aa, cs.bb, cs.ab);
  const double r2 = corr(cs.aa, cs.bb, cs.a4, cs.b4, cs.a2b2);
  const double bound = 3.0 / std::sqrt(N);
  std::vector<Gate> gates;
  gates.push_back(gate("corr", r1, bound));
  gates.push_back(gate("corr_squares", r2, bound));
  return make_report("knight", std::move(gates), n);
}

TestReport knight_independence(const TimeChangedEnsemble& tc, std::size_t i, std::size_t j) {
  if (i == j) throw PreconditionError("knight_independence: components must differ");
  if (i > 2 || j > 2) throw PreconditionError("knight_independence: component out of range");
  const auto a = tc.pooled_increments(i);
  const auto b = tc.pooled_increments(j);
  auto r = knight_independence(a, b);
  r.name = "knight[" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "]";
  return r;
}

std::vector<double> pooled_martingale_increments(const PathEnsemble& ens, std::size_t comp) {
  if (comp > 2) throw PreconditionError("component out of range");
  std::vector<double> out;
  if (ens.n_keep() < 2) return out;
  out.reserve(ens.n_paths() * (ens.n_keep() - 1));
  for (std::size_t p = 0; p < ens.n_paths(); ++p) {
    if (ens.status(p) != PathStatus::ok) continue;
    const auto m = ens.martingale(comp, p);
    for (std::size_t k = 1; k < m.size(); ++k) out.push_back(m[k] - m[k - 1]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Densities

double histogram_l1(std::span<const double> samples, double lo, double hi,
                    std::span<const double> probs) {
  if (samples.empty()) throw InsufficientSamples("histogram_l1: no samples");
  if (probs.empty() || !(hi > lo)) throw PreconditionError("histogram_l1: invalid bins");
  const std::size_t nb = probs.size();
  std::vector<double> counts(nb, 0.0);
  const double width = (hi - lo) / static_cast<double>(nb);
  for (double s : samples) {
    if (!(s >= lo && s < hi)) continue;
    const auto b = std::min(nb - 1, static_cast<std::size_t>((s - lo) / width));
    counts[b] += 1.0;
  }
  double total = 0.0;
  for (double p : probs) total += p;
  if (!(total > 0.0)) throw PreconditionError("histogram_l1: target has no mass");
  const double N = static_cast<double>(samples.size());
  double l1 = 0.0;
  for (std::size_t b = 0; b < nb; ++b) l1 += std::abs(counts[b] / N - probs[b] / total);
  return l1;
}

std::vector<double> bin_probabilities(const std::function<double(double)>& density, double lo,
                                      double hi, std::size_t bins, std::size_t sub) {
  if (bins == 0 || !(hi > lo)) throw PreconditionError("bin_probabilities: invalid bins");
  sub = std::max<std::size_t>(sub, 2);
  if (sub % 2 == 1) ++sub;
  const double width = (hi - lo) / static_cast<double>(bins);
  const double h = width / static_cast<double>(sub);
  std::vector<double> out(bins);
  double total = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double a = lo + static_cast<double>(b) * width;
    double s = density(a) + density(a + width);
    for (std::size_t i = 1; i < sub; ++i)
      s += (i % 2 == 1 ? 4.0 : 2.0) * density(a + static_cast<double>(i) * h);
    out[b] = s * h / 3.0;
    total += out[b];
  }
  if (!(total > 0.0)) throw PreconditionError("bin_probabilities: density has no mass");
  for (double& v : out) v /= total;
  return out;
}

TestReport density_compare(const PathEnsemble& ens, std::size_t k, const PeriodicBox& box,
                           std::size_t bins, const std::function<double(double)>& density) {
  if (k >= ens.n_keep()) throw PreconditionError("density_compare: retained index out of range");
  std::vector<double> xs;
  xs.reserve(ens.n_paths());
  for (std::size_t p = 0; p < ens.n_paths(); ++p)
    if (ens.status(p) == PathStatus::ok) xs.push_back(box.wrap(ens.x(0, p)[k]));
  if (xs.empty()) throw InsufficientSamples("density_compare: no paths");
  const auto probs = bin_probabilities(density, 0.0, box.side, bins);
  const double l1 = histogram_l1(xs, 0.0, box.side, probs);
  const double bound = 5.0 * std::sqrt(static_cast<double>(bins) / static_cast<double>(xs.size()));
  return make_report("density", {gate("l1", l1, bound)}, xs.size());
}

TestReport density_compare(const PathEnsemble& ens, std::size_t k, const WaveField& field,
                           const PeriodicBox& box, std::size_t bins) {
  if (k >= ens.n_keep()) throw PreconditionError("density_compare: retained index out of range");
  const double t = ens.t_grid()[k];
  constexpr std::size_t kTransverse = 8;
  auto marginal = [&](double x) {
    double s = 0.0;
    for (std::size_t i = 0; i < kTransverse; ++i)
      for (std::size_t j = 0; j < kTransverse; ++j) {
        const double y = (static_cast<double>(i) + 0.5) * box.side / kTransverse;
        const double z = (static_cast<double>(j) + 0.5) * box.side / kTransverse;
        s += rho_and_current(field, Vec3{x, y, z}, t).rho;
      }
    return s;
  };
  return density_compare(ens, k, box, bins, marginal);
}

// ---------------------------------------------------------------------------

TestReport pt3_check(const PathEnsemble& ens, std::size_t k, std::size_t lag,
                     const Binning& bins, const std::optional<PeriodicBox>& box) {
  const auto est = conditional_symmetric_increment(ens, k, lag, bins, box);
  const double c2 = ens.constants().c * ens.constants().c;
  const double h = ens.t_grid()[k + 1] - ens.t_grid()[k];
  const double floor_tol = 10.0 * ens.dt();

  const std::size_t nb = bins.bins();
  std::vector<double> dq_sum(nb, 0.0);
  std::vector<std::size_t> dq_count(nb, 0);
  for (std::size_t p = 0; p < ens.n_paths(); ++p) {
    if (ens.status(p) != PathStatus::ok) continue;
    const double xk = ens.x(bins.axis, p)[k];
    const std::size_t b = bins.locate(box ? box->wrap(xk) : xk);
    if (b >= nb) continue;
    const auto qv = ens.qv(p);
    dq_sum[b] += qv[k + 1] - qv[k];
    ++dq_count[b];
  }

  std::vector<Gate> gates;
  std::size_t skipped = 0, used = 0;
  for (std::size_t b = 0; b < nb; ++b) {
    if (est[b].count < 2) {
      ++skipped;
      continue;
    }
    used += est[b].count;
    const Vec3& v = est[b].mean;
    const double vv = dot(v, v);
    const double se = norm(est[b].std_error);
    const double dq = dq_sum[b] / static_cast<double>(dq_count[b]);
    const double lhs = dq * dq;
    const double rhs = (1.0 - vv / c2) * h * h;
    double rel = std::numeric_limits<double>::infinity();
    double tol = floor_tol;
    if (rhs > 0.0) {
      rel = std::abs(lhs - rhs) / rhs;
      const double ci = 2.0 * std::sqrt(vv) * se / (c2 - vv);
      tol = std::max(5.0 * ci, floor_tol);
    }
    gates.push_back(gate("bin" + std::to_string(b), rel, tol));
  }
  if (gates.empty()) throw InsufficientSamples("pt3_check: every bin is empty");
  auto r = make_report("pt3", std::move(gates), used);
  r.note = std::to_string(skipped) + " bins skipped";
  return r;
}

// ---------------------------------------------------------------------------

ClassicalLimitResult classical_limit_sweep(const WaveField& field,
                                           std::span<const double> hbar_factors,
                                           const IntegratorConfig& cfg) {
  if (field.kind() != FieldKind::plane_wave || field.terms().size() != 1)
    throw PreconditionError("classical_limit_sweep: needs a single plane wave");
  if (hbar_factors.empty()) throw PreconditionError("classical_limit_sweep: no factors");
  cfg.validate();
  const Vec3 p = field.terms()[0].wave.momentum;
  const PhysicalConstants base = field.constants();
  const double horizon = cfg.horizon();

  ClassicalLimitResult res;
  std::vector<Gate> gates;
  std::vector<double> qv_ref;
  std::size_t samples = 0;
  for (double f : hbar_factors) {
    if (!(f > 0.0)) throw PreconditionError("classical_limit_sweep: factors must be > 0");
    PhysicalConstants k = base;
    k.hbar *= f;
    const WaveField scaled = make_plane_wave(p, k);
    const auto ens = simulate_forward(scaled, InitialSampler::point_mass(Vec3{}), cfg);
    const auto lc = local_coefficients(scaled.evaluate(Vec3{}, 0.0), k);

    std::vector<double> x1, qv_final;
    for (std::size_t i = 0; i < ens.n_paths(); ++i) {
      if (ens.status(i) != PathStatus::ok) continue;
      x1.push_back(ens.x(0, i).back());
      qv_final.push_back(ens.qv(i).back());
    }
    if (x1.size() < 2) throw InsufficientSamples("classical_limit_sweep: too few paths");
    samples += x1.size();
    const auto ps = kernels::power_sums(x1);
    const double n = static_cast<double>(x1.size());
    const double mean = ps.s1 / n;
    ClassicalLimitPoint pt;
    pt.factor = f;
    pt.variance = (ps.s2 - n * mean * mean) / (n - 1.0);
    pt.expected_variance = lc.sigma2 * horizon;
    pt.qv_final_mean = kernels::sum(qv_final) / n;
    if (qv_ref.empty()) qv_ref = qv_final;
    for (std::size_t i = 0; i < std::min(qv_ref.size(), qv_final.size()); ++i)
      pt.qv_max_shift = std::max(pt.qv_max_shift, std::abs(qv_final[i] - qv_ref[i]));

    std::ostringstream tag;
    tag << "f=" << f;
    gates.push_back(gate("var_rel_err " + tag.str(),
                         pt.variance / pt.expected_variance - 1.0, 0.1));
    gates.push_back(gate("qv_shift " + tag.str(), pt.qv_max_shift, 1e-10));
    res.points.push_back(pt);
  }
  res.report = make_report("classical_limit", std::move(gates), samples);
  return res;
}

std::string format_report_table(std::span<const TestReport> reports) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-22s %14s %10s %10s  %s\n", "suite", "statistic",
                "threshold", "samples", "result");
  out += line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-22s %14.6g %10.4g %10zu  %s\n", r.name.c_str(),
                  r.statistic, r.threshold, r.n_samples, r.passed ? "PASS" : "FAIL");
    out += line;
  }
  return out;
}

}  // namespace relstoch
