// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "relstoch/cli.hpp"
#include "relstoch/errors.hpp"
#include "relstoch/fokker_planck.hpp"
#include "relstoch/kinematics.hpp"
#include "relstoch/martingale_tests.hpp"
#include "relstoch/time_change.hpp"

using namespace relstoch;
namespace fs = std::filesystem;

namespace {

const double kSqrtHalf = std::sqrt(0.5);

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

IntegratorConfig config(std::size_t paths, std::size_t steps, std::size_t stride = 1) {
  IntegratorConfig c;
  c.n_paths = paths;
  c.n_steps = steps;
  c.stride = stride;
  return c;
}

PathEnsemble from_origin(const Vec3& p, const IntegratorConfig& c) {
  return simulate_forward(make_plane_wave(p), InitialSampler::point_mass({0, 0, 0}), c);
}

TimeChangedEnsemble tau_ensemble(const PathEnsemble& ens) {
  TimeChangeOptions opt;
  opt.dtau = 1e-3;
  opt.tau_max = 0.5;
  opt.bridge_seed = 7;
  return time_change_ensemble(ens, opt);
}

// Shared by criteria 4-8: 200 paths of p = (1,0,0), 750 steps, time-changed on [0, 0.5].
struct TauFixture {
  PathEnsemble ens = from_origin({1, 0, 0}, config(200, 750));
  TimeChangedEnsemble tc = tau_ensemble(ens);
};

const TauFixture& tau_fixture() {
  static const TauFixture f;
  return f;
}

Outcome c1_rate() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto ens = from_origin({1, 0, 0}, config(1000, 1000));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double worst = 0.0;
  for (std::size_t p = 0; p < ens.n_paths(); ++p)
    worst = std::max(worst, std::abs(ens.qv(p).back() - kSqrtHalf));
  return {worst <= 1e-10 && secs < 1.0,
          fmt("max |qv(1) - 1/sqrt2| = %.2e, 1000 paths in %.3f s", worst, secs)};
}

Outcome c2_monotone() {
  std::size_t checked = 0, violations = 0;
  for (const Vec3& p : {Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{1, 1, 1}}) {
    const auto ens = from_origin(p, config(200, 1000));
    const auto tg = ens.t_grid();
    for (std::size_t q = 0; q < ens.n_paths(); ++q)
      for (std::size_t k = 0; k < ens.n_keep(); ++k, ++checked) violations += ens.qv(q)[k] > tg[k];
  }
  return {violations == 0, fmt("%zu of %zu (path, step) pairs violate qv <= t", violations, checked)};
}

Outcome c3_gaussian_law() {
  const auto ens = from_origin({1, 0, 0}, config(20000, 1000, 1000));
  std::vector<double> x(ens.n_paths());
  for (std::size_t p = 0; p < x.size(); ++p) x[p] = ens.x(0, p).back();
  const double n = static_cast<double>(x.size());
  double mean = 0.0, ss = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double var = ss / (n - 1);
  const double tol_m = 3.0 * std::sqrt(kSqrtHalf / n);
  const double tol_v = kSqrtHalf * 3.0 * std::sqrt(2.0 / (n - 1));
  return {std::abs(mean - kSqrtHalf) <= tol_m && std::abs(var - kSqrtHalf) <= tol_v,
          fmt("mean %.5f (tol %.4f), var %.5f (tol %.4f)", mean, tol_m, var, tol_v)};
}

Outcome c4_roundtrip() {
  const auto& f = tau_fixture();
  const auto err = roundtrip_errors(f.ens, f.tc.tau_grid());
  const double bound = 2.0 * f.ens.dt();
  return {err.qv_of_T_max <= bound && err.T_of_qv_max <= bound,
          fmt("|qv(T) - tau| %.2e, |T(qv) - t| %.2e, bound %.0e", err.qv_of_T_max, err.T_of_qv_max,
              bound)};
}

Outcome c5_constant_diffusion() {
  const auto& f = tau_fixture();
  const auto qv = tau_realized_qv(f.tc, 0);
  const double tol = 5.0 * std::sqrt(2.0 * 1e-3 * 0.5);
  std::size_t inside = 0;
  for (double q : qv) inside += std::abs(q - 0.5) <= tol;
  const double frac = static_cast<double>(inside) / static_cast<double>(qv.size());
  const auto drift = tau_drift_estimate(f.tc, 0);
  const bool drift_ok = std::abs(drift.mean - 1.0) <= 3.0 * drift.std_error;
  return {frac >= 0.99 && drift_ok,
          fmt("%.1f%% of paths with QV in 0.5 +- %.3f; drift %.4f +- %.4f (3 se)", 100.0 * frac, tol,
              drift.mean, 3.0 * drift.std_error)};
}

Outcome c6_dT_dtau() {
  const auto& f = tau_fixture();
  double worst = 0.0;
  const auto tau = f.tc.tau_grid();
  for (std::size_t i = 0; i < f.tc.n_paths(); ++i) {
    const auto T = f.tc.stopping_times(i);
    for (std::size_t k = 0; k + 1 < T.size(); ++k)
      worst = std::max(worst, std::abs((T[k + 1] - T[k]) / (tau[k + 1] - tau[k]) - std::sqrt(2.0)));
  }
  return {worst <= 1e-3, fmt("max |dT/dtau - sqrt2| = %.2e", worst)};
}

Outcome c7_knight() {
  const auto& f = tau_fixture();
  const auto ok = knight_independence(f.tc, 0, 1);
  auto cfg = config(200, 750);
  cfg.noise = NoiseMode::duplicated_axis;
  const auto broken = knight_independence(tau_ensemble(from_origin({1, 0, 0}, cfg)), 0, 1);
  return {ok.passed && !broken.passed,
          fmt("r = %.5f (bound %.5f, N = %zu); duplicated-noise control r = %.3f %s",
              ok.gates[0].value, ok.gates[0].bound, ok.n_samples, broken.gates[0].value,
              broken.passed ? "passed (bad)" : "fails")};
}

Outcome c8_wiener() {
  const auto& f = tau_fixture();
  bool all = true;
  std::string stats;
  for (std::size_t c = 0; c < 3; ++c) {
    const auto r = wiener_check(f.tc, c);
    all = all && r.passed;
    stats += fmt(" %.2f", r.statistic);
  }
  const auto control = wiener_check(pooled_martingale_increments(f.ens, 0), f.ens.dt());
  return {all && !control.passed,
          fmt("statistics%s (N = 1e5); sqrt(dt)-scaled control var %.3f %s", stats.c_str(),
              control.gates[1].value + 1.0, control.passed ? "passed (bad)" : "fails")};
}

Outcome c9_mass_shell() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<Vec3> xs(1000);
  std::vector<double> ts(1000);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = {u(rng), u(rng), u(rng)};
    ts[i] = u(rng);
  }
  double worst = 0.0;
  for (const Vec3& p : {Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{1, 1, 1}, Vec3{-0.3, 2.0, 0.7}})
    worst = std::max(worst, minkowski_gradient_identity(make_plane_wave(p), xs, ts));
  return {worst <= 1e-12, fmt("max residual %.2e over 1000 points, 4 plane waves", worst)};
}

Outcome c10_invariant_measure() {
  SpaceTimeGrid g;
  g.n = {16, 16, 16};
  g.nt = 16;
  double worst = 0.0;
  for (const Vec3& p : {Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{1, 1, 1}}) {
    const auto r = invariant_measure_checks(make_plane_wave(p), g);
    worst = std::max({worst, r.a11_residual_max, r.a12_residual_max,
                      r.covariant_continuity_residual_max});
  }
  return {worst <= 1e-12, fmt("max residual %.2e on 16^4 nodes", worst)};
}

Outcome c11_adjoint() {
  const Box4 box{{-1, -1, -1, -1}, {1, 1, 1, 1}};
  const auto pair = default_bump_pair();
  const auto r = generator_adjoint_check(make_plane_wave({1, 0, 0}), std::span(&pair, 1), box, 24);
  return {r.defect_fine <= 1e-6 && r.richardson_rel_gap <= 1e-3,
          fmt("defect %.2e at %zu^4 (%.2e at %zu^4), relative Richardson gap %.2e",
              r.defect_fine, r.resolution_fine, r.defect_coarse, r.resolution_coarse,
              r.richardson_rel_gap)};
}

Outcome c12_pt3() {
  const PeriodicBox box{4.0};
  const auto bins = Binning::uniform(0, 0.0, 4.0, 4);
  const auto moving = simulate_forward(make_plane_wave({1, 0, 0}), InitialSampler::uniform_box(),
                                       config(2000, 1000, 10), box);
  const auto rest = simulate_forward(make_plane_wave({0, 0, 0}), InitialSampler::uniform_box(),
                                     config(2000, 1000, 10), box);
  const auto rm = pt3_check(moving, 50, 40, bins, box);
  const auto rr = pt3_check(rest, 50, 40, bins, box);
  return {rm.passed && rr.passed,
          fmt("p=(1,0,0) statistic %.3f; rest statistic %.3f", rm.statistic, rr.statistic)};
}

Outcome c13_density() {
  const double L = 4.0, mean0 = 2.0, var0 = 0.09, t = 0.5;
  const auto field = make_plane_wave({1, 0, 0});
  const auto analytic = [&](double x) {
    return wrapped_gaussian(x, L, mean0 + kSqrtHalf * t, var0 + kSqrtHalf * t);
  };
  const PeriodicBox box{L};
  const auto ens = simulate_forward(field, InitialSampler::gaussian({mean0, mean0, mean0}, 0.3),
                                    config(20000, 500, 500), box);
  const auto hist = density_compare(ens, 1, box, 64, analytic);

  Grid1D grid{L, 512, 1.0};
  grid.dt_pde = stable_fp_dt(field, grid);
  const auto init = DensityField::sample(grid, [&](double x) { return wrapped_gaussian(x, L, mean0, var0); });
  const auto fp = evolve_fp(field, init, grid, t);
  const auto exact = DensityField::sample(grid, analytic);
  const double fp_err = l1_distance(fp.density, exact);
  const auto fp_cells = fp.density.values;
  const auto vs_fp = density_compare(ens, 1, box, 64, [&](double x) {
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(x / grid.dx()), grid.n_cells - 1);
    return fp_cells[i];
  });
  return {hist.passed && vs_fp.passed && fp_err <= 1e-3,
          fmt("histogram L1 %.3f and vs FP %.3f (bound %.3f); FP vs analytic %.2e", hist.gates[0].value,
              vs_fp.gates[0].value, hist.gates[0].bound, fp_err)};
}

Outcome c14_classical() {
  const std::vector<double> factors{1.0, 0.1, 0.01};
  const auto res = classical_limit_sweep(make_plane_wave({1, 0, 0}), factors, config(5000, 1000, 1000));
  std::string d;
  for (const auto& pt : res.points)
    d += fmt("f=%g var %.5f/%.5f qv shift %.1e; ", pt.factor, pt.variance, pt.expected_variance,
             pt.qv_max_shift);
  return {res.report.passed, d};
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "relstoch_run");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

const fs::path kConfigs = RELSTOCH_CONFIG_DIR;
const fs::path kScratch = fs::temp_directory_path() / "relstoch_acceptance";

Outcome c15_admissibility() {
  const fs::path two = kScratch / "two_wave", one = kScratch / "plane_wave";
  const int code_two = cli({"simulate", "--config", (kConfigs / "two_wave.json").string(), "--out",
                            two.string()});
  const double z0 = read_json(two / "admissibility.json").at("z0_residual_max").get<double>();
  const int code_one = cli({"simulate", "--config", (kConfigs / "plane_wave.json").string(),
                            "--paths", "10", "--out", one.string()});
  const auto adm = read_json(one / "admissibility.json");
  const double worst = std::max({adm.at("z0_residual_max").get<double>(),
                                 adm.at("kg_residual_max").get<double>(),
                                 adm.at("j_identity_residual_max").get<double>()});
  return {code_two == 2 && z0 > 0.0 && code_one == 0 && worst == 0.0,
          fmt("two-wave exit %d, z0 residual %.3f; plane wave exit %d, max residual %.1e", code_two,
              z0, code_one, worst)};
}

Outcome c16_reproducible() {
  const fs::path a = kScratch / "w1", b = kScratch / "w4";
  const std::string cfg = (kConfigs / "plane_wave.json").string();
  const int ca = cli({"simulate", "--config", cfg, "--workers", "1", "--out", a.string()});
  const int cb = cli({"simulate", "--config", cfg, "--workers", "4", "--out", b.string()});
  const auto sa = slurp(a / "ensemble.csv"), sb = slurp(b / "ensemble.csv");
  const bool same = ca == 0 && cb == 0 && !sa.empty() && sa == sb;
  return {same, fmt("workers 1 vs 4: %zu bytes, %s", sa.size(), same ? "identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  fs::remove_all(kScratch);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"proper-time rate of a plane wave", c1_rate},
      {"qv(t) <= t on every path and step", c2_monotone},
      {"Gaussian law of X(1)", c3_gaussian_law},
      {"time-change roundtrip", c4_roundtrip},
      {"constant diffusion in proper time", c5_constant_diffusion},
      {"dT/dtau = p0 / mc^2", c6_dT_dtau},
      {"pairwise independence of W~", c7_knight},
      {"W~ is a standard Wiener process", c8_wiener},
      {"mass-shell identity", c9_mass_shell},
      {"invariant-measure equations", c10_invariant_measure},
      {"generator adjoint defect", c11_adjoint},
      {"squared proper-time increment vs current velocity", c12_pt3},
      {"density of X(t): histogram, FP solver, analytic", c13_density},
      {"classical limit in hbar", c14_classical},
      {"admissibility gate", c15_admissibility},
      {"reproducibility across worker counts", c16_reproducible},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
