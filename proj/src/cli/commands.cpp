#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "relstoch/cli.hpp"
#include "relstoch/errors.hpp"
#include "relstoch/kernels.hpp"
#include "relstoch/kinematics.hpp"
#include "relstoch/rng.hpp"

#ifndef RELSTOCH_VERSION
#define RELSTOCH_VERSION "unknown"
#endif

namespace relstoch::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<unsigned> workers;
  std::string out_dir;
  std::vector<std::string> only;
  std::string isa;
  bool force = false;
  bool break_independence = false;
  bool simulate_first = false;
};

constexpr const char* kManifest = "manifest.json";

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return json::parse(in);
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json field_summary(const ExperimentConfig& cfg, const WaveField& field) {
  json waves = json::array();
  for (const auto& t : field.terms())
    waves.push_back({{"momentum", {t.wave.momentum[0], t.wave.momentum[1], t.wave.momentum[2]}},
                     {"energy", t.wave.energy()},
                     {"weight", {t.weight.real(), t.weight.imag()}}});
  return {{"type", cfg.field_type}, {"waves", waves}};
}

/// Writes the manifest, hashing every listed file in the output directory.
void write_manifest(const ExperimentConfig& cfg, const WaveField& field, const std::string& command,
                    const fs::path& dir, const std::vector<std::string>& files) {
  json hashes = json::object();
  for (const auto& f : files) hashes[f] = fnv1a_file(dir / f);
  json m = {{"version", RELSTOCH_VERSION},
            {"command", command},
            {"seed", cfg.integrator.base_seed},
            {"config", to_json(cfg)},
            {"field", field_summary(cfg, field)},
            {"files", hashes},
            {"generated_at", utc_timestamp()}};
  write_json(m, dir / kManifest);
}

ExperimentConfig resolve_config(const Options& opt) {
  ExperimentConfig cfg;
  if (!opt.config_path.empty()) {
    cfg = load_config(opt.config_path);
  } else if (!opt.out_dir.empty() && fs::exists(fs::path(opt.out_dir) / kManifest)) {
    cfg = parse_config(read_json(fs::path(opt.out_dir) / kManifest).at("config"));
  } else {
    throw std::invalid_argument("no --config given and no manifest in --out");
  }
  if (opt.seed) cfg.integrator.base_seed = *opt.seed;
  if (opt.paths) cfg.integrator.n_paths = *opt.paths;
  if (opt.workers) cfg.integrator.workers = *opt.workers;
  if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
  if (!opt.only.empty()) {
    const auto& all = known_suites();
    for (const auto& s : opt.only)
      if (std::find(all.begin(), all.end(), s) == all.end())
        throw std::invalid_argument("unknown suite in --only: " + s);
    cfg.suites.enabled = opt.only;
  }
  cfg.integrator.validate();
  return cfg;
}

IntegratorConfig run_integrator(const ExperimentConfig& cfg, const Options& opt) {
  IntegratorConfig ic = cfg.integrator;
  if (opt.break_independence) ic.noise = NoiseMode::duplicated_axis;
  return ic;
}

/// Returns an exit code when the field is rejected, nullopt when the run may go on.
std::optional<int> admissibility_gate(const ExperimentConfig& cfg, const WaveField& field,
                                      const Options& opt, const fs::path& dir, std::ostream& err) {
  json rep;
  bool ok = false;
  try {
    const auto r = check_admissibility(field, cfg.admissibility_grid, cfg.admissibility_tol);
    rep = to_json(r);
    ok = r.admissible;
  } catch (const SingularNode& e) {
    rep = {{"admissible", false}, {"singular_node", e.what()}};
  }
  write_json(rep, dir / "admissibility.json");
  if (ok) return std::nullopt;
  err << "field is not admissible: " << rep.dump() << '\n';
  if (opt.force) {
    err << "continuing because of --force\n";
    return std::nullopt;
  }
  return exit_inadmissible;
}

// ---------------------------------------------------------------------------
// Verification suites

struct Context {
  const ExperimentConfig& cfg;
  const WaveField& field;
  const PathEnsemble& ens;
  const TimeChangedEnsemble* tc = nullptr;
};

TestReport not_applicable(const std::string& name, const std::string& why) {
  TestReport r = make_report(name, {Gate{"applicable", 1.0, 0.0, false}}, 0);
  r.note = why;
  return r;
}

Gate make_gate(std::string name, double value, double bound) {
  return {std::move(name), value, bound, std::abs(value) <= bound};
}

bool is_plane_wave(const WaveField& f) { return f.kind() == FieldKind::plane_wave; }

TestReport suite_wiener(const Context& c) {
  std::vector<Gate> gates;
  std::size_t n = 0;
  for (std::size_t comp = 0; comp < 3; ++comp) {
    const auto r = wiener_check(*c.tc, comp);
    for (auto g : r.gates) {
      g.name += "[" + std::to_string(comp + 1) + "]";
      gates.push_back(g);
    }
    n += r.n_samples;
  }
  return make_report("wiener", std::move(gates), n);
}

TestReport suite_knight(const Context& c) {
  std::vector<Gate> gates;
  std::size_t n = 0;
  const std::size_t pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (const auto& pr : pairs) {
    const auto r = knight_independence(*c.tc, pr[0], pr[1]);
    for (auto g : r.gates) {
      g.name += "[" + std::to_string(pr[0] + 1) + "," + std::to_string(pr[1] + 1) + "]";
      gates.push_back(g);
    }
    n += r.n_samples;
  }
  return make_report("knight", std::move(gates), n);
}

TestReport suite_density(const Context& c) {
  const auto box = c.cfg.box();
  if (!box || c.cfg.initial.type != "uniform_box" || !is_plane_wave(c.field))
    return not_applicable("density", "needs a plane wave, a periodic box and a uniform initial law");
  auto r = density_compare(c.ens, c.ens.n_keep() - 1, c.field, *box, c.cfg.suites.density_bins);
  r.name = "density";
  return r;
}

TestReport suite_pt3(const Context& c) {
  if (!is_plane_wave(c.field)) return not_applicable("pt3", "binned PT3 is defined for plane waves");
  const std::size_t lag = c.cfg.suites.pt3.lag;
  const std::size_t k = c.ens.n_keep() / 2;
  if (k < lag || k + lag >= c.ens.n_keep())
    return not_applicable("pt3", "pt3 lag exceeds half the retained horizon");
  const auto box = c.cfg.box();
  if (!box || c.cfg.initial.type != "uniform_box")
    return not_applicable("pt3", "needs a periodic box and a uniform initial law");
  return pt3_check(c.ens, k, lag, Binning::uniform(0, 0.0, box->side, c.cfg.suites.pt3.bins), box);
}

TestReport suite_roundtrip(const Context& c) {
  const auto e = roundtrip_errors(c.ens, c.tc->tau_grid());
  const double bound = 2.0 * c.cfg.integrator.dt;
  return make_report("roundtrip",
                     {make_gate("qv_of_T", e.qv_of_T_max, bound),
                      make_gate("T_of_qv", e.T_of_qv_max, bound)},
                     c.ens.n_paths());
}

TestReport suite_tau_domain(const Context& c) {
  const auto& k = c.cfg.constants;
  const auto& tc = *c.tc;
  const double tau_max = tc.tau_grid().back();
  const double dtau = c.cfg.tau.dtau;
  const double unit = k.hbar / k.mass;
  std::vector<Gate> gates;
  for (std::size_t comp = 0; comp < 3; ++comp) {
    const auto qv = tau_realized_qv(tc, comp);
    const double tol = 5.0 * unit * std::sqrt(2.0 * dtau * tau_max);
    std::size_t inside = 0;
    for (double q : qv)
      if (std::abs(q - unit * tau_max) <= tol) ++inside;
    const double outside = 1.0 - static_cast<double>(inside) / static_cast<double>(qv.size());
    gates.push_back(make_gate("qv_outside_fraction[" + std::to_string(comp + 1) + "]", outside, 0.01));
  }
  std::string note;
  if (is_plane_wave(c.field)) {
    const Vec3 drift = c.field.terms()[0].wave.momentum / k.mass;
    for (std::size_t comp = 0; comp < 3; ++comp) {
      const auto d = tau_drift_estimate(tc, comp);
      gates.push_back(make_gate("drift[" + std::to_string(comp + 1) + "]", d.mean - drift[comp],
                                3.0 * d.std_error));
    }
  } else {
    note = "drift gate needs constant coefficients; skipped";
  }
  gates.push_back(make_gate("dT_dtau", z6_residual_max(tc, c.field), 1e-3));
  auto r = make_report("tau_domain", std::move(gates), tc.n_paths());
  r.note = note;
  return r;
}

TestReport suite_invariant_measure(const Context& c) {
  const std::size_t n = c.cfg.suites.measure_grid;
  SpaceTimeGrid g;
  g.lo = Vec3{-1.0, -1.0, -1.0};
  g.hi = Vec3{1.0, 1.0, 1.0};
  g.n = {n, n, n};
  g.t0 = 0.0;
  g.t1 = 1.0;
  g.nt = n;
  const double tol = is_plane_wave(c.field) ? 1e-12 : 1e-9;
  const auto im = invariant_measure_checks(c.field, g);
  std::vector<Gate> gates{make_gate("a11", im.a11_residual_max, tol),
                          make_gate("a12", im.a12_residual_max, tol),
                          make_gate("covariant_continuity", im.covariant_continuity_residual_max, tol)};
  const Box4 box{{-1.0, -1.0, -1.0, -1.0}, {1.0, 1.0, 1.0, 1.0}};
  const BumpPair pairs[] = {default_bump_pair()};
  const auto adj = generator_adjoint_check(c.field, pairs, box, c.cfg.suites.adjoint_resolution);
  gates.push_back(make_gate("adjoint_defect", adj.defect_fine, 1e-6));
  gates.push_back(make_gate("richardson_rel_gap", adj.richardson_rel_gap, 1e-3));
  return make_report("invariant_measure", std::move(gates), im.nodes);
}

TestReport suite_minkowski(const Context& c) {
  GaussianStream s(c.cfg.integrator.base_seed, StreamPurpose::bridge, 0xfeedULL);
  std::vector<Vec3> xs(c.cfg.suites.minkowski_points);
  std::vector<double> ts(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t a = 0; a < 3; ++a) xs[i][a] = -2.0 + 4.0 * s.uniform();
    ts[i] = 2.0 * s.uniform();
  }
  const double r = minkowski_gradient_identity(c.field, xs, ts);
  return make_report("minkowski", {make_gate("mass_shell", r, 1e-12)}, xs.size());
}

TestReport suite_classical_limit(const Context& c) {
  if (!is_plane_wave(c.field)) return not_applicable("classical_limit", "needs a plane wave");
  IntegratorConfig ic = c.cfg.integrator;
  ic.n_paths = c.cfg.suites.classical.paths;
  ic.n_steps = static_cast<std::size_t>(std::llround(1.0 / ic.dt));
  ic.stride = ic.n_steps;
  ic.noise = NoiseMode::gaussian;
  return classical_limit_sweep(c.field, c.cfg.suites.classical.factors, ic).report;
}

struct FpOutcome {
  TestReport report;
  Grid1D grid;
  DensityField initial;
  DensityField final_density;
};

FpOutcome run_fp_crosscheck(const ExperimentConfig& cfg, const WaveField& field) {
  FpOutcome out;
  if (!is_plane_wave(field)) {
    out.report = not_applicable("fp_crosscheck", "needs a plane wave");
    return out;
  }
  const auto& p = cfg.suites.fp;
  const auto dd = forward_coefficients(field, Vec3{}, 0.0);
  const double b = dd.b_plus[0];
  const double mean = p.center + b * p.t_final;
  const double var = p.width * p.width + dd.sigma2 * p.t_final;
  auto analytic = [&](double x) { return wrapped_gaussian(x, p.length, mean, var); };

  IntegratorConfig ic = cfg.integrator;
  ic.n_paths = p.paths;
  ic.n_steps = static_cast<std::size_t>(std::llround(p.t_final / ic.dt));
  ic.stride = ic.n_steps;
  ic.noise = NoiseMode::gaussian;
  const PeriodicBox box{p.length};
  const auto ens = simulate_forward(
      field, InitialSampler::gaussian(Vec3{p.center, p.center, p.center}, p.width), ic, box);
  std::vector<double> xs;
  for (std::size_t i = 0; i < ens.n_paths(); ++i)
    if (ens.status(i) == PathStatus::ok) xs.push_back(box.wrap(ens.x(0, i).back()));

  Grid1D grid{p.length, p.cells, 0.0};
  grid.dt_pde = stable_fp_dt(field, grid);
  const auto init = DensityField::sample(
      grid, [&](double x) { return wrapped_gaussian(x, p.length, p.center, p.width * p.width); });
  const auto fp = evolve_fp(field, init, grid, p.t_final);
  const auto exact = DensityField::sample(grid, analytic);
  const double fp_l1 = l1_distance(fp.density, exact);

  const double stat = 5.0 * std::sqrt(static_cast<double>(p.bins) / static_cast<double>(xs.size()));
  const double hist_analytic = histogram_l1(xs, 0.0, p.length, bin_probabilities(analytic, 0.0, p.length, p.bins));
  std::vector<double> fp_bins(p.bins, 0.0);
  for (std::size_t i = 0; i < grid.n_cells; ++i) {
    const auto bin = std::min(p.bins - 1, static_cast<std::size_t>(grid.center(i) / p.length *
                                                                     static_cast<double>(p.bins)));
    fp_bins[bin] += fp.density.values[i] * grid.dx();
  }
  const double hist_fp = histogram_l1(xs, 0.0, p.length, fp_bins);

  out.report = make_report("fp_crosscheck",
                           {make_gate("hist_vs_analytic", hist_analytic, stat),
                            make_gate("fp_vs_analytic", fp_l1, 1e-3),
                            make_gate("hist_vs_fp", hist_fp, stat + fp_l1),
                            make_gate("mass_drift", fp.mass_drift, 1e-10),
                            make_gate("negativity", fp.negativity_flagged ? 1.0 : 0.0, 0.5)},
                           xs.size());
  out.grid = grid;
  out.initial = init;
  out.final_density = fp.density;
  return out;
}

TestReport run_suite(const std::string& name, const Context& c) {
  try {
    if (name == "wiener") return suite_wiener(c);
    if (name == "knight") return suite_knight(c);
    if (name == "density") return suite_density(c);
    if (name == "pt3") return suite_pt3(c);
    if (name == "roundtrip") return suite_roundtrip(c);
    if (name == "tau_domain") return suite_tau_domain(c);
    if (name == "invariant_measure") return suite_invariant_measure(c);
    if (name == "minkowski") return suite_minkowski(c);
    if (name == "classical_limit") return suite_classical_limit(c);
    if (name == "fp_crosscheck") return run_fp_crosscheck(c.cfg, c.field).report;
  } catch (const std::exception& e) {
    TestReport r = make_report(name, {Gate{"completed", 1.0, 0.0, false}}, 0);
    r.note = e.what();
    return r;
  }
  throw std::invalid_argument("unknown suite " + name);
}

bool needs_time_change(const std::vector<std::string>& suites) {
  for (const auto& s : suites)
    if (s == "wiener" || s == "knight" || s == "roundtrip" || s == "tau_domain") return true;
  return false;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_simulate(const Options& opt, bool with_tau, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = resolve_config(opt);
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  const WaveField field = cfg.make_field();
  if (auto code = admissibility_gate(cfg, field, opt, dir, err)) return *code;

  const auto ens = simulate_forward(field, cfg.make_sampler(), run_integrator(cfg, opt), cfg.box());
  for (const auto& d : ens.diagnostics()) err << d << '\n';
  write_ensemble_csv(ens, dir / "ensemble.csv", cfg.csv_stride);
  std::vector<std::string> files{"admissibility.json", "ensemble.csv"};
  if (with_tau) {
    const auto tc = time_change_ensemble(ens, cfg.tau);
    write_tau_csv(tc, dir / "tau_ensemble.csv", cfg.csv_stride);
    files.push_back("tau_ensemble.csv");
    out << "time-changed " << tc.n_paths() << " paths onto " << tc.n_tau() << " tau nodes (tau_max "
        << tc.tau_grid().back() << ", dropped " << tc.dropped_paths() << ")\n";
  }
  write_manifest(cfg, field, with_tau ? "timechange" : "simulate", dir, files);
  out << "simulated " << ens.n_paths() << " paths (" << ens.aborted_count() << " aborted) into "
      << dir.string() << '\n';
  return exit_ok;
}

int cmd_verify(const Options& opt, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = resolve_config(opt);
  const fs::path dir = cfg.output_dir;
  const fs::path manifest = dir / kManifest;
  if (!opt.simulate_first && !fs::exists(manifest)) {
    err << "no ensemble in " << dir.string() << "; run simulate first or pass --simulate-first\n";
    return exit_error;
  }
  std::optional<json> previous;
  if (fs::exists(manifest)) previous = read_json(manifest);
  fs::create_directories(dir);
  const WaveField field = cfg.make_field();
  if (auto code = admissibility_gate(cfg, field, opt, dir, err)) return *code;

  // The ensemble is regenerated from (config, seed); when the manifest describes
  // the same run its recorded hash must match.
  const auto ens = simulate_forward(field, cfg.make_sampler(), run_integrator(cfg, opt), cfg.box());
  write_ensemble_csv(ens, dir / "ensemble.csv", cfg.csv_stride);
  if (previous && !opt.simulate_first && !opt.break_independence &&
      parse_config(previous->at("config")).integrator.base_seed == cfg.integrator.base_seed &&
      previous->at("config") == to_json(cfg) && previous->at("files").contains("ensemble.csv")) {
    if (previous->at("files").at("ensemble.csv").get<std::string>() != fnv1a_file(dir / "ensemble.csv")) {
      err << "regenerated ensemble does not match the manifest hash\n";
      return exit_error;
    }
  }

  std::optional<TimeChangedEnsemble> tc;
  if (needs_time_change(cfg.suites.enabled)) tc = time_change_ensemble(ens, cfg.tau);
  Context ctx{cfg, field, ens, tc ? &*tc : nullptr};
  std::vector<TestReport> reports;
  for (const auto& name : cfg.suites.enabled) reports.push_back(run_suite(name, ctx));

  json arr = json::array();
  bool all = true;
  for (const auto& r : reports) {
    arr.push_back(to_json(r));
    all = all && r.passed;
  }
  write_json(arr, dir / "reports.json");
  write_manifest(cfg, field, "verify", dir, {"admissibility.json", "ensemble.csv", "reports.json"});
  out << format_report_table(reports);
  for (const auto& r : reports)
    if (!r.passed && !r.note.empty()) err << r.name << ": " << r.note << '\n';
  return all ? exit_ok : exit_suite_failed;
}

int cmd_fpcheck(const Options& opt, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = resolve_config(opt);
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  const WaveField field = cfg.make_field();
  if (auto code = admissibility_gate(cfg, field, opt, dir, err)) return *code;
  const auto res = run_fp_crosscheck(cfg, field);
  std::vector<std::string> files{"admissibility.json", "fp_report.json"};
  write_json(json::array({to_json(res.report)}), dir / "fp_report.json");
  if (!res.final_density.values.empty()) {
    write_density_csv(res.grid, res.initial, dir / "fp_density_initial.csv");
    write_density_csv(res.grid, res.final_density, dir / "fp_density_final.csv");
    files.push_back("fp_density_initial.csv");
    files.push_back("fp_density_final.csv");
  }
  write_manifest(cfg, field, "fpcheck", dir, files);
  const TestReport reports[] = {res.report};
  out << format_report_table(reports);
  if (!res.report.passed && !res.report.note.empty()) err << res.report.note << '\n';
  return res.report.passed ? exit_ok : exit_suite_failed;
}

int cmd_report(const Options& opt, std::ostream& out, std::ostream& err) {
  const fs::path dir = opt.out_dir.empty() ? fs::path("out") : fs::path(opt.out_dir);
  std::vector<TestReport> reports;
  bool found = false;
  for (const char* name : {"reports.json", "fp_report.json"}) {
    if (!fs::exists(dir / name)) continue;
    found = true;
    for (const auto& j : read_json(dir / name)) {
      TestReport r;
      r.name = j.at("name").get<std::string>();
      r.statistic = j.at("statistic").is_number() ? j.at("statistic").get<double>() : INFINITY;
      r.threshold = j.at("threshold").get<double>();
      r.passed = j.at("passed").get<bool>();
      r.n_samples = j.at("n_samples").get<std::size_t>();
      reports.push_back(r);
    }
  }
  if (!found) {
    err << "no reports in " << dir.string() << '\n';
    return exit_error;
  }
  out << format_report_table(reports);
  const bool all = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passed; });
  return all ? exit_ok : exit_suite_failed;
}

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--config", opt.config_path, "Experiment config (JSON)");
  sub->add_option("--seed", opt.seed, "Override the base seed");
  sub->add_option("--paths", opt.paths, "Override the number of paths");
  sub->add_option("--out", opt.out_dir, "Output directory");
  sub->add_option("--workers", opt.workers, "Worker threads");
  sub->add_option("--isa", opt.isa, "Kernel ISA: scalar or avx2")->check(CLI::IsMember({"scalar", "avx2"}));
  sub->add_flag("--force", opt.force, "Run even when the field is not admissible");
  sub->add_flag("--break-independence", opt.break_independence,
                "Test mode: drive axis 2 with the axis-1 noise");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Relativistic stochastic mechanics simulator and verifier"};
  app.require_subcommand(1);
  Options opt;
  auto* sim = app.add_subcommand("simulate", "Simulate the forward SDE and write ensemble.csv");
  auto* tch = app.add_subcommand("timechange", "Simulate and re-index paths by proper time");
  auto* ver = app.add_subcommand("verify", "Run verification suites");
  auto* fpc = app.add_subcommand("fpcheck", "Fokker-Planck cross-check");
  auto* rep = app.add_subcommand("report", "Print stored reports");
  for (auto* s : {sim, tch, ver, fpc}) add_common(s, opt);
  ver->add_option("--only", opt.only, "Comma-separated suites")->delimiter(',');
  ver->add_flag("--simulate-first", opt.simulate_first, "Simulate even without a prior run");
  rep->add_option("--out", opt.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_error;
  }

  try {
    if (!opt.isa.empty())
      kernels::force_isa(opt.isa == "avx2" ? kernels::Isa::avx2 : kernels::Isa::scalar);
    if (*sim) return cmd_simulate(opt, false, out, err);
    if (*tch) return cmd_simulate(opt, true, out, err);
    if (*ver) return cmd_verify(opt, out, err);
    if (*fpc) return cmd_fpcheck(opt, out, err);
    if (*rep) return cmd_report(opt, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_error;
  }
  return exit_error;
}

}  // namespace relstoch::cli
