#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "relstoch/cli.hpp"

namespace relstoch::cli {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw std::invalid_argument("config " + where + ": " + what);
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) schema_error(where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items())
    if (!ok.count(key)) schema_error(where + "." + key, "unknown key");
}

double number(const json& j, const char* key, const std::string& where, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) schema_error(where + "." + key, "expected a number");
  return j[key].get<double>();
}

std::size_t count(const json& j, const char* key, const std::string& where, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_unsigned()) schema_error(where + "." + key, "expected a non-negative integer");
  return j[key].get<std::size_t>();
}

std::string text(const json& j, const char* key, const std::string& where, std::string fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) schema_error(where + "." + key, "expected a string");
  return j[key].get<std::string>();
}

Vec3 vec3(const json& j, const char* key, const std::string& where, const Vec3& fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j[key];
  if (!v.is_array() || v.size() != 3) schema_error(where + "." + key, "expected [x, y, z]");
  Vec3 out;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!v[i].is_number()) schema_error(where + "." + key, "expected numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

const char* policy_name(ShortPathPolicy p) {
  return p == ShortPathPolicy::drop ? "drop" : "truncate_to_min";
}
const char* interpolation_name(Interpolation i) {
  return i == Interpolation::linear ? "linear" : "brownian_bridge";
}

}  // namespace

const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> names{
      "wiener",         "knight",           "density",         "pt3",
      "roundtrip",      "tau_domain",       "invariant_measure", "minkowski",
      "classical_limit", "fp_crosscheck"};
  return names;
}

WaveField ExperimentConfig::make_field() const {
  if (field_type == "plane_wave") return make_plane_wave(waves.front().momentum, constants);
  std::vector<PlaneWaveSpec> specs;
  std::vector<std::complex<double>> weights;
  for (const auto& w : waves) {
    specs.push_back(PlaneWaveSpec{w.momentum, constants});
    weights.emplace_back(w.weight_re, w.weight_im);
  }
  return superpose(specs, weights);
}

InitialSampler ExperimentConfig::make_sampler() const {
  if (initial.type == "uniform_box") return InitialSampler::uniform_box();
  if (initial.type == "gaussian") return InitialSampler::gaussian(initial.x0, initial.width);
  return InitialSampler::point_mass(initial.x0);
}

std::optional<PeriodicBox> ExperimentConfig::box() const {
  if (!box_side) return std::nullopt;
  return PeriodicBox{*box_side};
}

ExperimentConfig parse_config(const json& j) {
  check_keys(j, "root",
             {"constants", "units", "field", "integrator", "initial", "box", "tau",
              "admissibility", "suites", "output"});
  ExperimentConfig cfg;

  if (j.contains("constants") && j.contains("units"))
    schema_error("root", "give either constants or units, not both");
  const char* ckey = j.contains("units") ? "units" : "constants";
  if (j.contains(ckey)) {
    const json& c = j[ckey];
    const std::string w = std::string(".") + ckey;
    check_keys(c, w, {"hbar", "mass", "c"});
    cfg.constants.hbar = number(c, "hbar", w, 1.0);
    cfg.constants.mass = number(c, "mass", w, 1.0);
    cfg.constants.c = number(c, "c", w, 1.0);
  }
  try {
    cfg.constants.validate();
  } catch (const std::exception& e) {
    schema_error(std::string(".") + ckey, e.what());
  }

  if (!j.contains("field")) schema_error("root", "missing field block");
  {
    const json& f = j["field"];
    check_keys(f, ".field", {"type", "p", "terms"});
    cfg.field_type = text(f, "type", ".field", "plane_wave");
    cfg.waves.clear();
    if (cfg.field_type == "plane_wave") {
      cfg.waves.push_back(WaveConfig{vec3(f, "p", ".field", Vec3{}), 1.0, 0.0});
    } else if (cfg.field_type == "superposition") {
      if (!f.contains("terms") || !f["terms"].is_array() || f["terms"].empty())
        schema_error(".field.terms", "expected a non-empty array");
      for (std::size_t i = 0; i < f["terms"].size(); ++i) {
        const json& w = f["terms"][i];
        const std::string where = ".field.terms[" + std::to_string(i) + "]";
        check_keys(w, where, {"p", "w_re", "w_im"});
        if (!w.contains("p")) schema_error(where, "missing p");
        WaveConfig wc;
        wc.momentum = vec3(w, "p", where, Vec3{});
        wc.weight_re = number(w, "w_re", where, 1.0);
        wc.weight_im = number(w, "w_im", where, 0.0);
        cfg.waves.push_back(wc);
      }
    } else {
      schema_error(".field.type", "expected plane_wave or superposition");
    }
  }

  if (j.contains("integrator")) {
    const json& g = j["integrator"];
    check_keys(g, ".integrator", {"dt", "n_steps", "n_paths", "seed", "stride", "workers"});
    auto& ic = cfg.integrator;
    ic.dt = number(g, "dt", ".integrator", ic.dt);
    ic.n_steps = count(g, "n_steps", ".integrator", ic.n_steps);
    ic.n_paths = count(g, "n_paths", ".integrator", ic.n_paths);
    ic.base_seed = count(g, "seed", ".integrator", ic.base_seed);
    ic.stride = count(g, "stride", ".integrator", ic.stride);
    ic.workers = static_cast<unsigned>(count(g, "workers", ".integrator", ic.workers));
  }

  if (j.contains("initial")) {
    const json& i = j["initial"];
    check_keys(i, ".initial", {"type", "x0", "center", "width"});
    cfg.initial.type = text(i, "type", ".initial", "point_mass");
    if (cfg.initial.type != "point_mass" && cfg.initial.type != "uniform_box" &&
        cfg.initial.type != "gaussian")
      schema_error(".initial.type", "expected point_mass, uniform_box or gaussian");
    cfg.initial.x0 = vec3(i, i.contains("center") ? "center" : "x0", ".initial", Vec3{});
    cfg.initial.width = number(i, "width", ".initial", 0.0);
    if (cfg.initial.type == "gaussian" && !(cfg.initial.width > 0.0))
      schema_error(".initial.width", "must be > 0 for a gaussian");
  }

  if (j.contains("box") && !j["box"].is_null()) {
    const json& b = j["box"];
    check_keys(b, ".box", {"side"});
    const double side = number(b, "side", ".box", 0.0);
    if (!(side > 0.0)) schema_error(".box.side", "must be > 0");
    cfg.box_side = side;
  }
  if (cfg.initial.type == "uniform_box" && !cfg.box_side)
    schema_error(".initial.type", "uniform_box needs a box");

  if (j.contains("tau")) {
    const json& t = j["tau"];
    check_keys(t, ".tau", {"dtau", "tau_max", "policy", "interpolation", "bridge_seed"});
    cfg.tau.dtau = number(t, "dtau", ".tau", cfg.tau.dtau);
    if (t.contains("tau_max") && !t["tau_max"].is_null())
      cfg.tau.tau_max = number(t, "tau_max", ".tau", 0.0);
    const std::string policy = text(t, "policy", ".tau", "truncate_to_min");
    if (policy == "truncate_to_min") cfg.tau.policy = ShortPathPolicy::truncate_to_min;
    else if (policy == "drop") cfg.tau.policy = ShortPathPolicy::drop;
    else schema_error(".tau.policy", "expected truncate_to_min or drop");
    const std::string interp = text(t, "interpolation", ".tau", "brownian_bridge");
    if (interp == "brownian_bridge") cfg.tau.interpolation = Interpolation::brownian_bridge;
    else if (interp == "linear") cfg.tau.interpolation = Interpolation::linear;
    else schema_error(".tau.interpolation", "expected brownian_bridge or linear");
    cfg.tau.bridge_seed = count(t, "bridge_seed", ".tau", cfg.tau.bridge_seed);
  }

  if (j.contains("admissibility")) {
    const json& a = j["admissibility"];
    check_keys(a, ".admissibility", {"tol", "grid"});
    cfg.admissibility_tol = number(a, "tol", ".admissibility", cfg.admissibility_tol);
    if (a.contains("grid")) {
      const json& g = a["grid"];
      check_keys(g, ".admissibility.grid", {"lo", "hi", "n", "t0", "t1", "nt"});
      auto& sg = cfg.admissibility_grid;
      sg.lo = vec3(g, "lo", ".admissibility.grid", sg.lo);
      sg.hi = vec3(g, "hi", ".admissibility.grid", sg.hi);
      if (g.contains("n")) {
        const json& n = g["n"];
        if (!n.is_array() || n.size() != 3) schema_error(".admissibility.grid.n", "expected 3 counts");
        for (std::size_t i = 0; i < 3; ++i) {
          if (!n[i].is_number_unsigned() || n[i].get<std::size_t>() == 0)
            schema_error(".admissibility.grid.n", "expected positive integers");
          sg.n[i] = n[i].get<std::size_t>();
        }
      }
      sg.t0 = number(g, "t0", ".admissibility.grid", sg.t0);
      sg.t1 = number(g, "t1", ".admissibility.grid", sg.t1);
      sg.nt = count(g, "nt", ".admissibility.grid", sg.nt);
      if (sg.nt == 0) schema_error(".admissibility.grid.nt", "must be > 0");
    }
  }

  auto& s = cfg.suites;
  s.enabled = known_suites();
  if (j.contains("suites")) {
    const json& su = j["suites"];
    check_keys(su, ".suites",
               {"run", "pt3", "density", "invariant_measure", "minkowski", "classical_limit",
                "fp_crosscheck"});
    if (su.contains("run")) {
      if (!su["run"].is_array()) schema_error(".suites.run", "expected an array of names");
      s.enabled.clear();
      for (const auto& n : su["run"]) {
        if (!n.is_string()) schema_error(".suites.run", "expected strings");
        const auto name = n.get<std::string>();
        const auto& all = known_suites();
        if (std::find(all.begin(), all.end(), name) == all.end())
          schema_error(".suites.run", "unknown suite " + name);
        s.enabled.push_back(name);
      }
    }
    if (su.contains("pt3")) {
      check_keys(su["pt3"], ".suites.pt3", {"lag", "bins"});
      s.pt3.lag = count(su["pt3"], "lag", ".suites.pt3", s.pt3.lag);
      s.pt3.bins = count(su["pt3"], "bins", ".suites.pt3", s.pt3.bins);
    }
    if (su.contains("density")) {
      check_keys(su["density"], ".suites.density", {"bins"});
      s.density_bins = count(su["density"], "bins", ".suites.density", s.density_bins);
    }
    if (su.contains("invariant_measure")) {
      const json& im = su["invariant_measure"];
      check_keys(im, ".suites.invariant_measure", {"grid", "adjoint_resolution"});
      s.measure_grid = count(im, "grid", ".suites.invariant_measure", s.measure_grid);
      s.adjoint_resolution =
          count(im, "adjoint_resolution", ".suites.invariant_measure", s.adjoint_resolution);
    }
    if (su.contains("minkowski")) {
      check_keys(su["minkowski"], ".suites.minkowski", {"points"});
      s.minkowski_points = count(su["minkowski"], "points", ".suites.minkowski", s.minkowski_points);
    }
    if (su.contains("classical_limit")) {
      const json& cl = su["classical_limit"];
      check_keys(cl, ".suites.classical_limit", {"factors", "paths"});
      if (cl.contains("factors")) {
        if (!cl["factors"].is_array()) schema_error(".suites.classical_limit.factors", "expected numbers");
        s.classical.factors.clear();
        for (const auto& f : cl["factors"]) {
          if (!f.is_number()) schema_error(".suites.classical_limit.factors", "expected numbers");
          s.classical.factors.push_back(f.get<double>());
        }
      }
      s.classical.paths = count(cl, "paths", ".suites.classical_limit", s.classical.paths);
    }
    if (su.contains("fp_crosscheck")) {
      const json& fp = su["fp_crosscheck"];
      const std::string w = ".suites.fp_crosscheck";
      check_keys(fp, w, {"length", "center", "width", "t_final", "paths", "bins", "cells"});
      s.fp.length = number(fp, "length", w, s.fp.length);
      s.fp.center = number(fp, "center", w, s.fp.center);
      s.fp.width = number(fp, "width", w, s.fp.width);
      s.fp.t_final = number(fp, "t_final", w, s.fp.t_final);
      s.fp.paths = count(fp, "paths", w, s.fp.paths);
      s.fp.bins = count(fp, "bins", w, s.fp.bins);
      s.fp.cells = count(fp, "cells", w, s.fp.cells);
    }
  }

  if (j.contains("output")) {
    const json& o = j["output"];
    check_keys(o, ".output", {"dir", "csv_stride"});
    cfg.output_dir = text(o, "dir", ".output", cfg.output_dir);
    cfg.csv_stride = count(o, "csv_stride", ".output", cfg.csv_stride);
    if (cfg.csv_stride == 0) schema_error(".output.csv_stride", "must be > 0");
  }

  try {
    cfg.integrator.validate();
  } catch (const std::exception& e) {
    schema_error(".integrator", e.what());
  }
  if (!(cfg.tau.dtau > 0.0)) schema_error(".tau.dtau", "must be > 0");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config " + path.string() + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["constants"] = {{"hbar", cfg.constants.hbar}, {"mass", cfg.constants.mass}, {"c", cfg.constants.c}};
  if (cfg.field_type == "plane_wave") {
    j["field"] = {{"type", "plane_wave"}, {"p", vec_json(cfg.waves.front().momentum)}};
  } else {
    json terms = json::array();
    for (const auto& w : cfg.waves)
      terms.push_back({{"p", vec_json(w.momentum)}, {"w_re", w.weight_re}, {"w_im", w.weight_im}});
    j["field"] = {{"type", "superposition"}, {"terms", terms}};
  }
  const auto& ic = cfg.integrator;
  j["integrator"] = {{"dt", ic.dt},         {"n_steps", ic.n_steps}, {"n_paths", ic.n_paths},
                     {"seed", ic.base_seed}, {"stride", ic.stride},   {"workers", ic.workers}};
  j["initial"] = {{"type", cfg.initial.type}, {"x0", vec_json(cfg.initial.x0)},
                  {"width", cfg.initial.width}};
  j["box"] = cfg.box_side ? json{{"side", *cfg.box_side}} : json(nullptr);
  j["tau"] = {{"dtau", cfg.tau.dtau},
              {"tau_max", cfg.tau.tau_max ? json(*cfg.tau.tau_max) : json(nullptr)},
              {"policy", policy_name(cfg.tau.policy)},
              {"interpolation", interpolation_name(cfg.tau.interpolation)},
              {"bridge_seed", cfg.tau.bridge_seed}};
  const auto& g = cfg.admissibility_grid;
  j["admissibility"] = {{"tol", cfg.admissibility_tol},
                        {"grid",
                         {{"lo", vec_json(g.lo)},
                          {"hi", vec_json(g.hi)},
                          {"n", {g.n[0], g.n[1], g.n[2]}},
                          {"t0", g.t0},
                          {"t1", g.t1},
                          {"nt", g.nt}}}};
  const auto& s = cfg.suites;
  j["suites"] = {
      {"run", s.enabled},
      {"pt3", {{"lag", s.pt3.lag}, {"bins", s.pt3.bins}}},
      {"density", {{"bins", s.density_bins}}},
      {"invariant_measure", {{"grid", s.measure_grid}, {"adjoint_resolution", s.adjoint_resolution}}},
      {"minkowski", {{"points", s.minkowski_points}}},
      {"classical_limit", {{"factors", s.classical.factors}, {"paths", s.classical.paths}}},
      {"fp_crosscheck",
       {{"length", s.fp.length},
        {"center", s.fp.center},
        {"width", s.fp.width},
        {"t_final", s.fp.t_final},
        {"paths", s.fp.paths},
        {"bins", s.fp.bins},
        {"cells", s.fp.cells}}}};
  j["output"] = {{"dir", cfg.output_dir}, {"csv_stride", cfg.csv_stride}};
  return j;
}

}  // namespace relstoch::cli
