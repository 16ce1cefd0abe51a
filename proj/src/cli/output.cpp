#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "relstoch/cli.hpp"

namespace relstoch::cli {

using nlohmann::json;

namespace {

// Shortest round-trip representation, independent of locale.
void append(std::string& line, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  line.append(buf, res.ptr);
}

void append(std::string& line, std::size_t v) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  line.append(buf, res.ptr);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

json to_json(const TestReport& r) {
  json gates = json::array();
  for (const auto& g : r.gates)
    gates.push_back({{"name", g.name}, {"value", g.value}, {"bound", g.bound}, {"passed", g.passed}});
  json j = {{"name", r.name},           {"statistic", r.statistic}, {"threshold", r.threshold},
            {"passed", r.passed},       {"n_samples", r.n_samples}, {"gates", gates}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

json to_json(const AdmissibilityReport& r) {
  return {{"z0_residual_max", r.z0_residual_max},
          {"kg_residual_max", r.kg_residual_max},
          {"rho_min", r.rho_min},
          {"j_identity_residual_max", r.j_identity_residual_max},
          {"nodes", r.nodes},
          {"admissible", r.admissible}};
}

std::string fnv1a_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    const auto n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

void write_ensemble_csv(const PathEnsemble& ens, const std::filesystem::path& path,
                        std::size_t stride) {
  if (stride == 0) stride = 1;
  auto out = open_out(path);
  out << "path_id,t,x1,x2,x3,qv\n";
  const auto tg = ens.t_grid();
  std::string line;
  for (std::size_t p = 0; p < ens.n_paths(); ++p) {
    if (ens.status(p) != PathStatus::ok) continue;
    const auto qv = ens.qv(p);
    for (std::size_t k = 0; k < ens.n_keep(); ++k) {
      if (k % stride != 0 && k + 1 != ens.n_keep()) continue;
      line.clear();
      append(line, p);
      line += ',';
      append(line, tg[k]);
      for (std::size_t c = 0; c < 3; ++c) {
        line += ',';
        append(line, ens.x(c, p)[k]);
      }
      line += ',';
      append(line, qv[k]);
      line += '\n';
      out << line;
    }
  }
}

void write_tau_csv(const TimeChangedEnsemble& tc, const std::filesystem::path& path,
                   std::size_t stride) {
  if (stride == 0) stride = 1;
  auto out = open_out(path);
  out << "path_id,tau,x1,x2,x3,T\n";
  const auto tau = tc.tau_grid();
  std::string line;
  for (std::size_t i = 0; i < tc.n_paths(); ++i) {
    const auto T = tc.stopping_times(i);
    for (std::size_t k = 0; k < tc.n_tau(); ++k) {
      if (k % stride != 0 && k + 1 != tc.n_tau()) continue;
      line.clear();
      append(line, tc.path_id(i));
      line += ',';
      append(line, tau[k]);
      const Vec3 x = tc.x_tilde_at(i, k);
      for (std::size_t c = 0; c < 3; ++c) {
        line += ',';
        append(line, x[c]);
      }
      line += ',';
      append(line, T[k]);
      line += '\n';
      out << line;
    }
  }
}

void write_density_csv(const Grid1D& grid, const DensityField& d,
                       const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "cell_center,value\n";
  std::string line;
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    line.clear();
    append(line, grid.center(i));
    line += ',';
    append(line, d.values[i]);
    line += '\n';
    out << line;
  }
}

}  // namespace relstoch::cli
