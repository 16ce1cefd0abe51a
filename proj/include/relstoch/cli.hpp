#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "relstoch/fokker_planck.hpp"
#include "relstoch/kg_waves.hpp"
#include "relstoch/martingale_tests.hpp"
#include "relstoch/sde_engine.hpp"
#include "relstoch/time_change.hpp"

namespace relstoch::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_error = 1,
  exit_inadmissible = 2,
  exit_suite_failed = 3,
};

struct WaveConfig {
  Vec3 momentum;
  double weight_re = 1.0;
  double weight_im = 0.0;
};

struct InitialConfig {
  std::string type = "point_mass";  // point_mass | uniform_box | gaussian
  Vec3 x0;
  double width = 0.0;
};

struct Pt3Params {
  std::size_t lag = 400;
  std::size_t bins = 4;
};

struct ClassicalParams {
  std::vector<double> factors{1.0, 0.1, 0.01};
  std::size_t paths = 2000;
};

struct FpParams {
  double length = 4.0;
  double center = 2.0;
  double width = 0.3;
  double t_final = 0.5;
  std::size_t paths = 20000;
  std::size_t bins = 64;
  std::size_t cells = 512;
};

struct SuiteParams {
  std::vector<std::string> enabled;
  Pt3Params pt3;
  std::size_t density_bins = 16;
  std::size_t measure_grid = 16;
  std::size_t adjoint_resolution = 24;
  std::size_t minkowski_points = 1000;
  ClassicalParams classical;
  FpParams fp;
};

struct ExperimentConfig {
  PhysicalConstants constants;
  std::string field_type = "plane_wave";  // plane_wave | superposition
  std::vector<WaveConfig> waves{WaveConfig{}};
  IntegratorConfig integrator;
  InitialConfig initial;
  std::optional<double> box_side;
  TimeChangeOptions tau;
  SpaceTimeGrid admissibility_grid;
  double admissibility_tol = 1e-10;
  SuiteParams suites;
  std::string output_dir = "out";
  std::size_t csv_stride = 1;

  WaveField make_field() const;
  InitialSampler make_sampler() const;
  std::optional<PeriodicBox> box() const;
};

/// Every suite name `verify` knows, in run order.
const std::vector<std::string>& known_suites();

/// Throws std::invalid_argument with a path to the offending key on schema errors.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

nlohmann::json to_json(const TestReport& r);
nlohmann::json to_json(const AdmissibilityReport& r);

/// 64-bit FNV-1a of a file's bytes, as 16 hex digits.
std::string fnv1a_file(const std::filesystem::path& path);

/// path_id,t,x1,x2,x3,qv for ok paths, every `stride`-th retained row.
void write_ensemble_csv(const PathEnsemble& ens, const std::filesystem::path& path,
                        std::size_t stride);
/// path_id,tau,x1,x2,x3,T
void write_tau_csv(const TimeChangedEnsemble& tc, const std::filesystem::path& path,
                   std::size_t stride);
/// cell_center,value
void write_density_csv(const Grid1D& grid, const DensityField& d,
                       const std::filesystem::path& path);

/// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace relstoch::cli
