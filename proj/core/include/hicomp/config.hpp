#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hicomp/grid.hpp"
#include "hicomp/params.hpp"

namespace hicomp {

struct GridSpec {
  double x_min = -8.0;
  double x_max = 8.0;
  int n_cells = 2048;

  Grid make() const { return make_grid(x_min, x_max, n_cells); }
};

enum class DatumKind { Tent, Barenblatt, FromCsv };

/// Tent mass (1 - |x|)_+, Barenblatt profile of the given mass at time t0,
/// or density values read from a CSV file (last column, one row per cell).
struct InitialDatum {
  DatumKind kind = DatumKind::Tent;
  double mass = 1.0;
  double t0 = 0.5;
  std::string path;
};

struct Thresholds {
  double support = 1e-6;  ///< relative level defining the support
  double floor = 1e-10;   ///< relative vacuum floor of the Navier-Stokes density
};

/// Dual certificate settings. Each theta is a unit-gradient bump.
struct CertificateSpec {
  struct Bump {
    double center;
    double radius;
  };
  int path_samples = 200;
  std::vector<Bump> thetas = {{0.0, 1.5}, {1.0, 1.0}};
  std::optional<double> eta;
  std::optional<double> cap;
};

struct StudyConfig {
  GridSpec grid;
  double alpha = 1.25;
  double gamma = 2.0;
  std::optional<double> pme_coeff;  ///< defaults to 1/alpha
  std::vector<double> eps_values = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  double t_end = 0.5;
  std::vector<double> snapshot_times = {0.1, 0.2, 0.3, 0.4, 0.5};
  InitialDatum initial_datum;
  Thresholds thresholds;
  std::string output_dir = "hicomp-out";
  std::uint64_t seed = 20240607;
  CertificateSpec certificate;
  bool grid_check = true;

  /// Physical parameters with the given epsilon.
  PhysParams params(double epsilon) const;
  /// Start time of every run: t0 for Barenblatt data, otherwise 0.
  double t_start() const;
  /// Re-checks every invariant; throws ValidationError naming the first violation.
  void validate() const;
};

/// Parses a JSON document with strict keys. Missing keys take the defaults above.
/// Throws ValidationError with the parser position or the violated invariant.
StudyConfig parse_config(const std::string& text);

/// Reads and parses a config file; the error message names the path.
StudyConfig load_config(const std::string& path);

/// Canonical JSON form (sorted keys, every field present).
std::string config_to_json(const StudyConfig& config);

/// FNV-1a 64 of the canonical JSON without output_dir, as 16 hex digits.
std::string config_hash(const StudyConfig& config);

/// Initial density on the given grid (the configured one when omitted).
Field make_initial_field(const StudyConfig& config, const Grid& grid);
Field make_initial_field(const StudyConfig& config);

}  // namespace hicomp
