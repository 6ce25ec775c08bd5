#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hicomp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitUsage = 64;

/// One row of the `validate` table.
struct CheckRow {
  std::string name;
  double measured;
  double tolerance;
  bool pass;
};

/// Built-in invariant suite: Barenblatt oracle, L1 contraction, comparison,
/// maximum principle, conservation, dipole H^-1 norm, pressureless reduction.
std::vector<CheckRow> run_validation_suite(std::uint64_t seed);

/// Runs `hicomp <subcommand> [flags]`; argv excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hicomp::cli
