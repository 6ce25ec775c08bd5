#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "hicomp/analysis.hpp"
#include "hicomp/cns.hpp"
#include "hicomp/config.hpp"
#include "hicomp/duality.hpp"
#include "hicomp/error.hpp"
#include "hicomp/pme.hpp"
#include "hicomp/study.hpp"

namespace hicomp {

/// Output could not be written; maps to the runtime-failure exit code.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Provenance written as leading '#' comment lines of every CSV file.
struct Provenance {
  std::string kind;
  std::string config_hash;
  double t = 0.0;
  PhysParams params;
};

/// 17 significant digits, round-trip exact.
std::string format_real(double v);

std::string pme_snapshot_csv(const PmeState& state, const PhysParams& params,
                             const Provenance& prov);
std::string cns_snapshot_csv(const CnsState& state, const PhysParams& params,
                             const Provenance& prov);
std::string diagnostics_csv(std::span<const DiagnosticsRecord> records, const Provenance& prov);

enum class RateTable { H1, L2, MassOutside, MassOutsideRaw };
/// One row per snapshot, one column per epsilon.
std::string rate_table_csv(const RateStudyResult& result, RateTable table,
                           const Provenance& prov);

std::string certificate_json(const DualCertificate& cert, const Grid& grid,
                             const PhysParams& params, const std::string& config_hash);
std::string rate_study_json(const RateStudyResult& result, const StudyConfig& config);
std::string support_study_json(const SupportGrowthResult& result, const StudyConfig& config);

/// Writes the file, creating parent directories. Throws IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace hicomp
