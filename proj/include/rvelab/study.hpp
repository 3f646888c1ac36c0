#pragma once

// Monte-Carlo studies: draw -> rasterize -> solve for every (protocol, size,
// realization), persisted as CSV and summarized per cell size.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rvelab/io.hpp"
#include "rvelab/sampling.hpp"
#include "rvelab/solver.hpp"
#include "rvelab/stats.hpp"

namespace rvelab {

enum class ResolutionRule {
  PerSize,      // n = value * size (16 voxels per unit length for disks and spheres)
  PerDiameter,  // n = value * edge / particle diameter (5 for fibers)
};

struct StudyConfig {
  ShapeKind shape = ShapeKind::Sphere;
  MaterialPair materials;
  double phi = 0.3;
  double isolation = 1.2;
  double aspect_ratio = 20.0;
  double magnification = 0.0;
  int poisson_retries = 20;
  std::vector<Protocol> protocols{Protocol::Periodized, Protocol::Snapshot};
  std::vector<double> sizes{2.0, 4.0};
  ResolutionRule resolution_rule = ResolutionRule::PerSize;
  double resolution_value = 16.0;
  std::size_t realizations = 100;
  std::uint64_t master_seed = 0;
  int workers = 0;  // 0 = hardware concurrency; the environment override wins
  std::filesystem::path output_dir = "study_out";
  bool full_tensor = true;  // false solves only the first load (a11)
  SolverSettings solver;
  std::optional<double> reference_value;
  std::optional<double> reference_size;  // designated periodized run supplying the reference
  std::size_t reference_realizations = 10;

  void validate() const;
  int dim() const { return shape == ShapeKind::Disk ? 2 : 3; }
  int resolution_for(double size) const;
  ProtocolSpec protocol_spec(Protocol protocol, double size) const;
  /// Hash of every field that influences the records (not workers or paths).
  std::string hash() const;
};

Json study_config_to_json(const StudyConfig& config);
StudyConfig study_config_from_json(const Json& j);
StudyConfig load_study_config(const std::filesystem::path& path);

struct RealizationRecord {
  Protocol protocol = Protocol::Periodized;
  double size = 0.0;
  std::size_t index = 0;
  std::uint64_t seed = 0;
  int n = 0;
  bool success = false;
  std::string failure_reason;
  int attempts = 1;
  double phi_measured = 0.0;
  std::vector<double> diagonal;  // a11, a22[, a33]; NaN where not solved
  int iterations = 0;
  double residual = 0.0;
};

/// Runs one realization; never throws for packing or solver failures.
RealizationRecord run_realization(const StudyConfig& config, Protocol protocol, double size, std::size_t index);

struct CellSummary {
  Protocol protocol = Protocol::Periodized;
  double size = 0.0;
  StudySummary stats;
  std::size_t failures = 0;
  std::optional<ErrorDecomposition> errors;
  std::optional<double> p_1pct, p_01pct;
};

struct StudyResult {
  std::size_t records = 0;
  std::size_t failures = 0;
  std::optional<double> reference;
  std::vector<CellSummary> summaries;
};

using StudyProgress = std::function<void(const std::string&)>;

/// Writes study_config.json, realizations.csv, failures.csv, summary.csv
/// (and reference.json when a reference run is configured) into
/// config.output_dir. Records are appended in (protocol, size, index) order
/// as soon as their predecessors are done, so the files do not depend on the
/// worker count.
StudyResult run_study(const StudyConfig& config, const StudyProgress& progress = {});

/// Mean and 99 % interval of a_bar over config.reference_realizations
/// periodized runs at `size`.
StudySummary compute_reference(const StudyConfig& config, double size, const StudyProgress& progress = {});

/// Recomputes summary.csv of an existing study directory.
StudyResult summarize_study_directory(const std::filesystem::path& dir);

std::vector<CellSummary> summarize_records(const StudyConfig& config, const std::vector<RealizationRecord>& records,
                                           std::optional<double> reference);

/// Exit status: 0 without failures, 2 when some realizations failed.
int study_exit_code(const StudyResult& result);

}  // namespace rvelab
