#pragma once

// Non-overlapping particle configurations: overlap removal by gradient
// descent, mechanical contraction (MCM), sequential addition and migration
// (SAM) for fibers, and random sequential adsorption (RSA).

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rvelab/geometry.hpp"

namespace rvelab {

struct DescentSettings {
  double step_size = 0.5;
  /// Stop once the overlap energy is at most this value. Negative selects
  /// 1e-14 * (2 r_eff)^2.
  double energy_tol = -1.0;
  int max_iters = 20000;
};

struct PackingParams {
  double target_phi = 0.3;
  double isolation_factor = 1.2;
  std::vector<double> phi_schedule;  // strictly increasing, ends at target_phi; empty = default
  DescentSettings descent;
  std::uint64_t seed = 0;

  // SAM only
  double orientation_weight = 1.0;
  double orientation_tol = 0.02;

  // RSA only: proposals per requested particle before giving up
  double rsa_budget_per_particle = 2000.0;

  void validate() const;
  /// Schedule actually used: phi_schedule, or the default for the shape
  /// (10% steps for disks/spheres, 5% steps for fibers) truncated at target_phi.
  std::vector<double> schedule_for(ShapeKind kind) const;
  double energy_tol_for(double effective_radius) const;
};

struct PackingReport {
  std::vector<int> iterations;  // one entry per schedule step
  double final_energy = 0.0;
  double wall_seconds = 0.0;
  bool success = false;
  std::string failure_reason;
  double achieved_phi = 0.0;
};

struct OverlapEvaluation {
  double energy = 0.0;
  std::vector<Vec> center_gradient;
  std::vector<Vec> axis_gradient;  // spherocylinders only, unprojected
  std::vector<int> multiplicity;   // number of overlapping partners
};

/// Overlap energy W = 1/2 sum_{i<j} delta_ij^2 at the given effective radius,
/// evaluated through a NeighborIndex.
double overlap_energy(const Configuration& config, double effective_radius);

/// dW/dx_i for every particle centre.
std::vector<Vec> overlap_gradient(const Configuration& config, double effective_radius);

OverlapEvaluation evaluate_overlaps(const Configuration& config, double effective_radius,
                                    bool with_gradient);

/// Second-order orientation tensor (1/N) sum a a^T of the fiber axes, row-major 3x3.
std::array<double, 9> orientation_tensor(const Configuration& config);
/// max |M_ij - delta_ij / 3|.
double orientation_deviation(const Configuration& config);

/// Gradient descent on W at radius isolation_factor * radius until
/// W <= tol or max_iters. Particles without overlap stay fixed.
std::pair<Configuration, PackingReport> remove_overlaps(Configuration config, const PackingParams& params);

/// Mechanical contraction: `count` particles, final cell `final_cell`, particle
/// radius chosen so the packing reaches params.target_phi exactly.
std::pair<Configuration, PackingReport> mcm_pack(const Cell& final_cell, ShapeKind kind, std::size_t count,
                                                 const PackingParams& params);

/// Sequential addition and migration of spherocylinders into a fixed cell.
/// The fiber count is ceil(phi * |cell| / fiber volume) per schedule step.
std::pair<Configuration, PackingReport> sam_pack(const Cell& cell, const Species& fiber,
                                                 const PackingParams& params);

/// Random sequential adsorption of round(phi |cell| / particle volume) particles.
std::pair<Configuration, PackingReport> rsa_pack(const Cell& cell, const Species& species,
                                                 const PackingParams& params);

}  // namespace rvelab
