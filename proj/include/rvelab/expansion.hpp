#pragma once

// Low-contrast expansion of the apparent conductivity, used as an analytic
// check of the spectral solver.

#include <vector>

#include "rvelab/raster.hpp"
#include "rvelab/solver.hpp"

namespace rvelab {

struct ContrastSummary {
  double rho = 0.0;     // (sqrt a1 - sqrt a2) / (sqrt a1 + sqrt a2)
  double alpha0 = 0.0;  // sqrt(a1 a2)
};

ContrastSummary contrast(const MaterialPair& materials);

/// Materials with reference alpha0 and contrast rho:
/// a1 = alpha0 (1 + rho) / (1 - rho), a2 = alpha0 (1 - rho) / (1 + rho).
MaterialPair materials_from_contrast(double alpha0, double rho);

/// alpha0 (1 - 2 rho) + 4 alpha0 rho phi.
double first_order_apparent(const MaterialPair& materials, double phi);

/// 4 alpha0 rho vf_std: leading term of the random error of a_bar.
double random_error_first_order(const MaterialPair& materials, double vf_std);

struct ExpansionRow {
  double rho = 0.0;
  double alpha_inclusion = 0.0;
  double alpha_matrix = 0.0;
  double a_solver = 0.0;
  double a_first_order = 0.0;
  double deviation = 0.0;  // |a_solver - a_first_order|
  int iterations = 0;
};

/// Solves the first load on `grid` for each contrast at fixed alpha0 and
/// compares with the first-order value at the measured volume fraction.
std::vector<ExpansionRow> verify_expansion_order(const VoxelGrid& grid, double alpha0, const std::vector<double>& rhos,
                                                 const SolverSettings& settings);

/// rho0, rho0/2, rho0/4, ... (`count` values).
std::vector<double> halving_sequence(double rho0, int count);

}  // namespace rvelab
