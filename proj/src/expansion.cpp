#include "rvelab/expansion.hpp"

#include <cmath>
#include <stdexcept>

namespace rvelab {

ContrastSummary contrast(const MaterialPair& materials) {
  materials.validate();
  return {materials.rho(), materials.reference()};
}

MaterialPair materials_from_contrast(double alpha0, double rho) {
  if (!(alpha0 > 0.0)) throw std::invalid_argument("reference conductivity must be positive");
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("contrast parameter must lie in (-1,1)");
  return {alpha0 * (1.0 + rho) / (1.0 - rho), alpha0 * (1.0 - rho) / (1.0 + rho)};
}

double first_order_apparent(const MaterialPair& materials, double phi) {
  if (!(phi >= 0.0 && phi <= 1.0)) throw std::invalid_argument("volume fraction must lie in [0,1]");
  const ContrastSummary c = contrast(materials);
  return c.alpha0 * (1.0 - 2.0 * c.rho) + 4.0 * c.alpha0 * c.rho * phi;
}

double random_error_first_order(const MaterialPair& materials, double vf_std) {
  if (vf_std < 0.0) throw std::invalid_argument("volume-fraction std must be nonnegative");
  const ContrastSummary c = contrast(materials);
  return 4.0 * c.alpha0 * vf_std * std::abs(c.rho);
}

std::vector<ExpansionRow> verify_expansion_order(const VoxelGrid& grid, double alpha0, const std::vector<double>& rhos,
                                                 const SolverSettings& settings) {
  const double phi = measured_volume_fraction(grid);
  std::vector<ExpansionRow> rows;
  for (double rho : rhos) {
    const MaterialPair m = materials_from_contrast(alpha0, rho);
    SolverSettings s = settings;
    s.reference_alpha = 0.0;
    ApparentResult res = apparent_tensor(grid, m, s, 1);
    if (!res.converged) throw std::runtime_error("solver did not converge at rho=" + std::to_string(rho));
    ExpansionRow row;
    row.rho = rho;
    row.alpha_inclusion = m.alpha_inclusion;
    row.alpha_matrix = m.alpha_matrix;
    row.a_solver = res.a_bar;
    row.a_first_order = first_order_apparent(m, phi);
    row.deviation = std::abs(row.a_solver - row.a_first_order);
    row.iterations = res.iterations;
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> halving_sequence(double rho0, int count) {
  std::vector<double> out;
  double r = rho0;
  for (int i = 0; i < count; ++i, r *= 0.5) out.push_back(r);
  return out;
}

}  // namespace rvelab
