#pragma once

// Spectral solver for the periodic cell problem of two-phase isotropic
// conductors: Helmholtz projector, Eyre-Milton polarization iteration and the
// apparent conductivity tensor.

#include <string>
#include <vector>

#include "rvelab/fft.hpp"
#include "rvelab/raster.hpp"

namespace rvelab {

/// Conductivities in W/(m K).
struct MaterialPair {
  double alpha_inclusion = 1.2;
  double alpha_matrix = 0.2;

  void validate() const;
  double reference() const;  // sqrt(alpha_inclusion * alpha_matrix)
  /// (sqrt a1 - sqrt a2) / (sqrt a1 + sqrt a2)
  double rho() const;
};

enum class ConvergenceMetric {
  PolarizationUpdate,  // |p^{m+1} - p^m|_2 / |p^{m+1}|_2
  Equilibrium,         // rms |Gamma(A xi)| / |<A xi>|
};

std::string to_string(ConvergenceMetric metric);
ConvergenceMetric metric_from_string(const std::string& name);

struct SolverSettings {
  double reference_alpha = 0.0;  // 0 selects sqrt(alpha_inclusion * alpha_matrix)
  double tolerance = 1e-6;
  int max_iters = 1000;
  ConvergenceMetric metric = ConvergenceMetric::PolarizationUpdate;

  void validate() const;
};

/// Orthogonal projector onto zero-mean gradient fields for a d-component
/// field of n^d voxels, components stored block-wise (component c at
/// [c n^d, (c+1) n^d)). Frequencies are the integers
/// -ceil(n/2)+1 .. floor(n/2); on even grids the Nyquist entry of each
/// wave vector is set to zero, which keeps the discrete operator real,
/// symmetric and idempotent.
class HelmholtzProjector {
 public:
  HelmholtzProjector(int dim, int n);

  int dim() const { return fft_.dim(); }
  int n() const { return fft_.n(); }
  std::size_t voxels() const { return fft_.real_size(); }

  /// out = Gamma(in); in and out may alias.
  void apply(const double* in, double* out);
  std::vector<double> apply(const std::vector<double>& field);

  /// Applies (I - 2 Gamma) in Fourier space and adds `mean_shift` to the
  /// zero mode, i.e. out = (I - 2 Gamma) in + mean_shift. Used by the
  /// polarization iteration.
  void reflect(const double* in, double* out, const double* mean_shift);

  /// Wave vector (integer frequencies, Nyquist zeroed) of complex index `idx`.
  void wave_vector(std::size_t idx, double* k) const;

 private:
  RealFft fft_;
  FftBuffer<double> real_;
  FftBuffer<std::complex<double>> spec_;
  template <typename Op>
  void transform(const double* in, double* out, Op&& op);
};

/// One load case.
struct LoadSolution {
  std::vector<double> mean_flux;      // <A xi>
  std::vector<double> mean_gradient;  // <xi>
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::vector<double> residual_history;
};

struct ApparentResult {
  int dim = 3;
  std::vector<double> tensor;  // row-major d x d, symmetrized when all columns are solved
  double a_bar = 0.0;          // tensor[0][0]
  int iterations = 0;          // total over loads
  double residual = 0.0;       // worst final residual
  bool converged = false;
  double asymmetry = 0.0;      // max |A_ij - A_ji| / max |A_ij| before symmetrization
  std::vector<LoadSolution> loads;
  double phi_measured = 0.0;
  double seconds = 0.0;

  double at(int i, int j) const { return tensor[static_cast<std::size_t>(i * dim + j)]; }
};

/// Solves the cell problem for one unit load direction `load` (d entries).
/// Throws std::runtime_error when the iterate becomes non-finite.
LoadSolution eyre_milton_solve(const VoxelGrid& grid, const MaterialPair& materials, const std::vector<double>& load,
                               const SolverSettings& settings);

/// Solves the loads e_0 .. e_{columns-1} (columns = 0 means all d) and
/// assembles the apparent tensor. Unsolved columns are left at zero.
ApparentResult apparent_tensor(const VoxelGrid& grid, const MaterialPair& materials, const SolverSettings& settings,
                               int columns = 0);

/// Harmonic and arithmetic means of the two conductivities at fraction phi.
std::pair<double, double> voigt_reuss_bounds(const MaterialPair& materials, double phi);

}  // namespace rvelab
