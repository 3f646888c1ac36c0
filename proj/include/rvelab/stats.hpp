#pragma once

// Sample statistics, error decomposition, log-log fits, two-point
// correlation and volume-fraction variance curves.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rvelab/raster.hpp"
#include "rvelab/sampling.hpp"

namespace rvelab {

struct StudySummary {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;           // divisor n - 1
  double ci_halfwidth = 0.0;  // two-sided 99 %, Student t with n - 1 degrees of freedom
  bool std_defined = false;
};

/// Quantile t_{p, dof} of Student's t distribution (p = 0.995 for a two-sided 99 % interval).
double student_t_quantile(double p, double dof);

/// Requires at least two samples.
StudySummary summarize(std::span<const double> values);
/// Like summarize, but a single sample yields the mean with std_defined = false.
StudySummary summarize_allow_single(std::span<const double> values);

struct ErrorDecomposition {
  double relative_systematic = 0.0;  // |mean / reference - 1|
  double relative_random = 0.0;      // std / mean
};

ErrorDecomposition error_decomposition(std::span<const double> values, double reference);

/// Fraction of samples with |value / reference - 1| <= rel_tol.
double success_probability(std::span<const double> values, double reference, double rel_tol);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;  // log10 value at log10 size = 0
  double r2 = 0.0;
};

/// Least squares in log10-log10 coordinates; needs three points and
/// positive coordinates.
ScalingFit scaling_fit(std::span<const std::pair<double, double>> points);

struct CorrelationCurve {
  std::vector<double> distance;  // bin centres in units of `length_unit`
  std::vector<double> h;         // bin mean of the scaled autocorrelation
  std::vector<std::size_t> count;
  double phi = 0.0;
};

/// Scaled autocorrelation c(x) / (phi (1 - phi)) of the phase indicator on
/// the periodic grid, unbinned, in grid order.
std::vector<double> autocorrelation_field(const VoxelGrid& grid);

/// Radial average of autocorrelation_field in bins of half a voxel spacing.
/// Distances are periodic shifts divided by `length_unit` (for example the
/// particle radius).
CorrelationCurve empirical_autocorrelation(const VoxelGrid& grid, double length_unit);

/// sqrt(Var(phi_L) / (phi (1 - phi))) from measured volume fractions.
double normalized_vf_std(std::span<const double> measured, double phi);

struct VfVariancePoint {
  double size = 0.0;
  std::size_t realizations = 0;
  std::size_t failures = 0;
  double mean_phi = 0.0;
  double normalized_std = 0.0;
};

/// Draws `realizations` geometries per size (protocol and shape from `base`),
/// rasterizes each at voxels_per_size * size voxels per axis and records the
/// normalized standard deviation of the measured volume fraction. Seeds come
/// from derive_seed(master_seed, protocol, size, index).
std::vector<VfVariancePoint> vf_variance_curve(const ProtocolSpec& base, std::span<const double> sizes,
                                               std::size_t realizations, int voxels_per_size,
                                               std::uint64_t master_seed, int workers);

}  // namespace rvelab
