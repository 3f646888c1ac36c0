#include "rvelab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "rvelab/fft.hpp"
#include "rvelab/parallel.hpp"
#include "rvelab/rng.hpp"

namespace rvelab {

double student_t_quantile(double p, double dof) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile level must lie in (0,1)");
  if (!(dof > 0.0)) throw std::invalid_argument("degrees of freedom must be positive");
  boost::math::students_t dist(dof);
  return boost::math::quantile(dist, p);
}

StudySummary summarize_allow_single(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("cannot summarize an empty sample");
  StudySummary s;
  s.n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(s.n - 1));
  s.ci_halfwidth = student_t_quantile(0.995, static_cast<double>(s.n - 1)) * s.std / std::sqrt(static_cast<double>(s.n));
  s.std_defined = true;
  return s;
}

StudySummary summarize(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("summary statistics need at least two samples");
  return summarize_allow_single(values);
}

ErrorDecomposition error_decomposition(std::span<const double> values, double reference) {
  if (!(reference > 0.0)) throw std::invalid_argument("reference value must be positive");
  const StudySummary s = summarize_allow_single(values);
  ErrorDecomposition e;
  e.relative_systematic = std::abs(s.mean / reference - 1.0);
  e.relative_random = s.std_defined && s.mean != 0.0 ? s.std / std::abs(s.mean) : 0.0;
  return e;
}

double success_probability(std::span<const double> values, double reference, double rel_tol) {
  if (!(rel_tol > 0.0)) throw std::invalid_argument("relative tolerance must be positive");
  if (!(reference > 0.0)) throw std::invalid_argument("reference value must be positive");
  if (values.empty()) throw std::invalid_argument("success probability of an empty sample");
  std::size_t hits = 0;
  for (double v : values)
    if (std::abs(v / reference - 1.0) <= rel_tol) ++hits;
  return static_cast<double>(hits) / static_cast<double>(values.size());
}

ScalingFit scaling_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw std::invalid_argument("scaling fit needs at least three points");
  const double n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0 && y > 0.0)) throw std::invalid_argument("scaling fit needs positive sizes and values");
    sx += std::log10(x);
    sy += std::log10(y);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : points) {
    const double dx = std::log10(x) - mx, dy = std::log10(y) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw std::invalid_argument("scaling fit needs distinct sizes");
  ScalingFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

std::vector<double> autocorrelation_field(const VoxelGrid& grid) {
  grid.validate();
  const double phi = measured_volume_fraction(grid);
  const double var = phi * (1.0 - phi);
  if (!(var > 0.0)) throw std::invalid_argument("autocorrelation needs both phases present");
  RealFft fft(grid.dim, grid.n, 1);
  const std::size_t N = fft.real_size(), M = fft.complex_size();
  FftBuffer<double> f(N);
  FftBuffer<std::complex<double>> spec(M);
  for (std::size_t i = 0; i < N; ++i) f[i] = grid.phase[i] - phi;
  fft.forward(f.data(), spec.data());
  for (std::size_t k = 0; k < M; ++k) spec[k] = std::norm(spec[k]);
  fft.inverse(spec.data(), f.data());
  // inverse is unnormalized (factor N) and the correlation averages over N shifts
  const double scale = 1.0 / (static_cast<double>(N) * static_cast<double>(N) * var);
  std::vector<double> c(N);
  for (std::size_t i = 0; i < N; ++i) c[i] = f[i] * scale;
  c[0] = 1.0;
  return c;
}

CorrelationCurve empirical_autocorrelation(const VoxelGrid& grid, double length_unit) {
  if (!(length_unit > 0.0)) throw std::invalid_argument("length unit must be positive");
  const std::vector<double> c = autocorrelation_field(grid);
  const int n = grid.n;
  const int d = grid.dim;
  auto wrap = [n](int i) { return std::min(i, n - i); };
  const int max_bin = static_cast<int>(std::ceil(2.0 * std::sqrt(static_cast<double>(d)) * (n / 2 + 1))) + 1;
  std::vector<double> sum(max_bin, 0.0), dist_sum(max_bin, 0.0);
  std::vector<std::size_t> count(max_bin, 0);
  const int kn = d == 3 ? n : 1;
  for (int k = 0; k < kn; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double wi = wrap(i), wj = wrap(j), wk = d == 3 ? wrap(k) : 0;
        const double r = std::sqrt(wi * wi + wj * wj + wk * wk);  // in voxel spacings
        const int b = static_cast<int>(std::floor(2.0 * r));
        sum[b] += c[grid.index(i, j, k)];
        dist_sum[b] += r;
        ++count[b];
      }
  CorrelationCurve curve;
  curve.phi = measured_volume_fraction(grid);
  const double h = grid.spacing();
  for (int b = 0; b < max_bin; ++b) {
    if (count[b] == 0) continue;
    curve.distance.push_back(dist_sum[b] / count[b] * h / length_unit);
    curve.h.push_back(sum[b] / count[b]);
    curve.count.push_back(count[b]);
  }
  return curve;
}

double normalized_vf_std(std::span<const double> measured, double phi) {
  if (!(phi > 0.0 && phi < 1.0)) throw std::invalid_argument("nominal volume fraction must lie in (0,1)");
  const StudySummary s = summarize(measured);
  return std::sqrt(s.std * s.std / (phi * (1.0 - phi)));
}

std::vector<VfVariancePoint> vf_variance_curve(const ProtocolSpec& base, std::span<const double> sizes,
                                               std::size_t realizations, int voxels_per_size,
                                               std::uint64_t master_seed, int workers) {
  if (realizations < 2) throw std::invalid_argument("variance curves need at least two realizations per size");
  if (voxels_per_size < 1) throw std::invalid_argument("voxels_per_size must be positive");
  std::vector<VfVariancePoint> out;
  const std::string tag = to_string(base.protocol);
  for (double size : sizes) {
    ProtocolSpec spec = base;
    spec.size = size;
    spec.validate();
    const int n = static_cast<int>(std::lround(voxels_per_size * size));
    std::vector<double> phi(realizations, -1.0);
    parallel_for(realizations, resolve_workers(workers), [&](std::size_t i) {
      DrawResult r = draw(spec, derive_seed(master_seed, tag, size, i));
      if (r.success) phi[i] = measured_volume_fraction(voxelize(r.config, n));
    });
    VfVariancePoint p;
    p.size = size;
    std::vector<double> ok;
    for (double v : phi) {
      if (v < 0.0) ++p.failures;
      else ok.push_back(v);
    }
    p.realizations = ok.size();
    if (ok.size() >= 2) {
      p.mean_phi = summarize(ok).mean;
      p.normalized_std = normalized_vf_std(ok, spec.phi);
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace rvelab
