#include "rvelab/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace rvelab {

void MaterialPair::validate() const {
  if (!(alpha_inclusion > 0.0 && alpha_matrix > 0.0)) throw std::invalid_argument("conductivities must be positive");
}

double MaterialPair::reference() const { return std::sqrt(alpha_inclusion * alpha_matrix); }

double MaterialPair::rho() const {
  const double s1 = std::sqrt(alpha_inclusion), s2 = std::sqrt(alpha_matrix);
  return (s1 - s2) / (s1 + s2);
}

std::string to_string(ConvergenceMetric metric) {
  return metric == ConvergenceMetric::PolarizationUpdate ? "update" : "equilibrium";
}

ConvergenceMetric metric_from_string(const std::string& name) {
  if (name == "update" || name == "polarization") return ConvergenceMetric::PolarizationUpdate;
  if (name == "equilibrium" || name == "residual") return ConvergenceMetric::Equilibrium;
  throw std::invalid_argument("unknown convergence metric '" + name + "'");
}

void SolverSettings::validate() const {
  if (!(tolerance > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  if (reference_alpha < 0.0) throw std::invalid_argument("reference conductivity must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
}

HelmholtzProjector::HelmholtzProjector(int dim, int n)
    : fft_(dim, n, dim), real_(fft_.real_size() * dim), spec_(fft_.complex_size() * dim) {}

void HelmholtzProjector::wave_vector(std::size_t idx, double* k) const {
  const int n = fft_.n();
  const auto hx = static_cast<std::size_t>(fft_.half_n());
  const auto m = static_cast<std::size_t>(n);
  const bool even = n % 2 == 0;
  auto freq = [&](std::size_t i) {
    int f = static_cast<int>(i) <= n / 2 ? static_cast<int>(i) : static_cast<int>(i) - n;
    if (even && std::abs(f) == n / 2) f = 0;
    return static_cast<double>(f);
  };
  k[0] = freq(idx % hx);
  std::size_t rest = idx / hx;
  k[1] = freq(rest % m);
  if (fft_.dim() == 3) k[2] = freq(rest / m);
}

template <typename Op>
void HelmholtzProjector::transform(const double* in, double* out, Op&& op) {
  const int d = fft_.dim();
  const std::size_t N = fft_.real_size(), M = fft_.complex_size();
  std::copy(in, in + N * d, real_.data());
  fft_.forward(real_.data(), spec_.data());
  double k[3] = {0.0, 0.0, 0.0};
  std::complex<double> f[3];
  for (std::size_t idx = 0; idx < M; ++idx) {
    wave_vector(idx, k);
    double kk = 0.0;
    std::complex<double> kf = 0.0;
    for (int a = 0; a < d; ++a) {
      f[a] = spec_[a * M + idx];
      kk += k[a] * k[a];
      kf += k[a] * f[a];
    }
    for (int a = 0; a < d; ++a) {
      const std::complex<double> proj = kk > 0.0 ? k[a] * kf / kk : std::complex<double>(0.0);
      spec_[a * M + idx] = op(f[a], proj);
    }
  }
  fft_.inverse(spec_.data(), out);
  const double scale = 1.0 / static_cast<double>(N);
  for (std::size_t i = 0; i < N * d; ++i) out[i] *= scale;
}

void HelmholtzProjector::apply(const double* in, double* out) {
  transform(in, out, [](std::complex<double>, std::complex<double> proj) { return proj; });
}

std::vector<double> HelmholtzProjector::apply(const std::vector<double>& field) {
  if (field.size() != voxels() * dim()) throw std::invalid_argument("field size does not match the projector");
  FftBuffer<double> buf(field.size());
  apply(field.data(), buf.data());
  return std::vector<double>(buf.data(), buf.data() + field.size());
}

void HelmholtzProjector::reflect(const double* in, double* out, const double* mean_shift) {
  transform(in, out, [](std::complex<double> f, std::complex<double> proj) { return f - 2.0 * proj; });
  const std::size_t N = fft_.real_size();
  for (int a = 0; a < dim(); ++a)
    for (std::size_t i = 0; i < N; ++i) out[a * N + i] += mean_shift[a];
}

namespace {

struct PhaseTables {
  double alpha[2];
  double z[2];          // (A - a0) / (A + a0)
  double inv_shift[2];  // 1 / (A + a0)
};

PhaseTables phase_tables(const MaterialPair& materials, double a0) {
  PhaseTables t{};
  t.alpha[0] = materials.alpha_matrix;
  t.alpha[1] = materials.alpha_inclusion;
  for (int c = 0; c < 2; ++c) {
    t.z[c] = (t.alpha[c] - a0) / (t.alpha[c] + a0);
    t.inv_shift[c] = 1.0 / (t.alpha[c] + a0);
  }
  return t;
}

}  // namespace

LoadSolution eyre_milton_solve(const VoxelGrid& grid, const MaterialPair& materials, const std::vector<double>& load,
                               const SolverSettings& settings) {
  grid.validate();
  materials.validate();
  settings.validate();
  const int d = grid.dim;
  if (static_cast<int>(load.size()) != d) throw std::invalid_argument("load must have one entry per dimension");
  const double a0 = settings.reference_alpha > 0.0 ? settings.reference_alpha : materials.reference();
  const PhaseTables tab = phase_tables(materials, a0);
  const std::size_t N = grid.size();
  const auto& chi = grid.phase;

  HelmholtzProjector gamma(d, grid.n);
  FftBuffer<double> p(N * d), q(N * d), next(N * d);
  FftBuffer<double> flux, proj;
  if (settings.metric == ConvergenceMetric::Equilibrium) {
    flux = FftBuffer<double>(N * d);
    proj = FftBuffer<double>(N * d);
  }
  double shift[3] = {0.0, 0.0, 0.0};
  for (int a = 0; a < d; ++a) shift[a] = 2.0 * a0 * load[a];

  // p0 = (A + a0) xi_bar, i.e. xi0 = xi_bar
  for (int a = 0; a < d; ++a)
    for (std::size_t i = 0; i < N; ++i) p[a * N + i] = (tab.alpha[chi[i]] + a0) * load[a];

  LoadSolution out;
  for (int it = 1; it <= settings.max_iters; ++it) {
    for (int a = 0; a < d; ++a)
      for (std::size_t i = 0; i < N; ++i) q[a * N + i] = tab.z[chi[i]] * p[a * N + i];
    gamma.reflect(q.data(), next.data(), shift);

    double diff2 = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < N * d; ++i) {
      const double delta = next[i] - p[i];
      diff2 += delta * delta;
      norm2 += next[i] * next[i];
    }
    if (!std::isfinite(diff2) || !std::isfinite(norm2)) throw std::runtime_error("solver iterate became non-finite");
    std::swap(p, next);

    double metric = norm2 > 0.0 ? std::sqrt(diff2 / norm2) : 0.0;
    if (settings.metric == ConvergenceMetric::Equilibrium) {
      double mean[3] = {0.0, 0.0, 0.0};
      for (int a = 0; a < d; ++a)
        for (std::size_t i = 0; i < N; ++i) {
          const double v = tab.alpha[chi[i]] * tab.inv_shift[chi[i]] * p[a * N + i];
          flux[a * N + i] = v;
          mean[a] += v;
        }
      gamma.apply(flux.data(), proj.data());
      double res2 = 0.0, mean2 = 0.0;
      for (std::size_t i = 0; i < N * d; ++i) res2 += proj[i] * proj[i];
      for (int a = 0; a < d; ++a) mean2 += (mean[a] / N) * (mean[a] / N);
      metric = mean2 > 0.0 ? std::sqrt(res2 / N / mean2) : 0.0;
    }
    out.residual_history.push_back(metric);
    out.iterations = it;
    out.residual = metric;
    if (metric <= settings.tolerance) {
      out.converged = true;
      break;
    }
  }

  // Gamma preserves the mean, so <xi> = load exactly; sum over the minority phase and
  // recover the other from that constraint (single-phase grids come out bitwise exact)
  std::size_t inclusions = 0;
  for (std::size_t i = 0; i < N; ++i) inclusions += chi[i];
  const std::uint8_t minority = 2 * inclusions <= N ? 1 : 0;
  out.mean_flux.assign(d, 0.0);
  out.mean_gradient.assign(load.begin(), load.end());
  for (int a = 0; a < d; ++a) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      if (chi[i] == minority) s += tab.inv_shift[minority] * p[a * N + i];
    s /= static_cast<double>(N);
    out.mean_flux[a] = tab.alpha[minority] * s + tab.alpha[1 - minority] * (load[a] - s);
  }
  return out;
}

ApparentResult apparent_tensor(const VoxelGrid& grid, const MaterialPair& materials, const SolverSettings& settings,
                               int columns) {
  const auto t0 = std::chrono::steady_clock::now();
  const int d = grid.dim;
  if (columns <= 0 || columns > d) columns = d;
  ApparentResult res;
  res.dim = d;
  res.tensor.assign(static_cast<std::size_t>(d * d), 0.0);
  res.phi_measured = measured_volume_fraction(grid);
  res.converged = true;
  for (int j = 0; j < columns; ++j) {
    std::vector<double> load(d, 0.0);
    load[j] = 1.0;
    LoadSolution sol = eyre_milton_solve(grid, materials, load, settings);
    for (int i = 0; i < d; ++i) res.tensor[i * d + j] = sol.mean_flux[i];
    res.iterations += sol.iterations;
    res.residual = std::max(res.residual, sol.residual);
    res.converged = res.converged && sol.converged;
    res.loads.push_back(std::move(sol));
  }
  if (columns == d) {
    double largest = 0.0, asym = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        largest = std::max(largest, std::abs(res.at(i, j)));
        asym = std::max(asym, std::abs(res.at(i, j) - res.at(j, i)));
      }
    res.asymmetry = largest > 0.0 ? asym / largest : 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        const double s = 0.5 * (res.at(i, j) + res.at(j, i));
        res.tensor[i * d + j] = s;
        res.tensor[j * d + i] = s;
      }
  }
  res.a_bar = res.at(0, 0);
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

std::pair<double, double> voigt_reuss_bounds(const MaterialPair& materials, double phi) {
  const double a1 = materials.alpha_inclusion, a2 = materials.alpha_matrix;
  const double harmonic = 1.0 / (phi / a1 + (1.0 - phi) / a2);
  const double arithmetic = phi * a1 + (1.0 - phi) * a2;
  return {harmonic, arithmetic};
}

}  // namespace rvelab
