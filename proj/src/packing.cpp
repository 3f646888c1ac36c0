#include "rvelab/packing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <limits>
#include <stdexcept>

#include "rvelab/rng.hpp"

namespace rvelab {

namespace {

// Descent works on a radius inflated by this relative amount so that a
// converged configuration is strictly non-overlapping at the nominal
// effective radius.
constexpr double kContactSlack = 1e-6;
constexpr int kStallWindow = 500;

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double neighbor_range(const Species& species, double effective_radius) {
  double range = 2.0 * effective_radius;
  if (species.kind == ShapeKind::Spherocylinder) range += species.length;
  return range;
}

double radius_for_volume(ShapeKind kind, double volume) {
  constexpr double pi = std::numbers::pi;
  if (kind == ShapeKind::Disk) return std::sqrt(volume / pi);
  return std::cbrt(3.0 * volume / (4.0 * pi));
}

Vec random_point(CounterRng& rng, const Cell& cell) {
  Vec p{};
  for (int a = 0; a < cell.dim; ++a) p[a] = wrap_coordinate(rng.uniform() * cell.edge, cell.edge);
  return p;
}

Vec random_axis(CounterRng& rng) {
  const double z = 2.0 * rng.uniform() - 1.0;
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  Vec a{s * std::cos(phi), s * std::sin(phi), z};
  return (1.0 / norm(a)) * a;
}

Vec random_direction_2d(CounterRng& rng) {
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  return {std::cos(phi), std::sin(phi), 0.0};
}

/// Visits every overlapping pair once with its overlap delta and contact data.
template <typename F>
void for_each_overlap(const Configuration& config, double effective_radius, F&& f) {
  if (config.size() < 2) return;
  const Cell& cell = config.cell;
  const NeighborIndex index(cell, config.centers, neighbor_range(config.species, effective_radius));
  const double contact = 2.0 * effective_radius;
  if (config.species.kind != ShapeKind::Spherocylinder) {
    index.for_each_pair([&](std::size_t i, std::size_t j) {
      const Vec d = min_image_delta(config.centers[j], config.centers[i], cell);  // from j to i
      const double dist = norm(d);
      const double delta = contact - dist;
      if (delta <= 0.0) return;
      SegmentContact c;
      c.distance = dist;
      c.direction = dist > 0.0 ? (1.0 / dist) * d : Vec{1.0, 0.0, 0.0};
      f(i, j, delta, c);
    });
    return;
  }
  const double h = 0.5 * config.species.length;
  index.for_each_pair([&](std::size_t i, std::size_t j) {
    SegmentContact c = periodic_segment_contact(config.centers[i], config.axes[i], h, config.centers[j],
                                                config.axes[j], h, cell);
    const double delta = contact - c.distance;
    if (delta <= 0.0) return;
    f(i, j, delta, c);
  });
}

/// Pair candidates reused until some particle has moved (centre shift plus
/// tip shift from rotation) by more than skin / 2. Disks and spheres keep
/// pairs whose centre distance is within contact + skin. Fibers keep one
/// entry per periodic image whose axis segments come within contact + skin,
/// since the centre distance is a poor filter for slender particles.
class VerletList {
 public:
  VerletList(double contact_range, double skin) : contact_range_(contact_range), skin_(skin) {}

  template <typename F>
  void for_each_overlap(const Configuration& config, double effective_radius, F&& f) {
    if (config.size() < 2) return;
    if (stale(config)) rebuild(config);
    const Cell& cell = config.cell;
    const double contact = 2.0 * effective_radius;
    if (config.species.kind != ShapeKind::Spherocylinder) {
      const double contact2 = contact * contact;
      for (const Entry& e : entries_) {
        const Vec d = min_image_delta(config.centers[e.j], config.centers[e.i], cell);
        const double dist2 = dot(d, d);
        if (dist2 >= contact2) continue;
        const double dist = std::sqrt(dist2);
        SegmentContact c;
        c.distance = dist;
        c.direction = dist > 0.0 ? (1.0 / dist) * d : Vec{1.0, 0.0, 0.0};
        f(e.i, e.j, contact - dist, c);
      }
      return;
    }
    const double h = 0.5 * config.species.length;
    std::vector<Vec> moved(config.size());
    for (std::size_t i = 0; i < config.size(); ++i) moved[i] = min_image_delta(ref_centers_[i], config.centers[i], cell);
    for (std::size_t k = 0; k < entries_.size();) {
      const std::size_t i = entries_[k].i, j = entries_[k].j;
      SegmentContact best;
      best.distance = std::numeric_limits<double>::infinity();
      for (; k < entries_.size() && entries_[k].i == i && entries_[k].j == j; ++k) {
        const Vec image = config.centers[i] + entries_[k].offset + moved[j] - moved[i];
        SegmentContact c = segment_contact(config.centers[i], config.axes[i], h, image, config.axes[j], h);
        if (c.distance < best.distance) best = c;
      }
      const double delta = contact - best.distance;
      if (delta > 0.0) f(i, j, delta, best);
    }
  }

 private:
  struct Entry {
    std::size_t i, j;
    Vec offset;  // image of j relative to i at build time (fibers)
  };

  bool stale(const Configuration& config) const {
    if (ref_centers_.size() != config.size() || ref_edge_ != config.cell.edge) return true;
    const double h = 0.5 * config.species.length;
    const bool fibers = config.species.kind == ShapeKind::Spherocylinder;
    for (std::size_t i = 0; i < config.size(); ++i) {
      double moved = norm(min_image_delta(ref_centers_[i], config.centers[i], config.cell));
      if (fibers) moved += h * norm(config.axes[i] - ref_axes_[i]);
      if (2.0 * moved > skin_) return true;
    }
    return false;
  }

  void rebuild(const Configuration& config) {
    entries_.clear();
    const Cell& cell = config.cell;
    const bool fibers = config.species.kind == ShapeKind::Spherocylinder;
    const double reach = contact_range_ + skin_;
    const double h = 0.5 * config.species.length;
    const NeighborIndex index(cell, config.centers, reach + (fibers ? config.species.length : 0.0));
    index.for_each_pair([&](std::size_t i, std::size_t j) {
      if (!fibers) {
        entries_.push_back({i, j, Vec{}});
        return;
      }
      const Vec& p = config.centers[i];
      const Vec base = min_image_delta(p, config.centers[j], cell);
      const int zr = cell.dim == 3 ? 1 : 0;
      for (int kz = -zr; kz <= zr; ++kz)
        for (int ky = -1; ky <= 1; ++ky)
          for (int kx = -1; kx <= 1; ++kx) {
            const Vec offset = base + Vec{kx * cell.edge, ky * cell.edge, kz * cell.edge};
            if (norm(offset) - 2.0 * h > reach) continue;
            const SegmentContact c = segment_contact(p, config.axes[i], h, p + offset, config.axes[j], h);
            if (c.distance <= reach) entries_.push_back({i, j, offset});
          }
    });
    ref_centers_ = config.centers;
    ref_axes_ = config.axes;
    ref_edge_ = config.cell.edge;
  }

  double contact_range_, skin_;
  std::vector<Entry> entries_;
  std::vector<Vec> ref_centers_, ref_axes_;
  double ref_edge_ = 0.0;
};

struct DescentOutcome {
  int iterations = 0;
  double energy = 0.0;
  bool converged = false;
};

/// Jacobi-type overlap removal. Each overlapping pair contributes a push that
/// separates it by `2 * step_size * delta` to first order, i.e. a fixed-step
/// gradient step on W. If the energy has not halved within kStallWindow
/// iterations, each particle's step is divided by its overlap multiplicity
/// from then on; a second stall shakes the overlapping particles randomly.
DescentOutcome descend(Configuration& config, double effective_radius, const PackingParams& params,
                       bool control_orientation, CounterRng& rng) {
  const double r_work = effective_radius * (1.0 + kContactSlack);
  const double tol = params.energy_tol_for(effective_radius);
  const std::size_t n = config.size();
  const bool fibers = config.species.kind == ShapeKind::Spherocylinder;
  const double h = 0.5 * config.species.length;
  const double step = params.descent.step_size;

  std::vector<Vec> push_c(n), push_a(n);
  std::vector<int> mult(n);
  VerletList pairs(2.0 * r_work, (fibers ? 2.0 : 0.3) * effective_radius);
  DescentOutcome out;
  bool damped = false;
  double best_energy = std::numeric_limits<double>::infinity();
  int best_iter = 0;
  for (int it = 0;; ++it) {
    std::fill(push_c.begin(), push_c.end(), Vec{});
    std::fill(push_a.begin(), push_a.end(), Vec{});
    std::fill(mult.begin(), mult.end(), 0);
    double energy = 0.0;
    double max_delta = 0.0;
    pairs.for_each_overlap(config, r_work, [&](std::size_t i, std::size_t j, double delta, const SegmentContact& c) {
      energy += 0.5 * delta * delta;
      max_delta = std::max(max_delta, delta);
      ++mult[i];
      ++mult[j];
      if (!fibers) {
        push_c[i] = push_c[i] + delta * c.direction;
        push_c[j] = push_c[j] - delta * c.direction;
        return;
      }
      const double si = c.s / h, sj = c.t / h;
      const double wi = delta / (1.0 + si * si), wj = delta / (1.0 + sj * sj);
      push_c[i] = push_c[i] + wi * c.direction;
      push_a[i] = push_a[i] + (wi * c.s / (h * h)) * c.direction;
      push_c[j] = push_c[j] - wj * c.direction;
      push_a[j] = push_a[j] - (wj * c.t / (h * h)) * c.direction;
    });

    double deviation = 0.0;
    std::array<double, 9> m{};
    if (control_orientation && n > 0) {
      m = orientation_tensor(config);
      for (int a = 0; a < 3; ++a) m[4 * a] -= 1.0 / 3.0;
      for (double v : m) deviation = std::max(deviation, std::abs(v));
    }
    out.energy = energy;
    out.iterations = it;
    const bool oriented = !control_orientation || deviation <= params.orientation_tol;
    if (energy <= tol && oriented) {
      out.converged = true;
      return out;
    }
    if (it >= params.descent.max_iters) return out;
    if (!std::isfinite(energy)) return out;
    if (energy < 0.5 * best_energy) {
      best_energy = energy;
      best_iter = it;
    } else if (it - best_iter > kStallWindow) {
      best_iter = it;
      best_energy = energy;
      if (!damped) {
        damped = true;
      } else {
        // stuck in a jammed local minimum: shake the overlapping particles
        for (std::size_t i = 0; i < n; ++i) {
          if (mult[i] == 0) continue;
          Vec kick = config.cell.dim == 3 ? random_axis(rng) : random_direction_2d(rng);
          config.centers[i] = wrap_point(config.centers[i] + std::max(2.0 * max_delta, 0.05 * effective_radius) * kick, config.cell);
        }
        continue;
      }
    }

    for (std::size_t i = 0; i < n; ++i) {
      double scale = 0.0;
      if (mult[i] > 0) scale = damped ? step / mult[i] : step;
      if (scale > 0.0) config.centers[i] = wrap_point(config.centers[i] + scale * push_c[i], config.cell);
      if (!fibers) continue;
      Vec da = scale * push_a[i];
      if (control_orientation && !oriented) {
        const Vec& a = config.axes[i];
        Vec ma{m[0] * a[0] + m[1] * a[1] + m[2] * a[2], m[3] * a[0] + m[4] * a[1] + m[5] * a[2],
               m[6] * a[0] + m[7] * a[1] + m[8] * a[2]};
        da = da - params.orientation_weight * ma;
      }
      const Vec& a = config.axes[i];
      da = da - dot(da, a) * a;
      if (dot(da, da) > 0.0) {
        Vec moved = a + da;
        config.axes[i] = (1.0 / norm(moved)) * moved;
      }
    }
  }
}

}  // namespace

void PackingParams::validate() const {
  if (!(target_phi >= 0.0 && target_phi < 1.0)) throw std::invalid_argument("target volume fraction must lie in [0,1)");
  if (!(isolation_factor >= 1.0)) throw std::invalid_argument("isolation factor must be at least 1");
  for (std::size_t i = 1; i < phi_schedule.size(); ++i)
    if (!(phi_schedule[i] > phi_schedule[i - 1])) throw std::invalid_argument("phi schedule must be strictly increasing");
  if (!phi_schedule.empty() && std::abs(phi_schedule.back() - target_phi) > 1e-12)
    throw std::invalid_argument("phi schedule must end at the target volume fraction");
  if (!(descent.step_size > 0.0)) throw std::invalid_argument("descent step size must be positive");
  if (descent.max_iters < 0) throw std::invalid_argument("max_iters must be nonnegative");
}

std::vector<double> PackingParams::schedule_for(ShapeKind kind) const {
  if (!phi_schedule.empty()) return phi_schedule;
  const double increment = kind == ShapeKind::Spherocylinder ? 0.05 : 0.10;
  std::vector<double> out;
  for (int k = 1;; ++k) {
    double phi = k * increment;
    if (phi >= target_phi - 1e-12) break;
    out.push_back(phi);
  }
  out.push_back(target_phi);
  return out;
}

double PackingParams::energy_tol_for(double effective_radius) const {
  if (descent.energy_tol >= 0.0) return descent.energy_tol;
  const double diameter = 2.0 * effective_radius;
  return 1e-14 * diameter * diameter;
}

OverlapEvaluation evaluate_overlaps(const Configuration& config, double effective_radius, bool with_gradient) {
  OverlapEvaluation ev;
  const std::size_t n = config.size();
  const bool fibers = config.species.kind == ShapeKind::Spherocylinder;
  ev.multiplicity.assign(n, 0);
  if (with_gradient) {
    ev.center_gradient.assign(n, Vec{});
    if (fibers) ev.axis_gradient.assign(n, Vec{});
  }
  for_each_overlap(config, effective_radius, [&](std::size_t i, std::size_t j, double delta, const SegmentContact& c) {
    ev.energy += 0.5 * delta * delta;
    ++ev.multiplicity[i];
    ++ev.multiplicity[j];
    if (!with_gradient) return;
    // d(gap)/dx_i = direction, d(gap)/dx_j = -direction; dW = -delta d(gap)
    ev.center_gradient[i] = ev.center_gradient[i] - delta * c.direction;
    ev.center_gradient[j] = ev.center_gradient[j] + delta * c.direction;
    if (fibers) {
      ev.axis_gradient[i] = ev.axis_gradient[i] - (delta * c.s) * c.direction;
      ev.axis_gradient[j] = ev.axis_gradient[j] + (delta * c.t) * c.direction;
    }
  });
  return ev;
}

double overlap_energy(const Configuration& config, double effective_radius) {
  return evaluate_overlaps(config, effective_radius, false).energy;
}

std::vector<Vec> overlap_gradient(const Configuration& config, double effective_radius) {
  return evaluate_overlaps(config, effective_radius, true).center_gradient;
}

std::array<double, 9> orientation_tensor(const Configuration& config) {
  std::array<double, 9> m{};
  if (config.axes.empty()) return m;
  for (const auto& a : config.axes)
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m[3 * r + c] += a[r] * a[c];
  for (double& v : m) v /= static_cast<double>(config.axes.size());
  return m;
}

double orientation_deviation(const Configuration& config) {
  auto m = orientation_tensor(config);
  double dev = 0.0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) dev = std::max(dev, std::abs(m[3 * r + c] - (r == c ? 1.0 / 3.0 : 0.0)));
  return dev;
}

std::pair<Configuration, PackingReport> remove_overlaps(Configuration config, const PackingParams& params) {
  params.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const double r_eff = params.isolation_factor * config.species.radius;
  PackingReport report;
  CounterRng rng(params.seed);
  DescentOutcome outcome = descend(config, r_eff, params, false, rng);
  report.iterations.push_back(outcome.iterations);
  report.final_energy = overlap_energy(config, r_eff);
  report.success = outcome.converged;
  if (!report.success) report.failure_reason = "overlap removal did not converge within max_iters";
  config.non_overlapping = report.success && report.final_energy == 0.0;
  if (config.non_overlapping) report.achieved_phi = analytic_volume_fraction(config);
  report.wall_seconds = elapsed_since(t0);
  return {std::move(config), report};
}

std::pair<Configuration, PackingReport> mcm_pack(const Cell& final_cell, ShapeKind kind, std::size_t count,
                                                 const PackingParams& params) {
  params.validate();
  final_cell.validate();
  if (kind == ShapeKind::Spherocylinder) throw std::invalid_argument("mcm_pack handles disks and spheres; use sam_pack for fibers");
  if ((kind == ShapeKind::Disk) != (final_cell.dim == 2)) throw std::invalid_argument("shape does not match cell dimension");
  const auto t0 = std::chrono::steady_clock::now();

  Configuration config;
  config.cell = final_cell;
  config.cell.periodic = true;
  config.species.kind = kind;
  config.meta = {params.target_phi, params.isolation_factor};
  PackingReport report;

  if (count == 0 || params.target_phi == 0.0) {
    config.species.radius = 1.0;  // placeholder, no particles
    config.non_overlapping = true;
    report.success = true;
    report.wall_seconds = elapsed_since(t0);
    return {std::move(config), report};
  }

  const double particle_volume = params.target_phi * final_cell.volume() / static_cast<double>(count);
  config.species.radius = radius_for_volume(kind, particle_volume);
  const double r_eff = params.isolation_factor * config.species.radius;
  if (2.0 * r_eff * (1.0 + kContactSlack) > 0.5 * final_cell.edge) {
    report.failure_reason = "inflated particle diameter exceeds half the cell edge";
    report.wall_seconds = elapsed_since(t0);
    return {std::move(config), report};
  }

  const std::vector<double> schedule = params.schedule_for(kind);
  const int d = final_cell.dim;
  auto edge_at = [&](double phi) { return final_cell.edge * std::pow(params.target_phi / phi, 1.0 / d); };

  CounterRng rng(params.seed);
  config.cell.edge = edge_at(schedule.front());
  config.centers.resize(count);
  for (auto& c : config.centers) c = random_point(rng, config.cell);

  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (k > 0) {
      const double new_edge = k + 1 == schedule.size() ? final_cell.edge : edge_at(schedule[k]);
      const double factor = new_edge / config.cell.edge;
      config.cell.edge = new_edge;
      for (auto& c : config.centers) c = wrap_point(factor * c, config.cell);
    }
    DescentOutcome outcome = descend(config, r_eff, params, false, rng);
    report.iterations.push_back(outcome.iterations);
    report.final_energy = outcome.energy;
    if (!outcome.converged) {
      report.failure_reason = "contraction step " + std::to_string(k + 1) + " (phi=" +
                              std::to_string(schedule[k]) + ") did not converge";
      report.wall_seconds = elapsed_since(t0);
      return {std::move(config), report};
    }
  }
  report.final_energy = overlap_energy(config, r_eff);
  config.non_overlapping = report.final_energy == 0.0;
  report.success = config.non_overlapping;
  if (!report.success) report.failure_reason = "residual overlap at the nominal isolation radius";
  else report.achieved_phi = analytic_volume_fraction(config);
  report.wall_seconds = elapsed_since(t0);
  return {std::move(config), report};
}

std::pair<Configuration, PackingReport> sam_pack(const Cell& cell, const Species& fiber, const PackingParams& params) {
  params.validate();
  cell.validate();
  fiber.validate();
  if (fiber.kind != ShapeKind::Spherocylinder || cell.dim != 3)
    throw std::invalid_argument("sam_pack requires spherocylinders in a 3D cell");
  if (fiber.length > cell.edge) throw std::invalid_argument("fiber length may not exceed the cell edge");
  const auto t0 = std::chrono::steady_clock::now();

  Configuration config;
  config.cell = cell;
  config.cell.periodic = true;
  config.species = fiber;
  config.meta = {params.target_phi, params.isolation_factor};
  PackingReport report;
  const double r_eff = params.isolation_factor * fiber.radius;
  CounterRng rng(params.seed);

  if (params.target_phi > 0.0) {
    for (double phi : params.schedule_for(fiber.kind)) {
      const auto target_count = static_cast<std::size_t>(std::ceil(phi * cell.volume() / fiber.particle_volume() - 1e-9));
      while (config.centers.size() < target_count) {
        config.centers.push_back(random_point(rng, cell));
        config.axes.push_back(random_axis(rng));
      }
      DescentOutcome outcome = descend(config, r_eff, params, true, rng);
      report.iterations.push_back(outcome.iterations);
      report.final_energy = outcome.energy;
      if (!outcome.converged) {
        report.failure_reason = "migration at phi=" + std::to_string(phi) + " did not converge";
        report.wall_seconds = elapsed_since(t0);
        return {std::move(config), report};
      }
    }
  }
  report.final_energy = overlap_energy(config, r_eff);
  config.non_overlapping = report.final_energy == 0.0;
  report.success = config.non_overlapping;
  if (!report.success) report.failure_reason = "residual overlap at the nominal isolation radius";
  else report.achieved_phi = analytic_volume_fraction(config);
  report.wall_seconds = elapsed_since(t0);
  return {std::move(config), report};
}

std::pair<Configuration, PackingReport> rsa_pack(const Cell& cell, const Species& species, const PackingParams& params) {
  params.validate();
  cell.validate();
  species.validate();
  const auto t0 = std::chrono::steady_clock::now();

  Configuration config;
  config.cell = cell;
  config.cell.periodic = true;
  config.species = species;
  config.meta = {params.target_phi, params.isolation_factor};
  PackingReport report;
  const bool fibers = species.kind == ShapeKind::Spherocylinder;
  const double r_eff = params.isolation_factor * species.radius;
  const double contact = 2.0 * r_eff;
  const double h = 0.5 * species.length;
  const auto wanted = static_cast<std::size_t>(std::llround(params.target_phi * cell.volume() / species.particle_volume()));
  const auto budget = static_cast<std::uint64_t>(params.rsa_budget_per_particle * static_cast<double>(std::max<std::size_t>(wanted, 1)));

  // growing bin grid over accepted particles
  const double range = neighbor_range(species, r_eff);
  const int m = range > 0.5 * cell.edge ? 1 : std::min(256, static_cast<int>(std::floor(cell.edge / range)));
  const int d = cell.dim;
  std::size_t nbins = 1;
  for (int a = 0; a < d; ++a) nbins *= static_cast<std::size_t>(m);
  std::vector<std::vector<std::size_t>> bins(nbins);
  auto bin_coords = [&](const Vec& x, int* out) {
    for (int a = 0; a < 3; ++a) out[a] = 0;
    for (int a = 0; a < d; ++a) out[a] = std::min(m - 1, static_cast<int>(x[a] / cell.edge * m));
  };
  auto flat = [&](const int* b) {
    return static_cast<std::size_t>(b[0]) + static_cast<std::size_t>(m) * (static_cast<std::size_t>(b[1]) + static_cast<std::size_t>(m) * static_cast<std::size_t>(b[2]));
  };

  CounterRng rng(params.seed);
  std::uint64_t proposals = 0;
  while (config.centers.size() < wanted && proposals < budget) {
    ++proposals;
    const Vec x = random_point(rng, cell);
    const Vec ax = fibers ? random_axis(rng) : Vec{1.0, 0.0, 0.0};
    bool free = true;
    auto test = [&](std::size_t j) {
      double gap = fibers ? periodic_segment_contact(x, ax, h, config.centers[j], config.axes[j], h, cell).distance
                          : periodic_distance(x, config.centers[j], cell);
      if (gap < contact) free = false;
    };
    int home[3];
    bin_coords(x, home);
    if (m < 3) {
      for (std::size_t j = 0; j < config.centers.size() && free; ++j) test(j);
    } else {
      const int zr = d == 3 ? 1 : 0;
      for (int dz = -zr; dz <= zr && free; ++dz)
        for (int dy = -1; dy <= 1 && free; ++dy)
          for (int dx = -1; dx <= 1 && free; ++dx) {
            int b[3] = {(home[0] + dx + m) % m, (home[1] + dy + m) % m, d == 3 ? (home[2] + dz + m) % m : 0};
            for (std::size_t j : bins[flat(b)]) {
              test(j);
              if (!free) break;
            }
          }
    }
    if (!free) continue;
    bins[flat(home)].push_back(config.centers.size());
    config.centers.push_back(x);
    if (fibers) config.axes.push_back(ax);
  }
  report.iterations.push_back(static_cast<int>(std::min<std::uint64_t>(proposals, 2147483647ULL)));
  config.non_overlapping = true;
  report.achieved_phi = analytic_volume_fraction(config);
  report.success = config.centers.size() == wanted;
  if (!report.success)
    report.failure_reason = "proposal budget exhausted at phi=" + std::to_string(report.achieved_phi);
  report.wall_seconds = elapsed_since(t0);
  return {std::move(config), report};
}

}  // namespace rvelab
