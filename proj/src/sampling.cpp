#include "rvelab/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "rvelab/rng.hpp"

namespace rvelab {

namespace {

double clamp_to_box(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

double point_box_distance_sq(const Vec& x, double edge, int dim) {
  double d2 = 0.0;
  for (int a = 0; a < dim; ++a) {
    const double c = clamp_to_box(x[a], 0.0, edge);
    d2 += (x[a] - c) * (x[a] - c);
  }
  return d2;
}

/// Distance from the segment c + s u, |s| <= h, to the box [0, edge]^3. The
/// squared distance is convex in s, so a golden-section search is exact up
/// to its bracket width.
double segment_box_distance(const Vec& c, const Vec& u, double h, double edge) {
  auto f = [&](double s) { return point_box_distance_sq(c + s * u, edge, 3); };
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = -h, hi = h;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + h); ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  return std::sqrt(std::min({f(lo), f(hi), f(0.5 * (lo + hi))}));
}

PackingParams packing_params(const ProtocolSpec& spec, std::uint64_t seed) {
  PackingParams p = spec.packing;
  p.target_phi = spec.phi;
  p.isolation_factor = spec.isolation;
  p.seed = seed;
  if (!p.phi_schedule.empty() && std::abs(p.phi_schedule.back() - spec.phi) > 1e-12) p.phi_schedule.clear();
  return p;
}

DrawResult pack_periodic(const ProtocolSpec& spec, double edge, std::size_t count, std::uint64_t seed) {
  DrawResult out;
  const Cell cell{spec.dim(), edge, true};
  const PackingParams params = packing_params(spec, seed);
  std::pair<Configuration, PackingReport> packed;
  if (spec.shape == ShapeKind::Spherocylinder) {
    packed = sam_pack(cell, spec.fiber_species(), params);
  } else {
    packed = mcm_pack(cell, spec.shape, count, params);
  }
  out.config = std::move(packed.first);
  out.report = std::move(packed.second);
  out.success = out.report.success;
  out.failure_reason = out.report.failure_reason;
  return out;
}

}  // namespace

std::string to_string(Protocol protocol) {
  switch (protocol) {
    case Protocol::Periodized: return "periodized";
    case Protocol::Snapshot: return "snapshot";
    case Protocol::PeriodizedPoisson: return "poisson";
  }
  return "unknown";
}

Protocol protocol_from_string(const std::string& name) {
  if (name == "periodized" || name == "per") return Protocol::Periodized;
  if (name == "snapshot" || name == "sn") return Protocol::Snapshot;
  if (name == "poisson" || name == "periodized-poisson") return Protocol::PeriodizedPoisson;
  throw std::invalid_argument("unknown protocol '" + name + "'");
}

void ProtocolSpec::validate() const {
  if (!(size > 0.0)) throw std::invalid_argument("cell size must be positive");
  if (!(phi >= 0.0 && phi < 1.0)) throw std::invalid_argument("volume fraction must lie in [0,1)");
  if (!(isolation >= 1.0)) throw std::invalid_argument("isolation factor must be at least 1");
  if (magnification != 0.0 && !(magnification > 1.0)) throw std::invalid_argument("snapshot magnification must exceed 1");
  if (shape == ShapeKind::Spherocylinder) {
    if (!(aspect_ratio > 0.0)) throw std::invalid_argument("aspect ratio must be positive");
    if (size < 1.0) throw std::invalid_argument("fiber cells must be at least one fiber length wide");
  }
  if (poisson_retries < 0) throw std::invalid_argument("poisson_retries must be nonnegative");
}

double ProtocolSpec::effective_magnification() const {
  if (magnification > 0.0) return magnification;
  return shape == ShapeKind::Spherocylinder ? 1.5 : 2.0;
}

std::size_t ProtocolSpec::nominal_count(double edge) const {
  return static_cast<std::size_t>(std::llround(std::pow(edge, dim())));
}

Species ProtocolSpec::fiber_species() const {
  Species s;
  s.kind = ShapeKind::Spherocylinder;
  s.length = 1.0;
  s.radius = 0.5 / aspect_ratio;
  s.caps_included = false;
  return s;
}

DrawResult draw_periodized(const ProtocolSpec& spec, std::uint64_t seed) {
  spec.validate();
  const double edge = spec.cell_edge();
  return pack_periodic(spec, edge, spec.nominal_count(edge), seed);
}

DrawResult draw_snapshot(const ProtocolSpec& spec, std::uint64_t seed) {
  spec.validate();
  const double edge = spec.cell_edge();
  const double parent_edge = spec.effective_magnification() * edge;
  DrawResult parent = pack_periodic(spec, parent_edge, spec.nominal_count(parent_edge), seed);
  DrawResult out;
  out.report = parent.report;
  out.success = parent.success;
  out.failure_reason = parent.failure_reason;
  if (!parent.success) {
    out.config = std::move(parent.config);
    return out;
  }
  out.config = cut_subcell(parent.config, edge);
  return out;
}

DrawResult draw_poisson_periodized(const ProtocolSpec& spec, std::uint64_t seed) {
  spec.validate();
  if (spec.shape == ShapeKind::Spherocylinder) throw std::invalid_argument("Poisson counts apply to disks and spheres");
  const double edge = spec.cell_edge();
  CounterRng rng(seed);
  std::poisson_distribution<long> count_dist(static_cast<double>(spec.nominal_count(edge)));
  std::vector<std::string> log;
  for (int attempt = 0; attempt <= spec.poisson_retries; ++attempt) {
    const long count = count_dist(rng);
    const std::uint64_t pack_seed = rng();
    DrawResult r;
    if (count <= 0) {
      r.failure_reason = "empty Poisson draw";
    } else {
      r = pack_periodic(spec, edge, static_cast<std::size_t>(count), pack_seed);
    }
    if (r.success) {
      r.attempts = attempt + 1;
      r.retry_log = std::move(log);
      return r;
    }
    log.push_back("N=" + std::to_string(count) + ": " + r.failure_reason);
  }
  DrawResult out;
  out.attempts = spec.poisson_retries + 1;
  out.failure_reason = "no feasible Poisson count within " + std::to_string(out.attempts) + " draws";
  out.retry_log = std::move(log);
  return out;
}

DrawResult draw(const ProtocolSpec& spec, std::uint64_t seed) {
  switch (spec.protocol) {
    case Protocol::Periodized: return draw_periodized(spec, seed);
    case Protocol::Snapshot: return draw_snapshot(spec, seed);
    case Protocol::PeriodizedPoisson: return draw_poisson_periodized(spec, seed);
  }
  throw std::invalid_argument("unknown protocol");
}

Configuration cut_subcell(const Configuration& parent, double edge) {
  if (!parent.cell.periodic) throw std::invalid_argument("cut_subcell requires a periodic parent");
  if (!(edge > 0.0 && edge <= parent.cell.edge)) throw std::invalid_argument("subcell edge must lie in (0, parent edge]");
  Configuration out;
  out.cell = Cell{parent.cell.dim, edge, false};
  out.species = parent.species;
  out.meta = parent.meta;
  out.non_overlapping = parent.non_overlapping;
  const bool fibers = parent.species.kind == ShapeKind::Spherocylinder;
  const double r = parent.species.radius;
  const double h = 0.5 * parent.species.length;
  const double P = parent.cell.edge;
  const int d = parent.cell.dim;
  const int zr = d == 3 ? 1 : 0;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    for (int kz = -zr; kz <= zr; ++kz)
      for (int ky = -1; ky <= 1; ++ky)
        for (int kx = -1; kx <= 1; ++kx) {
          const Vec c = parent.centers[i] + Vec{kx * P, ky * P, kz * P};
          const double dist = fibers ? segment_box_distance(c, parent.axes[i], h, edge)
                                     : std::sqrt(point_box_distance_sq(c, edge, d));
          if (dist > r) continue;
          out.centers.push_back(c);
          if (fibers) out.axes.push_back(parent.axes[i]);
        }
  }
  return out;
}

}  // namespace rvelab
