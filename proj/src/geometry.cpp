#include "rvelab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rvelab {

std::string to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Disk: return "disk";
    case ShapeKind::Sphere: return "sphere";
    case ShapeKind::Spherocylinder: return "spherocylinder";
  }
  return "unknown";
}

ShapeKind shape_from_string(const std::string& name) {
  if (name == "disk" || name == "disks") return ShapeKind::Disk;
  if (name == "sphere" || name == "spheres") return ShapeKind::Sphere;
  if (name == "spherocylinder" || name == "fiber" || name == "fibers") return ShapeKind::Spherocylinder;
  throw std::invalid_argument("unknown shape '" + name + "'");
}

void Cell::validate() const {
  if (dim != 2 && dim != 3) throw std::invalid_argument("cell dimension must be 2 or 3");
  if (!(edge > 0.0)) throw std::invalid_argument("cell edge must be positive");
}

double Cell::volume() const { return std::pow(edge, dim); }

void Species::validate() const {
  if (!(radius > 0.0)) throw std::invalid_argument("particle radius must be positive");
  if (kind == ShapeKind::Spherocylinder && !(length > 0.0))
    throw std::invalid_argument("spherocylinder length must be positive");
}

double Species::particle_volume() const {
  constexpr double pi = std::numbers::pi;
  switch (kind) {
    case ShapeKind::Disk: return pi * radius * radius;
    case ShapeKind::Sphere: return 4.0 / 3.0 * pi * radius * radius * radius;
    case ShapeKind::Spherocylinder: {
      double v = pi * radius * radius * length;
      if (caps_included) v += 4.0 / 3.0 * pi * radius * radius * radius;
      return v;
    }
  }
  return 0.0;
}

Particle Configuration::particle(std::size_t i) const {
  Particle p;
  p.kind = species.kind;
  p.radius = species.radius;
  p.length = species.length;
  p.center = centers.at(i);
  if (species.kind == ShapeKind::Spherocylinder) p.axis = axes.at(i);
  return p;
}

void Configuration::validate() const {
  cell.validate();
  species.validate();
  int expected_dim = species.kind == ShapeKind::Disk ? 2 : 3;
  if (cell.dim != expected_dim)
    throw std::invalid_argument(to_string(species.kind) + " requires a " +
                                std::to_string(expected_dim) + "-dimensional cell");
  if (species.kind == ShapeKind::Spherocylinder) {
    if (axes.size() != centers.size()) throw std::invalid_argument("one axis per fiber required");
    for (const auto& a : axes)
      if (std::abs(norm(a) - 1.0) > 1e-12) throw std::invalid_argument("fiber axes must be unit vectors");
    if (species.length > cell.edge)
      throw std::invalid_argument("fiber length may not exceed the cell edge");
  }
  if (cell.periodic) {
    for (const auto& c : centers)
      for (int a = 0; a < cell.dim; ++a)
        if (!(c[a] >= 0.0 && c[a] < cell.edge))
          throw std::invalid_argument("particle centre outside the periodic cell");
  }
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

double wrap_coordinate(double x, double edge) {
  double w = x - edge * std::floor(x / edge);
  // floor can round x/edge so that w == edge for tiny negative x
  if (w >= edge) w -= edge;
  if (w < 0.0) w = 0.0;
  return w;
}

Vec wrap_point(const Vec& p, const Cell& cell) {
  Vec out = p;
  for (int a = 0; a < cell.dim; ++a) out[a] = wrap_coordinate(p[a], cell.edge);
  return out;
}

Vec min_image_delta(const Vec& a, const Vec& b, const Cell& cell) {
  Vec d = b - a;
  if (cell.periodic) {
    for (int k = 0; k < cell.dim; ++k) d[k] -= cell.edge * std::nearbyint(d[k] / cell.edge);
  }
  for (int k = cell.dim; k < 3; ++k) d[k] = 0.0;
  return d;
}

double periodic_distance(const Vec& a, const Vec& b, const Cell& cell) {
  return norm(min_image_delta(a, b, cell));
}

double periodic_distance(std::span<const double> a, std::span<const double> b, const Cell& cell) {
  if (a.size() != static_cast<std::size_t>(cell.dim) || b.size() != static_cast<std::size_t>(cell.dim))
    throw std::invalid_argument("point dimension does not match the cell");
  Vec va{}, vb{};
  std::copy(a.begin(), a.end(), va.begin());
  std::copy(b.begin(), b.end(), vb.begin());
  return periodic_distance(va, vb, cell);
}

SegmentContact segment_contact(const Vec& p, const Vec& u, double hp, const Vec& q, const Vec& v,
                               double hq) {
  // Minimize |p + s u - q - t v| over the box [-hp,hp] x [-hq,hq].
  const Vec r = p - q;
  const double b = dot(u, v);
  const double c = dot(u, r);
  const double f = dot(v, r);
  const double denom = 1.0 - b * b;

  auto clamp = [](double x, double lo, double hi) { return std::min(std::max(x, lo), hi); };

  double s = 0.0;
  if (denom > 1e-14) s = clamp((b * f - c) / denom, -hp, hp);
  double t = b * s + f;
  if (t < -hq) {
    t = -hq;
    s = clamp(-c + b * t, -hp, hp);
  } else if (t > hq) {
    t = hq;
    s = clamp(-c + b * t, -hp, hp);
  }
  if (denom <= 1e-14) {
    // Parallel axes: any point of the overlap interval is a closest pair; use
    // its midpoint so the contact is symmetric under exchange.
    // projection of q + t v onto p's axis covers [-c - hq, -c + hq]
    const double lo = std::max(-hp, -c - hq);
    const double hi = std::min(hp, -c + hq);
    if (lo <= hi) {
      s = 0.5 * (lo + hi);
      t = clamp(b * s + f, -hq, hq);
    }
  }
  const Vec diff = r + s * u - t * v;
  SegmentContact out;
  out.s = s;
  out.t = t;
  out.distance = norm(diff);
  if (out.distance > 0.0) {
    out.direction = (1.0 / out.distance) * diff;
  } else {
    // pick any direction perpendicular to u
    Vec trial = std::abs(u[0]) < 0.9 ? Vec{1, 0, 0} : Vec{0, 1, 0};
    Vec perp = trial - dot(trial, u) * u;
    out.direction = (1.0 / norm(perp)) * perp;
  }
  return out;
}

SegmentContact periodic_segment_contact(const Vec& p, const Vec& u, double hp, const Vec& q,
                                        const Vec& v, double hq, const Cell& cell) {
  const Vec base = p + min_image_delta(p, q, cell);  // q's image nearest to p
  if (!cell.periodic) return segment_contact(p, u, hp, q, v, hq);
  SegmentContact best = segment_contact(p, u, hp, base, v, hq);
  const double reach = hp + hq;
  const int zr = cell.dim == 3 ? 1 : 0;
  for (int kz = -zr; kz <= zr; ++kz)
    for (int ky = -1; ky <= 1; ++ky)
      for (int kx = -1; kx <= 1; ++kx) {
        if (kx == 0 && ky == 0 && kz == 0) continue;
        const Vec image = base + Vec{kx * cell.edge, ky * cell.edge, kz * cell.edge};
        // segment distance >= centre distance - hp - hq
        const double lower = norm(image - p) - reach;
        if (lower >= best.distance) continue;
        SegmentContact c = segment_contact(p, u, hp, image, v, hq);
        if (c.distance < best.distance) best = c;
      }
  return best;
}

double pair_gap(const Particle& p, const Particle& q, const Cell& cell) {
  if (p.kind != q.kind) throw std::invalid_argument("pair_gap requires particles of the same shape");
  if (p.kind != ShapeKind::Spherocylinder) return periodic_distance(p.center, q.center, cell);
  return periodic_segment_contact(p.center, p.axis, 0.5 * p.length, q.center, q.axis, 0.5 * q.length,
                                  cell)
      .distance;
}

double overlap_indicator(const Particle& p, const Particle& q, const Cell& cell,
                         double effective_radius) {
  if (effective_radius < std::max(p.radius, q.radius))
    throw std::invalid_argument("effective radius smaller than the particle radius");
  return std::max(0.0, 2.0 * effective_radius - pair_gap(p, q, cell));
}

NeighborIndex::NeighborIndex(const Cell& cell, std::span<const Vec> centers, double range)
    : cell_(cell), centers_(centers.begin(), centers.end()), range_(range) {
  if (!(range > 0.0)) throw std::invalid_argument("neighbor range must be positive");
  // range > L/2 falls back to all pairs
  bins_per_axis_ = range > 0.5 * cell.edge ? 0 : static_cast<int>(std::floor(cell.edge / range));
  if (bins_per_axis_ > 512) bins_per_axis_ = 512;
  if (brute_force()) return;
  bin_edge_ = cell.edge / bins_per_axis_;

  std::size_t nbins = 1;
  for (int a = 0; a < cell.dim; ++a) nbins *= static_cast<std::size_t>(bins_per_axis_);
  bin_start_.assign(nbins + 1, 0);
  std::vector<std::size_t> owner(centers_.size());
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    owner[i] = bin_of(centers_[i]);
    ++bin_start_[owner[i] + 1];
  }
  for (std::size_t b = 0; b < nbins; ++b) bin_start_[b + 1] += bin_start_[b];
  bin_items_.resize(centers_.size());
  std::vector<std::size_t> fill(bin_start_.begin(), bin_start_.end() - 1);
  for (std::size_t i = 0; i < centers_.size(); ++i) bin_items_[fill[owner[i]]++] = i;
}

void NeighborIndex::home_bins(const Vec& x, int* out) const {
  const int m = bins_per_axis_;
  for (int a = 0; a < cell_.dim; ++a) {
    double coord = cell_.periodic ? wrap_coordinate(x[a], cell_.edge) : x[a];
    int b = static_cast<int>(std::floor(coord / bin_edge_));
    out[a] = std::clamp(b, 0, m - 1);
  }
}

std::size_t NeighborIndex::bin_of(const Vec& x) const {
  int h[3] = {0, 0, 0};
  home_bins(x, h);
  const auto m = static_cast<std::size_t>(bins_per_axis_);
  return static_cast<std::size_t>(h[0]) +
         m * (static_cast<std::size_t>(h[1]) + m * static_cast<std::size_t>(h[2]));
}

std::vector<std::size_t> NeighborIndex::neighbors(std::size_t i) const {
  std::vector<std::size_t> out;
  visit_candidates(centers_.at(i), [&](std::size_t j) {
    if (j != i && periodic_distance(centers_[i], centers_[j], cell_) <= range_) out.push_back(j);
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> NeighborIndex::neighbors_of_point(const Vec& x) const {
  std::vector<std::size_t> out;
  visit_candidates(x, [&](std::size_t j) {
    if (periodic_distance(x, centers_[j], cell_) <= range_) out.push_back(j);
  });
  std::sort(out.begin(), out.end());
  return out;
}

double analytic_volume_fraction(const Configuration& config) {
  if (!config.non_overlapping)
    throw std::invalid_argument("analytic volume fraction requires a non-overlapping configuration");
  if (!config.cell.periodic)
    throw std::invalid_argument("analytic volume fraction is undefined for cut-out cells; rasterize instead");
  if (config.centers.empty()) return 0.0;
  return static_cast<double>(config.size()) * config.species.particle_volume() / config.cell.volume();
}

}  // namespace rvelab
