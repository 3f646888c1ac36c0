#pragma once

// Periodic cells, particle shapes, distance kernels and cell-linked lists.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rvelab {

using Vec = std::array<double, 3>;  // unused trailing components are zero in 2D

enum class ShapeKind { Disk, Sphere, Spherocylinder };

std::string to_string(ShapeKind kind);
ShapeKind shape_from_string(const std::string& name);

struct Cell {
  int dim = 3;
  double edge = 1.0;
  bool periodic = true;

  void validate() const;
  double volume() const;
};

/// Shape parameters shared by every particle of a configuration.
struct Species {
  ShapeKind kind = ShapeKind::Sphere;
  double radius = 0.0;
  double length = 0.0;        // axis-segment length, spherocylinders only
  bool caps_included = false; // whether the hemispherical caps count as inclusion

  void validate() const;
  /// Volume (area in 2D) of one particle.
  double particle_volume() const;
};

struct Particle {
  ShapeKind kind = ShapeKind::Sphere;
  double radius = 0.0;
  double length = 0.0;
  Vec center{};
  Vec axis{1.0, 0.0, 0.0};
};

struct SpeciesMeta {
  double target_phi = 0.0;
  double isolation_factor = 1.0;
};

struct Configuration {
  Cell cell;
  Species species;
  std::vector<Vec> centers;
  std::vector<Vec> axes;  // empty unless species is a spherocylinder
  SpeciesMeta meta;
  bool non_overlapping = false;

  std::size_t size() const { return centers.size(); }
  Particle particle(std::size_t i) const;
  void validate() const;
};

// ---- vector helpers ------------------------------------------------------

inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Vec& a);

/// Wraps x into [0, edge).
double wrap_coordinate(double x, double edge);
Vec wrap_point(const Vec& p, const Cell& cell);

/// b - a with each coordinate reduced to [-L/2, L/2] for periodic cells.
Vec min_image_delta(const Vec& a, const Vec& b, const Cell& cell);

/// Distance between two points, minimized over periodic images when the cell is periodic.
double periodic_distance(std::span<const double> a, std::span<const double> b, const Cell& cell);
double periodic_distance(const Vec& a, const Vec& b, const Cell& cell);

/// Closest points between segments P(s) = p + s*u and Q(t) = q + t*v,
/// s in [-hp, hp], t in [-hq, hq]; u, v are unit vectors.
struct SegmentContact {
  double distance = 0.0;
  double s = 0.0;
  double t = 0.0;
  Vec direction{};  // unit vector from Q(t) to P(s); arbitrary but unit when distance == 0
};

SegmentContact segment_contact(const Vec& p, const Vec& u, double hp, const Vec& q, const Vec& v,
                               double hq);

/// Segment contact minimized over the 3^d periodic images of q's reference point.
SegmentContact periodic_segment_contact(const Vec& p, const Vec& u, double hp, const Vec& q,
                                        const Vec& v, double hq, const Cell& cell);

/// Centre distance for disks and spheres, axis-segment distance for spherocylinders.
double pair_gap(const Particle& p, const Particle& q, const Cell& cell);

/// Macaulay bracket <2 r_eff - gap>_+.
double overlap_indicator(const Particle& p, const Particle& q, const Cell& cell,
                         double effective_radius);

/// Cell-linked list over particle centres.
///
/// `neighbors(i)` returns every j != i whose (periodic) centre distance is at
/// most `range()`. When fewer than three bins fit along an axis the index
/// degenerates to an all-pairs scan.
class NeighborIndex {
 public:
  NeighborIndex(const Cell& cell, std::span<const Vec> centers, double range);

  double range() const { return range_; }
  bool brute_force() const { return bins_per_axis_ < 3; }
  int bins_per_axis() const { return bins_per_axis_; }

  std::vector<std::size_t> neighbors(std::size_t i) const;
  std::vector<std::size_t> neighbors_of_point(const Vec& x) const;

  /// Calls f(i, j) once for every pair i < j within range.
  template <typename F>
  void for_each_pair(F&& f) const {
    for (std::size_t i = 0; i < centers_.size(); ++i) {
      visit_candidates(centers_[i], [&](std::size_t j) {
        if (j > i && periodic_distance(centers_[i], centers_[j], cell_) <= range_) f(i, j);
      });
    }
  }

 private:
  template <typename F>
  void visit_candidates(const Vec& x, F&& f) const;
  void home_bins(const Vec& x, int* out) const;
  std::size_t bin_of(const Vec& x) const;

  Cell cell_;
  std::vector<Vec> centers_;
  double range_;
  int bins_per_axis_ = 0;
  double bin_edge_ = 0.0;
  std::vector<std::size_t> bin_start_;  // CSR offsets, size bins+1
  std::vector<std::size_t> bin_items_;
};

template <typename F>
void NeighborIndex::visit_candidates(const Vec& x, F&& f) const {
  if (brute_force()) {
    for (std::size_t j = 0; j < centers_.size(); ++j) f(j);
    return;
  }
  const int m = bins_per_axis_;
  const int d = cell_.dim;
  int home[3] = {0, 0, 0};
  home_bins(x, home);
  const int zr = d == 3 ? 1 : 0;
  for (int dz = -zr; dz <= zr; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        int idx[3] = {home[0] + dx, home[1] + dy, home[2] + dz};
        bool skip = false;
        for (int a = 0; a < d; ++a) {
          if (idx[a] < 0 || idx[a] >= m) {
            if (!cell_.periodic) skip = true;
            idx[a] = (idx[a] + m) % m;
          }
        }
        if (skip) continue;
        std::size_t flat = static_cast<std::size_t>(idx[0]) +
                           static_cast<std::size_t>(m) *
                               (static_cast<std::size_t>(idx[1]) +
                                static_cast<std::size_t>(m) * static_cast<std::size_t>(d == 3 ? idx[2] : 0));
        for (std::size_t k = bin_start_[flat]; k < bin_start_[flat + 1]; ++k) f(bin_items_[k]);
      }
}

/// Sum of particle volumes over the cell volume. Refuses configurations not
/// flagged non-overlapping and non-periodic (cut-out) cells.
double analytic_volume_fraction(const Configuration& config);

}  // namespace rvelab
