#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rvelab/geometry.hpp"
#include "rvelab/rng.hpp"

namespace rvelab::test {

inline Vec random_point(CounterRng& rng, int dim, double edge) {
  Vec p{};
  for (int k = 0; k < dim; ++k) p[k] = edge * rng.uniform();
  return p;
}

inline Vec random_unit(CounterRng& rng) {
  for (;;) {
    Vec v{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
    const double r = norm(v);
    if (r > 0.1 && r <= 1.0) return (1.0 / r) * v;
  }
}

inline Configuration random_configuration(ShapeKind kind, int count, double edge, double radius, std::uint64_t seed,
                                          double length = 0.0) {
  CounterRng rng(seed);
  Configuration c;
  c.cell = {kind == ShapeKind::Disk ? 2 : 3, edge, true};
  c.species.kind = kind;
  c.species.radius = radius;
  c.species.length = length;
  for (int i = 0; i < count; ++i) c.centers.push_back(random_point(rng, c.cell.dim, edge));
  if (kind == ShapeKind::Spherocylinder)
    for (int i = 0; i < count; ++i) c.axes.push_back(random_unit(rng));
  return c;
}

/// Fresh empty directory below the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("rvelab_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace rvelab::test
