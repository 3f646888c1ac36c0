#pragma once

// Midpoint segmentation of configurations onto regular voxel grids.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "rvelab/geometry.hpp"

namespace rvelab {

/// n^d voxels of edge `edge / n`, stored x-fastest. phase is 1 inside an
/// inclusion, 0 in the matrix.
struct VoxelGrid {
  int dim = 3;
  int n = 1;
  double edge = 1.0;
  std::vector<std::uint8_t> phase;

  VoxelGrid() = default;
  VoxelGrid(int dim, int n, double edge);

  std::size_t size() const { return phase.size(); }
  double spacing() const { return edge / n; }
  std::size_t index(int i, int j, int k = 0) const {
    const auto m = static_cast<std::size_t>(n);
    return static_cast<std::size_t>(i) + m * (static_cast<std::size_t>(j) + m * static_cast<std::size_t>(k));
  }
  void validate() const;
};

/// A voxel is inclusion iff its centre lies inside (or on the surface of) a
/// particle. Periodic cells wrap particles around the boundary; non-periodic
/// cells clip them.
VoxelGrid voxelize(const Configuration& config, int n);

/// Mean of the phase indicator.
double measured_volume_fraction(const VoxelGrid& grid);

/// Writes `raw_path` (one byte per voxel) and the sidecar `raw_path + ".json"`.
void write_grid(const VoxelGrid& grid, const std::filesystem::path& raw_path);
/// Reads a grid written by write_grid; accepts either the raw or the sidecar path.
VoxelGrid read_grid(const std::filesystem::path& path);

}  // namespace rvelab
