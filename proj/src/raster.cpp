#include "rvelab/raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace rvelab {

namespace {

constexpr const char* kPhaseEncoding = "uint8: 0 = matrix, 1 = inclusion";

/// Voxel index range [lo, hi] whose centres may fall within [a, b].
void voxel_range(double a, double b, double h, int& lo, int& hi) {
  lo = static_cast<int>(std::floor(a / h - 0.5)) - 1;
  hi = static_cast<int>(std::ceil(b / h - 0.5)) + 1;
}

}  // namespace

VoxelGrid::VoxelGrid(int dim_, int n_, double edge_) : dim(dim_), n(n_), edge(edge_) {
  validate();
  std::size_t count = 1;
  for (int a = 0; a < dim; ++a) count *= static_cast<std::size_t>(n);
  phase.assign(count, 0);
}

void VoxelGrid::validate() const {
  if (dim != 2 && dim != 3) throw std::invalid_argument("grid dimension must be 2 or 3");
  if (n < 1) throw std::invalid_argument("grid resolution must be at least 1");
  if (!(edge > 0.0)) throw std::invalid_argument("grid edge must be positive");
  if (!phase.empty()) {
    std::size_t count = 1;
    for (int a = 0; a < dim; ++a) count *= static_cast<std::size_t>(n);
    if (phase.size() != count) throw std::invalid_argument("grid phase array has the wrong size");
  }
}

VoxelGrid voxelize(const Configuration& config, int n) {
  VoxelGrid grid(config.cell.dim, n, config.cell.edge);
  const int d = config.cell.dim;
  const double h = grid.spacing();
  const double r = config.species.radius;
  const double r2 = r * r;
  const bool fibers = config.species.kind == ShapeKind::Spherocylinder;
  const bool caps = config.species.caps_included;
  const double half = 0.5 * config.species.length;
  const bool periodic = config.cell.periodic;

  for (std::size_t p = 0; p < config.size(); ++p) {
    const Vec& c = config.centers[p];
    const Vec axis = fibers ? config.axes[p] : Vec{1.0, 0.0, 0.0};
    int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    for (int a = 0; a < d; ++a) {
      const double ext = fibers ? half * std::abs(axis[a]) + r : r;
      voxel_range(c[a] - ext, c[a] + ext, h, lo[a], hi[a]);
      if (!periodic) {
        lo[a] = std::max(lo[a], 0);
        hi[a] = std::min(hi[a], n - 1);
      }
    }
    auto inside = [&](const Vec& x) {
      const Vec rel = x - c;
      if (!fibers) return dot(rel, rel) <= r2;
      const double t = dot(rel, axis);
      if (!caps && std::abs(t) > half) return false;
      const double s = std::clamp(t, -half, half);
      const Vec perp = rel - s * axis;
      return dot(perp, perp) <= r2;
    };
    auto wrap = [n](int i) { return ((i % n) + n) % n; };
    const int klo = d == 3 ? lo[2] : 0, khi = d == 3 ? hi[2] : 0;
    for (int k = klo; k <= khi; ++k)
      for (int j = lo[1]; j <= hi[1]; ++j)
        for (int i = lo[0]; i <= hi[0]; ++i) {
          const Vec x{(i + 0.5) * h, (j + 0.5) * h, d == 3 ? (k + 0.5) * h : 0.0};
          if (!inside(x)) continue;
          grid.phase[grid.index(wrap(i), wrap(j), d == 3 ? wrap(k) : 0)] = 1;
        }
  }
  return grid;
}

double measured_volume_fraction(const VoxelGrid& grid) {
  if (grid.phase.empty()) return 0.0;
  std::size_t ones = 0;
  for (auto v : grid.phase) ones += v;
  return static_cast<double>(ones) / static_cast<double>(grid.phase.size());
}

void write_grid(const VoxelGrid& grid, const std::filesystem::path& raw_path) {
  grid.validate();
  {
    std::ofstream raw(raw_path, std::ios::binary);
    if (!raw) throw std::runtime_error("cannot open " + raw_path.string() + " for writing");
    raw.write(reinterpret_cast<const char*>(grid.phase.data()), static_cast<std::streamsize>(grid.phase.size()));
    if (!raw) throw std::runtime_error("failed writing " + raw_path.string());
  }
  nlohmann::json side;
  side["dim"] = grid.dim;
  side["n"] = grid.n;
  side["L"] = grid.edge;
  side["phase_encoding"] = kPhaseEncoding;
  std::ofstream js(raw_path.string() + ".json");
  if (!js) throw std::runtime_error("cannot open sidecar for " + raw_path.string());
  js << side.dump(2) << "\n";
}

VoxelGrid read_grid(const std::filesystem::path& path) {
  std::filesystem::path raw_path = path;
  if (raw_path.extension() == ".json") raw_path.replace_extension();
  const std::filesystem::path side_path = raw_path.string() + ".json";
  std::ifstream js(side_path);
  if (!js) throw std::runtime_error("missing grid sidecar " + side_path.string());
  nlohmann::json side;
  try {
    js >> side;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed grid sidecar: " + std::string(e.what()));
  }
  for (const char* key : {"dim", "n", "L", "phase_encoding"})
    if (!side.contains(key)) throw std::runtime_error(std::string("grid sidecar lacks '") + key + "'");
  if (side["phase_encoding"].get<std::string>() != kPhaseEncoding)
    throw std::runtime_error("unsupported phase encoding '" + side["phase_encoding"].get<std::string>() + "'");
  VoxelGrid grid(side["dim"].get<int>(), side["n"].get<int>(), side["L"].get<double>());
  std::ifstream raw(raw_path, std::ios::binary | std::ios::ate);
  if (!raw) throw std::runtime_error("cannot open " + raw_path.string());
  const auto bytes = static_cast<std::size_t>(raw.tellg());
  if (bytes != grid.size())
    throw std::runtime_error("grid file has " + std::to_string(bytes) + " bytes, sidecar implies " + std::to_string(grid.size()));
  raw.seekg(0);
  raw.read(reinterpret_cast<char*>(grid.phase.data()), static_cast<std::streamsize>(bytes));
  for (auto v : grid.phase)
    if (v > 1) throw std::runtime_error("grid contains phase values other than 0 and 1");
  return grid;
}

}  // namespace rvelab
