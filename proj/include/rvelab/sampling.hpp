#pragma once

// Ensemble protocols: periodized cells packed directly on the torus,
// snapshots cut out of a larger periodic parent, and periodized cells with a
// Poisson-distributed particle count.

#include <cstdint>
#include <string>
#include <vector>

#include "rvelab/geometry.hpp"
#include "rvelab/packing.hpp"

namespace rvelab {

enum class Protocol { Periodized, Snapshot, PeriodizedPoisson };

std::string to_string(Protocol protocol);
Protocol protocol_from_string(const std::string& name);

/// Recipe for one family of realizations.
///
/// Disks and spheres use the reference length L0 = 1: a cell of size K has
/// edge K and holds K^d particles on average. Fibers use the fiber length
/// l = 1 as unit: size is L/l, the diameter is 1/aspect_ratio and the caps
/// are not counted as inclusion.
struct ProtocolSpec {
  Protocol protocol = Protocol::Periodized;
  ShapeKind shape = ShapeKind::Sphere;
  double size = 2.0;
  double phi = 0.3;
  double isolation = 1.2;
  double magnification = 0.0;  // snapshot parent / cell edge ratio; 0 = 2 (disks, spheres) or 1.5 (fibers)
  double aspect_ratio = 20.0;  // fibers only
  int poisson_retries = 20;
  PackingParams packing;       // schedule and descent knobs; target, isolation and seed are overwritten

  void validate() const;
  int dim() const { return shape == ShapeKind::Disk ? 2 : 3; }
  double cell_edge() const { return size; }
  double effective_magnification() const;
  /// Particle count of a periodized draw of edge `edge` (disks and spheres).
  std::size_t nominal_count(double edge) const;
  /// Fiber species for this spec.
  Species fiber_species() const;
};

struct DrawResult {
  Configuration config;
  PackingReport report;
  bool success = false;
  std::string failure_reason;
  int attempts = 1;
  std::vector<std::string> retry_log;  // one line per rejected Poisson draw
};

DrawResult draw_periodized(const ProtocolSpec& spec, std::uint64_t seed);
DrawResult draw_snapshot(const ProtocolSpec& spec, std::uint64_t seed);
DrawResult draw_poisson_periodized(const ProtocolSpec& spec, std::uint64_t seed);
/// Dispatches on spec.protocol.
DrawResult draw(const ProtocolSpec& spec, std::uint64_t seed);

/// Restricts a periodic parent to [0, edge)^d. Every periodic image whose
/// particle touches the subcell is kept with its uncut geometry; the result
/// lives on a non-periodic cell of the given edge.
Configuration cut_subcell(const Configuration& parent, double edge);

}  // namespace rvelab
