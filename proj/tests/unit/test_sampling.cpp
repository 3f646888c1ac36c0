#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "rvelab/raster.hpp"
#include "rvelab/sampling.hpp"
#include "rvelab/stats.hpp"

using namespace rvelab;
using namespace rvelab::test;

namespace {

ProtocolSpec spec_for(Protocol protocol, ShapeKind shape, double size) {
  ProtocolSpec s;
  s.protocol = protocol;
  s.shape = shape;
  s.size = size;
  s.phi = shape == ShapeKind::Spherocylinder ? 0.15 : 0.3;
  return s;
}

bool contains_lattice_image(const Configuration& parent, const Vec& x) {
  const double P = parent.cell.edge;
  for (const auto& c : parent.centers) {
    bool match = true;
    for (int a = 0; a < parent.cell.dim; ++a) {
      const double shift = (x[a] - c[a]) / P;
      if (std::abs(shift - std::round(shift)) > 1e-12) match = false;
    }
    if (match) return true;
  }
  return false;
}

}  // namespace

TEST_SUITE("sampling") {

TEST_CASE("protocol names round-trip") {
  for (auto p : {Protocol::Periodized, Protocol::Snapshot, Protocol::PeriodizedPoisson})
    CHECK(protocol_from_string(to_string(p)) == p);
  CHECK(to_string(Protocol::Periodized) == "periodized");
  CHECK(to_string(Protocol::Snapshot) == "snapshot");
  CHECK_THROWS(protocol_from_string("mirror"));
}

TEST_CASE("periodized draws have exactly K^d particles at the target fraction") {
  auto spheres = draw_periodized(spec_for(Protocol::Periodized, ShapeKind::Sphere, 2.0), 1);
  REQUIRE(spheres.success);
  CHECK(spheres.config.size() == 8);
  CHECK(spheres.config.cell.periodic);
  CHECK(analytic_volume_fraction(spheres.config) == doctest::Approx(0.3).epsilon(1e-12));

  auto disks = draw_periodized(spec_for(Protocol::Periodized, ShapeKind::Disk, 2.0), 1);
  REQUIRE(disks.success);
  CHECK(disks.config.size() == 4);

  auto fibers = draw_periodized(spec_for(Protocol::Periodized, ShapeKind::Spherocylinder, 1.0), 1);
  REQUIRE(fibers.success);
  CHECK(fibers.config.size() == 77);
  CHECK(fibers.config.species.radius == doctest::Approx(0.025));
  CHECK_FALSE(fibers.config.species.caps_included);
}

TEST_CASE("snapshots are cut from a magnified periodic parent") {
  const auto spec = spec_for(Protocol::Snapshot, ShapeKind::Sphere, 2.0);
  auto snap = draw_snapshot(spec, 77);
  REQUIRE(snap.success);
  CHECK_FALSE(snap.config.cell.periodic);
  CHECK(snap.config.cell.edge == 2.0);

  auto parent_spec = spec_for(Protocol::Periodized, ShapeKind::Sphere, 4.0);
  auto parent = draw_periodized(parent_spec, 77);
  REQUIRE(parent.success);
  CHECK(parent.config.size() == 64);
  CHECK(snap.config.centers == cut_subcell(parent.config, 2.0).centers);
  for (const auto& c : snap.config.centers) CHECK(contains_lattice_image(parent.config, c));

  // Every parent image touching the subcell is kept, and nothing else.
  const double r = parent.config.species.radius;
  std::size_t touching = 0;
  for (const auto& c : parent.config.centers)
    for (int x = -1; x <= 1; ++x)
      for (int y = -1; y <= 1; ++y)
        for (int z = -1; z <= 1; ++z) {
          const Vec im = c + Vec{4.0 * x, 4.0 * y, 4.0 * z};
          double d2 = 0.0;
          for (int a = 0; a < 3; ++a) {
            const double e = std::max({0.0, -im[a], im[a] - 2.0});
            d2 += e * e;
          }
          if (d2 <= r * r) ++touching;
        }
  CHECK(snap.config.size() == touching);
}

TEST_CASE("disk and fiber snapshots") {
  auto disks = draw_snapshot(spec_for(Protocol::Snapshot, ShapeKind::Disk, 2.0), 3);
  REQUIRE(disks.success);
  CHECK(disks.config.cell.dim == 2);
  CHECK(disks.report.achieved_phi == doctest::Approx(0.3).epsilon(1e-12));

  const auto fspec = spec_for(Protocol::Snapshot, ShapeKind::Spherocylinder, 1.0);
  CHECK(fspec.effective_magnification() == 1.5);
  auto fibers = draw_snapshot(fspec, 3);
  REQUIRE(fibers.success);
  CHECK(fibers.config.cell.edge == 1.0);
  CHECK(fibers.config.axes.size() == fibers.config.centers.size());
  CHECK(fibers.config.size() > 0);
  // Kept fibers touch the unit box: some sample point of the axis lies within r of it.
  const double r = fibers.config.species.radius;
  for (std::size_t i = 0; i < fibers.config.size(); ++i) {
    double best = 1e300;
    for (int s = 0; s <= 2000; ++s) {
      const Vec x = fibers.config.centers[i] + (-0.5 + s / 2000.0) * fibers.config.axes[i];
      double d2 = 0.0;
      for (int a = 0; a < 3; ++a) {
        const double e = std::max({0.0, -x[a], x[a] - 1.0});
        d2 += e * e;
      }
      best = std::min(best, std::sqrt(d2));
    }
    CHECK(best <= r + 1e-3);
  }
}

TEST_CASE("snapshot volume fraction is unbiased") {
  const auto spec = spec_for(Protocol::Snapshot, ShapeKind::Disk, 2.0);
  std::vector<double> phis;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    auto r = draw_snapshot(spec, derive_seed(5, "snapshot", 2.0, s));
    REQUIRE(r.success);
    phis.push_back(measured_volume_fraction(voxelize(r.config, 32)));
  }
  const auto sum = summarize(phis);
  CHECK(std::abs(sum.mean - 0.3) <= 3.0 * sum.std / std::sqrt(double(sum.n)));
}

TEST_CASE("Poisson periodized draws") {
  auto spec = spec_for(Protocol::PeriodizedPoisson, ShapeKind::Disk, 4.0);
  std::vector<double> counts, phis;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    auto r = draw_poisson_periodized(spec, derive_seed(9, "poisson", 4.0, s));
    REQUIRE(r.success);
    CHECK(r.retry_log.size() == static_cast<std::size_t>(r.attempts - 1));
    CHECK(analytic_volume_fraction(r.config) == doctest::Approx(0.3).epsilon(1e-12));
    counts.push_back(double(r.config.size()));
    phis.push_back(measured_volume_fraction(voxelize(r.config, 64)));
  }
  const auto c = summarize(counts);
  CHECK(std::abs(c.mean - 16.0) <= 3.0 * std::sqrt(16.0 / 1000.0));
  CHECK(c.std * c.std == doctest::Approx(16.0).epsilon(0.15));
  CHECK(std::abs(summarize(phis).mean / 0.3 - 1.0) <= 1e-3);

  // Spheres at K=2 are often infeasible; failures carry a retry log.
  auto tight = spec_for(Protocol::PeriodizedPoisson, ShapeKind::Sphere, 2.0);
  tight.poisson_retries = 3;
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto r = draw_poisson_periodized(tight, s);
    if (!r.success) {
      CHECK(r.retry_log.size() == 4);
      CHECK(r.attempts == 4);
    }
  }
}

TEST_CASE("draws are deterministic and dispatch on the protocol") {
  const auto spec = spec_for(Protocol::Snapshot, ShapeKind::Sphere, 2.0);
  auto a = draw(spec, 12), b = draw(spec, 12);
  CHECK(a.config.centers == b.config.centers);
  CHECK(draw(spec_for(Protocol::Periodized, ShapeKind::Disk, 2.0), 1).config.cell.periodic);
}

TEST_CASE("protocol spec validation") {
  auto s = spec_for(Protocol::Periodized, ShapeKind::Sphere, 2.0);
  CHECK_NOTHROW(s.validate());
  s.size = -1.0;
  CHECK_THROWS(s.validate());
  s = spec_for(Protocol::Periodized, ShapeKind::Spherocylinder, 0.5);
  CHECK_THROWS(s.validate());  // fibers longer than the cell
  s = spec_for(Protocol::Snapshot, ShapeKind::Sphere, 2.0);
  s.magnification = 0.5;
  CHECK_THROWS(s.validate());
}

}  // TEST_SUITE
