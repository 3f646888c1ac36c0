// Python bindings for the rvelab core.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rvelab/expansion.hpp"
#include "rvelab/io.hpp"
#include "rvelab/packing.hpp"
#include "rvelab/raster.hpp"
#include "rvelab/rng.hpp"
#include "rvelab/sampling.hpp"
#include "rvelab/solver.hpp"
#include "rvelab/stats.hpp"
#include "rvelab/study.hpp"

namespace py = pybind11;
using namespace rvelab;

namespace {

py::array_t<double> points_to_array(const std::vector<Vec>& pts, int dim) {
  py::array_t<double> out({static_cast<py::ssize_t>(pts.size()), static_cast<py::ssize_t>(dim)});
  auto a = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int k = 0; k < dim; ++k) a(i, k) = pts[i][k];
  return out;
}

std::vector<Vec> array_to_points(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr, int dim) {
  if (arr.ndim() != 2 || arr.shape(1) != dim) throw std::invalid_argument("expected an (N, dim) array");
  auto a = arr.unchecked<2>();
  std::vector<Vec> out(static_cast<std::size_t>(arr.shape(0)), Vec{});
  for (py::ssize_t i = 0; i < arr.shape(0); ++i)
    for (int k = 0; k < dim; ++k) out[i][k] = a(i, k);
  return out;
}

py::array_t<std::uint8_t> grid_phase(const VoxelGrid& g) {
  std::vector<py::ssize_t> shape(static_cast<std::size_t>(g.dim), g.n);
  py::array_t<std::uint8_t> out(shape);
  std::copy(g.phase.begin(), g.phase.end(), out.mutable_data());
  return out;  // index order [k][j][i] in 3D, [j][i] in 2D (x fastest)
}

ProtocolSpec make_spec(const std::string& protocol, const std::string& shape, double size, double phi, double isolation,
                       double magnification, double aspect_ratio) {
  ProtocolSpec s;
  s.protocol = protocol_from_string(protocol);
  s.shape = shape_from_string(shape);
  s.size = size;
  s.phi = phi;
  s.isolation = isolation;
  s.magnification = magnification;
  s.aspect_ratio = aspect_ratio;
  s.validate();
  return s;
}

}  // namespace

PYBIND11_MODULE(_rvelab, m) {
  m.doc() = "Random microstructures, FFT-based apparent conductivities and sampling statistics";
  m.attr("__version__") = RVELAB_VERSION;

  py::class_<Cell>(m, "Cell")
      .def(py::init([](int dim, double edge, bool periodic) { return Cell{dim, edge, periodic}; }), py::arg("dim"),
           py::arg("edge"), py::arg("periodic") = true)
      .def_readwrite("dim", &Cell::dim)
      .def_readwrite("edge", &Cell::edge)
      .def_readwrite("periodic", &Cell::periodic)
      .def("volume", &Cell::volume);

  py::class_<Configuration>(m, "Configuration")
      .def(py::init([](const Cell& cell, const std::string& shape, double radius, py::array_t<double> centers,
                       double length) {
             Configuration c;
             c.cell = cell;
             c.species.kind = shape_from_string(shape);
             c.species.radius = radius;
             c.species.length = length;
             c.centers = array_to_points(centers, cell.dim);
             return c;
           }),
           py::arg("cell"), py::arg("shape"), py::arg("radius"), py::arg("centers"), py::arg("length") = 0.0)
      .def_readonly("cell", &Configuration::cell)
      .def_property_readonly("shape", [](const Configuration& c) { return to_string(c.species.kind); })
      .def_property_readonly("radius", [](const Configuration& c) { return c.species.radius; })
      .def_property_readonly("length", [](const Configuration& c) { return c.species.length; })
      .def_property_readonly("centers", [](const Configuration& c) { return points_to_array(c.centers, c.cell.dim); })
      .def_property_readonly("axes", [](const Configuration& c) { return points_to_array(c.axes, 3); })
      .def_readonly("non_overlapping", &Configuration::non_overlapping)
      .def("__len__", &Configuration::size)
      .def("to_json", [](const Configuration& c) { return configuration_to_json(c).dump(); })
      .def_static("from_json", [](const std::string& s) { return configuration_from_json(Json::parse(s)); })
      .def("save", &save_configuration)
      .def_static("load", &load_configuration);

  py::class_<PackingReport>(m, "PackingReport")
      .def_readonly("iterations", &PackingReport::iterations)
      .def_readonly("final_energy", &PackingReport::final_energy)
      .def_readonly("success", &PackingReport::success)
      .def_readonly("failure_reason", &PackingReport::failure_reason)
      .def_readonly("achieved_phi", &PackingReport::achieved_phi);

  py::class_<DrawResult>(m, "DrawResult")
      .def_readonly("config", &DrawResult::config)
      .def_readonly("report", &DrawResult::report)
      .def_readonly("success", &DrawResult::success)
      .def_readonly("failure_reason", &DrawResult::failure_reason)
      .def_readonly("attempts", &DrawResult::attempts)
      .def_readonly("retry_log", &DrawResult::retry_log);

  m.def(
      "draw",
      [](const std::string& protocol, const std::string& shape, double size, std::uint64_t seed, double phi,
         double isolation, double magnification, double aspect_ratio) {
        return draw(make_spec(protocol, shape, size, phi, isolation, magnification, aspect_ratio), seed);
      },
      py::arg("protocol"), py::arg("shape"), py::arg("size"), py::arg("seed"), py::arg("phi") = 0.3,
      py::arg("isolation") = 1.2, py::arg("magnification") = 0.0, py::arg("aspect_ratio") = 20.0,
      "Draw one realization under a sampling protocol (periodized, snapshot or poisson).");

  m.def(
      "mcm_pack",
      [](const Cell& cell, const std::string& shape, std::size_t count, double phi, double isolation,
         std::uint64_t seed) {
        PackingParams p;
        p.target_phi = phi;
        p.isolation_factor = isolation;
        p.seed = seed;
        return mcm_pack(cell, shape_from_string(shape), count, p);
      },
      py::arg("cell"), py::arg("shape"), py::arg("count"), py::arg("phi") = 0.3, py::arg("isolation") = 1.2,
      py::arg("seed") = 0);
  m.def("overlap_energy", &overlap_energy, py::arg("config"), py::arg("effective_radius"));
  m.def(
      "overlap_gradient",
      [](const Configuration& c, double r) { return points_to_array(overlap_gradient(c, r), c.cell.dim); },
      py::arg("config"), py::arg("effective_radius"));

  py::class_<VoxelGrid>(m, "VoxelGrid")
      .def_readonly("dim", &VoxelGrid::dim)
      .def_readonly("n", &VoxelGrid::n)
      .def_readonly("edge", &VoxelGrid::edge)
      .def_property_readonly("phase", &grid_phase)
      .def_static("from_phase",
                  [](py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> phase, double edge) {
                    const int dim = static_cast<int>(phase.ndim());
                    if (dim != 2 && dim != 3) throw std::invalid_argument("phase must be 2D or 3D");
                    const auto n = phase.shape(0);
                    for (int k = 1; k < dim; ++k)
                      if (phase.shape(k) != n) throw std::invalid_argument("phase must be a cube");
                    VoxelGrid g(dim, static_cast<int>(n), edge);
                    std::copy(phase.data(), phase.data() + g.size(), g.phase.begin());
                    g.validate();
                    return g;
                  },
                  py::arg("phase"), py::arg("edge") = 1.0)
      .def("save", &write_grid)
      .def_static("load", &read_grid);

  m.def("voxelize", &voxelize, py::arg("config"), py::arg("n"));
  m.def("measured_volume_fraction", &measured_volume_fraction, py::arg("grid"));

  py::class_<MaterialPair>(m, "MaterialPair")
      .def(py::init([](double a1, double a2) { return MaterialPair{a1, a2}; }), py::arg("alpha_inclusion") = 1.2,
           py::arg("alpha_matrix") = 0.2)
      .def_readwrite("alpha_inclusion", &MaterialPair::alpha_inclusion)
      .def_readwrite("alpha_matrix", &MaterialPair::alpha_matrix)
      .def_property_readonly("rho", &MaterialPair::rho)
      .def_property_readonly("reference", &MaterialPair::reference);

  py::class_<SolverSettings>(m, "SolverSettings")
      .def(py::init<>())
      .def_readwrite("reference_alpha", &SolverSettings::reference_alpha)
      .def_readwrite("tolerance", &SolverSettings::tolerance)
      .def_readwrite("max_iters", &SolverSettings::max_iters)
      .def_property(
          "metric", [](const SolverSettings& s) { return to_string(s.metric); },
          [](SolverSettings& s, const std::string& v) { s.metric = metric_from_string(v); });

  py::class_<ApparentResult>(m, "ApparentResult")
      .def_readonly("dim", &ApparentResult::dim)
      .def_property_readonly("tensor",
                             [](const ApparentResult& r) {
                               py::array_t<double> t({r.dim, r.dim});
                               std::copy(r.tensor.begin(), r.tensor.end(), t.mutable_data());
                               return t;
                             })
      .def_readonly("a_bar", &ApparentResult::a_bar)
      .def_readonly("iterations", &ApparentResult::iterations)
      .def_readonly("residual", &ApparentResult::residual)
      .def_readonly("converged", &ApparentResult::converged)
      .def_readonly("phi_measured", &ApparentResult::phi_measured)
      .def_readonly("seconds", &ApparentResult::seconds);

  m.def("apparent_tensor", &apparent_tensor, py::arg("grid"), py::arg("materials") = MaterialPair{},
        py::arg("settings") = SolverSettings{}, py::arg("columns") = 0);
  m.def("voigt_reuss_bounds", &voigt_reuss_bounds, py::arg("materials"), py::arg("phi"));

  py::class_<StudySummary>(m, "StudySummary")
      .def_readonly("n", &StudySummary::n)
      .def_readonly("mean", &StudySummary::mean)
      .def_readonly("std", &StudySummary::std)
      .def_readonly("ci99", &StudySummary::ci_halfwidth)
      .def_readonly("std_defined", &StudySummary::std_defined);
  py::class_<ErrorDecomposition>(m, "ErrorDecomposition")
      .def_readonly("relative_systematic", &ErrorDecomposition::relative_systematic)
      .def_readonly("relative_random", &ErrorDecomposition::relative_random);
  py::class_<ScalingFit>(m, "ScalingFit")
      .def_readonly("slope", &ScalingFit::slope)
      .def_readonly("intercept", &ScalingFit::intercept)
      .def_readonly("r2", &ScalingFit::r2);
  py::class_<CorrelationCurve>(m, "CorrelationCurve")
      .def_readonly("distance", &CorrelationCurve::distance)
      .def_readonly("h", &CorrelationCurve::h)
      .def_readonly("count", &CorrelationCurve::count)
      .def_readonly("phi", &CorrelationCurve::phi);
  py::class_<VfVariancePoint>(m, "VfVariancePoint")
      .def_readonly("size", &VfVariancePoint::size)
      .def_readonly("realizations", &VfVariancePoint::realizations)
      .def_readonly("failures", &VfVariancePoint::failures)
      .def_readonly("mean_phi", &VfVariancePoint::mean_phi)
      .def_readonly("normalized_std", &VfVariancePoint::normalized_std);

  m.def("summarize", [](const std::vector<double>& v) { return summarize(v); }, py::arg("values"));
  m.def("student_t_quantile", &student_t_quantile, py::arg("p"), py::arg("dof"));
  m.def("error_decomposition", [](const std::vector<double>& v, double ref) { return error_decomposition(v, ref); },
        py::arg("values"), py::arg("reference"));
  m.def("success_probability",
        [](const std::vector<double>& v, double ref, double tol) { return success_probability(v, ref, tol); },
        py::arg("values"), py::arg("reference"), py::arg("rel_tol"));
  m.def("scaling_fit",
        [](const std::vector<double>& sizes, const std::vector<double>& values) {
          if (sizes.size() != values.size()) throw std::invalid_argument("sizes and values differ in length");
          std::vector<std::pair<double, double>> pts;
          for (std::size_t i = 0; i < sizes.size(); ++i) pts.emplace_back(sizes[i], values[i]);
          return scaling_fit(pts);
        },
        py::arg("sizes"), py::arg("values"));
  m.def("empirical_autocorrelation", &empirical_autocorrelation, py::arg("grid"), py::arg("length_unit"));
  m.def("normalized_vf_std", [](const std::vector<double>& v, double phi) { return normalized_vf_std(v, phi); },
        py::arg("measured"), py::arg("phi"));
  m.def(
      "vf_variance_curve",
      [](const std::string& protocol, const std::string& shape, const std::vector<double>& sizes,
         std::size_t realizations, double phi, int voxels_per_size, std::uint64_t seed, int workers) {
        const ProtocolSpec spec = make_spec(protocol, shape, sizes.empty() ? 2.0 : sizes.front(), phi, 1.2, 0.0, 20.0);
        py::gil_scoped_release release;
        return vf_variance_curve(spec, sizes, realizations, voxels_per_size, seed, workers);
      },
      py::arg("protocol"), py::arg("shape"), py::arg("sizes"), py::arg("realizations"), py::arg("phi") = 0.3,
      py::arg("voxels_per_size") = 16, py::arg("seed") = 0, py::arg("workers") = 0);

  py::class_<ExpansionRow>(m, "ExpansionRow")
      .def_readonly("rho", &ExpansionRow::rho)
      .def_readonly("alpha_inclusion", &ExpansionRow::alpha_inclusion)
      .def_readonly("alpha_matrix", &ExpansionRow::alpha_matrix)
      .def_readonly("a_solver", &ExpansionRow::a_solver)
      .def_readonly("a_first_order", &ExpansionRow::a_first_order)
      .def_readonly("deviation", &ExpansionRow::deviation)
      .def_readonly("iterations", &ExpansionRow::iterations);
  m.def("materials_from_contrast", &materials_from_contrast, py::arg("alpha0"), py::arg("rho"));
  m.def("first_order_apparent", &first_order_apparent, py::arg("materials"), py::arg("phi"));
  m.def("random_error_first_order", &random_error_first_order, py::arg("materials"), py::arg("vf_std"));
  m.def("halving_sequence", &halving_sequence, py::arg("rho0"), py::arg("count"));
  m.def("verify_expansion_order", &verify_expansion_order, py::arg("grid"), py::arg("alpha0"), py::arg("rhos"),
        py::arg("settings") = SolverSettings{});

  m.def("derive_seed", [](std::uint64_t master, const std::string& protocol, double size,
                          std::uint64_t index) { return derive_seed(master, protocol, size, index); },
        py::arg("master"), py::arg("protocol"), py::arg("size"), py::arg("index"));
  m.def(
      "run_study",
      [](const std::string& config_json) {
        const StudyConfig cfg = study_config_from_json(Json::parse(config_json));
        StudyResult r;
        {
          py::gil_scoped_release release;
          r = run_study(cfg);
        }
        py::dict out;
        out["records"] = r.records;
        out["failures"] = r.failures;
        out["exit_code"] = study_exit_code(r);
        return out;
      },
      py::arg("config_json"), "Run a study from its JSON description; files land in its output_dir.");
  m.def(
      "summarize_study_directory",
      [](const std::filesystem::path& dir) {
        const StudyResult r = summarize_study_directory(dir);
        py::dict out;
        out["records"] = r.records;
        out["failures"] = r.failures;
        out["exit_code"] = study_exit_code(r);
        return out;
      },
      py::arg("dir"));
}
