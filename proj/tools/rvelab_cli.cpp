// rvelab command-line front end.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rvelab/expansion.hpp"
#include "rvelab/io.hpp"
#include "rvelab/packing.hpp"
#include "rvelab/raster.hpp"
#include "rvelab/sampling.hpp"
#include "rvelab/solver.hpp"
#include "rvelab/stats.hpp"
#include "rvelab/study.hpp"

using namespace rvelab;

namespace {

constexpr int kOk = 0;
constexpr int kFatal = 1;
constexpr int kPartial = 2;

void log_line(const std::string& s) { std::cerr << s << std::endl; }

void print_report(const PackingReport& r) {
  std::cerr << "success=" << (r.success ? "yes" : "no") << " energy=" << r.final_energy << " seconds=" << r.wall_seconds
            << " iterations=";
  for (std::size_t i = 0; i < r.iterations.size(); ++i) std::cerr << (i ? "," : "") << r.iterations[i];
  std::cerr << "\n";
  if (!r.success) std::cerr << "failure: " << r.failure_reason << "\n";
}

struct PackArgs {
  std::string shape = "sphere";
  std::string algorithm = "auto";
  double phi = 0.3;
  double isolation = 1.2;
  std::optional<std::size_t> count;
  std::optional<double> cell;
  double aspect = 20.0;
  std::uint64_t seed = 0;
  std::string out;
};

int run_pack(const PackArgs& a) {
  const ShapeKind kind = shape_from_string(a.shape);
  const int d = kind == ShapeKind::Disk ? 2 : 3;
  PackingParams params;
  params.target_phi = a.phi;
  params.isolation_factor = a.isolation;
  params.seed = a.seed;
  std::pair<Configuration, PackingReport> packed;
  if (kind == ShapeKind::Spherocylinder || a.algorithm == "rsa") {
    ProtocolSpec probe;
    probe.shape = kind;
    probe.aspect_ratio = a.aspect;
    const double edge = a.cell.value_or(1.0);
    Species species;
    if (kind == ShapeKind::Spherocylinder) {
      species = probe.fiber_species();
    } else {
      // same particle size as an MCM cell with one particle per unit volume
      species.kind = kind;
      species.radius = d == 2 ? std::sqrt(a.phi / std::numbers::pi) : std::cbrt(3.0 * a.phi / (4.0 * std::numbers::pi));
    }
    const Cell cell{d, edge, true};
    if (a.algorithm == "rsa") packed = rsa_pack(cell, species, params);
    else packed = sam_pack(cell, species, params);
  } else {
    double edge;
    std::size_t count;
    if (a.cell && a.count) {
      edge = *a.cell;
      count = *a.count;
    } else if (a.count) {
      count = *a.count;
      edge = std::pow(static_cast<double>(count), 1.0 / d);
    } else {
      edge = a.cell.value_or(2.0);
      count = static_cast<std::size_t>(std::llround(std::pow(edge, d)));
    }
    packed = mcm_pack(Cell{d, edge, true}, kind, count, params);
  }
  print_report(packed.second);
  if (!packed.second.success) return kFatal;
  save_configuration(packed.first, a.out);
  std::cerr << "wrote " << packed.first.size() << " particles to " << a.out << "\n";
  return kOk;
}

struct DrawArgs {
  std::string protocol = "periodized";
  std::string shape = "sphere";
  double K = 2.0;
  double phi = 0.3;
  double isolation = 1.2;
  double aspect = 20.0;
  std::uint64_t seed = 0;
  std::string out;
  std::string grid;
  int n = 0;
};

int run_draw(const DrawArgs& a) {
  ProtocolSpec spec;
  spec.protocol = protocol_from_string(a.protocol);
  spec.shape = shape_from_string(a.shape);
  spec.size = a.K;
  spec.phi = a.phi;
  spec.isolation = a.isolation;
  spec.aspect_ratio = a.aspect;
  DrawResult r = draw(spec, a.seed);
  print_report(r.report);
  for (const auto& line : r.retry_log) std::cerr << "rejected draw: " << line << "\n";
  if (!r.success) {
    std::cerr << "draw failed: " << r.failure_reason << "\n";
    return kFatal;
  }
  save_configuration(r.config, a.out);
  std::cerr << "wrote " << r.config.size() << " particles to " << a.out << "\n";
  if (!a.grid.empty()) {
    const int n = a.n > 0 ? a.n : static_cast<int>(std::lround(16.0 * a.K));
    VoxelGrid g = voxelize(r.config, n);
    write_grid(g, a.grid);
    std::cerr << "wrote " << n << "^" << g.dim << " grid to " << a.grid << " (phi=" << measured_volume_fraction(g) << ")\n";
  }
  return kOk;
}

struct SolveArgs {
  std::string grid;
  double alpha1 = 1.2;
  double alpha2 = 0.2;
  double tol = 1e-6;
  int max_iters = 1000;
  std::string metric = "update";
  std::string tensor = "full";
  std::string out;
};

int run_solve(const SolveArgs& a) {
  const VoxelGrid grid = read_grid(a.grid);
  SolverSettings s;
  s.tolerance = a.tol;
  s.max_iters = a.max_iters;
  s.metric = metric_from_string(a.metric);
  const ApparentResult res = apparent_tensor(grid, MaterialPair{a.alpha1, a.alpha2}, s, a.tensor == "a11" ? 1 : 0);
  const Json j = apparent_result_to_json(res);
  if (a.out.empty()) std::cout << j.dump(2) << "\n";
  else write_json_file(j, a.out);
  std::cerr << "a_bar=" << format_double(res.a_bar) << " iterations=" << res.iterations << " residual=" << res.residual
            << " seconds=" << res.seconds << "\n";
  return res.converged ? kOk : kPartial;
}

struct ExpansionArgs {
  std::string grid;
  double K = 2.0;
  std::uint64_t seed = 0;
  double alpha1 = 1.2;
  double alpha2 = 0.2;
  int halvings = 3;
  double rho0 = 0.0;
  double tol = 1e-10;
  std::string out;
};

int run_expansion(const ExpansionArgs& a) {
  VoxelGrid grid;
  if (!a.grid.empty()) {
    grid = read_grid(a.grid);
  } else {
    ProtocolSpec spec;
    spec.size = a.K;
    DrawResult r = draw(spec, a.seed);
    if (!r.success) throw std::runtime_error("could not draw the test geometry: " + r.failure_reason);
    grid = voxelize(r.config, static_cast<int>(std::lround(16.0 * a.K)));
  }
  const MaterialPair base{a.alpha1, a.alpha2};
  SolverSettings s;
  s.tolerance = a.tol;
  std::vector<double> rhos = halving_sequence(a.rho0 > 0.0 ? a.rho0 : base.rho(), a.halvings + 1);
  rhos.push_back(0.0);
  const auto rows = verify_expansion_order(grid, base.reference(), rhos, s);
  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw std::runtime_error("cannot open " + a.out);
  }
  std::ostream& out = a.out.empty() ? std::cout : file;
  out << "rho,alpha1,alpha2,a_solver,a_first_order,deviation,ratio_to_previous,iterations\n";
  double prev = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const bool ratio = i > 0 && r.rho > 0.0 && prev > 0.0;
    out << csv_join({format_double(r.rho), format_double(r.alpha_inclusion), format_double(r.alpha_matrix),
                     format_double(r.a_solver), format_double(r.a_first_order), format_double(r.deviation),
                     ratio ? format_double(r.deviation / prev) : "", std::to_string(r.iterations)})
        << "\n";
    prev = r.deviation;
  }
  return kOk;
}

struct VfArgs {
  std::string shape = "sphere";
  std::string protocol = "snapshot";
  double phi = 0.3;
  double isolation = 1.2;
  std::vector<double> sizes{2, 4, 8};
  std::size_t N = 200;
  int voxels = 16;
  std::uint64_t seed = 0;
  int workers = 0;
  std::string out;
};

int run_vf(const VfArgs& a) {
  ProtocolSpec spec;
  spec.shape = shape_from_string(a.shape);
  spec.protocol = protocol_from_string(a.protocol);
  spec.phi = a.phi;
  spec.isolation = a.isolation;
  const auto pts = vf_variance_curve(spec, a.sizes, a.N, a.voxels, a.seed, a.workers);
  std::ofstream file(a.out);
  if (!file) throw std::runtime_error("cannot open " + a.out);
  file << "protocol,K,N,failures,mean_phi,normalized_std\n";
  std::size_t failures = 0;
  for (const auto& p : pts) {
    file << csv_join({to_string(spec.protocol), format_double(p.size), std::to_string(p.realizations),
                      std::to_string(p.failures), format_double(p.mean_phi), format_double(p.normalized_std)})
         << "\n";
    failures += p.failures;
  }
  return failures ? kPartial : kOk;
}

struct AutocorrArgs {
  std::string config;
  int n = 0;
  std::string out;
};

int run_autocorr(const AutocorrArgs& a) {
  const Configuration c = load_configuration(a.config);
  const int n = a.n > 0 ? a.n : static_cast<int>(std::lround(16.0 * c.cell.edge));
  const CorrelationCurve curve = empirical_autocorrelation(voxelize(c, n), c.species.radius);
  std::ofstream file(a.out);
  if (!file) throw std::runtime_error("cannot open " + a.out);
  file << "distance_over_radius,h,count\n";
  for (std::size_t i = 0; i < curve.h.size(); ++i)
    file << format_double(curve.distance[i]) << "," << format_double(curve.h[i]) << "," << curve.count[i] << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rvelab: random microstructures, FFT homogenization and RVE error statistics"};
  app.set_version_flag("--version", std::string(RVELAB_VERSION));
  app.require_subcommand(1);
  int status = kOk;

  PackArgs pack;
  auto* cmd_pack = app.add_subcommand("pack", "Generate a non-overlapping periodic configuration");
  cmd_pack->add_option("--shape", pack.shape, "disk, sphere or fiber")->capture_default_str();
  cmd_pack->add_option("--algorithm", pack.algorithm, "auto (MCM or SAM) or rsa")->capture_default_str();
  cmd_pack->add_option("--phi", pack.phi, "Target volume fraction")->capture_default_str();
  cmd_pack->add_option("--isolation", pack.isolation, "Effective over true radius")->capture_default_str();
  cmd_pack->add_option("--count", pack.count, "Particle count (MCM)");
  cmd_pack->add_option("--cell", pack.cell, "Cell edge");
  cmd_pack->add_option("--aspect", pack.aspect, "Fiber aspect ratio")->capture_default_str();
  cmd_pack->add_option("--seed", pack.seed)->capture_default_str();
  cmd_pack->add_option("--out", pack.out, "Configuration JSON")->required();
  cmd_pack->callback([&] { status = run_pack(pack); });

  DrawArgs drw;
  auto* cmd_draw = app.add_subcommand("draw", "Draw one realization of an ensemble protocol");
  cmd_draw->add_option("--protocol", drw.protocol, "periodized, snapshot or poisson")->capture_default_str();
  cmd_draw->add_option("--shape", drw.shape)->capture_default_str();
  cmd_draw->add_option("--K", drw.K, "Cell size (K, or L over fiber length)")->capture_default_str();
  cmd_draw->add_option("--phi", drw.phi)->capture_default_str();
  cmd_draw->add_option("--isolation", drw.isolation)->capture_default_str();
  cmd_draw->add_option("--aspect", drw.aspect)->capture_default_str();
  cmd_draw->add_option("--seed", drw.seed)->capture_default_str();
  cmd_draw->add_option("--out", drw.out, "Configuration JSON")->required();
  cmd_draw->add_option("--grid", drw.grid, "Also write a voxel grid (raw + .json sidecar)");
  cmd_draw->add_option("--n", drw.n, "Grid resolution (default 16 K)");
  cmd_draw->callback([&] { status = run_draw(drw); });

  SolveArgs slv;
  auto* cmd_solve = app.add_subcommand("solve", "Apparent conductivity of a voxel grid");
  cmd_solve->add_option("--grid", slv.grid, "Raw grid or its .json sidecar")->required();
  cmd_solve->add_option("--alpha1", slv.alpha1, "Inclusion conductivity")->capture_default_str();
  cmd_solve->add_option("--alpha2", slv.alpha2, "Matrix conductivity")->capture_default_str();
  cmd_solve->add_option("--tol", slv.tol)->capture_default_str();
  cmd_solve->add_option("--max-iters", slv.max_iters)->capture_default_str();
  cmd_solve->add_option("--metric", slv.metric, "update or equilibrium")->capture_default_str();
  cmd_solve->add_option("--tensor", slv.tensor, "full or a11")->capture_default_str();
  cmd_solve->add_option("--out", slv.out, "Result JSON (stdout if omitted)");
  cmd_solve->callback([&] { status = run_solve(slv); });

  ExpansionArgs exp;
  auto* cmd_exp = app.add_subcommand("expansion-check", "Solver versus first-order expansion under contrast halving");
  cmd_exp->add_option("--grid", exp.grid, "Grid to use (default: a periodized sphere draw)");
  cmd_exp->add_option("--K", exp.K)->capture_default_str();
  cmd_exp->add_option("--seed", exp.seed)->capture_default_str();
  cmd_exp->add_option("--alpha1", exp.alpha1)->capture_default_str();
  cmd_exp->add_option("--alpha2", exp.alpha2)->capture_default_str();
  cmd_exp->add_option("--halvings", exp.halvings)->capture_default_str();
  cmd_exp->add_option("--rho0", exp.rho0, "Starting contrast (0: contrast of the material pair)")->capture_default_str();
  cmd_exp->add_option("--tol", exp.tol)->capture_default_str();
  cmd_exp->add_option("--out", exp.out, "Deviation CSV (stdout if omitted)");
  cmd_exp->callback([&] { status = run_expansion(exp); });

  VfArgs vf;
  auto* cmd_vf = app.add_subcommand("vf-curve", "Normalized volume-fraction standard deviation versus cell size");
  cmd_vf->add_option("--shape", vf.shape)->capture_default_str();
  cmd_vf->add_option("--protocol", vf.protocol)->capture_default_str();
  cmd_vf->add_option("--phi", vf.phi)->capture_default_str();
  cmd_vf->add_option("--isolation", vf.isolation)->capture_default_str();
  cmd_vf->add_option("--sizes", vf.sizes)->capture_default_str();
  cmd_vf->add_option("--N", vf.N, "Realizations per size")->capture_default_str();
  cmd_vf->add_option("--voxels", vf.voxels, "Voxels per unit length")->capture_default_str();
  cmd_vf->add_option("--seed", vf.seed)->capture_default_str();
  cmd_vf->add_option("--workers", vf.workers)->capture_default_str();
  cmd_vf->add_option("--out", vf.out)->required();
  cmd_vf->callback([&] { status = run_vf(vf); });

  AutocorrArgs ac;
  auto* cmd_ac = app.add_subcommand("autocorr", "Radially binned two-point autocorrelation of a configuration");
  cmd_ac->add_option("--config", ac.config)->required();
  cmd_ac->add_option("--n", ac.n, "Grid resolution (default 16 per unit length)");
  cmd_ac->add_option("--out", ac.out)->required();
  cmd_ac->callback([&] { status = run_autocorr(ac); });

  auto* cmd_study = app.add_subcommand("study", "Monte-Carlo studies");
  cmd_study->require_subcommand(1);
  std::string study_config, study_dir;
  auto* study_run = cmd_study->add_subcommand("run", "Run a study from a JSON config");
  study_run->add_option("config", study_config)->required();
  study_run->callback([&] {
    const StudyResult r = run_study(load_study_config(study_config), log_line);
    std::cerr << r.records << " records, " << r.failures << " failures\n";
    status = study_exit_code(r);
  });
  auto* study_sum = cmd_study->add_subcommand("summarize", "Recompute summary.csv of a study directory");
  study_sum->add_option("dir", study_dir)->required();
  study_sum->callback([&] {
    const StudyResult r = summarize_study_directory(study_dir);
    std::cerr << r.records << " records, " << r.failures << " failures\n";
    status = study_exit_code(r);
  });
  std::string ref_config;
  auto* study_ref = cmd_study->add_subcommand("reference", "Compute the reference value of a study config");
  study_ref->add_option("config", ref_config)->required();
  study_ref->callback([&] {
    const StudyConfig cfg = load_study_config(ref_config);
    const double size = cfg.reference_size.value_or(cfg.sizes.back());
    const StudySummary s = compute_reference(cfg, size, log_line);
    std::filesystem::create_directories(cfg.output_dir);
    Json j = {{"size", size}, {"N", s.n}, {"mean", s.mean}};
    j["std"] = s.std_defined ? Json(s.std) : Json();
    j["ci99"] = s.std_defined ? Json(s.ci_halfwidth) : Json();
    write_json_file(j, cfg.output_dir / "reference.json");
    std::cout << format_double(s.mean) << " +- " << (s.std_defined ? format_double(s.ci_halfwidth) : "undefined") << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFatal;
  }
  return status;
}
