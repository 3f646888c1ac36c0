#include "rvelab/study.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <stdexcept>

#include "rvelab/parallel.hpp"
#include "rvelab/raster.hpp"
#include "rvelab/rng.hpp"

namespace rvelab {

namespace {

constexpr std::uint64_t kRetrySalt = 0x243f6a8885a308d3ULL;
const std::set<std::string> kConfigKeys = {
    "shape",   "phi",        "isolation",    "aspect_ratio", "magnification", "poisson_retries", "materials",
    "protocols", "sizes",    "resolution",   "realizations", "master_seed",   "workers",         "output_dir",
    "tensor",  "solver",     "reference"};

std::string size_label(double size) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", size);
  return buf;
}

std::vector<std::string> record_header(int dim) {
  std::vector<std::string> h = {"protocol", "K", "seed", "n", "phi_measured", "a11", "a22"};
  if (dim == 3) h.push_back("a33");
  for (const char* c : {"iters", "residual", "index", "attempts", "config_hash", "code_version"}) h.push_back(c);
  return h;
}

std::vector<std::string> record_fields(const RealizationRecord& r, const std::string& hash) {
  std::vector<std::string> f = {to_string(r.protocol), size_label(r.size), std::to_string(r.seed), std::to_string(r.n),
                                format_double(r.phi_measured)};
  for (double a : r.diagonal) f.push_back(format_double(a));
  f.push_back(std::to_string(r.iterations));
  f.push_back(format_double(r.residual));
  f.push_back(std::to_string(r.index));
  f.push_back(std::to_string(r.attempts));
  f.push_back(hash);
  f.push_back(RVELAB_VERSION);
  return f;
}

std::vector<std::string> failure_fields(const RealizationRecord& r) {
  return {to_string(r.protocol), size_label(r.size), std::to_string(r.seed), std::to_string(r.index),
          std::to_string(r.attempts), r.failure_reason};
}

const std::vector<std::string> kFailureHeader = {"protocol", "K", "seed", "index", "attempts", "reason"};
const std::vector<std::string> kSummaryHeader = {"protocol", "K",       "N",         "mean",       "std",     "ci99",
                                                 "rel_sys",  "rel_rand", "p_1pct",   "p_0.1pct",   "failures"};

std::string opt_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

void write_summary_csv(const std::filesystem::path& path, const std::vector<CellSummary>& cells) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << csv_join(kSummaryHeader) << "\n";
  for (const auto& c : cells) {
    const bool any = c.stats.n > 0;
    const bool spread = c.stats.std_defined;
    std::vector<std::string> f = {to_string(c.protocol),
                                  size_label(c.size),
                                  std::to_string(c.stats.n),
                                  any ? format_double(c.stats.mean) : "",
                                  spread ? format_double(c.stats.std) : "",
                                  spread ? format_double(c.stats.ci_halfwidth) : "",
                                  c.errors ? format_double(c.errors->relative_systematic) : "",
                                  c.errors && spread ? format_double(c.errors->relative_random) : "",
                                  opt_field(c.p_1pct),
                                  opt_field(c.p_01pct),
                                  std::to_string(c.failures)};
    out << csv_join(f) << "\n";
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Json summary_to_json(const StudySummary& s, double size) {
  return {{"size", size},
          {"N", s.n},
          {"mean", s.mean},
          {"std", s.std_defined ? Json(s.std) : Json()},
          {"ci99", s.std_defined ? Json(s.ci_halfwidth) : Json()}};
}

double parse_double(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::stod(s);
}

}  // namespace

void StudyConfig::validate() const {
  materials.validate();
  solver.validate();
  if (!(phi >= 0.0 && phi < 1.0)) throw std::invalid_argument("phi must lie in [0,1)");
  if (!(isolation >= 1.0)) throw std::invalid_argument("isolation must be at least 1");
  if (protocols.empty()) throw std::invalid_argument("at least one protocol is required");
  if (sizes.empty()) throw std::invalid_argument("at least one size is required");
  for (double s : sizes)
    if (!(s > 0.0)) throw std::invalid_argument("sizes must be positive");
  if (realizations < 1) throw std::invalid_argument("realizations must be at least 1");
  if (!(resolution_value > 0.0)) throw std::invalid_argument("resolution value must be positive");
  if (shape == ShapeKind::Spherocylinder && resolution_rule == ResolutionRule::PerSize)
    throw std::invalid_argument("fiber studies resolve by voxels per diameter");
  if (reference_size && !(*reference_size > 0.0)) throw std::invalid_argument("reference size must be positive");
  if (reference_size && reference_realizations < 1) throw std::invalid_argument("reference realizations must be positive");
  for (Protocol p : protocols) protocol_spec(p, sizes.front()).validate();
}

int StudyConfig::resolution_for(double size) const {
  double n = 0.0;
  if (resolution_rule == ResolutionRule::PerSize) {
    n = resolution_value * size;
  } else {
    double diameter = 0.0;
    if (shape == ShapeKind::Spherocylinder) {
      diameter = 1.0 / aspect_ratio;
    } else {
      // unit reference length: one particle of volume phi per unit cell
      const double pi = 3.14159265358979323846;
      diameter = shape == ShapeKind::Disk ? 2.0 * std::sqrt(phi / pi) : 2.0 * std::cbrt(3.0 * phi / (4.0 * pi));
    }
    n = resolution_value * size / diameter;
  }
  return std::max(1, static_cast<int>(std::lround(n)));
}

ProtocolSpec StudyConfig::protocol_spec(Protocol protocol, double size) const {
  ProtocolSpec s;
  s.protocol = protocol;
  s.shape = shape;
  s.size = size;
  s.phi = phi;
  s.isolation = isolation;
  s.magnification = magnification;
  s.aspect_ratio = aspect_ratio;
  s.poisson_retries = poisson_retries;
  return s;
}

Json study_config_to_json(const StudyConfig& c) {
  Json j;
  j["shape"] = to_string(c.shape);
  j["phi"] = c.phi;
  j["isolation"] = c.isolation;
  j["aspect_ratio"] = c.aspect_ratio;
  j["magnification"] = c.magnification;
  j["poisson_retries"] = c.poisson_retries;
  j["materials"] = {{"alpha_inclusion", c.materials.alpha_inclusion}, {"alpha_matrix", c.materials.alpha_matrix}};
  Json protocols = Json::array();
  for (Protocol p : c.protocols) protocols.push_back(to_string(p));
  j["protocols"] = protocols;
  j["sizes"] = c.sizes;
  j["resolution"] = {{"rule", c.resolution_rule == ResolutionRule::PerSize ? "per_size" : "per_diameter"},
                     {"value", c.resolution_value}};
  j["realizations"] = c.realizations;
  j["master_seed"] = c.master_seed;
  j["workers"] = c.workers;
  j["output_dir"] = c.output_dir.string();
  j["tensor"] = c.full_tensor ? "full" : "a11";
  j["solver"] = {{"tolerance", c.solver.tolerance},
                 {"max_iters", c.solver.max_iters},
                 {"metric", to_string(c.solver.metric)},
                 {"reference_alpha", c.solver.reference_alpha}};
  Json ref = Json::object();
  if (c.reference_value) ref["value"] = *c.reference_value;
  if (c.reference_size) {
    ref["size"] = *c.reference_size;
    ref["realizations"] = c.reference_realizations;
  }
  j["reference"] = ref;
  return j;
}

StudyConfig study_config_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("study config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!kConfigKeys.count(key)) throw std::invalid_argument("unknown study config key '" + key + "'");
  StudyConfig c;
  try {
    if (j.contains("shape")) c.shape = shape_from_string(j["shape"].get<std::string>());
    c.phi = j.value("phi", c.phi);
    c.isolation = j.value("isolation", c.isolation);
    c.aspect_ratio = j.value("aspect_ratio", c.aspect_ratio);
    c.magnification = j.value("magnification", c.magnification);
    c.poisson_retries = j.value("poisson_retries", c.poisson_retries);
    if (j.contains("materials")) {
      c.materials.alpha_inclusion = j["materials"].value("alpha_inclusion", c.materials.alpha_inclusion);
      c.materials.alpha_matrix = j["materials"].value("alpha_matrix", c.materials.alpha_matrix);
    }
    if (j.contains("protocols")) {
      c.protocols.clear();
      for (const auto& p : j["protocols"]) c.protocols.push_back(protocol_from_string(p.get<std::string>()));
    }
    if (j.contains("sizes")) c.sizes = j["sizes"].get<std::vector<double>>();
    if (j.contains("resolution")) {
      const auto& r = j["resolution"];
      const std::string rule = r.value("rule", std::string("per_size"));
      if (rule == "per_size") c.resolution_rule = ResolutionRule::PerSize;
      else if (rule == "per_diameter") c.resolution_rule = ResolutionRule::PerDiameter;
      else throw std::invalid_argument("unknown resolution rule '" + rule + "'");
      c.resolution_value = r.value("value", c.resolution_rule == ResolutionRule::PerSize ? 16.0 : 5.0);
    } else if (c.shape == ShapeKind::Spherocylinder) {
      c.resolution_rule = ResolutionRule::PerDiameter;
      c.resolution_value = 5.0;
    }
    c.realizations = j.value("realizations", c.realizations);
    c.master_seed = j.value("master_seed", c.master_seed);
    c.workers = j.value("workers", c.workers);
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("tensor")) {
      const std::string t = j["tensor"].get<std::string>();
      if (t == "full") c.full_tensor = true;
      else if (t == "a11") c.full_tensor = false;
      else throw std::invalid_argument("tensor must be 'full' or 'a11'");
    }
    if (j.contains("solver")) {
      const auto& s = j["solver"];
      c.solver.tolerance = s.value("tolerance", c.solver.tolerance);
      c.solver.max_iters = s.value("max_iters", c.solver.max_iters);
      c.solver.reference_alpha = s.value("reference_alpha", c.solver.reference_alpha);
      if (s.contains("metric")) c.solver.metric = metric_from_string(s["metric"].get<std::string>());
    }
    if (j.contains("reference")) {
      const auto& r = j["reference"];
      if (r.contains("value") && !r["value"].is_null()) c.reference_value = r["value"].get<double>();
      if (r.contains("size") && !r["size"].is_null()) c.reference_size = r["size"].get<double>();
      c.reference_realizations = r.value("realizations", c.reference_realizations);
    }
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed study config: ") + e.what());
  }
  c.validate();
  return c;
}

StudyConfig load_study_config(const std::filesystem::path& path) { return study_config_from_json(read_json_file(path)); }

std::string StudyConfig::hash() const {
  Json j = study_config_to_json(*this);
  j.erase("workers");
  j.erase("output_dir");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(mix64(hash_string(j.dump()))));
  return buf;
}

RealizationRecord run_realization(const StudyConfig& config, Protocol protocol, double size, std::size_t index) {
  RealizationRecord rec;
  rec.protocol = protocol;
  rec.size = size;
  rec.index = index;
  rec.seed = derive_seed(config.master_seed, to_string(protocol), size, index);
  rec.n = config.resolution_for(size);
  const int d = config.dim();
  rec.diagonal.assign(d, std::numeric_limits<double>::quiet_NaN());
  try {
    const ProtocolSpec spec = config.protocol_spec(protocol, size);
    DrawResult drawn = draw(spec, rec.seed);
    rec.attempts = drawn.attempts;
    if (!drawn.success && protocol == Protocol::Snapshot) {
      drawn = draw(spec, mix64(rec.seed ^ kRetrySalt));
      rec.attempts = 2;
    }
    if (!drawn.success) {
      rec.failure_reason = "packing failed: " + drawn.failure_reason;
      return rec;
    }
    const VoxelGrid grid = voxelize(drawn.config, rec.n);
    const ApparentResult res = apparent_tensor(grid, config.materials, config.solver, config.full_tensor ? d : 1);
    rec.phi_measured = res.phi_measured;
    rec.iterations = res.iterations;
    rec.residual = res.residual;
    for (int i = 0; i < d; ++i)
      if (config.full_tensor || i == 0) rec.diagonal[i] = res.at(i, i);
    if (!res.converged) {
      rec.failure_reason = "solver did not converge (residual " + format_double(res.residual) + ")";
      return rec;
    }
    rec.success = true;
  } catch (const std::exception& e) {
    rec.failure_reason = e.what();
  }
  return rec;
}

std::vector<CellSummary> summarize_records(const StudyConfig& config, const std::vector<RealizationRecord>& records,
                                           std::optional<double> reference) {
  std::vector<CellSummary> out;
  for (Protocol p : config.protocols)
    for (double size : config.sizes) {
      CellSummary cell;
      cell.protocol = p;
      cell.size = size;
      std::vector<double> values;
      for (const auto& r : records) {
        if (r.protocol != p || size_label(r.size) != size_label(size)) continue;
        if (r.success) values.push_back(r.diagonal[0]);
        else ++cell.failures;
      }
      if (!values.empty()) {
        cell.stats = summarize_allow_single(values);
        if (reference) {
          cell.errors = error_decomposition(values, *reference);
          cell.p_1pct = success_probability(values, *reference, 0.01);
          cell.p_01pct = success_probability(values, *reference, 0.001);
        }
      }
      out.push_back(cell);
    }
  return out;
}

StudySummary compute_reference(const StudyConfig& config, double size, const StudyProgress& progress) {
  const std::size_t n = config.reference_realizations;
  std::vector<RealizationRecord> recs(n);
  StudyConfig ref = config;
  ref.master_seed = mix64(config.master_seed ^ hash_string("reference"));
  parallel_for(n, resolve_workers(config.workers), [&](std::size_t i) {
    recs[i] = run_realization(ref, Protocol::Periodized, size, i);
  });
  std::vector<double> values;
  for (const auto& r : recs)
    if (r.success) values.push_back(r.diagonal[0]);
  if (values.empty()) throw std::runtime_error("every reference realization failed");
  if (progress) progress("reference K=" + size_label(size) + ": " + std::to_string(values.size()) + " of " + std::to_string(n) + " runs succeeded");
  return summarize_allow_single(values);
}

StudyResult run_study(const StudyConfig& config, const StudyProgress& progress) {
  config.validate();
  const auto& dir = config.output_dir;
  std::filesystem::create_directories(dir);
  write_json_file(study_config_to_json(config), dir / "study_config.json");
  const std::string hash = config.hash();
  const int d = config.dim();

  StudyResult result;
  if (config.reference_value) {
    result.reference = config.reference_value;
  } else if (config.reference_size) {
    const StudySummary ref = compute_reference(config, *config.reference_size, progress);
    write_json_file(summary_to_json(ref, *config.reference_size), dir / "reference.json");
    result.reference = ref.mean;
  }

  struct Task {
    Protocol protocol;
    double size;
    std::size_t index;
  };
  std::vector<Task> tasks;
  for (Protocol p : config.protocols)
    for (double s : config.sizes)
      for (std::size_t i = 0; i < config.realizations; ++i) tasks.push_back({p, s, i});

  std::ofstream rec_out(dir / "realizations.csv");
  std::ofstream fail_out(dir / "failures.csv");
  if (!rec_out || !fail_out) throw std::runtime_error("cannot create record files in " + dir.string());
  rec_out << csv_join(record_header(d)) << "\n";
  fail_out << csv_join(kFailureHeader) << "\n";

  std::vector<RealizationRecord> records(tasks.size());
  std::vector<char> done(tasks.size(), 0);
  std::size_t next_write = 0;
  std::size_t cell_failures = 0;
  std::mutex write_mutex;

  parallel_for(tasks.size(), resolve_workers(config.workers), [&](std::size_t t) {
    RealizationRecord rec = run_realization(config, tasks[t].protocol, tasks[t].size, tasks[t].index);
    std::lock_guard<std::mutex> lock(write_mutex);
    records[t] = std::move(rec);
    done[t] = 1;
    while (next_write < tasks.size() && done[next_write]) {
      const RealizationRecord& r = records[next_write];
      if (r.success) {
        rec_out << csv_join(record_fields(r, hash)) << "\n";
      } else {
        fail_out << csv_join(failure_fields(r)) << "\n";
        ++cell_failures;
      }
      ++next_write;
      const bool cell_end = next_write == tasks.size() || tasks[next_write].index == 0;
      if (cell_end) {
        rec_out.flush();
        fail_out.flush();
        if (!rec_out || !fail_out) throw std::runtime_error("failed writing records in " + dir.string());
        if (progress)
          progress(to_string(r.protocol) + " K=" + size_label(r.size) + ": " +
                   std::to_string(config.realizations - cell_failures) + " records, " + std::to_string(cell_failures) +
                   " failures");
        cell_failures = 0;
      }
    }
  });
  rec_out.close();
  fail_out.close();

  for (const auto& r : records) {
    if (r.success) ++result.records;
    else ++result.failures;
  }
  result.summaries = summarize_records(config, records, result.reference);
  write_summary_csv(dir / "summary.csv", result.summaries);
  return result;
}

StudyResult summarize_study_directory(const std::filesystem::path& dir) {
  StudyConfig config = load_study_config(dir / "study_config.json");
  const int d = config.dim();
  std::vector<RealizationRecord> records;
  const CsvTable rec = read_csv(dir / "realizations.csv");
  const std::size_t cp = rec.column("protocol"), ck = rec.column("K"), cphi = rec.column("phi_measured"),
                    ci = rec.column("index"), it = rec.column("iters"), res = rec.column("residual"),
                    c11 = rec.column("a11");
  for (const auto& row : rec.rows) {
    RealizationRecord r;
    r.protocol = protocol_from_string(row[cp]);
    r.size = std::stod(row[ck]);
    r.index = std::stoul(row[ci]);
    r.phi_measured = parse_double(row[cphi]);
    r.iterations = std::stoi(row[it]);
    r.residual = parse_double(row[res]);
    r.diagonal.assign(d, std::numeric_limits<double>::quiet_NaN());
    r.diagonal[0] = parse_double(row[c11]);
    r.success = true;
    records.push_back(std::move(r));
  }
  if (std::filesystem::exists(dir / "failures.csv")) {
    const CsvTable fail = read_csv(dir / "failures.csv");
    const std::size_t fp = fail.column("protocol"), fk = fail.column("K"), fr = fail.column("reason");
    for (const auto& row : fail.rows) {
      RealizationRecord r;
      r.protocol = protocol_from_string(row[fp]);
      r.size = std::stod(row[fk]);
      r.failure_reason = row[fr];
      records.push_back(std::move(r));
    }
  }
  StudyResult result;
  if (std::filesystem::exists(dir / "reference.json")) {
    result.reference = read_json_file(dir / "reference.json").at("mean").get<double>();
  } else if (config.reference_value) {
    result.reference = config.reference_value;
  }
  for (const auto& r : records) {
    if (r.success) ++result.records;
    else ++result.failures;
  }
  result.summaries = summarize_records(config, records, result.reference);
  write_summary_csv(dir / "summary.csv", result.summaries);
  return result;
}

int study_exit_code(const StudyResult& result) { return result.failures > 0 ? 2 : 0; }

}  // namespace rvelab
