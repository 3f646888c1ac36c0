#include "rvelab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace rvelab {

namespace {

Json point_to_json(const Vec& p, int dim) {
  Json a = Json::array();
  for (int k = 0; k < dim; ++k) a.push_back(p[k]);
  return a;
}

Vec point_from_json(const Json& a, int dim) {
  if (!a.is_array() || static_cast<int>(a.size()) != dim)
    throw std::invalid_argument("point must have " + std::to_string(dim) + " coordinates");
  Vec p{};
  for (int k = 0; k < dim; ++k) p[k] = a[k].get<double>();
  return p;
}

}  // namespace

Json configuration_to_json(const Configuration& config) {
  const int d = config.cell.dim;
  Json j;
  j["dim"] = d;
  j["edge"] = config.cell.edge;
  j["periodic"] = config.cell.periodic;
  j["shape"] = to_string(config.species.kind);
  j["radius"] = config.species.radius;
  if (config.species.kind == ShapeKind::Spherocylinder) {
    j["length"] = config.species.length;
    j["caps_included"] = config.species.caps_included;
  }
  Json centers = Json::array();
  for (const auto& c : config.centers) centers.push_back(point_to_json(c, d));
  j["centers"] = std::move(centers);
  if (config.species.kind == ShapeKind::Spherocylinder) {
    Json axes = Json::array();
    for (const auto& a : config.axes) axes.push_back(point_to_json(a, 3));
    j["axes"] = std::move(axes);
  }
  j["species_meta"] = {{"target_phi", config.meta.target_phi}, {"isolation_factor", config.meta.isolation_factor}};
  j["non_overlapping"] = config.non_overlapping;
  return j;
}

Configuration configuration_from_json(const Json& j) {
  try {
    Configuration c;
    c.cell.dim = j.at("dim").get<int>();
    c.cell.edge = j.at("edge").get<double>();
    c.cell.periodic = j.value("periodic", true);
    c.species.kind = shape_from_string(j.at("shape").get<std::string>());
    c.species.radius = j.at("radius").get<double>();
    if (c.species.kind == ShapeKind::Spherocylinder) {
      c.species.length = j.at("length").get<double>();
      c.species.caps_included = j.value("caps_included", false);
    }
    for (const auto& p : j.at("centers")) c.centers.push_back(point_from_json(p, c.cell.dim));
    if (c.species.kind == ShapeKind::Spherocylinder)
      for (const auto& a : j.at("axes")) c.axes.push_back(point_from_json(a, 3));
    if (j.contains("species_meta")) {
      c.meta.target_phi = j["species_meta"].value("target_phi", 0.0);
      c.meta.isolation_factor = j["species_meta"].value("isolation_factor", 1.0);
    }
    c.non_overlapping = j.value("non_overlapping", false);
    c.validate();
    return c;
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed configuration: ") + e.what());
  }
}

void save_configuration(const Configuration& config, const std::filesystem::path& path) {
  write_json_file(configuration_to_json(config), path);
}

Configuration load_configuration(const std::filesystem::path& path) {
  return configuration_from_json(read_json_file(path));
}

Json apparent_result_to_json(const ApparentResult& r) {
  Json j;
  j["dim"] = r.dim;
  Json rows = Json::array();
  for (int i = 0; i < r.dim; ++i) {
    Json row = Json::array();
    for (int k = 0; k < r.dim; ++k) row.push_back(r.at(i, k));
    rows.push_back(row);
  }
  j["tensor"] = rows;
  j["a_bar"] = r.a_bar;
  j["iterations"] = r.iterations;
  j["residual"] = r.residual;
  j["converged"] = r.converged;
  j["asymmetry"] = r.asymmetry;
  j["phi_measured"] = r.phi_measured;
  j["seconds"] = r.seconds;
  Json loads = Json::array();
  for (const auto& l : r.loads) {
    loads.push_back({{"mean_flux", l.mean_flux},
                     {"mean_gradient", l.mean_gradient},
                     {"iterations", l.iterations},
                     {"residual", l.residual},
                     {"converged", l.converged}});
  }
  j["loads"] = loads;
  return j;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_json_file(const Json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(fields[i]);
  }
  return out;
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::runtime_error("CSV lacks column '" + name + "'");
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) return t;
  t.header = csv_split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = csv_split(line);
    if (row.size() != t.header.size())
      throw std::runtime_error(path.string() + ": row with " + std::to_string(row.size()) + " fields, header has " +
                               std::to_string(t.header.size()));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace rvelab
