#pragma once

// JSON and CSV serialization.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rvelab/geometry.hpp"
#include "rvelab/solver.hpp"

namespace rvelab {

using Json = nlohmann::json;

/// {dim, edge, periodic, shape, radius, [length, caps_included], centers,
/// [axes], species_meta, non_overlapping}. Doubles are written in their
/// shortest round-trip form, so load(save(c)) == c bit for bit.
Json configuration_to_json(const Configuration& config);
Configuration configuration_from_json(const Json& j);
void save_configuration(const Configuration& config, const std::filesystem::path& path);
Configuration load_configuration(const std::filesystem::path& path);

Json apparent_result_to_json(const ApparentResult& result);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const Json& j, const std::filesystem::path& path);

/// %.17g, or an empty field for NaN.
std::string format_double(double v);
/// Quotes a field if it contains a comma, quote or newline.
std::string csv_escape(const std::string& field);
std::string csv_join(const std::vector<std::string>& fields);
std::vector<std::string> csv_split(const std::string& line);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws if absent.
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace rvelab
