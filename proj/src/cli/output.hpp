#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace mincond::cli {

using json = nlohmann::ordered_json;

/// "+inf" / "-inf" for infinities, otherwise %.17g.
std::string format_number(double v);

/// Number as JSON, or the "+inf" sentinel string.
json number_or_sentinel(double v);

/// Column-ordered table; cells are JSON scalars (null renders empty in CSV).
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;

  void add_row(std::vector<json> row);
};

std::string to_csv(const Table& table);
json to_json(const Table& table);  // array of row objects

/// Reads the angle_rad column of a CSV file with a header row. Throws
/// ParseError carrying the 1-based line number of the offending line.
std::vector<double> read_angle_csv(const std::filesystem::path& path);
std::vector<double> parse_angle_csv(std::istream& in);

/// Writes to a sibling temporary file and renames it over path.
void write_atomically(const std::filesystem::path& path, const std::string& contents);

std::string utc_timestamp();

}  // namespace mincond::cli
