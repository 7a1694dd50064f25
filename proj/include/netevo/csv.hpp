#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace netevo::csv {

/// Splits one line on commas. No quoting: none of the formats here need it.
std::vector<std::string> split(std::string_view line, char sep = ',');

std::string join(const std::vector<std::string>& fields, char sep = ',');

/// Trims ASCII whitespace (and a trailing CR) from both ends.
std::string_view trim(std::string_view s);

std::int64_t parse_int(std::string_view field, std::string_view what);
std::uint64_t parse_uint(std::string_view field, std::string_view what);
double parse_double(std::string_view field, std::string_view what);

/// Shortest round-trip representation of a double.
std::string format_double(double v);

/// Line reader that skips `#` comment lines and blank lines and tracks the
/// 1-based line number of the last returned line.
class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path);

  bool next(std::string& line);
  std::size_t line_number() const { return line_no_; }
  const std::filesystem::path& path() const { return path_; }

  /// Reads the header line and checks it equals `expected` field by field.
  /// In non-strict mode extra trailing columns are tolerated.
  void expect_header(const std::vector<std::string>& expected, bool strict);

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

/// Opens a file for writing, throwing on failure.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace netevo::csv
