#include "netevo/csv.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "netevo/core.hpp"

namespace netevo::csv {

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(trim(line.substr(start)));
      break;
    }
    out.emplace_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& fields, char sep) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(sep);
    out += fields[i];
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

namespace {

template <typename T>
T parse_integral(std::string_view field, std::string_view what) {
  field = trim(field);
  T value{};
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc{} || ptr != end) {
    throw InputError(fmt::format("invalid {} '{}'", what, field));
  }
  return value;
}

}  // namespace

std::int64_t parse_int(std::string_view field, std::string_view what) {
  return parse_integral<std::int64_t>(field, what);
}

std::uint64_t parse_uint(std::string_view field, std::string_view what) {
  return parse_integral<std::uint64_t>(field, what);
}

double parse_double(std::string_view field, std::string_view what) {
  field = trim(field);
  const std::string buf(field);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(buf, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (buf.empty() || used != buf.size() || !std::isfinite(v)) {
    throw InputError(fmt::format("invalid {} '{}'", what, field));
  }
  return v;
}

std::string format_double(double v) {
  if (v == 0.0) return "0";
  return fmt::format("{}", v);
}

LineReader::LineReader(const std::filesystem::path& path) : path_(path), in_(path) {
  if (!in_) throw Error("cannot open '" + path.string() + "' for reading");
}

bool LineReader::next(std::string& line) {
  while (std::getline(in_, line)) {
    ++line_no_;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    line = std::string(t);
    return true;
  }
  return false;
}

void LineReader::expect_header(const std::vector<std::string>& expected, bool strict) {
  std::string line;
  if (!next(line)) throw InputError("'" + path_.string() + "' is missing its header line");
  const auto fields = split(line);
  const bool prefix_ok =
      fields.size() >= expected.size() &&
      std::equal(expected.begin(), expected.end(), fields.begin());
  if (!prefix_ok || (strict && fields.size() != expected.size())) {
    throw InputError(fmt::format("'{}': unexpected header '{}', expected '{}'", path_.string(),
                                 line, join(expected)));
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace netevo::csv
