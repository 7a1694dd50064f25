#include "netevo/core.hpp"

#include <cstdio>

#include <fmt/format.h>

namespace netevo {

EdgePair make_pair_canonical(NodeId u, NodeId v) {
  if (u == v) throw Error("self-loop on node " + to_string(u));
  return u < v ? EdgePair{u, v} : EdgePair{v, u};
}

namespace {

Date checked_date(int y, unsigned m, unsigned d, const std::string& text) {
  Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) throw InputError("invalid calendar date '" + text + "'");
  return date;
}

}  // namespace

Date parse_date(const std::string& text) {
  int y = 0;
  unsigned m = 0, d = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) {
    throw InputError("expected YYYY-MM-DD, got '" + text + "'");
  }
  return checked_date(y, m, d, text);
}

std::string format_date(const Date& d) {
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(d.year()),
                     static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
}

Timestamp parse_timestamp(const std::string& text) {
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char sep = 0;
  int consumed = 0;
  if (std::sscanf(text.c_str(), "%4d-%2u-%2u%c%2u:%2u:%2u%n", &y, &mo, &d, &sep, &h, &mi,
                  &s, &consumed) != 7 ||
      (sep != 'T' && sep != ' ')) {
    throw InputError("expected ISO-8601 timestamp, got '" + text + "'");
  }
  const std::string rest = text.substr(static_cast<std::size_t>(consumed));
  if (!rest.empty() && rest != "Z") {
    throw InputError("unsupported timestamp suffix in '" + text + "'");
  }
  if (h > 23 || mi > 59 || s > 60) throw InputError("invalid time of day in '" + text + "'");
  const auto day = std::chrono::sys_days{checked_date(y, mo, d, text)};
  return Timestamp{day} + std::chrono::hours{h} + std::chrono::minutes{mi} +
         std::chrono::seconds{s};
}

std::string format_timestamp(Timestamp ts) {
  const auto day = std::chrono::floor<std::chrono::days>(ts);
  const std::chrono::hh_mm_ss tod{ts - day};
  return fmt::format("{}T{:02d}:{:02d}:{:02d}", format_date(Date{day}), tod.hours().count(),
                     tod.minutes().count(), tod.seconds().count());
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined value
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace netevo
