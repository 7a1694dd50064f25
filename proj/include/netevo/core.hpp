#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace netevo {

/// Base error for everything thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input data or configuration (malformed files, invalid parameters).
/// The CLI maps this to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Opaque participant identifier, stable across semesters.
struct NodeId {
  std::uint64_t value = 0;

  constexpr NodeId() = default;
  constexpr explicit NodeId(std::uint64_t v) : value(v) {}

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

inline std::string to_string(NodeId id) { return std::to_string(id.value); }

/// Unordered node pair stored with lo < hi.
struct EdgePair {
  NodeId lo;
  NodeId hi;

  friend constexpr auto operator<=>(const EdgePair&, const EdgePair&) = default;
};

/// Canonicalizes (u, v); throws on a self-loop.
EdgePair make_pair_canonical(NodeId u, NodeId v);

enum class Label : std::uint8_t { Negative = 0, Positive = 1 };

inline constexpr int to_int(Label l) { return l == Label::Positive ? 1 : 0; }
inline constexpr Label label_from_bool(bool positive) {
  return positive ? Label::Positive : Label::Negative;
}

using Date = std::chrono::year_month_day;
using Timestamp = std::chrono::sys_seconds;

/// Parses YYYY-MM-DD.
Date parse_date(const std::string& text);
std::string format_date(const Date& d);

/// Parses ISO-8601 `YYYY-MM-DDThh:mm:ss` with an optional trailing `Z`
/// (a space separator is also accepted).
Timestamp parse_timestamp(const std::string& text);
std::string format_timestamp(Timestamp ts);

/// Derives an independent 64-bit seed for a named sub-stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

using Rng = std::mt19937_64;

}  // namespace netevo

template <>
struct std::hash<netevo::NodeId> {
  std::size_t operator()(netevo::NodeId id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};

template <>
struct std::hash<netevo::EdgePair> {
  std::size_t operator()(const netevo::EdgePair& e) const noexcept {
    return std::hash<std::uint64_t>{}(e.lo.value * 0x9E3779B97F4A7C15ULL ^ e.hi.value);
  }
};
