#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace flowgame {

/// Utility values in integer ticks at the instance's declared scale.
using Value = std::int64_t;
/// Integer (pre-scaled) metric distances.
using Distance = std::int64_t;

/// Dense graph node index. Users occupy [0, n), producers occupy [n, n + p).
using Node = std::uint32_t;

/// A user's follow set: sorted, duplicate-free node indices.
using Strategy = std::vector<Node>;

/// Per-user set of producer indices.
using SubjectSet = boost::dynamic_bitset<std::uint64_t>;

struct UserId {
  std::int64_t value = 0;
  auto operator<=>(const UserId&) const = default;
};

struct SubjectId {
  std::int64_t value = 0;
  auto operator<=>(const SubjectId&) const = default;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invariant-violating instance / configuration document.
class InstanceError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration would exceed the configured cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

inline std::vector<std::size_t> to_indices(const SubjectSet& set) {
  std::vector<std::size_t> out;
  out.reserve(set.count());
  for (auto i = set.find_first(); i != SubjectSet::npos; i = set.find_next(i))
    out.push_back(i);
  return out;
}

}  // namespace flowgame
