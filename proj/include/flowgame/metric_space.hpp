#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "flowgame/types.hpp"

namespace flowgame {

/// Finite integer metric over labelled points. Only the matrix shape is
/// checked on construction; use check_metric for the axioms.
class MetricSpace {
 public:
  MetricSpace() = default;

  MetricSpace(std::vector<std::int64_t> points,
              std::vector<std::vector<Distance>> matrix)
      : points_(std::move(points)), matrix_(std::move(matrix)) {
    if (matrix_.size() != points_.size())
      throw InstanceError("metric.matrix: expected " +
                          std::to_string(points_.size()) + " rows, got " +
                          std::to_string(matrix_.size()));
    for (std::size_t i = 0; i < matrix_.size(); ++i) {
      if (matrix_[i].size() != points_.size())
        throw InstanceError("metric.matrix[" + std::to_string(i) +
                            "]: expected " + std::to_string(points_.size()) +
                            " columns");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!index_.emplace(points_[i], i).second)
        throw InstanceError("metric.points[" + std::to_string(i) +
                            "]: duplicate point id " +
                            std::to_string(points_[i]));
    }
  }

  std::size_t size() const { return points_.size(); }
  Distance operator()(std::size_t a, std::size_t b) const { return matrix_[a][b]; }
  std::int64_t point_id(std::size_t i) const { return points_[i]; }
  const std::vector<std::int64_t>& points() const { return points_; }
  const std::vector<std::vector<Distance>>& matrix() const { return matrix_; }

  std::optional<std::size_t> index_of(std::int64_t id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Sorted distinct values of d over all ordered pairs, including 0.
  std::vector<Distance> distinct_distances() const {
    std::vector<Distance> out;
    for (const auto& row : matrix_) out.insert(out.end(), row.begin(), row.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Points within distance `radius` of `center`, ascending.
  std::vector<std::size_t> ball(std::size_t center, Distance radius) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size(); ++i)
      if (matrix_[center][i] <= radius) out.push_back(i);
    return out;
  }

  bool operator==(const MetricSpace& other) const {
    return points_ == other.points_ && matrix_ == other.matrix_;
  }

 private:
  std::vector<std::int64_t> points_;
  std::vector<std::vector<Distance>> matrix_;
  std::unordered_map<std::int64_t, std::size_t> index_;
};

struct MetricViolation {
  enum class Kind { negative, nonzero_diagonal, asymmetric, triangle, coincident };
  Kind kind;
  // Offending point indices; unused slots repeat the last one.
  std::size_t a = 0, b = 0, c = 0;

  std::string describe(const MetricSpace& space) const {
    auto id = [&](std::size_t i) { return std::to_string(space.point_id(i)); };
    switch (kind) {
      case Kind::negative:
        return "negative distance d(" + id(a) + "," + id(b) + ")";
      case Kind::nonzero_diagonal:
        return "nonzero self-distance d(" + id(a) + "," + id(a) + ")";
      case Kind::asymmetric:
        return "asymmetric d(" + id(a) + "," + id(b) + ") != d(" + id(b) + "," + id(a) + ")";
      case Kind::triangle:
        return "triangle inequality fails: d(" + id(a) + "," + id(c) + ") > d(" + id(a) +
               "," + id(b) + ") + d(" + id(b) + "," + id(c) + ")";
      case Kind::coincident:
        return "distinct points " + id(a) + " and " + id(b) + " at distance 0";
    }
    return "metric violation";
  }
};

/// Verifies non-negativity, zero diagonal, symmetry and the triangle
/// inequality; returns the first violation found in index order.
inline std::optional<MetricViolation> check_metric(const MetricSpace& d) {
  using K = MetricViolation::Kind;
  const std::size_t n = d.size();
  for (std::size_t a = 0; a < n; ++a) {
    if (d(a, a) != 0) return MetricViolation{K::nonzero_diagonal, a, a, a};
    for (std::size_t b = 0; b < n; ++b) {
      if (d(a, b) < 0) return MetricViolation{K::negative, a, b, b};
      if (d(a, b) != d(b, a)) return MetricViolation{K::asymmetric, a, b, b};
    }
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        if (d(a, c) > d(a, b) + d(b, c)) return MetricViolation{K::triangle, a, b, c};
  return std::nullopt;
}

/// Distinct points at distance 0 fall under the subject granularity.
inline std::optional<MetricViolation> find_coincident_points(const MetricSpace& d) {
  for (std::size_t a = 0; a < d.size(); ++a)
    for (std::size_t b = a + 1; b < d.size(); ++b)
      if (d(a, b) == 0)
        return MetricViolation{MetricViolation::Kind::coincident, a, b, b};
  return std::nullopt;
}

}  // namespace flowgame
