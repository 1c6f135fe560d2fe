#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wlda {

/// A point on the probability simplex: entries >= 0 summing to 1.
class SimplexVector {
 public:
  SimplexVector() = default;

  /// Validates the entries; throws InvalidArgument if any entry is negative
  /// or non-finite, or if the sum is more than `tolerance` away from 1.
  explicit SimplexVector(std::vector<double> entries, double tolerance = 1e-9);

  /// For producers that build the point by normalization (softmax, Dirichlet
  /// draws, convex mixing). No validation.
  static SimplexVector from_normalized(std::vector<double> entries) {
    SimplexVector s;
    s.entries_ = std::move(entries);
    return s;
  }

  static SimplexVector uniform(std::size_t dim);
  static SimplexVector vertex(std::size_t dim, std::size_t k);

  std::size_t size() const noexcept { return entries_.size(); }
  double operator[](std::size_t i) const noexcept { return entries_[i]; }
  std::span<const double> entries() const noexcept { return entries_; }
  const std::vector<double>& vec() const noexcept { return entries_; }

  friend bool operator==(const SimplexVector&, const SimplexVector&) = default;

 private:
  std::vector<double> entries_;
};

/// True when every entry is >= 0 and finite and the sum is within tolerance of 1.
bool is_on_simplex(std::span<const double> v, double tolerance = 1e-9) noexcept;

}  // namespace wlda
