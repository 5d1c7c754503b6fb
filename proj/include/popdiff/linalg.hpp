#pragma once

// Subspace utilities over F_p on plain coordinate vectors.

#include <cstdint>
#include <optional>
#include <vector>

#include "popdiff/ffalg.hpp"

namespace popdiff {

/// Incrementally built reduced row-echelon basis of a subspace of F_p^m.
class RowEchelon {
 public:
  RowEchelon(std::size_t dim, std::uint32_t p);

  std::size_t ambient_dim() const { return dim_; }
  std::uint32_t modulus() const { return p_; }
  std::size_t rank() const { return rows_.size(); }
  bool full() const { return rows_.size() == dim_; }

  /// Adds v to the span; returns true when the rank grew.
  bool insert(Vec v);
  bool contains(Vec v) const;
  /// The reduced basis rows (pivot entries equal to 1).
  const std::vector<Vec>& rows() const { return rows_; }
  const std::vector<std::size_t>& pivots() const { return pivots_; }

  /// Coordinates of v in terms of rows(), or nullopt if v is outside the span.
  std::optional<Vec> coordinates(Vec v) const;

 private:
  // Reduces v against the current rows in place and returns the leftover.
  void reduce(Vec& v, Vec* coords) const;

  std::size_t dim_;
  std::uint32_t p_;
  std::vector<Vec> rows_;
  std::vector<std::size_t> pivots_;
};

/// Basis of {x in F_p^cols : A x = 0} where A is given by its rows.
std::vector<Vec> nullspace(const std::vector<Vec>& rows, std::size_t cols,
                           std::uint32_t p);

/// Rank of the span of the given vectors.
std::size_t span_rank(const std::vector<Vec>& vectors, std::size_t dim,
                      std::uint32_t p);

/// Linearly independent subset spanning the same space (reduced form).
std::vector<Vec> span_basis(const std::vector<Vec>& vectors, std::size_t dim,
                            std::uint32_t p);

/// True when every vector of `inner` lies in span(outer).
bool span_contains(const std::vector<Vec>& outer,
                   const std::vector<Vec>& inner, std::size_t dim,
                   std::uint32_t p);

/// Subspace equality decided by double containment.
bool same_span(const std::vector<Vec>& a, const std::vector<Vec>& b,
               std::size_t dim, std::uint32_t p);

/// Intersection of two subspaces given by spanning sets.
std::vector<Vec> span_intersection(const std::vector<Vec>& a,
                                   const std::vector<Vec>& b, std::size_t dim,
                                   std::uint32_t p);

}  // namespace popdiff
