#pragma once

// Histogram summaries shared by the exhaustive equidistribution reports.

#include <cmath>
#include <functional>
#include <limits>
#include <unordered_map>

#include "popdiff/analysis.hpp"
#include "popdiff/linalg.hpp"

namespace popdiff::detail {

struct VecHash {
  std::size_t operator()(const Vec& v) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (Residue x : v) h = (h ^ x) * 1099511628211ULL;
    return static_cast<std::size_t>(h);
  }
};

using Histogram = std::unordered_map<Vec, std::uint64_t, VecHash>;

inline void merge_into(Histogram& into, const Histogram& from) {
  for (const auto& [cell, count] : from) into[cell] += count;
}

struct SupportModel {
  std::size_t predicted_dim = 0;
  std::size_t ambient_dim = 0;
  std::function<bool(const Vec&)> contains;
  /// Cell key -> vector in the ambient coordinates used for the span.
  std::function<Vec(const Vec&)> ambient;
};

inline EquidistributionReport summarize(const Histogram& hist, std::uint64_t samples,
                                 std::uint32_t p, const SupportModel& model) {
  EquidistributionReport r;
  r.samples = samples;
  r.predicted_dim = model.predicted_dim;
  r.ambient_dim = model.ambient_dim;
  BigInt cells = 1;
  for (std::size_t i = 0; i < model.predicted_dim; ++i) cells *= p;
  r.predicted_cell_probability = Rational(BigInt(1), cells);
  const long double scale = power_ld(p, model.predicted_dim) / static_cast<long double>(samples);

  RowEchelon span(model.ambient_dim, p);
  std::uint64_t inside = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  double max_ratio = 0;
  for (const auto& [cell, count] : hist) {
    const double ratio = static_cast<double>(static_cast<long double>(count) * scale);
    max_ratio = std::max(max_ratio, ratio);
    r.max_multiplicative_deviation = std::max(r.max_multiplicative_deviation, std::abs(ratio - 1));
    if (model.contains(cell)) {
      ++inside;
      min_ratio = std::min(min_ratio, ratio);
    } else {
      r.support_ok = false;
    }
    if (!span.full()) span.insert(model.ambient(cell));
  }
  r.cells_observed = hist.size();
  r.observed_span_dim = span.rank();
  r.full_support = cells == BigInt(inside);
  r.min_cell_ratio = r.full_support ? min_ratio : 0.0;
  r.max_cell_ratio = max_ratio;
  return r;
}

}  // namespace popdiff::detail
