#pragma once

// Pattern counts, popular differences, Gowers norms, the generalized von
// Neumann inequality and exhaustive equidistribution reports for factors.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "popdiff/gridfn.hpp"
#include "popdiff/patterns.hpp"

namespace popdiff {

/// Exact-rational counting for rational functions, Kahan-compensated doubles
/// otherwise.
enum class Backend { Exact, Float };

const char* to_string(Backend backend);
Backend backend_for(const GridFunction& f);

struct PatternValue {
  std::optional<Rational> exact;
  double value = 0;
};

/// E_X f(X) f(X+M1 D) f(X+M2 D) [f(X+(M1+M2) D)]; points is 3 or 4.
PatternValue pattern_count(const GridFunction& f, const PatternSpec& spec,
                           std::span<const Residue> d, int points = 4);

struct PatternCountReport {
  Backend backend = Backend::Float;
  int points = 4;
  double epsilon = 0;
  std::optional<Rational> alpha_exact;
  double alpha = 0;
  double threshold = 0;
  /// beta[d] for every encoded difference d, including d = 0.
  std::vector<double> beta;
  std::vector<Rational> beta_exact;  // exact backend only
  std::uint64_t argmax_d = 0;        // over nonzero d, smallest index on ties
  double max_beta = 0;
  std::uint64_t threshold_hits = 0;  // nonzero d with beta >= alpha^points - eps
};

PatternCountReport popular_search(const GridFunction& f, const PatternSpec& spec,
                                  double epsilon, int points = 4,
                                  const Guard& guard = {});

enum class GowersMode { Auto, Direct, Recursive };

/// ||f||_{U^s}. Direct expansion costs p^{(s+1)kn} 2^s steps; the recursion
/// over multiplicative derivatives costs about p^{s kn}. Auto picks direct
/// when it fits the guard.
double gowers_norm(const GridFunction& f, std::size_t s,
                   GowersMode mode = GowersMode::Auto, const Guard& guard = {});

struct VonNeumannResult {
  double lhs = 0;
  double rhs = 0;
  bool holds = false;
};

/// |E_{x,d} prod f_i(x + A_i d)| against min_i ||f_i||_{U^{s-1}}. Each A_i is
/// a kn x kn matrix acting on the flattened grid point.
VonNeumannResult von_neumann_check(const std::vector<GridFunction>& fs,
                                   const std::vector<FpMatrix>& autos,
                                   const Guard& guard = {});

struct EquidistributionReport {
  /// Every observed cell lies in the predicted support.
  bool support_ok = true;
  /// Theorem hypotheses hold, so the cell probability is a real prediction.
  bool prediction_reliable = true;
  std::size_t predicted_dim = 0;
  std::size_t ambient_dim = 0;
  Rational predicted_cell_probability = 1;
  /// Max over observed cells of |p^dim * prob - 1|.
  double max_multiplicative_deviation = 0;
  /// Min of p^dim * prob over predicted cells; 0 if one is never hit.
  double min_cell_ratio = 1;
  double max_cell_ratio = 1;
  std::uint64_t cells_observed = 0;
  bool full_support = true;
  /// Dimension of the span of observed cells in the ambient coordinates.
  std::size_t observed_span_dim = 0;
  std::uint64_t samples = 0;
};

/// Joint law of (r_i . x, x^T M_j x) over x in F_p^n. The prediction uses the
/// true image of the linear part, so dependent forms shrink predicted_dim.
EquidistributionReport linear_quadratic_distribution(
    const std::vector<Vec>& gamma, const std::vector<FpMatrix>& phi,
    std::size_t n, std::uint32_t p, const Guard& guard = {});

/// Joint law of the factor images at X, X+D, X+JD, X+(I+J)D over all pairs,
/// or over D in H = {D : D r_i = 0} when restrict_to_h is set.
EquidistributionReport pattern_tuple_distribution(const QuadraticFactor& factor,
                                                  const FpMatrix& j,
                                                  bool restrict_to_h,
                                                  const Guard& guard = {});

/// Joint law of (B(X), B(D), (X M_i D^T)_i, (X N_j D^T)_j) over (X, D).
EquidistributionReport abstract_atom_distribution(const QuadraticFactor& factor,
                                                  std::size_t k = 1,
                                                  const Guard& guard = {});

struct StructuredAverage {
  Rational lhs;
  Rational bound;
  /// 1 - (1 - tuple shortfall) / (1 + atom excess)^4.
  double tolerance = 0;
  double tuple_shortfall = 0;
  double atom_excess = 0;
  bool holds = false;
};

/// E_{X,D}[f(X) f(X+D) f(X+JD) f(X+(I+J)D) 1_H(D)] against
/// p^{-k d1} (E f)^4 (1 - tolerance), where the tolerance comes from the
/// measured deviation of the factor's atom and pattern-tuple laws.
StructuredAverage structured_pattern_average(const GridFunction& f,
                                             const QuadraticFactor& factor,
                                             const FpMatrix& j,
                                             const Guard& guard = {});

}  // namespace popdiff
