#pragma once

// Three-point patterns x, x + M1 d, x + M2 d over finite abelian groups:
// Bohr sets, the smoothed count against mu_B * mu_B, a regularity
// decomposition checked against its contracts, popular-difference search,
// and the lift from Z/pZ back to the box [N]^k.
//
// Groups are Z/NZ or (F_p^n)^k. Elements and characters are both encoded as
// indices in [0, |G|): for Z/NZ the residue itself, for (F_p^n)^k the grid
// index used by GridShape(p, k, n). The character xi pairs with x as
// e(<xi, x> / q) where q is N or p.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "popdiff/analysis.hpp"
#include "popdiff/ffalg.hpp"
#include "popdiff/gridfn.hpp"
#include "popdiff/rational.hpp"

namespace popdiff {

/// An endomorphism: a multiplier, or a k x k matrix acting on the rows of a
/// point of (F_p^n)^k. A multiplier on (F_p^n)^k acts as a scalar matrix.
class GroupMap {
 public:
  GroupMap(std::int64_t multiplier) : map_(multiplier) {}  // NOLINT
  GroupMap(FpMatrix matrix) : map_(std::move(matrix)) {}   // NOLINT

  bool is_multiplier() const { return std::holds_alternative<std::int64_t>(map_); }
  std::int64_t multiplier() const { return std::get<std::int64_t>(map_); }
  const FpMatrix& matrix() const { return std::get<FpMatrix>(map_); }
  std::string to_string() const;

 private:
  std::variant<std::int64_t, FpMatrix> map_;
};

class FiniteGroup {
 public:
  static FiniteGroup cyclic(std::uint64_t order);
  /// (F_p^n)^k.
  static FiniteGroup vector(std::uint32_t p, std::size_t k, std::size_t n);

  bool is_cyclic() const { return !shape_.has_value(); }
  std::uint64_t size() const { return size_; }
  /// N for Z/NZ, p otherwise. Character values are multiples of 1/modulus.
  std::uint64_t modulus() const { return q_; }
  /// Vector case only.
  const GridShape& shape() const;
  std::string describe() const;

  std::uint64_t add(std::uint64_t x, std::uint64_t y) const;
  std::uint64_t sub(std::uint64_t x, std::uint64_t y) const;
  std::uint64_t neg(std::uint64_t x) const;

  /// <xi, x> reduced into [0, modulus).
  std::uint64_t pairing(std::uint64_t xi, std::uint64_t x) const;

  std::uint64_t apply(const GroupMap& m, std::uint64_t x) const;
  /// The character xi o M, i.e. M^T xi.
  std::uint64_t apply_dual(const GroupMap& m, std::uint64_t xi) const;
  bool is_automorphism(const GroupMap& m) const;
  GroupMap difference(const GroupMap& a, const GroupMap& b) const;

  /// Throws DimensionMismatch or InvalidArgument when m cannot act here.
  void require_acts(const GroupMap& m) const;

 private:
  FiniteGroup() = default;

  std::optional<GridShape> shape_;
  std::uint64_t size_ = 0;
  std::uint64_t q_ = 0;
  FpMatrix as_matrix(const GroupMap& m) const;
};

/// A group with the pattern maps M1, M2. Construction checks that M1, M2 and
/// M1 - M2 are automorphisms and throws NotAutomorphism otherwise.
struct FiniteGroupSpec {
  FiniteGroup group;
  GroupMap m1;
  GroupMap m2;

  FiniteGroupSpec(FiniteGroup g, GroupMap first, GroupMap second);
  GroupMap difference() const { return group.difference(m1, m2); }
};

/// Distance of <xi, x> / q to the nearest integer, as the numerator over q.
inline std::uint64_t circle_numerator(std::uint64_t r, std::uint64_t q) {
  return std::min(r, q - r);
}

struct BohrSet {
  std::vector<std::uint64_t> frequencies;
  Rational radius;
  std::vector<std::uint64_t> elements;  // increasing
  std::vector<std::uint8_t> indicator;
  Rational measure;

  bool contains(std::uint64_t x) const { return indicator[x] != 0; }
  std::uint64_t count() const { return elements.size(); }
};

/// {x : ||<xi, x>/q|| < radius for every xi}, by exact comparison.
/// Requires 0 < radius <= 1/2.
BohrSet bohr_set(const FiniteGroup& g, std::vector<std::uint64_t> frequencies,
                 const Rational& radius, const Guard& guard = {});

/// mu_B * mu_B as a probability on G: weight(d) = pairs(d) / |B|^2 where
/// pairs(d) counts (b1, b2) in B^2 with b1 + b2 = d.
struct SmoothingMeasure {
  std::vector<std::uint64_t> pairs;
  std::uint64_t denominator = 0;
  std::vector<std::uint64_t> support;  // increasing

  Rational weight(std::uint64_t d) const { return Rational(pairs[d], denominator); }
  /// sup of the density against the uniform probability: |G| max weight.
  Rational density_sup(std::uint64_t group_size) const;
};

SmoothingMeasure smoothing_measure(const FiniteGroup& g, const BohrSet& b,
                                   const Guard& guard = {});

struct SmoothedCount {
  double direct = 0;
  double fourier = 0;
  std::optional<Rational> exact;  // direct form, rational input only
  double discrepancy = 0;         // |direct - fourier|
};

/// sum_d nu(d) E_x f(x) f(x + M1 d) f(x + M2 d) with nu = mu_B * mu_B,
/// evaluated as a direct convolution and as the character sum
/// sum f^(-xi2-xi3) f^(xi2) f^(xi3) mu_B~(M1^T xi2 + M2^T xi3)^2.
SmoothedCount smoothed_3pt_count(const FiniteGroupSpec& spec, const std::vector<double>& f,
                                 const BohrSet& b, const Guard& guard = {});
SmoothedCount smoothed_3pt_count(const FiniteGroupSpec& spec,
                                 const std::vector<Rational>& f, const BohrSet& b,
                                 const Guard& guard = {});

struct DerivedBohr {
  /// B(T', radius) with T' = {xi o M1} u {xi o M2}, duplicates removed.
  BohrSet set;
  /// Equal to {r : M1 r in B and M2 r in B} by exhaustive scan.
  bool matches_direct = false;
};

/// Needs M1 and M2 to be automorphisms; M1 - M2 is not involved.
DerivedBohr derived_bohr(const BohrSet& b, const FiniteGroup& g, const GroupMap& m1,
                         const GroupMap& m2, const Guard& guard = {});
DerivedBohr derived_bohr(const BohrSet& b, const FiniteGroupSpec& spec,
                         const Guard& guard = {});

/// Fourier coefficients f^(xi) = E_x f(x) e(-<xi, x>/q), by direct summation.
std::vector<Complex> fourier_transform(const FiniteGroup& g, const std::vector<double>& f,
                                       const Guard& guard = {});
/// f(x) = sum_xi c(xi) e(<xi, x>/q).
std::vector<Complex> inverse_fourier(const FiniteGroup& g, const std::vector<Complex>& c,
                                     const Guard& guard = {});

using GrowthFunction = std::function<double(double)>;

/// exp(t / 8).
double default_growth(double t);

struct DecomposeOptions {
  double epsilon = 0.2;
  /// Initial smoothing radius; stage s smooths at delta / 2^s.
  Rational delta = make_rational(1, 5);
  std::vector<std::uint64_t> initial_frequencies;
  GrowthFunction omega1 = default_growth;
  GrowthFunction omega2 = default_growth;
  /// Defaults to ceil(epsilon^-2 delta^-2).
  std::optional<std::uint64_t> max_stages;
};

struct RegularityDecomposition {
  std::vector<Rational> f1;
  std::vector<Rational> f2;
  std::vector<Rational> f3;
  std::vector<std::uint64_t> frequencies;  // T
  Rational smoothing_radius;
  double gamma1 = 0;  // Lipschitz radius
  double gamma2 = 0;  // Fourier threshold
  std::uint64_t stages = 0;

  // Contracts, measured on the returned functions.
  Rational mean_f;
  Rational mean_f1;
  bool f1_in_unit_interval = false;
  double f2_l2 = 0;
  double f3_fourier_sup = 0;
  double lipschitz_sup = 0;  // max |f1(x + r) - f1(x)| over r in B(T, gamma1)
  double lipschitz_constant = 0;  // lipschitz_sup / epsilon
  std::uint64_t lipschitz_set_size = 0;
  bool f2_one_bounded = false;
  bool f3_one_bounded = false;
  bool contracts_hold = false;
};

/// Iterates over stages until the contracts hold: T collects the initial
/// frequencies and the gamma2-large spectrum of f, f1 = f * mu_B * mu_B for
/// B = B(T, rho), f3 is the part of f - f1 on coefficients of size at most
/// gamma2, and f2 is the rest. Throws NonConvergent at the stage cap.
RegularityDecomposition regularity_decompose(const FiniteGroup& g,
                                             const std::vector<Rational>& f,
                                             const DecomposeOptions& options,
                                             const Guard& guard = {});

/// Re-measures the contracts on a decomposition (used by tests and the CLI).
void measure_contracts(const FiniteGroup& g, const std::vector<Rational>& f,
                       double epsilon, RegularityDecomposition& d,
                       const Guard& guard = {});

/// Exhaustive over d: beta(d) = #{x : x, x + M1 d, x + M2 d in A} / |G|.
/// Hits count nonzero d with beta >= alpha^3 - epsilon.
PatternCountReport popular_3pt_search(const FiniteGroupSpec& spec,
                                      const std::vector<std::uint8_t>& indicator,
                                      double epsilon, const Guard& guard = {});

using IntMatrix = std::vector<std::vector<std::int64_t>>;

BigInt integer_det(const IntMatrix& m);

/// Smallest prime above n.
std::uint64_t next_prime(std::uint64_t n);

struct LiftOptions {
  Rational epsilon = make_rational(1, 5);
  /// When the prime window (N, (1 + eps/k) N) is empty, widen it to the next
  /// prime and report; otherwise throw NoPrimeInWindow.
  bool widen = true;
  /// Keep at most this many audited triples in the report.
  std::size_t keep_triples = 1000;
};

struct LiftedTriple {
  std::vector<std::int64_t> x;
  std::vector<std::int64_t> second;  // x + M1 d
  std::vector<std::int64_t> third;   // x + M2 d
};

struct LiftReport {
  std::uint64_t n = 0;  // box side; the box is {0, ..., N-1}^k
  std::size_t k = 0;
  Rational epsilon;
  std::uint64_t prime = 0;
  Rational window_epsilon;  // equals epsilon unless widened
  bool widened = false;
  Rational bohr_radius;     // eps / (2k)
  std::uint64_t bohr_size = 0;
  std::uint64_t candidates = 0;  // nonzero d in B + B with certified offsets
  double alpha = 0;              // |A| / N^k
  std::vector<std::int64_t> best_d;
  std::vector<std::int64_t> offset1;  // M1 d over Z
  std::vector<std::int64_t> offset2;  // M2 d over Z
  std::uint64_t modp_count = 0;       // x in (Z/pZ)^k with the pattern in A mod p
  std::uint64_t boundary_discarded = 0;
  std::uint64_t lifted = 0;
  std::uint64_t audit_failures = 0;
  std::vector<LiftedTriple> triples;
};

/// A is given by its members, each a point of {0, ..., N-1}^k.
LiftReport lift_to_interval(std::uint64_t n, const std::vector<std::vector<std::int64_t>>& a,
                            const IntMatrix& m1, const IntMatrix& m2,
                            const LiftOptions& options = {}, const Guard& guard = {});

}  // namespace popdiff
