#pragma once

// The rotated-square counterexample over F_5^n: the exact generic-direction
// core, the triangle hypergraphon used to dress dependent directions, and the
// final random affine assembly that handles the axis directions.
//
// Grid functions here live on (F_5^n)^2 with k = 2: row 0 of a grid point is
// x, row 1 is y.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "popdiff/analysis.hpp"
#include "popdiff/gridfn.hpp"
#include "popdiff/patterns.hpp"

namespace popdiff::cex {

inline constexpr std::uint32_t kP = 5;

struct DiagonalizedSquare {
  /// (x, y) -> (x - 2y, x + 2y).
  FpMatrix gamma;
  /// The rotated square as displayed: (x, y), (x+a, y+b), (x+b, y-a), ...
  PatternSpec rotated;
  /// (x, y), (x+a, y+b), (x+2a, y-2b), (x+3a, y-b).
  PatternSpec diagonal;
  bool gamma_invertible = false;
  /// gamma * M_i * gamma^{-1} equals the diagonal M_i for both i.
  bool conjugation_ok = false;
};

DiagonalizedSquare diagonalize_rotated_square();

/// The residues of the four points of the diagonal pattern relative to
/// (a, b): point i is (x + kA[i] a, y + kB[i] b).
inline constexpr std::array<int, 4> kA = {0, 1, 2, 3};
inline constexpr std::array<int, 4> kB = {0, 1, -2, -1};

struct CexCore {
  std::vector<std::array<Residue, 2>> s;
  /// 5-dimensional subspace of F_5^8.
  SubspaceBasis lambda2;
  /// Indicator of S indexed by 5 * u + v.
  std::array<bool, 25> g1{};

  bool in_s(Residue u, Residue v) const { return g1[5 * (u % 5) + (v % 5)]; }
};

/// Builds the core with its invariants checked. A different basis of the
/// same subspace may be supplied; it is validated against the defining
/// orthogonality relations.
CexCore make_core();
CexCore make_core(std::vector<Vec> lambda2_basis);

/// The three vectors spanning the orthogonal complement of Lambda2'.
std::vector<Vec> lambda2_constraints();

struct CoreTable {
  /// Indexed by the value of a.a in F_5.
  std::array<Rational, 5> by_shift;
  Rational sup;
  Rational mean_g1;
  /// sup < mean_g1^4.
  bool strict = false;
};

CoreTable core_expectation_table(const CexCore& core, const Guard& guard = {});

/// f1(x, y) = g1(x.x, x.y) on (F_5^n)^2, exact 0/1 values.
GridFunction build_f1(const CexCore& core, std::size_t n, const Guard& guard = {});

/// Pattern density of f1 along (a, b), counted directly from dot products so
/// that f1 never has to be stored.
Rational beta1(const CexCore& core, const Vec& a, const Vec& b, std::size_t n,
               const Guard& guard = {});

/// Joint law of the eight dot products along the diagonal pattern for fixed
/// independent a, b. Throws DependentDirections otherwise.
EquidistributionReport eight_tuple_distribution(const CexCore& core, const Vec& a,
                                                const Vec& b, std::size_t n,
                                                const Guard& guard = {});

/// Offset of the coset predicted for the eight-tuple.
Vec eight_tuple_shift(const Vec& a, const Vec& b);

enum class Ap3Method { ExhaustiveMax, Greedy, Behrend };

const char* to_string(Ap3Method method);

/// True when t1 + t2 = 2 t3 (mod L) forces t1 = t2 = t3.
bool is_ap3_free(const std::vector<std::uint32_t>& set, std::uint32_t modulus);

/// A validated 3-AP-free subset of Z/LZ in increasing order.
std::vector<std::uint32_t> ap3_free_set(std::uint32_t modulus, Ap3Method method);

/// Tripartite triangle hypergraph on three copies of Z/LZ whose triangles are
/// (s, s+t, s+2t) for t in the given set.
class Hypergraphon {
 public:
  /// Throws InvalidArgument unless the set is 3-AP-free, and unless every
  /// edge lies in exactly one triangle.
  Hypergraphon(std::uint32_t modulus, std::vector<std::uint32_t> set);

  std::uint32_t modulus() const { return l_; }
  const std::vector<std::uint32_t>& set() const { return set_; }
  const std::vector<std::array<std::uint32_t, 3>>& triangles() const { return triangles_; }

  bool cell(std::uint32_t u, std::uint32_t v, std::uint32_t w) const {
    return cells_[(static_cast<std::size_t>(u) * l_ + v) * l_ + w] != 0;
  }
  /// Cell of a real coordinate in [0, 1): floor(L u) mod L.
  std::uint32_t cell_of(double u) const;
  double g2(double u, double v, double w) const;

  /// Every edge of each bipartite part lies in exactly one triangle, and the
  /// triangles of the underlying graph are exactly the listed ones.
  bool unique_triangles() const;

 private:
  std::uint32_t l_;
  std::vector<std::uint32_t> set_;
  std::vector<std::array<std::uint32_t, 3>> triangles_;
  std::vector<std::uint8_t> cells_;
};

/// A product of g2 terms; each term names its (u, v, w) variables.
struct CellPattern {
  std::size_t u_vars = 0;
  std::size_t v_vars = 0;
  std::size_t w_vars = 0;
  std::vector<std::array<std::size_t, 3>> terms;
};

/// E over independent uniform cells of the product of g2 over the terms,
/// exact, by enumerating consistent choices of triangles.
Rational cell_pattern_expectation(const Hypergraphon& h, const CellPattern& pattern,
                                  const Guard& guard = {});

/// g(u0,v0,w0) g(u1,v0,w1) g(u0,v2,w2) g(u1,v2,w0).
CellPattern pattern_a();
/// g(u0,v0,w0) g(u1,v1,w1) g(u1,v2,w0) g(u3,v0,w1).
CellPattern pattern_b();

struct HypergraphExpectations {
  Rational mean_g2;
  Rational pattern_a;
  Rational pattern_b;
  bool mean_identity = false;       // mean = |set| / L^2
  bool pattern_a_identity = false;  // pattern A = |set| / L^6
  bool pattern_b_bound = false;     // pattern B <= L^-4
  bool unique_triangles = false;
};

/// Exhaustive; throws TooLarge above L = 30.
HypergraphExpectations hypergraph_expectations(const Hypergraphon& h,
                                               const Guard& guard = {});

enum class DirectionClass { Zero, AxisA, AxisB, Multiple, Generic };

const char* to_string(DirectionClass c);

/// Zero when a = b = 0, AxisA when only a = 0, AxisB when only b = 0,
/// Multiple when b = lambda a for some lambda != 0, Generic otherwise.
DirectionClass classify(const Vec& a, const Vec& b);

/// Seeded uniform in [0, 1) keyed by (seed, table, element).
double table_uniform(std::uint64_t seed, std::uint32_t table, std::uint64_t element);

/// h = f1 * F2 * F3 for the tables of one seed, exact 0/1 values.
GridFunction build_dressed(const GridFunction& f1, const Hypergraphon& h,
                           std::uint64_t seed, const Guard& guard = {});

/// E over the random tables of beta_h(a, b) divided by beta_1(a, b): the
/// product of the two cell-pattern expectations fixed by which table indices
/// coincide along the pattern.
Rational dressing_factor(const Hypergraphon& h, const Vec& a, const Vec& b,
                         const Guard& guard = {});

/// The two cell patterns behind dressing_factor (unprimed and primed tables).
std::array<CellPattern, 2> dressing_patterns(const Vec& a, const Vec& b);

struct MonteCarlo {
  double mean = 0;
  double se = 0;
  /// Resolution floor: quantum / sqrt(seeds). Used when the sample is
  /// degenerate at this size.
  double se_floor = 0;
  double effective_se = 0;
  double z = 0;
  bool within = false;  // |mean - predicted| <= 3 effective_se
};

MonteCarlo monte_carlo(const std::vector<double>& samples, double predicted,
                       double quantum);

struct DirectionMeasurement {
  Vec a;
  Vec b;
  DirectionClass cls = DirectionClass::Generic;
  Rational beta1;
  Rational factor;
  Rational predicted;
  MonteCarlo measured;
};

struct DressReport {
  std::size_t n = 0;
  std::uint32_t modulus = 0;
  std::uint64_t first_seed = 0;
  std::size_t seeds = 0;
  Rational mean_f1;
  Rational mean_g2;
  Rational alpha_predicted;
  MonteCarlo alpha;
  std::vector<double> alpha_samples;
  std::vector<DirectionMeasurement> directions;
};

/// Measures alpha_h and beta_h for the given directions over seeds
/// first_seed, first_seed + 1, ...
DressReport dress_and_measure(const CexCore& core, const Hypergraphon& h, std::size_t n,
                              std::uint64_t first_seed, std::size_t seeds,
                              const std::vector<std::pair<Vec, Vec>>& directions,
                              const Guard& guard = {});

/// Invertible affine map z -> A z + c of F_5^n with its inverse matrix.
struct AffineMap {
  FpMatrix linear;
  FpMatrix inverse;
  Vec shift;
};

AffineMap random_affine(std::size_t n, std::mt19937_64& rng);

/// T = {0,1,2}^gamma x F_5^{n-gamma}.
bool in_cube(const Vec& z, std::size_t gamma);

/// f(x, y) = h(x, y) 1[x in phi(y) T] 1[y in phi'(x) T].
GridFunction assemble(const GridFunction& hfun, std::size_t gamma, std::uint64_t seed,
                      const Guard& guard = {});

/// Exhaustive over x and d != 0 in F_5: x, x+d, x+2d, x+3d never all in {0,1,2}.
bool four_ap_free_012();
double cube_log_ratio();  // log(25/3) / log(5/3)

struct AssemblyDirection {
  Vec a;
  Vec b;
  DirectionClass cls = DirectionClass::Generic;
  Rational beta_h;
  Rational beta_f;
  /// beta^8 beta_h for generic directions, beta^8.15 for axis directions.
  double reference = 0;
};

struct AssemblyReport {
  std::size_t gamma = 0;
  std::uint64_t seed = 0;
  Rational beta;  // (3/5)^gamma
  Rational mean_h;
  Rational mean_f;
  Rational predicted_mean;  // beta^2 mean_h
  std::vector<AssemblyDirection> directions;
  bool four_ap_free = false;
  double log_ratio = 0;
  bool log_ratio_ok = false;
  /// (3/25)^g <= ((3/5)^g)^4.15 for g = 1..12.
  bool cube_bound_ok = false;
};

AssemblyReport final_assembly(const GridFunction& hfun, std::size_t gamma, std::uint64_t seed,
                              const std::vector<std::pair<Vec, Vec>>& directions = {},
                              const Guard& guard = {});

/// beta(a, b) * |G| for every (a, b) with a nonzero count, for a 0/1 function,
/// by enumerating pairs of support points. Keys are encoded grid points D.
std::vector<std::pair<std::uint64_t, std::uint64_t>> pattern_counts_sparse(
    const GridFunction& indicator, const Guard& guard = {});

struct DressingParams {
  std::uint64_t seed = 0;
  std::size_t n = 3;
  std::uint32_t modulus = 5;
  std::size_t gamma = 1;

  void validate() const;
  Rational cube_density() const;
};

struct ClassMax {
  DirectionClass cls = DirectionClass::Generic;
  std::uint64_t directions = 0;  // with a nonzero count
  double max_ratio = 0;          // beta / alpha^4
};

struct CexReport {
  DressingParams params;
  std::vector<std::uint32_t> set;
  // Certified exactly.
  CoreTable core;
  Rational core_ratio;  // sup / mean_g1^4
  HypergraphExpectations hypergraph;
  bool four_ap_free = false;
  double log_ratio = 0;
  // Measured on this instance.
  Rational alpha_f;
  std::uint64_t support = 0;
  std::vector<ClassMax> classes;
  double max_ratio_generic = 0;
  double max_ratio_all = 0;
  /// The constant of the full construction needs L and gamma far beyond this
  /// size; always false.
  bool full_constant_certified = false;
  std::string scope;
};

CexReport cex_report(const CexCore& core, const DressingParams& params,
                     const Guard& guard = {});

}  // namespace popdiff::cex
