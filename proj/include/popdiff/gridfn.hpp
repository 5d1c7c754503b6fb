#pragma once

// Functions on G^k = (F_p^n)^k stored densely, symmetrized quadratic factors
// and their evaluation maps.
//
// A grid point X is a k x n matrix; its index is the base-p number whose digit
// at position i*n + j is X(i, j), so X(0, 0) is the least significant digit.
// The same order flattens X into a vector of F_p^{kn}.

#include <complex>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "popdiff/ffalg.hpp"
#include "popdiff/guard.hpp"
#include "popdiff/patterns.hpp"
#include "popdiff/rational.hpp"

namespace popdiff {

using Complex = std::complex<double>;

class GridShape {
 public:
  GridShape(std::uint32_t p, std::size_t k, std::size_t n);

  std::uint32_t p() const { return p_; }
  std::size_t k() const { return k_; }
  std::size_t n() const { return n_; }
  std::size_t digits() const { return k_ * n_; }
  std::uint64_t size() const { return size_; }
  /// p^d for d < digits().
  std::uint64_t place(std::size_t d) const { return place_[d]; }

  /// Throws TooLarge when the number of points exceeds the guard.
  void require_within(const Guard& guard, std::string_view what) const;

  std::uint64_t encode(std::span<const Residue> digits) const;
  std::uint64_t encode(const FpMatrix& x) const;
  Vec decode(std::uint64_t index) const;
  void decode_into(std::uint64_t index, Vec& digits) const;
  FpMatrix decode_matrix(std::uint64_t index) const;

  /// Digits of M * X for a k x k matrix M.
  Vec apply_left(const FpMatrix& m, std::span<const Residue> x) const;
  Vec add(std::span<const Residue> a, std::span<const Residue> b) const;
  Vec negate(std::span<const Residue> a) const;

  bool operator==(const GridShape& o) const {
    return p_ == o.p_ && k_ == o.k_ && n_ == o.n_;
  }

 private:
  std::uint32_t p_;
  std::size_t k_;
  std::size_t n_;
  std::uint64_t size_;
  std::vector<std::uint64_t> place_;
};

/// Walks X over an index range while tracking the indices of X + e for a
/// fixed list of offsets e, using an odometer with incremental updates.
class OffsetWalker {
 public:
  OffsetWalker(const GridShape& shape, std::vector<Vec> offsets);

  void seek(std::uint64_t index);
  /// Advances to the next index; false after the last point.
  bool next();
  std::uint64_t base() const { return base_; }
  std::uint64_t shifted(std::size_t i) const { return shifted_[i]; }
  const Vec& digits() const { return x_; }

 private:
  GridShape shape_;
  std::vector<Vec> offsets_;
  Vec x_;
  std::vector<Vec> shifted_digits_;
  std::uint64_t base_ = 0;
  std::vector<std::uint64_t> shifted_;
};

enum class ValueKind : std::uint8_t {
  ExactRational = 0,
  Float = 1,
  ComplexFloat = 2,
};

const char* to_string(ValueKind kind);

class GridFunction {
 public:
  using Storage = std::variant<std::vector<Rational>, std::vector<double>,
                               std::vector<Complex>>;

  GridFunction(GridShape shape, Storage values);

  static GridFunction constant(const GridShape& shape, const Rational& value,
                               const Guard& guard = {});
  static GridFunction zeros(const GridShape& shape, ValueKind kind,
                            const Guard& guard = {});

  const GridShape& shape() const { return shape_; }
  std::uint64_t size() const { return shape_.size(); }
  ValueKind kind() const { return static_cast<ValueKind>(values_.index()); }
  const Storage& storage() const { return values_; }

  /// Typed access; throws InvalidArgument for the wrong kind.
  const std::vector<Rational>& rationals() const;
  const std::vector<double>& reals() const;
  const std::vector<Complex>& complexes() const;
  std::vector<Rational>& rationals();
  std::vector<double>& reals();
  std::vector<Complex>& complexes();

  double real_at(std::uint64_t i) const;
  Complex complex_at(std::uint64_t i) const;

  /// Explicit conversions (never implicit).
  GridFunction to_float() const;
  GridFunction to_complex() const;

  /// Exact mean; only for the rational kind.
  Rational mean_exact() const;
  Complex mean() const;
  /// ||f||_2^2 = E|f|^2 as a double.
  double energy() const;

  bool in_unit_interval() const;
  bool one_bounded(double slack = 1e-12) const;
  /// Throws InvalidArgument unless values are real and lie in [0, 1].
  void require_unit_interval(std::string_view what) const;

  bool operator==(const GridFunction& o) const {
    return shape_ == o.shape_ && values_ == o.values_;
  }

 private:
  GridShape shape_;
  Storage values_;
};

/// Lists (r_i), (M_i symmetric), (N_j skew) over F_p^n.
struct QuadraticFactor {
  std::uint32_t p = 5;
  std::size_t n = 1;
  std::vector<Vec> linear;
  std::vector<FpMatrix> quadratic;
  std::vector<FpMatrix> skew;

  QuadraticFactor(std::uint32_t p, std::size_t n);
  QuadraticFactor(std::uint32_t p, std::size_t n, std::vector<Vec> linear,
                  std::vector<FpMatrix> quadratic, std::vector<FpMatrix> skew);

  /// Checks sizes and symmetry classes; throws on violation.
  void validate() const;
  std::size_t d1() const { return linear.size(); }
  std::size_t d2() const { return quadratic.size(); }
  std::size_t d3() const { return skew.size(); }
  /// This factor followed by the entries of `more`.
  QuadraticFactor refined(const QuadraticFactor& more) const;
};

struct FactorImage {
  std::vector<Vec> b1;
  std::vector<FpMatrix> b2;
  std::vector<FpMatrix> b3;
  bool operator==(const FactorImage& o) const = default;
};

/// Evaluates a factor on grid points of a fixed shape and packs the image
/// into coordinates: each b1 vector, then the upper triangle (with diagonal)
/// of each b2 matrix, then the strict upper triangle of each b3 matrix.
class FactorEvaluator {
 public:
  FactorEvaluator(const QuadraticFactor& factor, const GridShape& shape);

  const GridShape& shape() const { return shape_; }
  std::size_t coord_count() const { return coords_; }
  std::size_t linear_coords() const { return factor_.d1() * shape_.k(); }
  std::size_t quadratic_coords() const;
  std::size_t skew_coords() const;

  void coords(std::span<const Residue> x, Residue* out) const;
  Vec coords(std::span<const Residue> x) const;
  FactorImage image(std::span<const Residue> x) const;
  /// Base-p packing of coords(); requires p^coord_count() < 2^63.
  std::uint64_t key(std::span<const Residue> x) const;
  std::uint64_t key_of_coords(std::span<const Residue> c) const;

 private:
  QuadraticFactor factor_;
  GridShape shape_;
  std::size_t coords_;
};

FactorImage factor_eval(const QuadraticFactor& factor, const FpMatrix& x);

/// Largest r with independent linear part and every nontrivial combination of
/// the quadratic and skew matrices of rank >= r. Returns 0 for a dependent
/// linear part and n when there are no matrices at all.
std::size_t factor_rank(const QuadraticFactor& factor,
                        const Guard& guard = Guard{10'000'000});

/// Fibers of the evaluation map: atom id per grid point.
struct AtomPartition {
  std::vector<std::uint32_t> atom_of;
  std::vector<std::uint64_t> atom_size;
  std::vector<std::uint64_t> atom_key;
  std::size_t count() const { return atom_size.size(); }
};

AtomPartition atom_partition(const QuadraticFactor& factor,
                             const GridShape& shape, const Guard& guard = {});

/// E[f | factor]; rational in, rational out (float likewise).
GridFunction conditional_expectation(const GridFunction& f,
                                     const QuadraticFactor& factor,
                                     const Guard& guard = {});

/// True when f is constant on every atom.
bool is_measurable(const GridFunction& f, const QuadraticFactor& factor,
                   const Guard& guard = {});

struct LinearKernel {
  GridFunction indicator;
  /// Characters T with <T, D> = 0 for all D in H, as vectors of F_p^{kn}.
  SubspaceBasis annihilator;
  std::size_t linear_rank = 0;
};

/// H = {D : D r_i = 0 for all i} with density p^{-k * rank(r)}.
LinearKernel linear_kernel_H(const QuadraticFactor& factor,
                             const GridShape& shape, const Guard& guard = {});

/// g(x) = e_p(r^T x + x^T M x) for x the flattened grid point.
GridFunction phase_function(const GridShape& shape, const Vec& r,
                            const FpMatrix& m, const Guard& guard = {});

/// The factor obtained from the block decomposition of (r, M): the blocks r_i,
/// diagonal blocks M_ii, and the symmetric / skew parts of M_ij for i < j.
QuadraticFactor phase_factor(const GridShape& shape, const Vec& r,
                             const FpMatrix& m);

// Binary grid-function files ("PLGF").
void write_gridfn(const std::string& path, const GridFunction& f);
GridFunction read_gridfn(const std::string& path);
std::string encode_gridfn(const GridFunction& f);
GridFunction decode_gridfn(const std::string& bytes);

}  // namespace popdiff
