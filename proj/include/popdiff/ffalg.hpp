#pragma once

// Exact arithmetic over F_p for odd primes p: scalars, polynomials and dense
// matrices. No floating point anywhere in this module.

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "popdiff/error.hpp"

namespace popdiff {

using Residue = std::uint32_t;
using Vec = std::vector<Residue>;

/// Largest modulus accepted; primality is checked by trial division.
inline constexpr std::uint32_t kMaxModulus = 1'000'000;

// 128-bit accumulators (GCC/Clang extension)
__extension__ using Int128 = __int128;
__extension__ using UInt128 = unsigned __int128;

bool is_prime_u64(std::uint64_t n);

/// Throws InvalidModulus unless p is an odd prime no larger than kMaxModulus.
void require_odd_prime(std::uint32_t p);

namespace fp {

inline Residue reduce(std::int64_t v, std::uint32_t p) {
  const std::int64_t r = v % static_cast<std::int64_t>(p);
  return static_cast<Residue>(r < 0 ? r + p : r);
}
inline Residue add(Residue a, Residue b, std::uint32_t p) {
  const std::uint32_t s = a + b;
  return s >= p ? s - p : s;
}
inline Residue sub(Residue a, Residue b, std::uint32_t p) {
  return a >= b ? a - b : a + p - b;
}
inline Residue neg(Residue a, std::uint32_t p) { return a == 0 ? 0 : p - a; }
inline Residue mul(Residue a, Residue b, std::uint32_t p) {
  return static_cast<Residue>(static_cast<std::uint64_t>(a) * b % p);
}
Residue pow(Residue a, std::uint64_t e, std::uint32_t p);
/// Throws SingularError for a == 0.
Residue inv(Residue a, std::uint32_t p);

}  // namespace fp

/// An element of F_p carrying its modulus.
class FpScalar {
 public:
  FpScalar(std::int64_t value, std::uint32_t p);

  Residue value() const { return value_; }
  std::uint32_t modulus() const { return p_; }

  FpScalar operator+(const FpScalar& o) const;
  FpScalar operator-(const FpScalar& o) const;
  FpScalar operator*(const FpScalar& o) const;
  FpScalar operator-() const;
  FpScalar inverse() const;
  bool operator==(const FpScalar& o) const = default;

 private:
  struct Unchecked {};
  FpScalar(Residue v, std::uint32_t p, Unchecked) : value_(v), p_(p) {}
  void same_field(const FpScalar& o) const;

  Residue value_;
  std::uint32_t p_;
};

/// Polynomial over F_p, coefficients lowest degree first. The zero polynomial
/// has no coefficients; otherwise the leading coefficient is nonzero.
class FpPoly {
 public:
  explicit FpPoly(std::uint32_t p) : p_(p) {}
  FpPoly(std::vector<std::int64_t> coeffs, std::uint32_t p);

  static FpPoly from_residues(Vec coeffs, std::uint32_t p);
  static FpPoly monomial(std::size_t degree, std::uint32_t p);

  std::uint32_t modulus() const { return p_; }
  const Vec& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  Residue leading() const { return c_.empty() ? 0 : c_.back(); }
  Residue coeff(std::size_t i) const { return i < c_.size() ? c_[i] : 0; }
  Residue eval(Residue x) const;

  FpPoly monic() const;
  FpPoly operator+(const FpPoly& o) const;
  FpPoly operator-(const FpPoly& o) const;
  FpPoly operator*(const FpPoly& o) const;
  bool operator==(const FpPoly& o) const = default;

  /// Quotient and remainder; throws BothZero when dividing by zero.
  void divmod(const FpPoly& divisor, FpPoly& quotient,
              FpPoly& remainder) const;
  FpPoly operator%(const FpPoly& o) const;

  std::string to_string(char var = 't') const;

 private:
  void trim();
  Vec c_;
  std::uint32_t p_;
};

/// Dense row-major matrix over F_p.
class FpMatrix {
 public:
  FpMatrix() = default;
  FpMatrix(std::size_t rows, std::size_t cols, std::uint32_t p);
  FpMatrix(std::size_t rows, std::size_t cols, Vec entries, std::uint32_t p);

  /// Entries may be negative; they are reduced mod p.
  static FpMatrix from_rows(
      const std::vector<std::vector<std::int64_t>>& rows, std::uint32_t p);
  static FpMatrix from_rows(
      std::initializer_list<std::initializer_list<std::int64_t>> rows,
      std::uint32_t p);
  static FpMatrix identity(std::size_t n, std::uint32_t p);
  static FpMatrix scalar(std::size_t n, std::int64_t s, std::uint32_t p);
  static FpMatrix column(const Vec& v, std::uint32_t p);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint32_t modulus() const { return p_; }
  bool is_square() const { return rows_ == cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Residue operator()(std::size_t i, std::size_t j) const {
    return a_[i * cols_ + j];
  }
  Residue& operator()(std::size_t i, std::size_t j) {
    return a_[i * cols_ + j];
  }
  void set(std::size_t i, std::size_t j, std::int64_t v) {
    a_[i * cols_ + j] = fp::reduce(v, p_);
  }
  const Vec& entries() const { return a_; }
  Vec row(std::size_t i) const;

  FpMatrix operator+(const FpMatrix& o) const;
  FpMatrix operator-(const FpMatrix& o) const;
  FpMatrix operator*(const FpMatrix& o) const;
  FpMatrix operator-() const;
  FpMatrix scaled(Residue s) const;
  Vec apply(std::span<const Residue> v) const;
  FpMatrix transpose() const;
  Residue trace() const;
  bool is_zero() const;
  bool is_symmetric() const;
  bool is_skew() const;
  bool operator==(const FpMatrix& o) const = default;

  std::vector<std::vector<std::int64_t>> to_rows() const;
  std::string to_string() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::uint32_t p_ = 3;
  Vec a_;
};

/// Hilbert-Schmidt pairing tr(A^T B).
Residue hs_inner(const FpMatrix& a, const FpMatrix& b);
Residue dot(std::span<const Residue> a, std::span<const Residue> b,
            std::uint32_t p);

/// Inverse over F_p; throws SingularError.
FpMatrix mat_inverse(const FpMatrix& a);
bool is_invertible(const FpMatrix& a);
std::size_t mat_rank(const FpMatrix& a);
Residue mat_det(const FpMatrix& a);
FpMatrix mat_pow(const FpMatrix& a, std::uint64_t e);

/// Monic polynomial of least degree annihilating A, found as the first linear
/// dependence among I, A, A^2, ...
FpPoly min_poly(const FpMatrix& a);

/// q(A) for a square matrix A.
FpMatrix poly_eval(const FpPoly& q, const FpMatrix& a);

/// Monic gcd via the Euclidean algorithm; throws BothZero.
FpPoly poly_gcd(const FpPoly& f, const FpPoly& g);

/// f(-t): coefficient c_i becomes (-1)^i c_i. Not renormalised.
FpPoly negate_argument(const FpPoly& f);

}  // namespace popdiff
