#pragma once

// Pattern-level algebra: admissibility, the spectral condition, reduction to
// the (I, J) form, and the constraint subspaces together with their
// orthogonal complements under the Hilbert-Schmidt pairing tr(A^T B).

#include <cstdint>
#include <vector>

#include "popdiff/ffalg.hpp"
#include "popdiff/guard.hpp"

namespace popdiff {

/// The four-point pattern {x, x+M1 d, x+M2 d, x+(M1+M2) d} over F_p^k.
struct PatternSpec {
  std::uint32_t p = 5;
  std::size_t k = 1;
  FpMatrix m1;
  FpMatrix m2;

  /// Validates shapes and the modulus.
  PatternSpec(FpMatrix first, FpMatrix second);
  static PatternSpec scalar(std::uint32_t p, std::int64_t a, std::int64_t b);

  /// J = M2 M1^{-1}; throws SingularError when M1 is singular.
  FpMatrix j() const;
};

bool check_admissible(const PatternSpec& spec);

/// True iff no two eigenvalues of M1 M2^{-1} are negatives of each other,
/// tested as gcd(Q(t), Q(-t)) = 1 for the minimal polynomial Q.
bool check_spectral(const PatternSpec& spec);

/// Spectral condition for a single matrix: gcd(Q(t), Q(-t)) = 1.
bool spectral_condition(const FpMatrix& a);

/// (M1, M2) -> (I, M2 M1^{-1}).
PatternSpec reduce_to_identity_form(const PatternSpec& spec);

/// What a coordinate vector of a SubspaceBasis is made of.
enum class Ambient {
  Vectors,    // blocks of F_p^k vectors
  Matrices,   // blocks of arbitrary k x k matrices
  Symmetric,  // blocks of symmetric k x k matrices
  Skew,       // blocks of skew-symmetric k x k matrices
};

const char* to_string(Ambient kind);

/// A subspace of (block space)^blocks stored as a linearly independent list of
/// flattened coordinate vectors. Matrices are flattened row-major.
class SubspaceBasis {
 public:
  /// Validates independence and ambient membership of every vector.
  SubspaceBasis(Ambient kind, std::size_t k, std::size_t blocks,
                std::uint32_t p, std::vector<Vec> basis);

  /// The whole ambient space with its standard basis.
  static SubspaceBasis full(Ambient kind, std::size_t k, std::size_t blocks,
                            std::uint32_t p);
  static SubspaceBasis zero(Ambient kind, std::size_t k, std::size_t blocks,
                            std::uint32_t p);
  /// Reduces an arbitrary spanning list to a basis.
  static SubspaceBasis span(Ambient kind, std::size_t k, std::size_t blocks,
                            std::uint32_t p, const std::vector<Vec>& vectors);

  Ambient kind() const { return kind_; }
  std::size_t k() const { return k_; }
  std::size_t blocks() const { return blocks_; }
  std::uint32_t modulus() const { return p_; }
  std::size_t block_len() const { return kind_ == Ambient::Vectors ? k_ : k_ * k_; }
  std::size_t coord_len() const { return blocks_ * block_len(); }
  std::size_t dim() const { return basis_.size(); }
  const std::vector<Vec>& basis() const { return basis_; }

  /// Whether v has the ambient shape (right length, symmetric/skew blocks).
  bool in_ambient(const Vec& v) const;
  bool contains(const Vec& v) const;
  bool contains(const SubspaceBasis& other) const;
  bool same_as(const SubspaceBasis& other) const;

  /// Every element of the subspace; throws TooLarge above the guard.
  std::vector<Vec> enumerate(const Guard& guard = {}) const;

 private:
  void check_compatible(const SubspaceBasis& other) const;

  Ambient kind_;
  std::size_t k_;
  std::size_t blocks_;
  std::uint32_t p_;
  std::vector<Vec> basis_;
};

/// Dimension of S_k or S'_k.
std::size_t symmetric_dim(std::size_t k);
std::size_t skew_dim(std::size_t k);

/// Standard bases of symmetric / skew k x k matrices.
std::vector<FpMatrix> symmetric_basis(std::size_t k, std::uint32_t p);
std::vector<FpMatrix> skew_basis(std::size_t k, std::uint32_t p);

struct ConstraintSpaces {
  FpMatrix j;
  /// R = (I+J)(I-J)^{-1}.
  FpMatrix r;
  /// J, I-J and I+J all invertible (the counting lemma hypothesis).
  bool admissible = false;
  SubspaceBasis xi;
  SubspaceBasis lambda;
  SubspaceBasis lambda_prime;
  SubspaceBasis psi;
  SubspaceBasis omega;
  SubspaceBasis omega_prime;
};

/// Builds all constraint subspaces for J. Requires I-J invertible (throws
/// SingularError otherwise); when J or I+J is singular the spaces are still
/// formed and `admissible` is false.
ConstraintSpaces constraint_spaces(const FpMatrix& j);

/// {v in ambient : <v, w> = 0 for all w in space}; throws NotContained when
/// space is not inside ambient.
SubspaceBasis orth_complement(const SubspaceBasis& space,
                              const SubspaceBasis& ambient);

/// Complement of `space` inside the full ambient of its own kind.
SubspaceBasis orth_complement(const SubspaceBasis& space);

/// A in span{I, A^2, ..., A^{2(k-1)}}.
bool in_algebra_of_square(const FpMatrix& a);

enum class Symmetry { Symmetric, Skew };

/// The space of (A1..A4) in (S_k)^4 or (S'_k)^4 annihilating every quadratic
/// pattern image for X, D in F_p^{k x n} and all nonzero n x n M of the given
/// symmetry. Exhaustive over (X, D); throws TooLarge when p^{2kn} exceeds the
/// guard.
SubspaceBasis annihilator_bruteforce(const FpMatrix& j, std::size_t n,
                                     Symmetry kind, const Guard& guard = {});

/// Claim-5.3 style coset test: (M1 - M4, M2 - M3) in Omega^perp.
bool coset_test(const Vec& tuple4, const SubspaceBasis& omega_perp);

}  // namespace popdiff
