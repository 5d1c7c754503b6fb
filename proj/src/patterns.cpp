#include "popdiff/patterns.hpp"

#include <algorithm>

#include "popdiff/linalg.hpp"
#include "popdiff/parallel.hpp"

namespace popdiff {

// ------------------------------------------------------------- PatternSpec

PatternSpec::PatternSpec(FpMatrix first, FpMatrix second)
    : p(first.modulus()), k(first.rows()), m1(std::move(first)),
      m2(std::move(second)) {
  require_odd_prime(p);
  if (!m1.is_square() || !m2.is_square() || m2.rows() != k || k == 0) {
    throw DimensionMismatch("pattern matrices must both be k x k");
  }
  if (m2.modulus() != p) throw DimensionMismatch("pattern moduli differ");
}

PatternSpec PatternSpec::scalar(std::uint32_t p, std::int64_t a,
                                std::int64_t b) {
  return PatternSpec(FpMatrix::scalar(1, a, p), FpMatrix::scalar(1, b, p));
}

FpMatrix PatternSpec::j() const { return m2 * mat_inverse(m1); }

bool check_admissible(const PatternSpec& spec) {
  return is_invertible(spec.m1) && is_invertible(spec.m2) &&
         is_invertible(spec.m1 - spec.m2) && is_invertible(spec.m1 + spec.m2);
}

bool spectral_condition(const FpMatrix& a) {
  const FpPoly q = min_poly(a);
  return poly_gcd(q, negate_argument(q)).degree() == 0;
}

bool check_spectral(const PatternSpec& spec) {
  return spectral_condition(spec.m1 * mat_inverse(spec.m2));
}

PatternSpec reduce_to_identity_form(const PatternSpec& spec) {
  return PatternSpec(FpMatrix::identity(spec.k, spec.p), spec.j());
}

// ------------------------------------------------------------ ambient data

const char* to_string(Ambient kind) {
  switch (kind) {
    case Ambient::Vectors: return "vectors";
    case Ambient::Matrices: return "matrices";
    case Ambient::Symmetric: return "symmetric";
    case Ambient::Skew: return "skew";
  }
  return "?";
}

std::size_t symmetric_dim(std::size_t k) { return k * (k + 1) / 2; }
std::size_t skew_dim(std::size_t k) { return k * (k - 1) / 2; }

std::vector<FpMatrix> symmetric_basis(std::size_t k, std::uint32_t p) {
  std::vector<FpMatrix> out;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      FpMatrix m(k, k, p);
      m(i, j) = 1;
      m(j, i) = 1;
      out.push_back(std::move(m));
    }
  }
  return out;
}

std::vector<FpMatrix> skew_basis(std::size_t k, std::uint32_t p) {
  std::vector<FpMatrix> out;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      FpMatrix m(k, k, p);
      m(i, j) = 1;
      m(j, i) = p - 1;
      out.push_back(std::move(m));
    }
  }
  return out;
}

namespace {

std::vector<Vec> block_basis(Ambient kind, std::size_t k, std::uint32_t p) {
  std::vector<Vec> out;
  switch (kind) {
    case Ambient::Vectors:
    case Ambient::Matrices: {
      const std::size_t len = kind == Ambient::Vectors ? k : k * k;
      for (std::size_t i = 0; i < len; ++i) {
        Vec v(len, 0);
        v[i] = 1;
        out.push_back(std::move(v));
      }
      break;
    }
    case Ambient::Symmetric:
      for (auto& m : symmetric_basis(k, p)) out.push_back(m.entries());
      break;
    case Ambient::Skew:
      for (auto& m : skew_basis(k, p)) out.push_back(m.entries());
      break;
  }
  return out;
}

Vec concat(std::initializer_list<const Vec*> parts) {
  Vec out;
  for (const Vec* v : parts) out.insert(out.end(), v->begin(), v->end());
  return out;
}

}  // namespace

// ----------------------------------------------------------- SubspaceBasis

SubspaceBasis::SubspaceBasis(Ambient kind, std::size_t k, std::size_t blocks,
                             std::uint32_t p, std::vector<Vec> basis)
    : kind_(kind), k_(k), blocks_(blocks), p_(p), basis_(std::move(basis)) {
  for (auto& v : basis_) {
    for (auto& x : v) x %= p_;
    if (!in_ambient(v)) {
      throw NotContained(std::string("basis vector outside the ") +
                         to_string(kind) + " ambient");
    }
  }
  if (span_rank(basis_, coord_len(), p_) != basis_.size()) {
    throw InvalidArgument("subspace basis vectors are linearly dependent");
  }
}

SubspaceBasis SubspaceBasis::full(Ambient kind, std::size_t k,
                                  std::size_t blocks, std::uint32_t p) {
  const auto per_block = block_basis(kind, k, p);
  const std::size_t len = kind == Ambient::Vectors ? k : k * k;
  std::vector<Vec> basis;
  for (std::size_t b = 0; b < blocks; ++b) {
    for (const auto& e : per_block) {
      Vec v(blocks * len, 0);
      std::copy(e.begin(), e.end(), v.begin() + static_cast<std::ptrdiff_t>(b * len));
      basis.push_back(std::move(v));
    }
  }
  return SubspaceBasis(kind, k, blocks, p, std::move(basis));
}

SubspaceBasis SubspaceBasis::zero(Ambient kind, std::size_t k,
                                  std::size_t blocks, std::uint32_t p) {
  return SubspaceBasis(kind, k, blocks, p, {});
}

SubspaceBasis SubspaceBasis::span(Ambient kind, std::size_t k,
                                  std::size_t blocks, std::uint32_t p,
                                  const std::vector<Vec>& vectors) {
  const std::size_t len = blocks * (kind == Ambient::Vectors ? k : k * k);
  return SubspaceBasis(kind, k, blocks, p, span_basis(vectors, len, p));
}

bool SubspaceBasis::in_ambient(const Vec& v) const {
  if (v.size() != coord_len()) return false;
  if (kind_ == Ambient::Vectors || kind_ == Ambient::Matrices) return true;
  for (std::size_t b = 0; b < blocks_; ++b) {
    const Residue* m = v.data() + b * k_ * k_;
    for (std::size_t i = 0; i < k_; ++i) {
      for (std::size_t j = i; j < k_; ++j) {
        const Residue a = m[i * k_ + j] % p_;
        const Residue t = m[j * k_ + i] % p_;
        if (kind_ == Ambient::Symmetric ? a != t : a != fp::neg(t, p_)) {
          return false;
        }
      }
    }
  }
  return true;
}

void SubspaceBasis::check_compatible(const SubspaceBasis& other) const {
  if (other.coord_len() != coord_len() || other.p_ != p_) {
    throw DimensionMismatch("subspaces live in different ambients");
  }
}

bool SubspaceBasis::contains(const Vec& v) const {
  if (v.size() != coord_len()) return false;
  return span_contains(basis_, {v}, coord_len(), p_);
}

bool SubspaceBasis::contains(const SubspaceBasis& other) const {
  check_compatible(other);
  return span_contains(basis_, other.basis_, coord_len(), p_);
}

bool SubspaceBasis::same_as(const SubspaceBasis& other) const {
  check_compatible(other);
  return dim() == other.dim() && contains(other) && other.contains(*this);
}

std::vector<Vec> SubspaceBasis::enumerate(const Guard& guard) const {
  guard.require(power_ld(p_, dim()), "subspace enumeration");
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < dim(); ++i) total *= p_;
  std::vector<Vec> out;
  out.reserve(total);
  Vec coeff(dim(), 0);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    Vec v(coord_len(), 0);
    for (std::size_t b = 0; b < dim(); ++b) {
      if (coeff[b] == 0) continue;
      for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = fp::add(v[i], fp::mul(coeff[b], basis_[b][i], p_), p_);
      }
    }
    out.push_back(std::move(v));
    for (std::size_t b = 0; b < dim(); ++b) {
      if (++coeff[b] < p_) break;
      coeff[b] = 0;
    }
  }
  return out;
}

// ------------------------------------------------------- subspace algebra

namespace {

// Kernel of a linear map restricted to a subspace, returned in ambient
// coordinates. `image(v)` must be linear in v.
template <class Map>
std::vector<Vec> kernel_within(const SubspaceBasis& domain, Map image) {
  const std::uint32_t p = domain.modulus();
  const auto& basis = domain.basis();
  if (basis.empty()) return {};
  std::vector<Vec> columns;
  for (const auto& b : basis) columns.push_back(image(b));
  const std::size_t out_len = columns.front().size();
  std::vector<Vec> rows(out_len, Vec(basis.size(), 0));
  for (std::size_t c = 0; c < basis.size(); ++c) {
    for (std::size_t r = 0; r < out_len; ++r) rows[r][c] = columns[c][r];
  }
  std::vector<Vec> out;
  for (const auto& coeffs : nullspace(rows, basis.size(), p)) {
    Vec v(domain.coord_len(), 0);
    for (std::size_t c = 0; c < basis.size(); ++c) {
      if (coeffs[c] == 0) continue;
      for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = fp::add(v[i], fp::mul(coeffs[c], basis[c][i], p), p);
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

SubspaceBasis orth_complement(const SubspaceBasis& space,
                              const SubspaceBasis& ambient) {
  if (space.coord_len() != ambient.coord_len() ||
      space.modulus() != ambient.modulus() || !ambient.contains(space)) {
    throw NotContained("space is not contained in the given ambient");
  }
  const std::uint32_t p = ambient.modulus();
  const auto vectors = kernel_within(ambient, [&](const Vec& v) {
    Vec out;
    out.reserve(space.dim());
    for (const auto& w : space.basis()) out.push_back(dot(v, w, p));
    return out.empty() ? Vec{0} : out;
  });
  return SubspaceBasis::span(ambient.kind(), ambient.k(), ambient.blocks(), p,
                             vectors);
}

SubspaceBasis orth_complement(const SubspaceBasis& space) {
  return orth_complement(
      space, SubspaceBasis::full(space.kind(), space.k(), space.blocks(),
                                 space.modulus()));
}

ConstraintSpaces constraint_spaces(const FpMatrix& j) {
  if (!j.is_square() || j.rows() == 0) {
    throw DimensionMismatch("J must be a nonempty square matrix");
  }
  const std::uint32_t p = j.modulus();
  const std::size_t k = j.rows();
  const FpMatrix id = FpMatrix::identity(k, p);
  if (!is_invertible(id - j)) {
    throw SingularError("I - J is singular; (I+J)(I-J)^{-1} is undefined");
  }
  const FpMatrix r = (id + j) * mat_inverse(id - j);
  const FpMatrix jt = j.transpose();

  // A J = J^T A. See the intertwining relation derived in the annihilator
  // argument: it is what makes A R inherit the symmetry class of A.
  auto xi_map = [&](const Vec& a) {
    const FpMatrix m(k, k, a, p);
    return (m * j - jt * m).entries();
  };
  auto xi_of = [&](Ambient kind) {
    return SubspaceBasis::span(
        kind, k, 1, p, kernel_within(SubspaceBasis::full(kind, k, 1, p), xi_map));
  };
  const SubspaceBasis xi = xi_of(Ambient::Matrices);
  const SubspaceBasis xi_sym = xi_of(Ambient::Symmetric);
  const SubspaceBasis xi_skew = xi_of(Ambient::Skew);

  auto lift4 = [&](const SubspaceBasis& base, Ambient kind) {
    std::vector<Vec> out;
    for (const auto& a : base.basis()) {
      const FpMatrix m(k, k, a, p);
      const Vec first = (-m).entries();
      const Vec second = (-(m * r)).entries();
      const Vec third = (m * r).entries();
      out.push_back(concat({&first, &second, &third, &a}));
    }
    return SubspaceBasis(kind, k, 4, p, std::move(out));
  };
  auto lift2 = [&](const SubspaceBasis& base, Ambient kind) {
    std::vector<Vec> out;
    for (const auto& a : base.basis()) {
      const FpMatrix m(k, k, a, p);
      const Vec first = (-m).entries();
      const Vec second = (-(m * r)).entries();
      out.push_back(concat({&first, &second}));
    }
    return SubspaceBasis(kind, k, 2, p, std::move(out));
  };

  // Psi: x1 - x2 - x3 + x4 = 0 and x4 - x2 - J(x2 - x1) = 0.
  auto psi_map = [&](const Vec& x) {
    Vec out(2 * k, 0);
    const Vec x1(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(k));
    Vec diff(k);
    for (std::size_t i = 0; i < k; ++i) {
      diff[i] = fp::sub(x[k + i], x[i], p);
    }
    const Vec jd = j.apply(diff);
    for (std::size_t i = 0; i < k; ++i) {
      Residue a = fp::sub(x[i], x[k + i], p);
      a = fp::sub(a, x[2 * k + i], p);
      out[i] = fp::add(a, x[3 * k + i], p);
      Residue b = fp::sub(x[3 * k + i], x[k + i], p);
      out[k + i] = fp::sub(b, jd[i], p);
    }
    return out;
  };
  const SubspaceBasis psi = SubspaceBasis::span(
      Ambient::Vectors, k, 4, p,
      kernel_within(SubspaceBasis::full(Ambient::Vectors, k, 4, p), psi_map));

  return ConstraintSpaces{
      j,
      r,
      is_invertible(j) && is_invertible(id + j),
      xi,
      lift4(xi_sym, Ambient::Symmetric),
      lift4(xi_skew, Ambient::Skew),
      psi,
      lift2(xi_sym, Ambient::Symmetric),
      lift2(xi_skew, Ambient::Skew),
  };
}

bool in_algebra_of_square(const FpMatrix& a) {
  if (!a.is_square()) throw DimensionMismatch("A must be square");
  const std::size_t k = a.rows();
  const FpMatrix sq = a * a;
  std::vector<Vec> powers;
  FpMatrix cur = FpMatrix::identity(k, a.modulus());
  for (std::size_t i = 0; i < std::max<std::size_t>(k, 1); ++i) {
    powers.push_back(cur.entries());
    cur = cur * sq;
  }
  return span_contains(powers, {a.entries()}, k * k, a.modulus());
}

SubspaceBasis annihilator_bruteforce(const FpMatrix& j, std::size_t n,
                                     Symmetry kind, const Guard& guard) {
  if (!j.is_square() || j.rows() == 0 || n == 0) {
    throw DimensionMismatch("annihilator needs square J and n >= 1");
  }
  const std::uint32_t p = j.modulus();
  const std::size_t k = j.rows();
  const std::size_t kn = k * n;
  guard.require(power_ld(p, 2 * kn), "annihilator_bruteforce");

  const Ambient amb = kind == Symmetry::Symmetric ? Ambient::Symmetric
                                                   : Ambient::Skew;
  const SubspaceBasis ambient = SubspaceBasis::full(amb, k, 4, p);
  const std::vector<FpMatrix> forms =
      kind == Symmetry::Symmetric ? symmetric_basis(n, p) : skew_basis(n, p);
  if (ambient.dim() == 0 || forms.empty()) return ambient;

  std::uint64_t points = 1;
  for (std::size_t i = 0; i < kn; ++i) points *= p;
  std::vector<FpMatrix> grid;
  grid.reserve(points);
  for (std::uint64_t idx = 0; idx < points; ++idx) {
    Vec e(kn);
    std::uint64_t t = idx;
    for (std::size_t d = 0; d < kn; ++d) {
      e[d] = static_cast<Residue>(t % p);
      t /= p;
    }
    grid.emplace_back(k, n, std::move(e), p);
  }
  const FpMatrix id = FpMatrix::identity(k, p);
  const FpMatrix ipj = id + j;

  const std::size_t m = ambient.dim();
  const std::uint64_t chunk = 64;
  std::vector<RowEchelon> partial(chunk_count(points, chunk),
                                  RowEchelon(m, p));
  for_each_chunk(points, chunk, [&](std::uint64_t c, std::uint64_t lo,
                                    std::uint64_t hi) {
    RowEchelon& ech = partial[c];
    for (std::uint64_t dx = lo; dx < hi && !ech.full(); ++dx) {
      const FpMatrix& d = grid[dx];
      const FpMatrix shifts[4] = {FpMatrix(k, n, p), d, j * d, ipj * d};
      for (std::uint64_t xi = 0; xi < points && !ech.full(); ++xi) {
        const FpMatrix& x = grid[xi];
        for (const auto& form : forms) {
          Vec w;
          w.reserve(4 * k * k);
          for (const auto& s : shifts) {
            const FpMatrix y = x + s;
            const Vec img = (y * form * y.transpose()).entries();
            w.insert(w.end(), img.begin(), img.end());
          }
          Vec row(m);
          for (std::size_t b = 0; b < m; ++b) {
            row[b] = dot(ambient.basis()[b], w, p);
          }
          ech.insert(std::move(row));
        }
      }
    }
  });
  RowEchelon merged(m, p);
  for (const auto& part : partial) {
    for (const auto& row : part.rows()) {
      if (merged.full()) break;
      merged.insert(row);
    }
  }

  std::vector<Vec> out;
  for (const auto& coeffs : nullspace(merged.rows(), m, p)) {
    Vec v(ambient.coord_len(), 0);
    for (std::size_t b = 0; b < m; ++b) {
      if (coeffs[b] == 0) continue;
      for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = fp::add(v[i], fp::mul(coeffs[b], ambient.basis()[b][i], p), p);
      }
    }
    out.push_back(std::move(v));
  }
  return SubspaceBasis::span(amb, k, 4, p, out);
}

bool coset_test(const Vec& tuple4, const SubspaceBasis& omega_perp) {
  const std::size_t len = omega_perp.block_len();
  const std::uint32_t p = omega_perp.modulus();
  if (tuple4.size() != 4 * len) {
    throw DimensionMismatch("expected a 4-block tuple");
  }
  Vec pair(2 * len);
  for (std::size_t i = 0; i < len; ++i) {
    pair[i] = fp::sub(tuple4[i], tuple4[3 * len + i], p);
    pair[len + i] = fp::sub(tuple4[len + i], tuple4[2 * len + i], p);
  }
  return omega_perp.contains(pair);
}

}  // namespace popdiff
