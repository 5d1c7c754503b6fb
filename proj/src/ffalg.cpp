#include "popdiff/ffalg.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

namespace popdiff {

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  constexpr std::uint64_t kBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (std::uint64_t b : kBases) {
    if (n % b == 0) return n == b;
  }
  using u128 = UInt128;
  auto mulmod = [n](std::uint64_t a, std::uint64_t b) {
    return static_cast<std::uint64_t>(static_cast<u128>(a) * b % n);
  };
  auto powmod = [&](std::uint64_t a, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e) {
      if (e & 1) r = mulmod(r, a);
      a = mulmod(a, a);
      e >>= 1;
    }
    return r;
  };
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // these twelve bases are a deterministic witness set below 2^64
  for (std::uint64_t b : kBases) {
    std::uint64_t x = powmod(b, d);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s && composite; ++r) {
      x = mulmod(x, x);
      if (x == n - 1) composite = false;
    }
    if (composite) return false;
  }
  return true;
}

void require_odd_prime(std::uint32_t p) {
  if (p == 2) throw InvalidModulus("p = 2 is not supported; p must be odd");
  if (p > kMaxModulus) {
    throw InvalidModulus("modulus " + std::to_string(p) + " exceeds " +
                         std::to_string(kMaxModulus));
  }
  if (!is_prime_u64(p)) {
    throw InvalidModulus(std::to_string(p) + " is not prime");
  }
}

namespace fp {

Residue pow(Residue a, std::uint64_t e, std::uint32_t p) {
  Residue r = 1 % p;
  Residue b = a % p;
  while (e) {
    if (e & 1) r = mul(r, b, p);
    b = mul(b, b, p);
    e >>= 1;
  }
  return r;
}

Residue inv(Residue a, std::uint32_t p) {
  if (a % p == 0) throw SingularError("zero has no inverse mod p");
  // extended Euclid keeps this cheap even for p near the limit
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = p, new_r = a % p;
  while (new_r != 0) {
    const std::int64_t q = r / new_r;
    t = std::exchange(new_t, t - q * new_t);
    r = std::exchange(new_r, r - q * new_r);
  }
  return reduce(t, p);
}

}  // namespace fp

// ---------------------------------------------------------------- FpScalar

FpScalar::FpScalar(std::int64_t value, std::uint32_t p)
    : value_(0), p_(p) {
  require_odd_prime(p);
  value_ = fp::reduce(value, p);
}

void FpScalar::same_field(const FpScalar& o) const {
  if (o.p_ != p_) throw DimensionMismatch("scalars from different fields");
}

FpScalar FpScalar::operator+(const FpScalar& o) const {
  same_field(o);
  return {fp::add(value_, o.value_, p_), p_, Unchecked{}};
}
FpScalar FpScalar::operator-(const FpScalar& o) const {
  same_field(o);
  return {fp::sub(value_, o.value_, p_), p_, Unchecked{}};
}
FpScalar FpScalar::operator*(const FpScalar& o) const {
  same_field(o);
  return {fp::mul(value_, o.value_, p_), p_, Unchecked{}};
}
FpScalar FpScalar::operator-() const {
  return {fp::neg(value_, p_), p_, Unchecked{}};
}
FpScalar FpScalar::inverse() const {
  return {fp::inv(value_, p_), p_, Unchecked{}};
}

// ------------------------------------------------------------------ FpPoly

FpPoly::FpPoly(std::vector<std::int64_t> coeffs, std::uint32_t p) : p_(p) {
  c_.reserve(coeffs.size());
  for (auto v : coeffs) c_.push_back(fp::reduce(v, p));
  trim();
}

FpPoly FpPoly::from_residues(Vec coeffs, std::uint32_t p) {
  FpPoly f(p);
  f.c_ = std::move(coeffs);
  for (auto& v : f.c_) v %= p;
  f.trim();
  return f;
}

FpPoly FpPoly::monomial(std::size_t degree, std::uint32_t p) {
  FpPoly f(p);
  f.c_.assign(degree + 1, 0);
  f.c_.back() = 1;
  return f;
}

void FpPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Residue FpPoly::eval(Residue x) const {
  Residue acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
    acc = fp::add(fp::mul(acc, x, p_), *it, p_);
  }
  return acc;
}

FpPoly FpPoly::monic() const {
  if (is_zero()) return *this;
  const Residue s = fp::inv(leading(), p_);
  FpPoly r(p_);
  r.c_.reserve(c_.size());
  for (auto v : c_) r.c_.push_back(fp::mul(v, s, p_));
  return r;
}

FpPoly FpPoly::operator+(const FpPoly& o) const {
  FpPoly r(p_);
  r.c_.assign(std::max(c_.size(), o.c_.size()), 0);
  for (std::size_t i = 0; i < r.c_.size(); ++i) {
    r.c_[i] = fp::add(coeff(i), o.coeff(i), p_);
  }
  r.trim();
  return r;
}

FpPoly FpPoly::operator-(const FpPoly& o) const {
  FpPoly r(p_);
  r.c_.assign(std::max(c_.size(), o.c_.size()), 0);
  for (std::size_t i = 0; i < r.c_.size(); ++i) {
    r.c_[i] = fp::sub(coeff(i), o.coeff(i), p_);
  }
  r.trim();
  return r;
}

FpPoly FpPoly::operator*(const FpPoly& o) const {
  FpPoly r(p_);
  if (is_zero() || o.is_zero()) return r;
  r.c_.assign(c_.size() + o.c_.size() - 1, 0);
  for (std::size_t i = 0; i < c_.size(); ++i) {
    for (std::size_t j = 0; j < o.c_.size(); ++j) {
      r.c_[i + j] = fp::add(r.c_[i + j], fp::mul(c_[i], o.c_[j], p_), p_);
    }
  }
  r.trim();
  return r;
}

void FpPoly::divmod(const FpPoly& divisor, FpPoly& quotient,
                    FpPoly& remainder) const {
  if (divisor.is_zero()) throw BothZero("polynomial division by zero");
  remainder = *this;
  quotient = FpPoly(p_);
  if (degree() < divisor.degree()) return;
  quotient.c_.assign(static_cast<std::size_t>(degree() - divisor.degree()) + 1,
                     0);
  const Residue lead_inv = fp::inv(divisor.leading(), p_);
  const auto dd = static_cast<std::size_t>(divisor.degree());
  while (!remainder.is_zero() && remainder.degree() >= divisor.degree()) {
    const auto shift = static_cast<std::size_t>(remainder.degree()) - dd;
    const Residue q = fp::mul(remainder.leading(), lead_inv, p_);
    quotient.c_[shift] = q;
    for (std::size_t i = 0; i <= dd; ++i) {
      auto& slot = remainder.c_[shift + i];
      slot = fp::sub(slot, fp::mul(q, divisor.c_[i], p_), p_);
    }
    remainder.trim();
  }
  quotient.trim();
}

FpPoly FpPoly::operator%(const FpPoly& o) const {
  FpPoly q(p_), r(p_);
  divmod(o, q, r);
  return r;
}

std::string FpPoly::to_string(char var) const {
  if (is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (std::size_t i = c_.size(); i-- > 0;) {
    if (c_[i] == 0) continue;
    if (!first) out << " + ";
    first = false;
    if (i == 0 || c_[i] != 1) out << c_[i];
    if (i >= 1) out << var;
    if (i >= 2) out << '^' << i;
  }
  return out.str();
}

// ---------------------------------------------------------------- FpMatrix

FpMatrix::FpMatrix(std::size_t rows, std::size_t cols, std::uint32_t p)
    : rows_(rows), cols_(cols), p_(p), a_(rows * cols, 0) {
  require_odd_prime(p);
}

FpMatrix::FpMatrix(std::size_t rows, std::size_t cols, Vec entries,
                   std::uint32_t p)
    : rows_(rows), cols_(cols), p_(p), a_(std::move(entries)) {
  require_odd_prime(p);
  if (a_.size() != rows * cols) {
    throw DimensionMismatch("matrix entry count does not match shape");
  }
  for (auto& v : a_) v %= p;
}

FpMatrix FpMatrix::from_rows(
    const std::vector<std::vector<std::int64_t>>& rows, std::uint32_t p) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  FpMatrix m(r, c, p);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw DimensionMismatch("ragged matrix rows");
    for (std::size_t j = 0; j < c; ++j) m.set(i, j, rows[i][j]);
  }
  return m;
}

FpMatrix FpMatrix::from_rows(
    std::initializer_list<std::initializer_list<std::int64_t>> rows,
    std::uint32_t p) {
  std::vector<std::vector<std::int64_t>> v;
  for (const auto& r : rows) v.emplace_back(r);
  return from_rows(v, p);
}

FpMatrix FpMatrix::identity(std::size_t n, std::uint32_t p) {
  return scalar(n, 1, p);
}

FpMatrix FpMatrix::scalar(std::size_t n, std::int64_t s, std::uint32_t p) {
  FpMatrix m(n, n, p);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, s);
  return m;
}

FpMatrix FpMatrix::column(const Vec& v, std::uint32_t p) {
  return FpMatrix(v.size(), 1, v, p);
}

Vec FpMatrix::row(std::size_t i) const {
  return Vec(a_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
             a_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

namespace {
void require_same_shape(const FpMatrix& a, const FpMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() ||
      a.modulus() != b.modulus()) {
    throw DimensionMismatch("matrix shapes or moduli differ");
  }
}
void require_square(const FpMatrix& a, const char* what) {
  if (!a.is_square()) {
    throw DimensionMismatch(std::string(what) + " requires a square matrix");
  }
}
}  // namespace

FpMatrix FpMatrix::operator+(const FpMatrix& o) const {
  require_same_shape(*this, o);
  FpMatrix r = *this;
  for (std::size_t i = 0; i < a_.size(); ++i) {
    r.a_[i] = fp::add(a_[i], o.a_[i], p_);
  }
  return r;
}

FpMatrix FpMatrix::operator-(const FpMatrix& o) const {
  require_same_shape(*this, o);
  FpMatrix r = *this;
  for (std::size_t i = 0; i < a_.size(); ++i) {
    r.a_[i] = fp::sub(a_[i], o.a_[i], p_);
  }
  return r;
}

FpMatrix FpMatrix::operator*(const FpMatrix& o) const {
  if (cols_ != o.rows_ || p_ != o.p_) {
    throw DimensionMismatch("matrix product shape mismatch");
  }
  FpMatrix r(rows_, o.cols_, p_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t l = 0; l < cols_; ++l) {
      const Residue x = a_[i * cols_ + l];
      if (x == 0) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) {
        auto& slot = r.a_[i * o.cols_ + j];
        slot = fp::add(slot, fp::mul(x, o.a_[l * o.cols_ + j], p_), p_);
      }
    }
  }
  return r;
}

FpMatrix FpMatrix::operator-() const {
  FpMatrix r = *this;
  for (auto& v : r.a_) v = fp::neg(v, p_);
  return r;
}

FpMatrix FpMatrix::scaled(Residue s) const {
  FpMatrix r = *this;
  for (auto& v : r.a_) v = fp::mul(v, s % p_, p_);
  return r;
}

Vec FpMatrix::apply(std::span<const Residue> v) const {
  if (v.size() != cols_) throw DimensionMismatch("matrix-vector mismatch");
  Vec out(rows_, 0);
  for (std::size_t i = 0; i < rows_; ++i) {
    std::uint64_t acc = 0;
    for (std::size_t j = 0; j < cols_; ++j) {
      acc += static_cast<std::uint64_t>(a_[i * cols_ + j]) * v[j];
      if ((j & 15) == 15) acc %= p_;
    }
    out[i] = static_cast<Residue>(acc % p_);
  }
  return out;
}

FpMatrix FpMatrix::transpose() const {
  FpMatrix r(cols_, rows_, p_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) r.a_[j * rows_ + i] = (*this)(i, j);
  }
  return r;
}

Residue FpMatrix::trace() const {
  require_square(*this, "trace");
  Residue t = 0;
  for (std::size_t i = 0; i < rows_; ++i) t = fp::add(t, (*this)(i, i), p_);
  return t;
}

bool FpMatrix::is_zero() const {
  return std::all_of(a_.begin(), a_.end(), [](Residue v) { return v == 0; });
}

bool FpMatrix::is_symmetric() const {
  if (!is_square()) return false;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = i + 1; j < cols_; ++j) {
      if ((*this)(i, j) != (*this)(j, i)) return false;
    }
  }
  return true;
}

bool FpMatrix::is_skew() const {
  if (!is_square()) return false;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = i; j < cols_; ++j) {
      if ((*this)(i, j) != fp::neg((*this)(j, i), p_)) return false;
    }
  }
  return true;
}

std::vector<std::vector<std::int64_t>> FpMatrix::to_rows() const {
  std::vector<std::vector<std::int64_t>> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) out[i].push_back((*this)(i, j));
  }
  return out;
}

std::string FpMatrix::to_string() const {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < rows_; ++i) {
    out << (i ? ",[" : "[");
    for (std::size_t j = 0; j < cols_; ++j) out << (j ? "," : "") << (*this)(i, j);
    out << ']';
  }
  out << ']';
  return out.str();
}

// ------------------------------------------------------------ free algebra

Residue dot(std::span<const Residue> a, std::span<const Residue> b,
            std::uint32_t p) {
  if (a.size() != b.size()) throw DimensionMismatch("dot length mismatch");
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += static_cast<std::uint64_t>(a[i]) * b[i];
    if ((i & 15) == 15) acc %= p;
  }
  return static_cast<Residue>(acc % p);
}

Residue hs_inner(const FpMatrix& a, const FpMatrix& b) {
  require_same_shape(a, b);
  return dot(a.entries(), b.entries(), a.modulus());
}

namespace {

// Gauss-Jordan on a copy; returns rank and optionally the determinant.
struct Elimination {
  std::size_t rank = 0;
  Residue det = 0;
};

Elimination eliminate(FpMatrix m) {
  const std::uint32_t p = m.modulus();
  Elimination out;
  Residue det = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t piv = r;
    while (piv < m.rows() && m(piv, c) == 0) ++piv;
    if (piv == m.rows()) {
      det = 0;
      continue;
    }
    if (piv != r) {
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(r, j), m(piv, j));
      det = fp::neg(det, p);
    }
    det = fp::mul(det, m(r, c), p);
    const Residue inv = fp::inv(m(r, c), p);
    for (std::size_t i = r + 1; i < m.rows(); ++i) {
      if (m(i, c) == 0) continue;
      const Residue f = fp::mul(m(i, c), inv, p);
      for (std::size_t j = c; j < m.cols(); ++j) {
        m(i, j) = fp::sub(m(i, j), fp::mul(f, m(r, j), p), p);
      }
    }
    ++r;
  }
  out.rank = r;
  out.det = (m.is_square() && r == m.rows()) ? det : 0;
  return out;
}

}  // namespace

std::size_t mat_rank(const FpMatrix& a) {
  if (a.empty()) return 0;
  return eliminate(a).rank;
}

Residue mat_det(const FpMatrix& a) {
  require_square(a, "determinant");
  if (a.rows() == 0) return 1;
  return eliminate(a).det;
}

bool is_invertible(const FpMatrix& a) {
  return a.is_square() && mat_rank(a) == a.rows();
}

FpMatrix mat_inverse(const FpMatrix& a) {
  require_square(a, "inverse");
  const std::size_t n = a.rows();
  const std::uint32_t p = a.modulus();
  FpMatrix m = a;
  FpMatrix inv = FpMatrix::identity(n, p);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && m(piv, c) == 0) ++piv;
    if (piv == n) throw SingularError("matrix is not invertible mod p");
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(m(c, j), m(piv, j));
        std::swap(inv(c, j), inv(piv, j));
      }
    }
    const Residue s = fp::inv(m(c, c), p);
    for (std::size_t j = 0; j < n; ++j) {
      m(c, j) = fp::mul(m(c, j), s, p);
      inv(c, j) = fp::mul(inv(c, j), s, p);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || m(i, c) == 0) continue;
      const Residue f = m(i, c);
      for (std::size_t j = 0; j < n; ++j) {
        m(i, j) = fp::sub(m(i, j), fp::mul(f, m(c, j), p), p);
        inv(i, j) = fp::sub(inv(i, j), fp::mul(f, inv(c, j), p), p);
      }
    }
  }
  return inv;
}

FpMatrix mat_pow(const FpMatrix& a, std::uint64_t e) {
  require_square(a, "power");
  FpMatrix r = FpMatrix::identity(a.rows(), a.modulus());
  FpMatrix b = a;
  while (e) {
    if (e & 1) r = r * b;
    b = b * b;
    e >>= 1;
  }
  return r;
}

FpPoly min_poly(const FpMatrix& a) {
  require_square(a, "minimal polynomial");
  const std::uint32_t p = a.modulus();
  const std::size_t n = a.rows();
  const std::size_t len = n * n;
  // Krylov rows vec(A^j) kept in echelon form; `combo` tracks how each
  // reduced row is expressed in terms of the original powers.
  std::vector<Vec> reduced;
  std::vector<std::size_t> pivots;
  std::vector<Vec> combos;
  FpMatrix power = FpMatrix::identity(n, p);
  for (std::size_t j = 0; j <= n; ++j) {
    Vec v = power.entries();
    Vec combo(j + 1, 0);
    combo[j] = 1;
    for (std::size_t r = 0; r < reduced.size(); ++r) {
      const Residue f = v[pivots[r]];
      if (f == 0) continue;
      for (std::size_t i = 0; i < len; ++i) {
        v[i] = fp::sub(v[i], fp::mul(f, reduced[r][i], p), p);
      }
      for (std::size_t i = 0; i < combos[r].size(); ++i) {
        combo[i] = fp::sub(combo[i], fp::mul(f, combos[r][i], p), p);
      }
    }
    const auto nz = std::find_if(v.begin(), v.end(),
                                 [](Residue x) { return x != 0; });
    if (nz == v.end()) {
      // combo · (I, A, ..., A^j) = 0 with combo[j] = 1: monic already
      return FpPoly::from_residues(std::move(combo), p);
    }
    const auto piv = static_cast<std::size_t>(nz - v.begin());
    const Residue s = fp::inv(v[piv], p);
    for (auto& x : v) x = fp::mul(x, s, p);
    for (auto& x : combo) x = fp::mul(x, s, p);
    reduced.push_back(std::move(v));
    pivots.push_back(piv);
    combos.push_back(std::move(combo));
    power = power * a;
  }
  // Cayley-Hamilton guarantees a dependence by degree n.
  throw InvalidArgument("minimal polynomial search did not terminate");
}

FpMatrix poly_eval(const FpPoly& q, const FpMatrix& a) {
  require_square(a, "polynomial evaluation");
  FpMatrix acc(a.rows(), a.cols(), a.modulus());
  const auto& c = q.coeffs();
  for (std::size_t i = c.size(); i-- > 0;) {
    acc = acc * a + FpMatrix::scalar(a.rows(), c[i], a.modulus());
  }
  return acc;
}

FpPoly poly_gcd(const FpPoly& f, const FpPoly& g) {
  if (f.modulus() != g.modulus()) {
    throw DimensionMismatch("polynomials over different fields");
  }
  if (f.is_zero() && g.is_zero()) throw BothZero("gcd(0, 0) is undefined");
  FpPoly a = f, b = g;
  while (!b.is_zero()) {
    FpPoly r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

FpPoly negate_argument(const FpPoly& f) {
  Vec c = f.coeffs();
  for (std::size_t i = 1; i < c.size(); i += 2) c[i] = fp::neg(c[i], f.modulus());
  return FpPoly::from_residues(std::move(c), f.modulus());
}

}  // namespace popdiff
