#include "popdiff/gridfn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "popdiff/linalg.hpp"

namespace popdiff {

// --------------------------------------------------------------- GridShape

GridShape::GridShape(std::uint32_t p, std::size_t k, std::size_t n)
    : p_(p), k_(k), n_(n), size_(1) {
  require_odd_prime(p);
  if (k == 0 || n == 0) throw InvalidArgument("grid needs k >= 1 and n >= 1");
  if (power_ld(p, k * n) > 4.0e18L) {
    throw TooLarge("grid of p^(kn) points does not fit in 62 bits");
  }
  place_.resize(k * n);
  for (std::size_t d = 0; d < k * n; ++d) {
    place_[d] = size_;
    size_ *= p;
  }
}

void GridShape::require_within(const Guard& guard, std::string_view what) const {
  guard.require(static_cast<long double>(size_), what);
}

std::uint64_t GridShape::encode(std::span<const Residue> digits) const {
  if (digits.size() != this->digits()) {
    throw DimensionMismatch("grid point has the wrong number of digits");
  }
  std::uint64_t idx = 0;
  for (std::size_t d = 0; d < digits.size(); ++d) idx += (digits[d] % p_) * place_[d];
  return idx;
}

std::uint64_t GridShape::encode(const FpMatrix& x) const {
  if (x.rows() != k_ || x.cols() != n_ || x.modulus() != p_) {
    throw DimensionMismatch("grid point must be a k x n matrix over F_p");
  }
  return encode(x.entries());
}

Vec GridShape::decode(std::uint64_t index) const {
  Vec out(digits());
  decode_into(index, out);
  return out;
}

void GridShape::decode_into(std::uint64_t index, Vec& digits) const {
  digits.resize(this->digits());
  for (auto& d : digits) {
    d = static_cast<Residue>(index % p_);
    index /= p_;
  }
}

FpMatrix GridShape::decode_matrix(std::uint64_t index) const {
  return FpMatrix(k_, n_, decode(index), p_);
}

Vec GridShape::apply_left(const FpMatrix& m, std::span<const Residue> x) const {
  if (m.rows() != k_ || m.cols() != k_) {
    throw DimensionMismatch("left factor must be k x k");
  }
  Vec out(digits(), 0);
  for (std::size_t a = 0; a < k_; ++a) {
    for (std::size_t b = 0; b < k_; ++b) {
      const Residue c = m(a, b);
      if (c == 0) continue;
      for (std::size_t j = 0; j < n_; ++j) {
        auto& slot = out[a * n_ + j];
        slot = fp::add(slot, fp::mul(c, x[b * n_ + j], p_), p_);
      }
    }
  }
  return out;
}

Vec GridShape::add(std::span<const Residue> a, std::span<const Residue> b) const {
  Vec out(digits());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fp::add(a[i], b[i], p_);
  return out;
}

Vec GridShape::negate(std::span<const Residue> a) const {
  Vec out(digits());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fp::neg(a[i], p_);
  return out;
}

// ------------------------------------------------------------ OffsetWalker

OffsetWalker::OffsetWalker(const GridShape& shape, std::vector<Vec> offsets)
    : shape_(shape), offsets_(std::move(offsets)), x_(shape.digits(), 0),
      shifted_digits_(offsets_.size()), shifted_(offsets_.size(), 0) {
  for (const auto& e : offsets_) {
    if (e.size() != shape.digits()) throw DimensionMismatch("offset length");
  }
  seek(0);
}

void OffsetWalker::seek(std::uint64_t index) {
  shape_.decode_into(index, x_);
  base_ = index;
  const std::uint32_t p = shape_.p();
  for (std::size_t i = 0; i < offsets_.size(); ++i) {
    shifted_digits_[i].resize(x_.size());
    std::uint64_t idx = 0;
    for (std::size_t d = 0; d < x_.size(); ++d) {
      shifted_digits_[i][d] = fp::add(x_[d], offsets_[i][d], p);
      idx += shifted_digits_[i][d] * shape_.place(d);
    }
    shifted_[i] = idx;
  }
}

bool OffsetWalker::next() {
  const std::uint32_t p = shape_.p();
  for (std::size_t d = 0; d < x_.size(); ++d) {
    const std::uint64_t place = shape_.place(d);
    const bool carry = ++x_[d] == p;
    if (carry) x_[d] = 0;
    for (std::size_t i = 0; i < offsets_.size(); ++i) {
      Residue& s = shifted_digits_[i][d];
      if (++s == p) {
        s = 0;
        shifted_[i] -= (p - 1) * place;
      } else {
        shifted_[i] += place;
      }
    }
    if (!carry) {
      base_ += place;
      return true;
    }
    base_ -= (p - 1) * place;
  }
  return false;
}

// ----------------------------------------------------------- GridFunction

const char* to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::ExactRational: return "exact-rational";
    case ValueKind::Float: return "float";
    case ValueKind::ComplexFloat: return "complex-float";
  }
  return "?";
}

GridFunction::GridFunction(GridShape shape, Storage values)
    : shape_(shape), values_(std::move(values)) {
  const std::size_t len = std::visit([](const auto& v) { return v.size(); }, values_);
  if (len != shape_.size()) {
    throw DimensionMismatch("grid function has " + std::to_string(len) +
                            " values, expected " + std::to_string(shape_.size()));
  }
}

GridFunction GridFunction::constant(const GridShape& shape,
                                    const Rational& value, const Guard& guard) {
  shape.require_within(guard, "grid function");
  return GridFunction(shape, std::vector<Rational>(shape.size(), value));
}

GridFunction GridFunction::zeros(const GridShape& shape, ValueKind kind,
                                 const Guard& guard) {
  shape.require_within(guard, "grid function");
  switch (kind) {
    case ValueKind::ExactRational:
      return GridFunction(shape, std::vector<Rational>(shape.size()));
    case ValueKind::Float:
      return GridFunction(shape, std::vector<double>(shape.size(), 0.0));
    case ValueKind::ComplexFloat:
      return GridFunction(shape, std::vector<Complex>(shape.size()));
  }
  throw InvalidArgument("unknown value kind");
}

namespace {
template <class T>
T& typed(GridFunction::Storage& s, const char* name) {
  if (auto* v = std::get_if<T>(&s)) return *v;
  throw InvalidArgument(std::string("grid function is not ") + name);
}
template <class T>
const T& typed(const GridFunction::Storage& s, const char* name) {
  if (const auto* v = std::get_if<T>(&s)) return *v;
  throw InvalidArgument(std::string("grid function is not ") + name);
}
}  // namespace

const std::vector<Rational>& GridFunction::rationals() const {
  return typed<std::vector<Rational>>(values_, "exact-rational");
}
const std::vector<double>& GridFunction::reals() const {
  return typed<std::vector<double>>(values_, "float");
}
const std::vector<Complex>& GridFunction::complexes() const {
  return typed<std::vector<Complex>>(values_, "complex-float");
}
std::vector<Rational>& GridFunction::rationals() {
  return typed<std::vector<Rational>>(values_, "exact-rational");
}
std::vector<double>& GridFunction::reals() {
  return typed<std::vector<double>>(values_, "float");
}
std::vector<Complex>& GridFunction::complexes() {
  return typed<std::vector<Complex>>(values_, "complex-float");
}

double GridFunction::real_at(std::uint64_t i) const {
  switch (kind()) {
    case ValueKind::ExactRational: return to_double(rationals()[i]);
    case ValueKind::Float: return reals()[i];
    case ValueKind::ComplexFloat: return complexes()[i].real();
  }
  return 0;
}

Complex GridFunction::complex_at(std::uint64_t i) const {
  if (kind() == ValueKind::ComplexFloat) return complexes()[i];
  return {real_at(i), 0.0};
}

GridFunction GridFunction::to_float() const {
  if (kind() == ValueKind::ComplexFloat) {
    throw InvalidArgument("complex grid function has no real float form");
  }
  std::vector<double> out(size());
  for (std::uint64_t i = 0; i < size(); ++i) out[i] = real_at(i);
  return GridFunction(shape_, std::move(out));
}

GridFunction GridFunction::to_complex() const {
  std::vector<Complex> out(size());
  for (std::uint64_t i = 0; i < size(); ++i) out[i] = complex_at(i);
  return GridFunction(shape_, std::move(out));
}

Rational GridFunction::mean_exact() const {
  Rational sum = 0;
  for (const auto& v : rationals()) sum += v;
  return sum / Rational(BigInt(size()));
}

Complex GridFunction::mean() const {
  if (kind() == ValueKind::ExactRational) return {to_double(mean_exact()), 0.0};
  Complex sum = 0, comp = 0;
  for (std::uint64_t i = 0; i < size(); ++i) {
    // Kahan summation, componentwise through std::complex
    const Complex y = complex_at(i) - comp;
    const Complex t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(size());
}

double GridFunction::energy() const {
  if (kind() == ValueKind::ExactRational) {
    Rational s = 0;
    for (const auto& v : rationals()) s += v * v;
    return to_double(s / Rational(BigInt(size())));
  }
  double s = 0, c = 0;
  for (std::uint64_t i = 0; i < size(); ++i) {
    const double y = std::norm(complex_at(i)) - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s / static_cast<double>(size());
}

bool GridFunction::in_unit_interval() const {
  switch (kind()) {
    case ValueKind::ExactRational:
      return std::all_of(rationals().begin(), rationals().end(),
                         [](const Rational& v) { return v >= 0 && v <= 1; });
    case ValueKind::Float:
      return std::all_of(reals().begin(), reals().end(),
                         [](double v) { return v >= 0.0 && v <= 1.0; });
    case ValueKind::ComplexFloat:
      return false;
  }
  return false;
}

bool GridFunction::one_bounded(double slack) const {
  if (kind() == ValueKind::ExactRational) {
    return std::all_of(rationals().begin(), rationals().end(),
                       [](const Rational& v) { return v >= -1 && v <= 1; });
  }
  for (std::uint64_t i = 0; i < size(); ++i) {
    if (std::abs(complex_at(i)) > 1.0 + slack) return false;
  }
  return true;
}

void GridFunction::require_unit_interval(std::string_view what) const {
  if (!in_unit_interval()) {
    throw InvalidArgument(std::string(what) + " requires a [0,1]-valued function");
  }
}

// -------------------------------------------------------- QuadraticFactor

QuadraticFactor::QuadraticFactor(std::uint32_t p, std::size_t n) : p(p), n(n) {
  require_odd_prime(p);
}

QuadraticFactor::QuadraticFactor(std::uint32_t p, std::size_t n,
                                 std::vector<Vec> linear,
                                 std::vector<FpMatrix> quadratic,
                                 std::vector<FpMatrix> skew)
    : p(p), n(n), linear(std::move(linear)), quadratic(std::move(quadratic)),
      skew(std::move(skew)) {
  require_odd_prime(p);
  for (auto& r : this->linear) {
    for (auto& x : r) x %= p;
  }
  validate();
}

void QuadraticFactor::validate() const {
  for (const auto& r : linear) {
    if (r.size() != n) throw DimensionMismatch("linear factor vector length != n");
  }
  for (const auto& m : quadratic) {
    if (m.rows() != n || m.cols() != n || m.modulus() != p) {
      throw DimensionMismatch("quadratic factor matrix must be n x n over F_p");
    }
    if (!m.is_symmetric()) throw NotSymmetric("quadratic factor matrix is not symmetric");
  }
  for (const auto& m : skew) {
    if (m.rows() != n || m.cols() != n || m.modulus() != p) {
      throw DimensionMismatch("skew factor matrix must be n x n over F_p");
    }
    if (!m.is_skew()) throw NotSymmetric("skew factor matrix is not skew-symmetric");
  }
}

QuadraticFactor QuadraticFactor::refined(const QuadraticFactor& more) const {
  if (more.p != p || more.n != n) throw DimensionMismatch("factor shapes differ");
  QuadraticFactor out = *this;
  out.linear.insert(out.linear.end(), more.linear.begin(), more.linear.end());
  out.quadratic.insert(out.quadratic.end(), more.quadratic.begin(), more.quadratic.end());
  out.skew.insert(out.skew.end(), more.skew.begin(), more.skew.end());
  return out;
}

// -------------------------------------------------------- FactorEvaluator

FactorEvaluator::FactorEvaluator(const QuadraticFactor& factor,
                                 const GridShape& shape)
    : factor_(factor), shape_(shape), coords_(0) {
  factor_.validate();
  if (factor.p != shape.p() || factor.n != shape.n()) {
    throw DimensionMismatch("factor and grid disagree on p or n");
  }
  coords_ = linear_coords() + quadratic_coords() + skew_coords();
}

std::size_t FactorEvaluator::quadratic_coords() const {
  return factor_.d2() * symmetric_dim(shape_.k());
}
std::size_t FactorEvaluator::skew_coords() const {
  return factor_.d3() * skew_dim(shape_.k());
}

void FactorEvaluator::coords(std::span<const Residue> x, Residue* out) const {
  const std::uint32_t p = shape_.p();
  const std::size_t k = shape_.k(), n = shape_.n();
  std::size_t pos = 0;
  for (const auto& r : factor_.linear) {
    for (std::size_t a = 0; a < k; ++a) out[pos++] = dot(x.subspan(a * n, n), r, p);
  }
  std::vector<std::uint64_t> y(k * n);
  auto quadratic_form = [&](const FpMatrix& m, bool upper_strict) {
    // y = X M, then (X M X^T)(a, b) = <y_a, x_b>
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t j = 0; j < n; ++j) {
        std::uint64_t acc = 0;
        for (std::size_t l = 0; l < n; ++l) {
          acc += static_cast<std::uint64_t>(x[a * n + l]) * m(l, j);
        }
        y[a * n + j] = acc % p;
      }
    }
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = upper_strict ? a + 1 : a; b < k; ++b) {
        std::uint64_t acc = 0;
        for (std::size_t j = 0; j < n; ++j) acc += y[a * n + j] * x[b * n + j];
        out[pos++] = static_cast<Residue>(acc % p);
      }
    }
  };
  for (const auto& m : factor_.quadratic) quadratic_form(m, false);
  for (const auto& m : factor_.skew) quadratic_form(m, true);
}

Vec FactorEvaluator::coords(std::span<const Residue> x) const {
  Vec out(coords_);
  coords(x, out.data());
  return out;
}

FactorImage FactorEvaluator::image(std::span<const Residue> x) const {
  const FpMatrix xm(shape_.k(), shape_.n(), Vec(x.begin(), x.end()), shape_.p());
  return factor_eval(factor_, xm);
}

std::uint64_t FactorEvaluator::key_of_coords(std::span<const Residue> c) const {
  std::uint64_t key = 0;
  for (std::size_t i = c.size(); i-- > 0;) key = key * shape_.p() + c[i];
  return key;
}

std::uint64_t FactorEvaluator::key(std::span<const Residue> x) const {
  if (power_ld(shape_.p(), coords_) > 9.0e18L) {
    throw TooLarge("factor image space exceeds 63-bit keys");
  }
  Residue buf[256];
  std::vector<Residue> heap;
  Residue* out = buf;
  if (coords_ > 256) {
    heap.resize(coords_);
    out = heap.data();
  }
  coords(x, out);
  return key_of_coords(std::span<const Residue>(out, coords_));
}

FactorImage factor_eval(const QuadraticFactor& factor, const FpMatrix& x) {
  factor.validate();
  if (x.cols() != factor.n || x.modulus() != factor.p) {
    throw DimensionMismatch("grid point must be k x n over the factor's field");
  }
  FactorImage img;
  const FpMatrix xt = x.transpose();
  for (const auto& r : factor.linear) img.b1.push_back(x.apply(r));
  for (const auto& m : factor.quadratic) {
    img.b2.push_back(x * m * xt);
    if (!img.b2.back().is_symmetric()) throw NotSymmetric("B2 image not symmetric");
  }
  for (const auto& m : factor.skew) {
    img.b3.push_back(x * m * xt);
    if (!img.b3.back().is_skew()) throw NotSymmetric("B3 image not skew");
  }
  return img;
}

std::size_t factor_rank(const QuadraticFactor& factor, const Guard& guard) {
  factor.validate();
  const std::uint32_t p = factor.p;
  if (span_rank(factor.linear, factor.n, p) != factor.d1()) return 0;
  std::vector<const FpMatrix*> mats;
  for (const auto& m : factor.quadratic) mats.push_back(&m);
  for (const auto& m : factor.skew) mats.push_back(&m);
  if (mats.empty()) return factor.n;
  guard.require(power_ld(p, mats.size()), "factor_rank");

  // projective scan: combinations whose last nonzero coefficient is 1
  std::size_t best = factor.n;
  Vec coeff(mats.size(), 0);
  const std::size_t m = mats.size();
  for (std::size_t lead = 0; lead < m; ++lead) {
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < lead; ++i) count *= p;
    for (std::uint64_t idx = 0; idx < count; ++idx) {
      std::uint64_t t = idx;
      FpMatrix combo = *mats[lead];
      for (std::size_t i = 0; i < lead; ++i) {
        const auto c = static_cast<Residue>(t % p);
        t /= p;
        if (c) combo = combo + mats[i]->scaled(c);
      }
      best = std::min(best, mat_rank(combo));
      if (best == 0) return 0;
    }
  }
  return best;
}

// ------------------------------------------------------------------ atoms

AtomPartition atom_partition(const QuadraticFactor& factor,
                             const GridShape& shape, const Guard& guard) {
  shape.require_within(guard, "atom_partition");
  const FactorEvaluator ev(factor, shape);
  AtomPartition out;
  out.atom_of.resize(shape.size());
  std::unordered_map<std::uint64_t, std::uint32_t> ids;
  Vec x;
  for (std::uint64_t i = 0; i < shape.size(); ++i) {
    shape.decode_into(i, x);
    const std::uint64_t key = ev.key(x);
    auto [it, inserted] = ids.try_emplace(key, static_cast<std::uint32_t>(ids.size()));
    if (inserted) {
      out.atom_size.push_back(0);
      out.atom_key.push_back(key);
    }
    out.atom_of[i] = it->second;
    ++out.atom_size[it->second];
  }
  return out;
}

GridFunction conditional_expectation(const GridFunction& f,
                                     const QuadraticFactor& factor,
                                     const Guard& guard) {
  const auto atoms = atom_partition(factor, f.shape(), guard);
  const std::uint64_t size = f.size();
  switch (f.kind()) {
    case ValueKind::ExactRational: {
      std::vector<Rational> sums(atoms.count());
      for (std::uint64_t i = 0; i < size; ++i) sums[atoms.atom_of[i]] += f.rationals()[i];
      for (std::size_t a = 0; a < sums.size(); ++a) {
        sums[a] /= Rational(BigInt(atoms.atom_size[a]));
      }
      std::vector<Rational> out(size);
      for (std::uint64_t i = 0; i < size; ++i) out[i] = sums[atoms.atom_of[i]];
      return GridFunction(f.shape(), std::move(out));
    }
    case ValueKind::Float: {
      std::vector<double> sums(atoms.count(), 0.0);
      for (std::uint64_t i = 0; i < size; ++i) sums[atoms.atom_of[i]] += f.reals()[i];
      for (std::size_t a = 0; a < sums.size(); ++a) {
        sums[a] /= static_cast<double>(atoms.atom_size[a]);
      }
      std::vector<double> out(size);
      for (std::uint64_t i = 0; i < size; ++i) out[i] = sums[atoms.atom_of[i]];
      return GridFunction(f.shape(), std::move(out));
    }
    case ValueKind::ComplexFloat:
      break;
  }
  throw InvalidArgument("conditional expectation needs a rational or float function");
}

bool is_measurable(const GridFunction& f, const QuadraticFactor& factor,
                   const Guard& guard) {
  const auto atoms = atom_partition(factor, f.shape(), guard);
  std::vector<std::int64_t> first(atoms.count(), -1);
  for (std::uint64_t i = 0; i < f.size(); ++i) {
    auto& rep = first[atoms.atom_of[i]];
    if (rep < 0) {
      rep = static_cast<std::int64_t>(i);
      continue;
    }
    const auto r = static_cast<std::uint64_t>(rep);
    const bool same = f.kind() == ValueKind::ExactRational
                          ? f.rationals()[i] == f.rationals()[r]
                          : f.complex_at(i) == f.complex_at(r);
    if (!same) return false;
  }
  return true;
}

LinearKernel linear_kernel_H(const QuadraticFactor& factor,
                             const GridShape& shape, const Guard& guard) {
  factor.validate();
  shape.require_within(guard, "linear_kernel_H");
  if (factor.p != shape.p() || factor.n != shape.n()) {
    throw DimensionMismatch("factor and grid disagree on p or n");
  }
  const std::uint32_t p = shape.p();
  const std::size_t k = shape.k(), n = shape.n();
  std::vector<Rational> ind(shape.size());
  Vec d;
  for (std::uint64_t i = 0; i < shape.size(); ++i) {
    shape.decode_into(i, d);
    bool in_h = true;
    for (const auto& r : factor.linear) {
      for (std::size_t a = 0; a < k && in_h; ++a) {
        in_h = dot(std::span<const Residue>(d).subspan(a * n, n), r, p) == 0;
      }
      if (!in_h) break;
    }
    ind[i] = in_h ? 1 : 0;
  }
  std::vector<Vec> chars;
  for (std::size_t a = 0; a < k; ++a) {
    for (const auto& r : factor.linear) {
      Vec t(k * n, 0);
      std::copy(r.begin(), r.end(), t.begin() + static_cast<std::ptrdiff_t>(a * n));
      chars.push_back(std::move(t));
    }
  }
  return LinearKernel{
      GridFunction(shape, std::move(ind)),
      SubspaceBasis::span(Ambient::Vectors, k * n, 1, p, chars),
      span_rank(factor.linear, n, p),
  };
}

GridFunction phase_function(const GridShape& shape, const Vec& r,
                            const FpMatrix& m, const Guard& guard) {
  shape.require_within(guard, "phase_function");
  const std::size_t len = shape.digits();
  const std::uint32_t p = shape.p();
  if (r.size() != len || m.rows() != len || m.cols() != len) {
    throw DimensionMismatch("phase data must live on F_p^{nk}");
  }
  if (!m.is_symmetric()) throw NotSymmetric("phase matrix must be symmetric");
  std::vector<Complex> roots(p);
  for (std::uint32_t t = 0; t < p; ++t) {
    roots[t] = std::polar(1.0, 2.0 * std::numbers::pi * t / p);
  }
  std::vector<Complex> out(shape.size());
  Vec x;
  for (std::uint64_t i = 0; i < shape.size(); ++i) {
    shape.decode_into(i, x);
    Residue t = dot(r, x, p);
    t = fp::add(t, dot(x, m.apply(x), p), p);
    out[i] = roots[t];
  }
  return GridFunction(shape, std::move(out));
}

QuadraticFactor phase_factor(const GridShape& shape, const Vec& r,
                             const FpMatrix& m) {
  const std::size_t k = shape.k(), n = shape.n();
  const std::uint32_t p = shape.p();
  if (r.size() != k * n || m.rows() != k * n || !m.is_symmetric()) {
    throw DimensionMismatch("phase data must live on F_p^{nk} with M symmetric");
  }
  const Residue half = fp::inv(2, p);
  auto block = [&](std::size_t bi, std::size_t bj) {
    FpMatrix out(n, n, p);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) out(a, b) = m(bi * n + a, bj * n + b);
    }
    return out;
  };
  QuadraticFactor f(p, n);
  for (std::size_t i = 0; i < k; ++i) {
    f.linear.emplace_back(r.begin() + static_cast<std::ptrdiff_t>(i * n),
                          r.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
  }
  for (std::size_t i = 0; i < k; ++i) f.quadratic.push_back(block(i, i));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const FpMatrix b = block(i, j);
      const FpMatrix bt = b.transpose();
      f.quadratic.push_back((b + bt).scaled(half));
      f.skew.push_back((b - bt).scaled(half));
    }
  }
  f.validate();
  return f;
}

}  // namespace popdiff
