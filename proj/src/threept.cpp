#include "popdiff/threept.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "popdiff/kahan.hpp"
#include "popdiff/parallel.hpp"

namespace popdiff {

namespace {

constexpr std::uint64_t kChunk = 64;

std::vector<Complex> root_table(std::uint64_t q) {
  std::vector<Complex> roots(q);
  for (std::uint64_t r = 0; r < q; ++r) {
    roots[r] = std::polar(1.0, 2 * std::numbers::pi * static_cast<double>(r) /
                                   static_cast<double>(q));
  }
  return roots;
}

std::uint64_t reduce_multiplier(std::int64_t m, std::uint64_t q) {
  const std::int64_t r = m % static_cast<std::int64_t>(q);
  return static_cast<std::uint64_t>(r < 0 ? r + static_cast<std::int64_t>(q) : r);
}

std::vector<std::uint64_t> map_table(const FiniteGroup& g, const GroupMap& m, bool dual) {
  std::vector<std::uint64_t> t(g.size());
  for (std::uint64_t x = 0; x < g.size(); ++x) t[x] = dual ? g.apply_dual(m, x) : g.apply(m, x);
  return t;
}

void require_size(const FiniteGroup& g, std::size_t values) {
  if (values != g.size()) {
    throw DimensionMismatch("function has " + std::to_string(values) +
                            " values, group has " + std::to_string(g.size()));
  }
}

// Integer numerators over a common denominator, so exact convolutions stay
// in BigInt arithmetic.
struct Scaled {
  std::vector<BigInt> num;
  BigInt den = 1;
};

Scaled scale(const std::vector<Rational>& f) {
  Scaled s;
  for (const auto& v : f) {
    const BigInt d = boost::multiprecision::denominator(v);
    s.den = s.den / boost::multiprecision::gcd(s.den, d) * d;
  }
  s.num.reserve(f.size());
  for (const auto& v : f) {
    s.num.push_back(boost::multiprecision::numerator(v) *
                    (s.den / boost::multiprecision::denominator(v)));
  }
  return s;
}

std::vector<double> to_doubles(const std::vector<Rational>& f) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = to_double(f[i]);
  return out;
}

double l2_norm(const std::vector<Rational>& f) {
  KahanSum<double> acc;
  for (const auto& v : f) {
    const double x = to_double(v);
    acc += x * x;
  }
  return std::sqrt(acc.value() / static_cast<double>(f.size()));
}

bool one_bounded(const std::vector<Rational>& f) {
  return std::all_of(f.begin(), f.end(), [](const Rational& v) { return abs(v) <= 1; });
}

double sup_abs(const std::vector<Complex>& c) {
  double m = 0;
  for (const auto& v : c) m = std::max(m, std::abs(v));
  return m;
}

// mu_B~(eta) = E_{b in B} e(<eta, b>/q), real because B = -B.
std::vector<double> bohr_transform(const FiniteGroup& g, const BohrSet& b,
                                   const std::vector<Complex>& roots) {
  std::vector<double> t(g.size());
  const double inv = 1.0 / static_cast<double>(b.count());
  for_each_chunk(g.size(), kChunk, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t eta = begin; eta < end; ++eta) {
      KahanSum<double> acc;
      for (std::uint64_t x : b.elements) acc += roots[g.pairing(eta, x)].real();
      t[eta] = acc.value() * inv;
    }
  });
  return t;
}

}  // namespace

std::string GroupMap::to_string() const {
  return is_multiplier() ? std::to_string(multiplier()) : matrix().to_string();
}

FiniteGroup FiniteGroup::cyclic(std::uint64_t order) {
  if (order == 0) throw InvalidArgument("Z/NZ needs N >= 1");
  if (order > (std::uint64_t{1} << 62)) throw TooLarge("Z/NZ order exceeds 2^62");
  FiniteGroup g;
  g.size_ = order;
  g.q_ = order;
  return g;
}

FiniteGroup FiniteGroup::vector(std::uint32_t p, std::size_t k, std::size_t n) {
  FiniteGroup g;
  g.shape_.emplace(p, k, n);
  g.size_ = g.shape_->size();
  g.q_ = p;
  return g;
}

const GridShape& FiniteGroup::shape() const {
  if (!shape_) throw InvalidArgument("Z/NZ has no grid shape");
  return *shape_;
}

std::string FiniteGroup::describe() const {
  std::ostringstream os;
  if (is_cyclic()) {
    os << "Z_" << q_;
  } else {
    os << "(F_" << q_ << "^" << shape_->n() << ")^" << shape_->k();
  }
  return os.str();
}

std::uint64_t FiniteGroup::add(std::uint64_t x, std::uint64_t y) const {
  if (is_cyclic()) {
    const std::uint64_t s = x + y;
    return s >= q_ ? s - q_ : s;
  }
  std::uint64_t out = 0;
  for (std::size_t d = 0; d < shape_->digits(); ++d) {
    const std::uint64_t place = shape_->place(d);
    out += ((x / place + y / place) % q_) * place;
  }
  return out;
}

std::uint64_t FiniteGroup::neg(std::uint64_t x) const {
  if (is_cyclic()) return x == 0 ? 0 : q_ - x;
  std::uint64_t out = 0;
  for (std::size_t d = 0; d < shape_->digits(); ++d) {
    const std::uint64_t place = shape_->place(d);
    out += ((q_ - (x / place) % q_) % q_) * place;
  }
  return out;
}

std::uint64_t FiniteGroup::sub(std::uint64_t x, std::uint64_t y) const { return add(x, neg(y)); }

std::uint64_t FiniteGroup::pairing(std::uint64_t xi, std::uint64_t x) const {
  if (is_cyclic()) {
    return static_cast<std::uint64_t>(static_cast<UInt128>(xi) * x % q_);
  }
  std::uint64_t s = 0;
  for (std::size_t d = 0; d < shape_->digits(); ++d) {
    const std::uint64_t place = shape_->place(d);
    s += ((xi / place) % q_) * ((x / place) % q_);
    s %= q_;
  }
  return s;
}

void FiniteGroup::require_acts(const GroupMap& m) const {
  if (m.is_multiplier()) return;
  if (is_cyclic()) throw InvalidArgument("Z/NZ maps are given as multipliers");
  const FpMatrix& a = m.matrix();
  if (a.modulus() != q_) throw DimensionMismatch("map modulus differs from the group's");
  if (a.rows() != shape_->k() || a.cols() != shape_->k()) {
    throw DimensionMismatch("map must be k x k");
  }
}

FpMatrix FiniteGroup::as_matrix(const GroupMap& m) const {
  require_acts(m);
  if (m.is_multiplier()) {
    return FpMatrix::scalar(shape_->k(), m.multiplier(), static_cast<std::uint32_t>(q_));
  }
  return m.matrix();
}

std::uint64_t FiniteGroup::apply(const GroupMap& m, std::uint64_t x) const {
  require_acts(m);
  if (m.is_multiplier()) {
    const std::uint64_t mult = reduce_multiplier(m.multiplier(), q_);
    if (is_cyclic()) {
      return static_cast<std::uint64_t>(static_cast<UInt128>(mult) * x % q_);
    }
    std::uint64_t out = 0;
    for (std::size_t d = 0; d < shape_->digits(); ++d) {
      const std::uint64_t place = shape_->place(d);
      out += ((x / place) % q_ * mult % q_) * place;
    }
    return out;
  }
  return shape_->encode(shape_->apply_left(m.matrix(), shape_->decode(x)));
}

std::uint64_t FiniteGroup::apply_dual(const GroupMap& m, std::uint64_t xi) const {
  if (m.is_multiplier()) return apply(m, xi);
  require_acts(m);
  return shape_->encode(shape_->apply_left(m.matrix().transpose(), shape_->decode(xi)));
}

bool FiniteGroup::is_automorphism(const GroupMap& m) const {
  require_acts(m);
  if (m.is_multiplier()) {
    return std::gcd(reduce_multiplier(m.multiplier(), q_), q_) == 1;
  }
  return is_invertible(m.matrix());
}

GroupMap FiniteGroup::difference(const GroupMap& a, const GroupMap& b) const {
  require_acts(a);
  require_acts(b);
  if (a.is_multiplier() && b.is_multiplier()) {
    const std::int64_t q = static_cast<std::int64_t>(q_);
    return GroupMap((a.multiplier() % q - b.multiplier() % q) % q);
  }
  return GroupMap(as_matrix(a) - as_matrix(b));
}

FiniteGroupSpec::FiniteGroupSpec(FiniteGroup g, GroupMap first, GroupMap second)
    : group(std::move(g)), m1(std::move(first)), m2(std::move(second)) {
  if (!group.is_automorphism(m1)) throw NotAutomorphism("M1 is not an automorphism");
  if (!group.is_automorphism(m2)) throw NotAutomorphism("M2 is not an automorphism");
  if (!group.is_automorphism(difference())) {
    throw NotAutomorphism("M1 - M2 is not an automorphism");
  }
}

BohrSet bohr_set(const FiniteGroup& g, std::vector<std::uint64_t> frequencies,
                 const Rational& radius, const Guard& guard) {
  if (radius <= 0 || radius > make_rational(1, 2)) {
    throw InvalidArgument("Bohr radius must lie in (0, 1/2]");
  }
  for (std::uint64_t xi : frequencies) {
    if (xi >= g.size()) throw InvalidArgument("frequency outside the dual group");
  }
  guard.require(static_cast<long double>(g.size()) *
                    static_cast<long double>(std::max<std::size_t>(frequencies.size(), 1)),
                "Bohr set");
  // ||r/q|| < radius  <=>  min(r, q - r) < ceil(radius q)
  const Rational scaled = radius * Rational(g.modulus());
  BigInt ceil_num = boost::multiprecision::numerator(scaled) /
                    boost::multiprecision::denominator(scaled);
  if (Rational(ceil_num) < scaled) ceil_num += 1;
  const auto limit = ceil_num.convert_to<std::uint64_t>();

  BohrSet b;
  b.frequencies = std::move(frequencies);
  b.radius = radius;
  b.indicator.assign(g.size(), 0);
  for (std::uint64_t x = 0; x < g.size(); ++x) {
    bool in = true;
    for (std::uint64_t xi : b.frequencies) {
      if (circle_numerator(g.pairing(xi, x), g.modulus()) >= limit) {
        in = false;
        break;
      }
    }
    if (in) {
      b.indicator[x] = 1;
      b.elements.push_back(x);
    }
  }
  b.measure = Rational(b.elements.size(), g.size());
  return b;
}

Rational SmoothingMeasure::density_sup(std::uint64_t group_size) const {
  const std::uint64_t m = pairs.empty() ? 0 : *std::max_element(pairs.begin(), pairs.end());
  return Rational(BigInt(m) * group_size, denominator);
}

SmoothingMeasure smoothing_measure(const FiniteGroup& g, const BohrSet& b, const Guard& guard) {
  guard.require(static_cast<long double>(b.count()) * static_cast<long double>(b.count()),
                "mu_B * mu_B");
  SmoothingMeasure nu;
  nu.pairs.assign(g.size(), 0);
  for (std::uint64_t x : b.elements) {
    for (std::uint64_t y : b.elements) ++nu.pairs[g.add(x, y)];
  }
  nu.denominator = b.count() * b.count();
  for (std::uint64_t d = 0; d < g.size(); ++d) {
    if (nu.pairs[d] != 0) nu.support.push_back(d);
  }
  return nu;
}

std::vector<Complex> fourier_transform(const FiniteGroup& g, const std::vector<double>& f,
                                       const Guard& guard) {
  require_size(g, f.size());
  guard.require(static_cast<long double>(g.size()) * static_cast<long double>(g.size()),
                "Fourier transform");
  const auto roots = root_table(g.modulus());
  const double inv = 1.0 / static_cast<double>(g.size());
  std::vector<Complex> out(g.size());
  for_each_chunk(g.size(), kChunk, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t xi = begin; xi < end; ++xi) {
      KahanSum<Complex> acc;
      for (std::uint64_t x = 0; x < g.size(); ++x) {
        if (f[x] == 0) continue;
        acc += f[x] * std::conj(roots[g.pairing(xi, x)]);
      }
      out[xi] = acc.value() * inv;
    }
  });
  return out;
}

std::vector<Complex> inverse_fourier(const FiniteGroup& g, const std::vector<Complex>& c,
                                     const Guard& guard) {
  require_size(g, c.size());
  guard.require(static_cast<long double>(g.size()) * static_cast<long double>(g.size()),
                "inverse Fourier transform");
  const auto roots = root_table(g.modulus());
  std::vector<Complex> out(g.size());
  for_each_chunk(g.size(), kChunk, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t x = begin; x < end; ++x) {
      KahanSum<Complex> acc;
      for (std::uint64_t xi = 0; xi < g.size(); ++xi) {
        if (c[xi] == Complex{}) continue;
        acc += c[xi] * roots[g.pairing(xi, x)];
      }
      out[x] = acc.value();
    }
  });
  return out;
}

namespace {

double fourier_count(const FiniteGroupSpec& spec, const std::vector<double>& f,
                     const BohrSet& b, const Guard& guard) {
  const FiniteGroup& g = spec.group;
  const auto roots = root_table(g.modulus());
  const auto fhat = fourier_transform(g, f, guard);
  guard.require(static_cast<long double>(g.size()) * static_cast<long double>(b.count()),
                "Bohr transform");
  const auto mu = bohr_transform(g, b, roots);
  const auto dual1 = map_table(g, spec.m1, true);
  const auto dual2 = map_table(g, spec.m2, true);
  const std::uint64_t chunks = chunk_count(g.size(), kChunk);
  std::vector<KahanSum<Complex>> partial(chunks);
  for_each_chunk(g.size(), kChunk, [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
    KahanSum<Complex> acc;
    for (std::uint64_t xi2 = begin; xi2 < end; ++xi2) {
      if (fhat[xi2] == Complex{}) continue;
      for (std::uint64_t xi3 = 0; xi3 < g.size(); ++xi3) {
        const double m = mu[g.add(dual1[xi2], dual2[xi3])];
        if (m == 0) continue;
        acc += fhat[g.neg(g.add(xi2, xi3))] * fhat[xi2] * fhat[xi3] * (m * m);
      }
    }
    partial[c] = acc;
  });
  KahanSum<Complex> total;
  for (const auto& p : partial) total.merge(p);
  return total.value().real();
}

template <class Value, class Sum>
Sum direct_sum(const FiniteGroupSpec& spec, const std::vector<Value>& f,
               const SmoothingMeasure& nu, auto&& weight_times) {
  const FiniteGroup& g = spec.group;
  Sum total{};
  for (std::uint64_t d : nu.support) {
    const std::uint64_t s1 = g.apply(spec.m1, d);
    const std::uint64_t s2 = g.apply(spec.m2, d);
    Sum inner{};
    for (std::uint64_t x = 0; x < g.size(); ++x) {
      if (f[x] == 0) continue;
      inner += f[x] * f[g.add(x, s1)] * f[g.add(x, s2)];
    }
    total += weight_times(nu.pairs[d], inner);
  }
  return total;
}

void require_count_inputs(const FiniteGroupSpec& spec, std::size_t values, const BohrSet& b,
                          const Guard& guard) {
  require_size(spec.group, values);
  if (b.indicator.size() != spec.group.size()) {
    throw DimensionMismatch("Bohr set belongs to a different group");
  }
  guard.require(static_cast<long double>(spec.group.size()) *
                    static_cast<long double>(spec.group.size()),
                "smoothed three-point count");
}

}  // namespace

SmoothedCount smoothed_3pt_count(const FiniteGroupSpec& spec, const std::vector<double>& f,
                                 const BohrSet& b, const Guard& guard) {
  require_count_inputs(spec, f.size(), b, guard);
  const auto nu = smoothing_measure(spec.group, b, guard);
  const double den = static_cast<double>(nu.denominator) * static_cast<double>(f.size());
  struct Acc {
    KahanSum<double> k;
    Acc& operator+=(double v) {
      k += v;
      return *this;
    }
  };
  const Acc sum = direct_sum<double, Acc>(spec, f, nu, [](std::uint64_t w, const Acc& inner) {
    return static_cast<double>(w) * inner.k.value();
  });
  SmoothedCount out;
  out.direct = sum.k.value() / den;
  out.fourier = fourier_count(spec, f, b, guard);
  out.discrepancy = std::abs(out.direct - out.fourier);
  return out;
}

SmoothedCount smoothed_3pt_count(const FiniteGroupSpec& spec, const std::vector<Rational>& f,
                                 const BohrSet& b, const Guard& guard) {
  require_count_inputs(spec, f.size(), b, guard);
  const auto nu = smoothing_measure(spec.group, b, guard);
  const Scaled s = scale(f);
  const BigInt sum = direct_sum<BigInt, BigInt>(
      spec, s.num, nu, [](std::uint64_t w, const BigInt& inner) { return inner * w; });
  SmoothedCount out;
  out.exact = Rational(sum, BigInt(nu.denominator) * f.size() * s.den * s.den * s.den);
  out.direct = to_double(*out.exact);
  out.fourier = fourier_count(spec, to_doubles(f), b, guard);
  out.discrepancy = std::abs(out.direct - out.fourier);
  return out;
}

DerivedBohr derived_bohr(const BohrSet& b, const FiniteGroupSpec& spec, const Guard& guard) {
  return derived_bohr(b, spec.group, spec.m1, spec.m2, guard);
}

DerivedBohr derived_bohr(const BohrSet& b, const FiniteGroup& g, const GroupMap& m1,
                         const GroupMap& m2, const Guard& guard) {
  if (b.indicator.size() != g.size()) {
    throw DimensionMismatch("Bohr set belongs to a different group");
  }
  if (!g.is_automorphism(m1) || !g.is_automorphism(m2)) {
    throw NotAutomorphism("derived Bohr set needs M1 and M2 to be automorphisms");
  }
  std::vector<std::uint64_t> derived;
  derived.reserve(2 * b.frequencies.size());
  for (std::uint64_t xi : b.frequencies) {
    derived.push_back(g.apply_dual(m1, xi));
    derived.push_back(g.apply_dual(m2, xi));
  }
  std::sort(derived.begin(), derived.end());
  derived.erase(std::unique(derived.begin(), derived.end()), derived.end());
  DerivedBohr out{bohr_set(g, std::move(derived), b.radius, guard), false};
  out.matches_direct = true;
  for (std::uint64_t r = 0; r < g.size(); ++r) {
    const bool direct = b.contains(g.apply(m1, r)) && b.contains(g.apply(m2, r));
    if (direct != out.set.contains(r)) {
      out.matches_direct = false;
      break;
    }
  }
  return out;
}

double default_growth(double t) { return std::exp(t / 8); }

void measure_contracts(const FiniteGroup& g, const std::vector<Rational>& f, double epsilon,
                       RegularityDecomposition& d, const Guard& guard) {
  require_size(g, f.size());
  Rational sum_f = 0;
  Rational sum_f1 = 0;
  for (std::uint64_t x = 0; x < g.size(); ++x) {
    sum_f += f[x];
    sum_f1 += d.f1[x];
  }
  d.mean_f = sum_f / g.size();
  d.mean_f1 = sum_f1 / g.size();
  d.f1_in_unit_interval = std::all_of(d.f1.begin(), d.f1.end(),
                                      [](const Rational& v) { return v >= 0 && v <= 1; });
  d.f2_l2 = l2_norm(d.f2);
  d.f3_fourier_sup = sup_abs(fourier_transform(g, to_doubles(d.f3), guard));
  d.f2_one_bounded = one_bounded(d.f2);
  d.f3_one_bounded = one_bounded(d.f3);

  // The Lipschitz set uses the reported gamma1; below 1/(2q) every radius
  // gives the same set, so the exact comparison is made there instead.
  const Rational floor_radius = Rational(1, 2 * g.modulus());
  Rational radius = rational_from_double(d.gamma1);
  if (radius < floor_radius) radius = floor_radius;
  if (radius > make_rational(1, 2)) radius = make_rational(1, 2);
  const BohrSet lip = bohr_set(g, d.frequencies, radius, guard);
  guard.require(static_cast<long double>(g.size()) * static_cast<long double>(lip.count()),
                "Lipschitz scan");
  const auto f1 = to_doubles(d.f1);
  double sup = 0;
  for (std::uint64_t r : lip.elements) {
    if (r == 0) continue;
    for (std::uint64_t x = 0; x < g.size(); ++x) {
      sup = std::max(sup, std::abs(f1[g.add(x, r)] - f1[x]));
    }
  }
  d.lipschitz_sup = sup;
  d.lipschitz_constant = sup / epsilon;
  d.lipschitz_set_size = lip.count();
  d.contracts_hold = d.mean_f == d.mean_f1 && d.f1_in_unit_interval &&
                     d.f2_l2 <= epsilon && d.f3_fourier_sup <= d.gamma2 &&
                     d.lipschitz_sup <= epsilon;
}

RegularityDecomposition regularity_decompose(const FiniteGroup& g,
                                             const std::vector<Rational>& f,
                                             const DecomposeOptions& options,
                                             const Guard& guard) {
  require_size(g, f.size());
  if (!(options.epsilon > 0 && options.epsilon <= 1)) {
    throw InvalidArgument("epsilon must lie in (0, 1]");
  }
  if (options.delta <= 0 || options.delta > make_rational(1, 2)) {
    throw InvalidArgument("delta must lie in (0, 1/2]");
  }
  for (const auto& v : f) {
    if (v < 0 || v > 1) throw InvalidArgument("regularity_decompose needs a [0,1]-valued f");
  }
  for (std::uint64_t xi : options.initial_frequencies) {
    if (xi >= g.size()) throw InvalidArgument("initial frequency outside the dual group");
  }
  const double delta = to_double(options.delta);
  const std::uint64_t cap =
      options.max_stages.value_or(static_cast<std::uint64_t>(
          std::ceil(1.0 / (options.epsilon * options.epsilon * delta * delta))));

  const auto fhat = fourier_transform(g, to_doubles(f), guard);
  const Scaled scaled = scale(f);

  for (std::uint64_t stage = 0; stage < cap; ++stage) {
    RegularityDecomposition d;
    d.stages = stage + 1;
    d.smoothing_radius = options.delta / Rational(BigInt(1) << stage);
    const double rho = to_double(d.smoothing_radius);
    d.gamma2 = 1.0 / options.omega2(1.0 / rho);

    d.frequencies = options.initial_frequencies;
    for (std::uint64_t xi = 0; xi < g.size(); ++xi) {
      if (std::abs(fhat[xi]) > d.gamma2) d.frequencies.push_back(xi);
    }
    std::sort(d.frequencies.begin(), d.frequencies.end());
    d.frequencies.erase(std::unique(d.frequencies.begin(), d.frequencies.end()),
                        d.frequencies.end());
    d.gamma1 = std::min(rho, 1.0 / options.omega1(static_cast<double>(d.frequencies.size()) +
                                                  1.0 / delta + 1.0 / options.epsilon));

    const BohrSet b = bohr_set(g, d.frequencies, d.smoothing_radius, guard);
    const auto nu = smoothing_measure(g, b, guard);
    guard.require(static_cast<long double>(g.size()) * static_cast<long double>(nu.support.size()),
                  "smoothing convolution");
    const BigInt den = scaled.den * nu.denominator;
    d.f1.resize(g.size());
    for (std::uint64_t x = 0; x < g.size(); ++x) {
      BigInt acc = 0;
      for (std::uint64_t s : nu.support) acc += scaled.num[g.sub(x, s)] * nu.pairs[s];
      d.f1[x] = Rational(acc, den);
    }

    std::vector<double> rest(g.size());
    for (std::uint64_t x = 0; x < g.size(); ++x) rest[x] = to_double(f[x] - d.f1[x]);
    auto coeffs = fourier_transform(g, rest, guard);
    // a hair below gamma2 so rounding in the round trip cannot push a kept
    // coefficient over the bound
    const double keep = d.gamma2 * (1 - 1e-9);
    for (auto& c : coeffs) {
      if (std::abs(c) > keep) c = 0;
    }
    const auto small = inverse_fourier(g, coeffs, guard);
    d.f3.resize(g.size());
    d.f2.resize(g.size());
    for (std::uint64_t x = 0; x < g.size(); ++x) {
      d.f3[x] = rational_from_double(small[x].real());
      d.f2[x] = f[x] - d.f1[x] - d.f3[x];
    }

    measure_contracts(g, f, options.epsilon, d, guard);
    if (d.contracts_hold) return d;
  }
  throw NonConvergent("regularity decomposition did not settle within " +
                      std::to_string(cap) + " stages");
}

PatternCountReport popular_3pt_search(const FiniteGroupSpec& spec,
                                      const std::vector<std::uint8_t>& indicator,
                                      double epsilon, const Guard& guard) {
  const FiniteGroup& g = spec.group;
  require_size(g, indicator.size());
  guard.require(static_cast<long double>(g.size()) * static_cast<long double>(g.size()),
                "three-point popular search");
  const std::uint64_t members =
      static_cast<std::uint64_t>(std::count_if(indicator.begin(), indicator.end(),
                                               [](std::uint8_t v) { return v != 0; }));
  PatternCountReport r;
  r.backend = Backend::Exact;
  r.points = 3;
  r.epsilon = epsilon;
  r.alpha_exact = Rational(members, g.size());
  r.alpha = to_double(*r.alpha_exact);
  const Rational threshold = rational_pow(*r.alpha_exact, 3) - rational_from_double(epsilon);
  r.threshold = to_double(threshold);

  std::vector<std::uint64_t> counts(g.size(), 0);
  for_each_chunk(g.size(), kChunk, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t d = begin; d < end; ++d) {
      const std::uint64_t s1 = g.apply(spec.m1, d);
      const std::uint64_t s2 = g.apply(spec.m2, d);
      std::uint64_t c = 0;
      for (std::uint64_t x = 0; x < g.size(); ++x) {
        if (indicator[x] && indicator[g.add(x, s1)] && indicator[g.add(x, s2)]) ++c;
      }
      counts[d] = c;
    }
  });
  r.beta.resize(g.size());
  r.beta_exact.resize(g.size());
  std::uint64_t best = 0;
  for (std::uint64_t d = 0; d < g.size(); ++d) {
    r.beta_exact[d] = Rational(counts[d], g.size());
    r.beta[d] = to_double(r.beta_exact[d]);
    if (d == 0) continue;
    if (r.argmax_d == 0 || counts[d] > best) {
      best = counts[d];
      r.argmax_d = d;
    }
    if (r.beta_exact[d] >= threshold) ++r.threshold_hits;
  }
  r.max_beta = g.size() > 1 ? r.beta[r.argmax_d] : 0;
  return r;
}

}  // namespace popdiff
