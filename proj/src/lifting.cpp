#include <set>

#include "popdiff/threept.hpp"

namespace popdiff {

namespace {

void require_square(const IntMatrix& m, std::size_t k, const char* name) {
  if (m.size() != k) throw DimensionMismatch(std::string(name) + " must be k x k");
  for (const auto& row : m) {
    if (row.size() != k) throw DimensionMismatch(std::string(name) + " must be k x k");
  }
}

IntMatrix subtract(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix out = a;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) out[i][j] -= b[i][j];
  }
  return out;
}

std::vector<std::int64_t> times(const IntMatrix& m, const std::vector<std::int64_t>& v) {
  std::vector<std::int64_t> out(m.size(), 0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  }
  return out;
}

FpMatrix reduce(const IntMatrix& m, std::uint32_t p) {
  const std::size_t k = m.size();
  FpMatrix out(k, k, p);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) out(i, j) = fp::reduce(m[i][j], p);
  }
  return out;
}

bool divides(const BigInt& det, std::uint64_t p) { return det % p == 0; }

}  // namespace

BigInt integer_det(const IntMatrix& m) {
  // fraction-free (Bareiss) elimination
  const std::size_t k = m.size();
  if (k == 0) return 1;
  std::vector<std::vector<BigInt>> a(k, std::vector<BigInt>(k));
  for (std::size_t i = 0; i < k; ++i) {
    if (m[i].size() != k) throw DimensionMismatch("determinant needs a square matrix");
    for (std::size_t j = 0; j < k; ++j) a[i][j] = m[i][j];
  }
  BigInt sign = 1;
  BigInt prev = 1;
  for (std::size_t c = 0; c + 1 < k; ++c) {
    if (a[c][c] == 0) {
      std::size_t r = c + 1;
      while (r < k && a[r][c] == 0) ++r;
      if (r == k) return 0;
      std::swap(a[c], a[r]);
      sign = -sign;
    }
    for (std::size_t i = c + 1; i < k; ++i) {
      for (std::size_t j = c + 1; j < k; ++j) {
        a[i][j] = (a[i][j] * a[c][c] - a[i][c] * a[c][j]) / prev;
      }
    }
    prev = a[c][c];
  }
  return sign * a[k - 1][k - 1];
}

std::uint64_t next_prime(std::uint64_t n) {
  for (std::uint64_t c = n + 1; c > n; ++c) {
    if (is_prime_u64(c)) return c;
  }
  throw NoPrimeInWindow("no prime above " + std::to_string(n) + " in 64 bits");
}

LiftReport lift_to_interval(std::uint64_t n, const std::vector<std::vector<std::int64_t>>& a,
                            const IntMatrix& m1, const IntMatrix& m2,
                            const LiftOptions& options, const Guard& guard) {
  if (n < 2) throw InvalidArgument("the box needs N >= 2");
  const std::size_t k = m1.size();
  if (k == 0) throw InvalidArgument("k must be at least 1");
  require_square(m1, k, "M1");
  require_square(m2, k, "M2");
  const Rational& eps = options.epsilon;
  if (eps <= 0 || eps >= 1) throw InvalidArgument("epsilon must lie in (0, 1)");
  guard.require(power_ld(n, k), "box [N]^k");

  const IntMatrix diff = subtract(m1, m2);
  const BigInt dets[] = {integer_det(m1), integer_det(m2), integer_det(diff)};
  for (const auto& d : dets) {
    if (d == 0) throw NotAutomorphism("M1, M2 and M1 - M2 must be invertible over Q");
  }

  LiftReport r;
  r.n = n;
  r.k = k;
  r.epsilon = eps;
  r.window_epsilon = eps;
  std::uint64_t p = next_prime(n);
  while (divides(dets[0], p) || divides(dets[1], p) || divides(dets[2], p)) p = next_prime(p);
  // p < (1 + eps/k) N  <=>  k (p - N) < eps N
  if (!(Rational(BigInt(k) * (p - n)) < eps * Rational(n))) {
    if (!options.widen) {
      throw NoPrimeInWindow("no usable prime in (N, (1 + eps/k) N)");
    }
    r.widened = true;
    r.window_epsilon = Rational(BigInt(k) * (p - n + 1), BigInt(n));
  }
  if (p > kMaxModulus) throw TooLarge("prime " + std::to_string(p) + " exceeds the modulus limit");
  r.prime = p;
  guard.require(power_ld(p, k), "(Z/pZ)^k");

  const auto pp = static_cast<std::uint32_t>(p);
  const FiniteGroup g = FiniteGroup::vector(pp, k, 1);
  const FiniteGroupSpec spec(g, GroupMap(reduce(m1, pp)), GroupMap(reduce(m2, pp)));
  const GridShape& shape = g.shape();

  std::vector<std::uint8_t> in_a(g.size(), 0);
  for (const auto& pt : a) {
    if (pt.size() != k) throw DimensionMismatch("points of A must have k coordinates");
    Vec digits(k);
    for (std::size_t i = 0; i < k; ++i) {
      if (pt[i] < 0 || static_cast<std::uint64_t>(pt[i]) >= n) {
        throw InvalidArgument("point of A outside {0, ..., N-1}^k");
      }
      digits[i] = static_cast<Residue>(pt[i]);
    }
    in_a[shape.encode(digits)] = 1;
  }
  const auto members = std::count(in_a.begin(), in_a.end(), std::uint8_t{1});
  r.alpha = static_cast<double>(members) / static_cast<double>(power_ld(n, k));

  // S0: x -> (M1 x)_i / p and x -> (M2 x)_i / p, i.e. the rows of M1 and M2.
  std::vector<std::uint64_t> s0;
  for (const IntMatrix* m : {&m1, &m2}) {
    for (const auto& row : *m) {
      Vec digits(k);
      for (std::size_t j = 0; j < k; ++j) digits[j] = fp::reduce(row[j], pp);
      s0.push_back(shape.encode(digits));
    }
  }
  r.bohr_radius = eps / Rational(2 * k);
  const BohrSet b = bohr_set(g, s0, r.bohr_radius, guard);
  r.bohr_size = b.count();
  const auto nu = smoothing_measure(g, b, guard);
  guard.require(static_cast<long double>(nu.support.size()) * static_cast<long double>(g.size()),
                "lift scan");

  // x_i in [(eps/k) p, (1 - eps/k) p] keeps x + M_j d inside [0, p) whenever
  // every |(M_j d)_i| <= (eps/k) p.
  const Rational margin = eps * Rational(p) / Rational(k);
  auto in_margin = [&](std::int64_t v) {
    return Rational(v) >= margin && Rational(v) <= Rational(p) - margin;
  };
  auto encode_point = [&](const std::vector<std::int64_t>& v) {
    Vec digits(k);
    for (std::size_t i = 0; i < k; ++i) digits[i] = static_cast<Residue>(v[i]);
    return shape.encode(digits);
  };
  auto audit = [&](const std::vector<std::int64_t>& v) {
    for (std::int64_t c : v) {
      if (c < 0 || static_cast<std::uint64_t>(c) >= n) return false;
    }
    return in_a[encode_point(v)] != 0;
  };

  bool have_best = false;
  for (std::uint64_t d : nu.support) {
    if (d == 0) continue;
    const Vec digits = shape.decode(d);
    std::vector<std::int64_t> lift(k);
    for (std::size_t i = 0; i < k; ++i) {
      lift[i] = digits[i] <= p / 2 ? static_cast<std::int64_t>(digits[i])
                                   : static_cast<std::int64_t>(digits[i]) - static_cast<std::int64_t>(p);
    }
    const auto o1 = times(m1, lift);
    const auto o2 = times(m2, lift);
    bool certified = true;
    for (const auto* o : {&o1, &o2}) {
      for (std::int64_t c : *o) {
        if (Rational(c < 0 ? -c : c) > margin) certified = false;
      }
    }
    if (!certified) continue;
    ++r.candidates;

    const std::uint64_t s1 = g.apply(spec.m1, d);
    const std::uint64_t s2 = g.apply(spec.m2, d);
    std::uint64_t modp = 0, discarded = 0, lifted = 0;
    std::vector<LiftedTriple> triples;
    for (std::uint64_t x = 0; x < g.size(); ++x) {
      if (!in_a[x] || !in_a[g.add(x, s1)] || !in_a[g.add(x, s2)]) continue;
      ++modp;
      const Vec xd = shape.decode(x);
      std::vector<std::int64_t> base(xd.begin(), xd.end());
      if (!std::all_of(base.begin(), base.end(), in_margin)) {
        ++discarded;
        continue;
      }
      LiftedTriple t{base, base, base};
      for (std::size_t i = 0; i < k; ++i) {
        t.second[i] += o1[i];
        t.third[i] += o2[i];
      }
      if (!audit(t.x) || !audit(t.second) || !audit(t.third)) ++r.audit_failures;
      ++lifted;
      if (triples.size() < options.keep_triples) triples.push_back(std::move(t));
    }
    if (!have_best || lifted > r.lifted) {
      have_best = true;
      r.best_d = lift;
      r.offset1 = o1;
      r.offset2 = o2;
      r.modp_count = modp;
      r.boundary_discarded = discarded;
      r.lifted = lifted;
      r.triples = std::move(triples);
    }
  }
  return r;
}

}  // namespace popdiff
