#pragma once

// Independent reference computations used only by the tests. They avoid the
// library's own polynomial and elimination routines where possible.

#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "popdiff/ffalg.hpp"

namespace oracle {

using Poly = std::vector<std::int64_t>;  // lowest degree first

inline std::int64_t md(std::int64_t v, std::int64_t p) {
  v %= p;
  return v < 0 ? v + p : v;
}

inline void trim(Poly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

inline std::int64_t inv_mod(std::int64_t a, std::int64_t p) {
  // Fermat; p is prime in every test
  std::int64_t r = 1, b = md(a, p), e = p - 2;
  while (e) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return r;
}

inline Poly monic(Poly f, std::int64_t p) {
  trim(f);
  if (f.empty()) return f;
  const std::int64_t s = inv_mod(f.back(), p);
  for (auto& c : f) c = md(c * s, p);
  return f;
}

/// Remainder of f / g; g nonzero.
inline Poly rem(Poly f, const Poly& g, std::int64_t p) {
  trim(f);
  const std::int64_t s = inv_mod(g.back(), p);
  while (f.size() >= g.size() && !f.empty()) {
    const std::int64_t q = md(f.back() * s, p);
    const std::size_t shift = f.size() - g.size();
    for (std::size_t i = 0; i < g.size(); ++i) {
      f[shift + i] = md(f[shift + i] - q * g[i], p);
    }
    trim(f);
  }
  return f;
}

inline Poly quot(Poly f, const Poly& g, std::int64_t p) {
  trim(f);
  Poly q(f.size() >= g.size() ? f.size() - g.size() + 1 : 0, 0);
  const std::int64_t s = inv_mod(g.back(), p);
  while (f.size() >= g.size() && !f.empty()) {
    const std::int64_t c = md(f.back() * s, p);
    const std::size_t shift = f.size() - g.size();
    q[shift] = c;
    for (std::size_t i = 0; i < g.size(); ++i) {
      f[shift + i] = md(f[shift + i] - c * g[i], p);
    }
    trim(f);
  }
  return q;
}

/// Characteristic polynomial det(tI - A) by Berkowitz's division-free
/// algorithm; returned lowest degree first and monic.
inline Poly charpoly(const popdiff::FpMatrix& a) {
  const std::int64_t p = a.modulus();
  const std::size_t n = a.rows();
  auto at = [&](std::size_t i, std::size_t j) {
    return static_cast<std::int64_t>(a(i, j));
  };
  // coefficients highest degree first
  std::vector<std::int64_t> c = {1, md(-at(0, 0), p)};
  for (std::size_t r = 1; r < n; ++r) {
    // leading block M = A[0..r)x[0..r), S = A[0..r) x r, R = r x A[0..r)
    std::vector<std::int64_t> col(r + 2, 0);
    col[0] = 1;
    col[1] = md(-at(r, r), p);
    std::vector<std::int64_t> v(r);  // M^i S
    for (std::size_t i = 0; i < r; ++i) v[i] = at(i, r);
    for (std::size_t t = 2; t <= r + 1; ++t) {
      std::int64_t rs = 0;
      for (std::size_t i = 0; i < r; ++i) rs = md(rs + at(r, i) * v[i], p);
      col[t] = md(-rs, p);
      std::vector<std::int64_t> nv(r, 0);
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) nv[i] = md(nv[i] + at(i, j) * v[j], p);
      }
      v = nv;
    }
    std::vector<std::int64_t> next(r + 2, 0);
    for (std::size_t i = 0; i < r + 2; ++i) {
      for (std::size_t j = 0; j <= i && j < c.size(); ++j) {
        next[i] = md(next[i] + col[i - j] * c[j], p);
      }
    }
    c = next;
  }
  Poly out(c.rbegin(), c.rend());
  trim(out);
  return out;
}

/// Monic irreducible factors (with multiplicity) by trial division with every
/// monic polynomial in increasing degree.
inline std::vector<Poly> factor(Poly f, std::int64_t p) {
  f = monic(f, p);
  std::vector<Poly> out;
  for (std::size_t d = 1; f.size() > 1 && d < f.size(); ++d) {
    std::int64_t count = 1;
    for (std::size_t i = 0; i < d; ++i) count *= p;
    for (std::int64_t idx = 0; idx < count && f.size() > 1; ++idx) {
      Poly q(d + 1, 0);
      q[d] = 1;
      std::int64_t t = idx;
      for (std::size_t i = 0; i < d; ++i) {
        q[i] = t % p;
        t /= p;
      }
      while (f.size() > 1 && rem(f, q, p).empty()) {
        out.push_back(q);
        f = quot(f, q, p);
      }
    }
  }
  return out;
}

/// True iff some eigenvalue lambda of A (over the algebraic closure) has
/// -lambda also an eigenvalue. Root sets of irreducibles q and monic(q(-t))
/// coincide up to negation, so a pair exists iff one factor equals the
/// negated-argument form of another (or of itself).
inline bool has_negated_pair(const popdiff::FpMatrix& a) {
  const std::int64_t p = a.modulus();
  const auto factors = factor(charpoly(a), p);
  std::set<Poly> distinct(factors.begin(), factors.end());
  for (const auto& q : distinct) {
    Poly neg = q;
    for (std::size_t i = 1; i < neg.size(); i += 2) neg[i] = md(-neg[i], p);
    neg = monic(neg, p);
    if (neg == Poly{0, 1}) {
      // the root 0 pairs with itself only if it is a root
      if (q == Poly{0, 1}) return true;
      continue;
    }
    if (distinct.count(neg)) return true;
  }
  return false;
}

inline popdiff::FpMatrix random_matrix(std::size_t rows, std::size_t cols,
                                       std::uint32_t p, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> dist(0, p - 1);
  popdiff::Vec e(rows * cols);
  for (auto& x : e) x = dist(rng);
  return popdiff::FpMatrix(rows, cols, std::move(e), p);
}

/// Determinant by cofactor expansion (independent of elimination).
inline std::int64_t det_cofactor(const popdiff::FpMatrix& a) {
  const std::int64_t p = a.modulus();
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  if (n == 1) return a(0, 0);
  std::int64_t total = 0;
  for (std::size_t c = 0; c < n; ++c) {
    popdiff::Vec sub;
    for (std::size_t i = 1; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j != c) sub.push_back(a(i, j));
      }
    }
    const std::int64_t minor =
        det_cofactor(popdiff::FpMatrix(n - 1, n - 1, sub, a.modulus()));
    const std::int64_t term = static_cast<std::int64_t>(a(0, c)) * minor % p;
    total = md(total + ((c % 2) ? -term : term), p);
  }
  return total;
}

inline popdiff::FpMatrix random_invertible(std::size_t k, std::uint32_t p,
                                           std::mt19937_64& rng) {
  for (;;) {
    auto m = random_matrix(k, k, p, rng);
    if (det_cofactor(m) != 0) return m;
  }
}

}  // namespace oracle
