#include "popdiff/linalg.hpp"

#include <algorithm>
#include <atomic>

#include "popdiff/parallel.hpp"

namespace popdiff {

namespace {
std::atomic<std::size_t> g_workers{1};
}

std::size_t worker_count() { return g_workers.load(); }
void set_worker_count(std::size_t workers) {
  g_workers.store(std::max<std::size_t>(1, workers));
}

RowEchelon::RowEchelon(std::size_t dim, std::uint32_t p) : dim_(dim), p_(p) {}

void RowEchelon::reduce(Vec& v, Vec* coords) const {
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const Residue f = v[pivots_[r]];
    if (f == 0) continue;
    if (coords) (*coords)[r] = f;
    const Vec& row = rows_[r];
    for (std::size_t i = pivots_[r]; i < dim_; ++i) {
      if (row[i]) v[i] = fp::sub(v[i], fp::mul(f, row[i], p_), p_);
    }
  }
}

bool RowEchelon::insert(Vec v) {
  if (v.size() != dim_) throw DimensionMismatch("vector length mismatch");
  if (full()) return false;
  for (auto& x : v) x %= p_;
  reduce(v, nullptr);
  const auto nz =
      std::find_if(v.begin(), v.end(), [](Residue x) { return x != 0; });
  if (nz == v.end()) return false;
  const auto piv = static_cast<std::size_t>(nz - v.begin());
  const Residue s = fp::inv(v[piv], p_);
  for (auto& x : v) x = fp::mul(x, s, p_);
  // keep the basis fully reduced so pivot columns are unit vectors
  for (auto& row : rows_) {
    const Residue f = row[piv];
    if (f == 0) continue;
    for (std::size_t i = piv; i < dim_; ++i) {
      if (v[i]) row[i] = fp::sub(row[i], fp::mul(f, v[i], p_), p_);
    }
  }
  const auto pos = static_cast<std::size_t>(
      std::lower_bound(pivots_.begin(), pivots_.end(), piv) - pivots_.begin());
  rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(v));
  pivots_.insert(pivots_.begin() + static_cast<std::ptrdiff_t>(pos), piv);
  return true;
}

bool RowEchelon::contains(Vec v) const {
  if (v.size() != dim_) throw DimensionMismatch("vector length mismatch");
  for (auto& x : v) x %= p_;
  reduce(v, nullptr);
  return std::all_of(v.begin(), v.end(), [](Residue x) { return x == 0; });
}

std::optional<Vec> RowEchelon::coordinates(Vec v) const {
  if (v.size() != dim_) throw DimensionMismatch("vector length mismatch");
  for (auto& x : v) x %= p_;
  Vec coords(rows_.size(), 0);
  reduce(v, &coords);
  if (!std::all_of(v.begin(), v.end(), [](Residue x) { return x == 0; })) {
    return std::nullopt;
  }
  return coords;
}

std::vector<Vec> nullspace(const std::vector<Vec>& rows, std::size_t cols,
                           std::uint32_t p) {
  RowEchelon ech(cols, p);
  for (const auto& r : rows) {
    if (ech.full()) break;
    ech.insert(r);
  }
  std::vector<bool> is_pivot(cols, false);
  for (auto c : ech.pivots()) is_pivot[c] = true;
  std::vector<Vec> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    Vec v(cols, 0);
    v[free] = 1;
    for (std::size_t r = 0; r < ech.rank(); ++r) {
      v[ech.pivots()[r]] = fp::neg(ech.rows()[r][free], p);
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

std::size_t span_rank(const std::vector<Vec>& vectors, std::size_t dim,
                      std::uint32_t p) {
  RowEchelon ech(dim, p);
  for (const auto& v : vectors) ech.insert(v);
  return ech.rank();
}

std::vector<Vec> span_basis(const std::vector<Vec>& vectors, std::size_t dim,
                            std::uint32_t p) {
  RowEchelon ech(dim, p);
  for (const auto& v : vectors) ech.insert(v);
  return ech.rows();
}

bool span_contains(const std::vector<Vec>& outer,
                   const std::vector<Vec>& inner, std::size_t dim,
                   std::uint32_t p) {
  RowEchelon ech(dim, p);
  for (const auto& v : outer) ech.insert(v);
  return std::all_of(inner.begin(), inner.end(),
                     [&](const Vec& v) { return ech.contains(v); });
}

bool same_span(const std::vector<Vec>& a, const std::vector<Vec>& b,
               std::size_t dim, std::uint32_t p) {
  return span_contains(a, b, dim, p) && span_contains(b, a, dim, p);
}

std::vector<Vec> span_intersection(const std::vector<Vec>& a,
                                   const std::vector<Vec>& b, std::size_t dim,
                                   std::uint32_t p) {
  // x in A ∩ B  iff  x = Σ s_i a_i = Σ t_j b_j; solve for (s, -t).
  const auto ba = span_basis(a, dim, p);
  const auto bb = span_basis(b, dim, p);
  const std::size_t unknowns = ba.size() + bb.size();
  std::vector<Vec> eqs(dim, Vec(unknowns, 0));
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t s = 0; s < ba.size(); ++s) eqs[i][s] = ba[s][i];
    for (std::size_t t = 0; t < bb.size(); ++t) {
      eqs[i][ba.size() + t] = fp::neg(bb[t][i], p);
    }
  }
  std::vector<Vec> out;
  for (const auto& sol : nullspace(eqs, unknowns, p)) {
    Vec x(dim, 0);
    for (std::size_t s = 0; s < ba.size(); ++s) {
      if (sol[s] == 0) continue;
      for (std::size_t i = 0; i < dim; ++i) {
        x[i] = fp::add(x[i], fp::mul(sol[s], ba[s][i], p), p);
      }
    }
    out.push_back(std::move(x));
  }
  return span_basis(out, dim, p);
}

}  // namespace popdiff
