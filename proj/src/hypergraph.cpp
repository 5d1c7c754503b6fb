// 3-AP-free sets mod L and the triangle hypergraphon built from them.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "popdiff/counterexample.hpp"

namespace popdiff::cex {

namespace {

constexpr std::uint32_t kMaxExhaustive = 30;

// Adding c to a 3-AP-free set keeps it free iff no nontrivial solution of
// t1 + t2 = 2 t3 uses c.
bool extends(const std::vector<std::uint32_t>& set, std::uint32_t c, std::uint32_t l) {
  std::vector<std::uint32_t> all(set);
  all.push_back(c);
  for (auto t1 : all) {
    for (auto t2 : all) {
      const std::uint64_t s = (static_cast<std::uint64_t>(t1) + t2) % l;
      for (auto t3 : all) {
        if (t1 != c && t2 != c && t3 != c) continue;
        if ((2 * static_cast<std::uint64_t>(t3)) % l == s && !(t1 == t2 && t2 == t3)) {
          return false;
        }
      }
    }
  }
  return true;
}

void search_max(std::vector<std::uint32_t>& current, std::uint32_t next, std::uint32_t l,
                std::vector<std::uint32_t>& best) {
  if (current.size() > best.size()) best = current;
  for (std::uint32_t c = next; c < l; ++c) {
    if (current.size() + (l - c) <= best.size()) return;
    if (!extends(current, c, l)) continue;
    current.push_back(c);
    search_max(current, c + 1, l, best);
    current.pop_back();
  }
}

std::vector<std::uint32_t> behrend(std::uint32_t l) {
  // Integers below L/2 whose base-B digits are all below B/2 and lie on a
  // common sphere. Sums of two such integers have no carries and stay below L,
  // so a progression mod L is a progression of digit vectors.
  std::vector<std::uint32_t> best;
  const std::uint64_t limit = (static_cast<std::uint64_t>(l) + 1) / 2;  // x < L/2
  const std::uint64_t max_base = std::clamp<std::uint64_t>(limit, 3, 256);
  for (std::uint64_t base = 3; base <= max_base; ++base) {
    const std::uint64_t digit_cap = (base - 1) / 2 + 1;  // digits 0..(B-1)/2
    for (std::size_t m = 1; m <= 20; ++m) {
      std::uint64_t span = 1;
      for (std::size_t i = 1; i < m; ++i) span *= base;
      if (span >= limit && m > 1) break;
      if (std::pow(static_cast<double>(digit_cap), static_cast<double>(m)) > 1e6) break;
      std::map<std::uint64_t, std::vector<std::uint32_t>> spheres;
      std::vector<std::uint64_t> digits(m, 0);
      while (true) {
        std::uint64_t value = 0, norm = 0, place = 1;
        for (std::size_t i = 0; i < m; ++i) {
          value += digits[i] * place;
          norm += digits[i] * digits[i];
          place *= base;
        }
        if (2 * value < l) spheres[norm].push_back(static_cast<std::uint32_t>(value));
        std::size_t i = 0;
        while (i < m && ++digits[i] == digit_cap) digits[i++] = 0;
        if (i == m) break;
      }
      for (auto& [norm, members] : spheres) {
        if (members.size() > best.size()) best = members;
      }
    }
  }
  std::sort(best.begin(), best.end());
  return best;
}

}  // namespace

const char* to_string(Ap3Method method) {
  switch (method) {
    case Ap3Method::ExhaustiveMax: return "exhaustive-max";
    case Ap3Method::Greedy: return "greedy";
    case Ap3Method::Behrend: return "behrend";
  }
  return "?";
}

bool is_ap3_free(const std::vector<std::uint32_t>& set, std::uint32_t modulus) {
  if (modulus == 0) return false;
  std::vector<bool> member(modulus, false);
  for (auto t : set) {
    if (t >= modulus || member[t]) return false;
    member[t] = true;
  }
  for (auto t1 : set) {
    for (auto t2 : set) {
      const std::uint64_t s = (static_cast<std::uint64_t>(t1) + t2) % modulus;
      for (auto t3 : set) {
        if ((2 * static_cast<std::uint64_t>(t3)) % modulus == s && !(t1 == t2 && t2 == t3)) {
          return false;
        }
      }
    }
  }
  return true;
}

std::vector<std::uint32_t> ap3_free_set(std::uint32_t modulus, Ap3Method method) {
  if (modulus == 0) throw InvalidArgument("ap3_free_set: L must be at least 1");
  std::vector<std::uint32_t> out;
  switch (method) {
    case Ap3Method::ExhaustiveMax: {
      if (modulus > kMaxExhaustive) {
        throw TooLarge("ap3_free_set: exhaustive search is limited to L <= 30");
      }
      // Translation invariance lets the search fix 0 in the set.
      std::vector<std::uint32_t> current{0};
      out = current;
      search_max(current, 1, modulus, out);
      break;
    }
    case Ap3Method::Greedy:
      for (std::uint32_t c = 0; c < modulus; ++c) {
        if (extends(out, c, modulus)) out.push_back(c);
      }
      break;
    case Ap3Method::Behrend:
      out = behrend(modulus);
      if (out.empty()) out.push_back(0);
      break;
  }
  if (!is_ap3_free(out, modulus)) {
    throw InvalidArgument(std::string("ap3_free_set: ") + to_string(method) +
                          " produced a set with a 3-term progression");
  }
  return out;
}

Hypergraphon::Hypergraphon(std::uint32_t modulus, std::vector<std::uint32_t> set)
    : l_(modulus), set_(std::move(set)) {
  if (l_ == 0 || l_ > 4096) throw InvalidArgument("Hypergraphon: L must lie in [1, 4096]");
  if (set_.empty()) throw InvalidArgument("Hypergraphon: empty difference set");
  std::sort(set_.begin(), set_.end());
  if (!is_ap3_free(set_, l_)) {
    throw InvalidArgument("Hypergraphon: difference set contains a 3-term progression mod L");
  }
  cells_.assign(static_cast<std::size_t>(l_) * l_ * l_, 0);
  for (std::uint32_t s = 0; s < l_; ++s) {
    for (auto t : set_) {
      const std::uint32_t v = (s + t) % l_;
      const std::uint32_t w = static_cast<std::uint32_t>((s + 2ULL * t) % l_);
      triangles_.push_back({s, v, w});
      cells_[(static_cast<std::size_t>(s) * l_ + v) * l_ + w] = 1;
    }
  }
  if (!unique_triangles()) {
    throw InvalidArgument("Hypergraphon: some edge lies in more than one triangle");
  }
}

std::uint32_t Hypergraphon::cell_of(double u) const {
  const double scaled = std::floor(u * l_);
  const auto c = static_cast<std::int64_t>(scaled) % static_cast<std::int64_t>(l_);
  return static_cast<std::uint32_t>(c < 0 ? c + l_ : c);
}

double Hypergraphon::g2(double u, double v, double w) const {
  return cell(cell_of(u), cell_of(v), cell_of(w)) ? 1.0 : 0.0;
}

bool Hypergraphon::unique_triangles() const {
  std::vector<bool> in_set(l_, false), in_double(l_, false);
  for (auto t : set_) {
    in_set[t] = true;
    in_double[(2ULL * t) % l_] = true;
  }
  auto diff = [this](std::uint32_t a, std::uint32_t b) { return (a + l_ - b) % l_; };
  auto uv = [&](std::uint32_t u, std::uint32_t v) { return in_set[diff(v, u)]; };
  auto vw = [&](std::uint32_t v, std::uint32_t w) { return in_set[diff(w, v)]; };
  auto uw = [&](std::uint32_t u, std::uint32_t w) { return in_double[diff(w, u)]; };
  for (std::uint32_t a = 0; a < l_; ++a) {
    for (std::uint32_t b = 0; b < l_; ++b) {
      std::uint32_t n_uv = 0, n_vw = 0, n_uw = 0;
      for (std::uint32_t c = 0; c < l_; ++c) {
        // (a, b) as a U-V edge completed by w = c, and so on
        if (uv(a, b) && vw(b, c) && uw(a, c)) {
          ++n_uv;
          if (!cell(a, b, c)) return false;
        }
        if (vw(a, b) && uv(c, a) && uw(c, b)) ++n_vw;
        if (uw(a, b) && uv(a, c) && vw(c, b)) ++n_uw;
      }
      if (uv(a, b) && n_uv != 1) return false;
      if (vw(a, b) && n_vw != 1) return false;
      if (uw(a, b) && n_uw != 1) return false;
    }
  }
  return true;
}

namespace {

struct TriangleIndex {
  // triangles containing a given cell in each part
  std::vector<std::vector<std::size_t>> by_part[3];
};

TriangleIndex index_triangles(const Hypergraphon& h) {
  TriangleIndex idx;
  for (auto& part : idx.by_part) part.assign(h.modulus(), {});
  const auto& tri = h.triangles();
  for (std::size_t i = 0; i < tri.size(); ++i) {
    for (int part = 0; part < 3; ++part) idx.by_part[part][tri[i][part]].push_back(i);
  }
  return idx;
}

struct PatternCounter {
  const Hypergraphon& h;
  const TriangleIndex& idx;
  const std::vector<std::array<std::size_t, 3>>& terms;  // global variable ids
  std::vector<std::int64_t> value;                       // -1 when unassigned

  BigInt count(std::size_t depth) {
    if (depth == terms.size()) return 1;
    const auto& term = terms[depth];
    const auto& tri = h.triangles();
    // Prefer an assigned variable to narrow the candidate triangles.
    const std::vector<std::size_t>* candidates = nullptr;
    for (int part = 0; part < 3 && candidates == nullptr; ++part) {
      if (value[term[part]] >= 0) candidates = &idx.by_part[part][value[term[part]]];
    }
    BigInt total = 0;
    auto visit = [&](std::size_t t) {
      std::array<bool, 3> fresh{};
      for (int part = 0; part < 3; ++part) {
        const std::int64_t have = value[term[part]];
        if (have >= 0 && have != tri[t][part]) return;
      }
      for (int part = 0; part < 3; ++part) {
        fresh[part] = value[term[part]] < 0;
        if (fresh[part]) value[term[part]] = tri[t][part];
      }
      total += count(depth + 1);
      for (int part = 0; part < 3; ++part) {
        if (fresh[part]) value[term[part]] = -1;
      }
    };
    if (candidates != nullptr) {
      for (auto t : *candidates) visit(t);
    } else {
      for (std::size_t t = 0; t < tri.size(); ++t) visit(t);
    }
    return total;
  }
};

}  // namespace

Rational cell_pattern_expectation(const Hypergraphon& h, const CellPattern& pattern,
                                  const Guard& guard) {
  const std::size_t total_vars = pattern.u_vars + pattern.v_vars + pattern.w_vars;
  std::vector<std::array<std::size_t, 3>> terms;
  std::vector<bool> used(total_vars, false);
  for (const auto& t : pattern.terms) {
    if (t[0] >= pattern.u_vars || t[1] >= pattern.v_vars || t[2] >= pattern.w_vars) {
      throw InvalidArgument("cell_pattern_expectation: variable index out of range");
    }
    std::array<std::size_t, 3> g{t[0], pattern.u_vars + t[1],
                                 pattern.u_vars + pattern.v_vars + t[2]};
    for (auto v : g) used[v] = true;
    terms.push_back(g);
  }
  // Order terms so each one after the first of its component shares a
  // variable with an earlier term.
  std::vector<std::array<std::size_t, 3>> ordered;
  std::vector<bool> placed(terms.size(), false), seen(total_vars, false);
  while (ordered.size() < terms.size()) {
    std::size_t pick = terms.size();
    for (std::size_t i = 0; i < terms.size() && pick == terms.size(); ++i) {
      if (placed[i]) continue;
      for (auto v : terms[i]) {
        if (seen[v]) pick = i;
      }
    }
    if (pick == terms.size()) {
      pick = static_cast<std::size_t>(std::find(placed.begin(), placed.end(), false) -
                                      placed.begin());
    }
    placed[pick] = true;
    for (auto v : terms[pick]) seen[v] = true;
    ordered.push_back(terms[pick]);
  }
  const long double tri = static_cast<long double>(h.triangles().size());
  guard.require(tri * power_ld(std::max<std::size_t>(h.set().size(), 1),
                               ordered.empty() ? 0 : ordered.size() - 1),
                "cell_pattern_expectation");

  const auto idx = index_triangles(h);
  PatternCounter counter{h, idx, ordered, std::vector<std::int64_t>(total_vars, -1)};
  const BigInt hits = counter.count(0);
  BigInt denom = 1;
  for (bool u : used) {
    if (u) denom *= h.modulus();
  }
  return Rational(hits, denom);
}

CellPattern pattern_a() {
  return CellPattern{2, 3, 3, {{0, 0, 0}, {1, 0, 1}, {0, 2, 2}, {1, 2, 0}}};
}

CellPattern pattern_b() {
  return CellPattern{4, 3, 2, {{0, 0, 0}, {1, 1, 1}, {1, 2, 0}, {3, 0, 1}}};
}

HypergraphExpectations hypergraph_expectations(const Hypergraphon& h, const Guard& guard) {
  if (h.modulus() > kMaxExhaustive) {
    throw TooLarge("hypergraph_expectations: exhaustive enumeration is limited to L <= 30");
  }
  HypergraphExpectations r;
  const BigInt l = h.modulus();
  const BigInt size = h.set().size();
  r.mean_g2 = cell_pattern_expectation(h, CellPattern{1, 1, 1, {{0, 0, 0}}}, guard);
  r.pattern_a = cell_pattern_expectation(h, pattern_a(), guard);
  r.pattern_b = cell_pattern_expectation(h, pattern_b(), guard);
  r.mean_identity = r.mean_g2 == Rational(size, l * l);
  r.pattern_a_identity = r.pattern_a == Rational(size, boost::multiprecision::pow(l, 6));
  r.pattern_b_bound = r.pattern_b <= Rational(BigInt(1), boost::multiprecision::pow(l, 4));
  r.unique_triangles = h.unique_triangles();
  return r;
}

}  // namespace popdiff::cex
