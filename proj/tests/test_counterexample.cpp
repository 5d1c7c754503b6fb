#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "popdiff/analysis.hpp"
#include "popdiff/counterexample.hpp"

using namespace popdiff;
using namespace popdiff::cex;

namespace {

Vec vec(std::initializer_list<std::int64_t> xs) {
  Vec v;
  for (auto x : xs) v.push_back(fp::reduce(x, 5));
  return v;
}

std::int64_t dot5(const Vec& a, const Vec& b) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<std::int64_t>(a[i]) * b[i];
  return s % 5;
}

// Lambda2' by filtering all of F_5^8.
std::vector<Vec> lambda2_by_filter() {
  const auto cons = lambda2_constraints();
  std::vector<Vec> out;
  Vec v(8, 0);
  for (std::uint64_t i = 0; i < 390625; ++i) {
    std::uint64_t r = i;
    for (auto& d : v) {
      d = static_cast<Residue>(r % 5);
      r /= 5;
    }
    if (std::all_of(cons.begin(), cons.end(), [&](const Vec& w) { return dot5(v, w) == 0; })) {
      out.push_back(v);
    }
  }
  return out;
}

bool g1_oracle(std::int64_t u, std::int64_t v) {
  static const std::set<std::pair<int, int>> s = {{0, 2}, {0, 3}, {0, 4}, {1, 0}, {1, 3},
                                                  {1, 4}, {2, 1}, {2, 2}, {3, 0}, {3, 1}};
  return s.count({static_cast<int>(fp::reduce(u, 5)), static_cast<int>(fp::reduce(v, 5))}) > 0;
}

// No s and t != 0 with s, s+t, s+2t all in the set.
bool ap_scan(const std::vector<std::uint32_t>& set, std::uint32_t l) {
  std::vector<bool> in(l, false);
  for (auto x : set) in[x] = true;
  for (std::uint32_t s = 0; s < l; ++s) {
    for (std::uint32_t t = 1; t < l; ++t) {
      if (in[s] && in[(s + t) % l] && in[(s + 2 * t) % l]) return false;
    }
  }
  return true;
}

// E of a product of g2 terms by enumerating every cell assignment.
Rational brute_pattern(const Hypergraphon& h, const CellPattern& p) {
  const std::size_t vars = p.u_vars + p.v_vars + p.w_vars;
  const std::uint32_t l = h.modulus();
  std::vector<std::uint32_t> val(vars, 0);
  std::uint64_t hits = 0, total = 0;
  while (true) {
    bool all = true;
    for (const auto& t : p.terms) {
      all = all && h.cell(val[t[0]], val[p.u_vars + t[1]], val[p.u_vars + p.v_vars + t[2]]);
    }
    hits += all;
    ++total;
    std::size_t i = 0;
    while (i < vars && ++val[i] == l) val[i++] = 0;
    if (i == vars) break;
  }
  return Rational(BigInt(hits), BigInt(total));
}

GridFunction random_indicator(std::size_t n, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(density);
  const GridShape shape(5, 2, n);
  std::vector<Rational> v(shape.size());
  for (auto& x : v) x = coin(rng) ? 1 : 0;
  return GridFunction(shape, std::move(v));
}

}  // namespace

TEST(RotatedSquare, GammaDiagonalizes) {
  const auto d = diagonalize_rotated_square();
  EXPECT_EQ(mat_det(d.gamma), 4u);
  EXPECT_TRUE(d.gamma_invertible);
  EXPECT_TRUE(d.conjugation_ok);
  // second coordinates y, y+b, y-2b, y-b
  EXPECT_EQ(d.diagonal.m2, FpMatrix::from_rows({{2, 0}, {0, -2}}, 5));
  const FpMatrix sum = d.diagonal.m1 + d.diagonal.m2;
  EXPECT_EQ(sum, FpMatrix::from_rows({{3, 0}, {0, -1}}, 5));
  EXPECT_FALSE(check_spectral(d.rotated));
}

TEST(RotatedSquare, ConjugationPreservesCountMultiset) {
  const auto d = diagonalize_rotated_square();
  const GridShape shape(5, 2, 2);
  std::mt19937_64 rng(11);
  const GridFunction f = random_indicator(2, 0.5, rng);
  // g(Gamma X) = f(X)
  std::vector<Rational> moved(shape.size());
  for (std::uint64_t i = 0; i < shape.size(); ++i) {
    moved[shape.encode(shape.apply_left(d.gamma, shape.decode(i)))] = f.rationals()[i];
  }
  const GridFunction g(shape, std::move(moved));
  auto a = popular_search(f, d.rotated, 0.0).beta_exact;
  auto b = popular_search(g, d.diagonal, 0.0).beta_exact;
  // pointwise under D -> Gamma D, hence equal as multisets
  for (std::uint64_t i = 0; i < shape.size(); ++i) {
    EXPECT_EQ(a[i], b[shape.encode(shape.apply_left(d.gamma, shape.decode(i)))]);
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
}

TEST(Core, Invariants) {
  const CexCore core = make_core();
  EXPECT_EQ(core.s.size(), 10u);
  EXPECT_EQ(core.lambda2.dim(), 5u);
  EXPECT_TRUE(core.lambda2.contains(vec({0, 0, 0, 1, 0, -4, 0, -3})));
  for (int u = 0; u < 5; ++u) {
    for (int v = 0; v < 5; ++v) EXPECT_EQ(core.in_s(u, v), g1_oracle(u, v));
  }
  EXPECT_THROW(make_core({vec({1, 0, 0, 0, 0, 0, 0, 0})}), InvalidArgument);
}

TEST(Core, TableMatchesFilteredEnumeration) {
  const CexCore core = make_core();
  const CoreTable table = core_expectation_table(core);
  EXPECT_EQ(table.sup, make_rational(73, 3125));
  EXPECT_EQ(table.mean_g1, make_rational(2, 5));
  EXPECT_TRUE(table.strict);
  EXPECT_LT(table.sup, make_rational(80, 3125));
  EXPECT_EQ(rational_pow(table.mean_g1, 4), make_rational(80, 3125));

  const auto points = lambda2_by_filter();
  ASSERT_EQ(points.size(), 3125u);
  for (int s = 0; s < 5; ++s) {
    std::uint64_t hits = 0;
    for (const auto& v : points) {
      hits += g1_oracle(v[0], v[1]) && g1_oracle(v[2] + s, v[3]) &&
              g1_oracle(v[4] + 4 * s, v[5]) && g1_oracle(v[6] + 9 * s, v[7]);
    }
    EXPECT_EQ(table.by_shift[s], make_rational(static_cast<std::int64_t>(hits), 3125)) << s;
  }
}

TEST(Core, TableIndependentOfBasis) {
  const CexCore core = make_core();
  const CoreTable base = core_expectation_table(core);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const FpMatrix change = oracle::random_invertible(5, 5, rng);
    std::vector<Vec> basis;
    for (std::size_t i = 0; i < 5; ++i) {
      Vec v(8, 0);
      for (std::size_t j = 0; j < 5; ++j) {
        for (std::size_t c = 0; c < 8; ++c) {
          v[c] = fp::add(v[c], fp::mul(change(i, j), core.lambda2.basis()[j][c], 5), 5);
        }
      }
      basis.push_back(v);
    }
    const CoreTable other = core_expectation_table(make_core(basis));
    EXPECT_EQ(other.by_shift, base.by_shift);
  }
}

TEST(F1, SmallCasesByHand) {
  const CexCore core = make_core();
  const GridFunction f1 = build_f1(core, 1);
  ASSERT_EQ(f1.size(), 25u);
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 5; ++x) {
      EXPECT_EQ(f1.rationals()[x + 5 * y], g1_oracle(x * x, x * y) ? 1 : 0) << x << "," << y;
    }
  }
}

TEST(F1, MeanNearTwoFifths) {
  const GridFunction f1 = build_f1(make_core(), 4);
  EXPECT_NEAR(to_double(f1.mean_exact()), 0.4, 0.02);
}

TEST(F1, Beta1AgreesWithPatternCount) {
  const CexCore core = make_core();
  const GridFunction f1 = build_f1(core, 3);
  const PatternSpec diag = diagonalize_rotated_square().diagonal;
  const std::vector<std::pair<Vec, Vec>> dirs = {
      {vec({1, 0, 0}), vec({0, 1, 0})}, {vec({1, 2, 3}), vec({1, 2, 3})},
      {vec({0, 0, 0}), vec({4, 1, 0})}, {vec({2, 0, 1}), vec({0, 0, 0})}};
  for (const auto& [a, b] : dirs) {
    Vec d(a);
    d.insert(d.end(), b.begin(), b.end());
    EXPECT_EQ(beta1(core, a, b, 3), *pattern_count(f1, diag, d).exact);
  }
}

TEST(F1, Beta1NearCorePrediction) {
  const CexCore core = make_core();
  const CoreTable table = core_expectation_table(core);
  const Vec a = vec({1, 1, 0, 0, 0}), b = vec({0, 1, 2, 0, 0});
  const Residue aa = static_cast<Residue>(dot5(a, a));
  EXPECT_NEAR(to_double(beta1(core, a, b, 5)), to_double(table.by_shift[aa]), 0.01);
}

// At n = 3 the O(5^{-n/2}) error is larger than the cell probability, so
// some cells of the coset are never hit; containment still holds exactly.
TEST(EightTuple, SupportInsideCosetAtN3) {
  const CexCore core = make_core();
  const Vec a = vec({1, 0, 2}), b = vec({0, 1, 1});
  const auto report = eight_tuple_distribution(core, a, b, 3);
  EXPECT_TRUE(report.support_ok);
  EXPECT_FALSE(report.full_support);
  EXPECT_EQ(report.predicted_dim, 5u);
  EXPECT_EQ(report.observed_span_dim, 5u);

  // observed tuples from scratch vs the coset listed point by point
  std::set<Vec> observed;
  std::vector<Vec> xs;
  for (int i = 0; i < 125; ++i) xs.push_back(vec({i % 5, (i / 5) % 5, i / 25}));
  for (const auto& x : xs) {
    for (const auto& y : xs) {
      Vec t;
      for (int i = 0; i < 4; ++i) {
        Vec xi(3), yi(3);
        for (int j = 0; j < 3; ++j) {
          xi[j] = fp::reduce(x[j] + kA[i] * a[j], 5);
          yi[j] = fp::reduce(y[j] + kB[i] * static_cast<std::int64_t>(b[j]), 5);
        }
        t.push_back(static_cast<Residue>(dot5(xi, xi)));
        t.push_back(static_cast<Residue>(dot5(xi, yi)));
      }
      observed.insert(t);
    }
  }
  const Vec shift = eight_tuple_shift(a, b);
  std::set<Vec> coset;
  for (auto v : lambda2_by_filter()) {
    for (std::size_t i = 0; i < 8; ++i) v[i] = fp::add(v[i], shift[i], 5);
    coset.insert(v);
  }
  EXPECT_TRUE(std::includes(coset.begin(), coset.end(), observed.begin(), observed.end()));
  EXPECT_EQ(observed.size(), report.cells_observed);
  EXPECT_LT(observed.size(), coset.size());
}

TEST(EightTuple, FullCosetFromN4) {
  const CexCore core = make_core();
  const auto report = eight_tuple_distribution(core, vec({1, 0, 2, 0}), vec({0, 1, 1, 3}), 4);
  EXPECT_TRUE(report.support_ok);
  EXPECT_TRUE(report.full_support);
  EXPECT_EQ(report.cells_observed, 3125u);
}

TEST(EightTuple, DeviationShrinks) {
  const CexCore core = make_core();
  const auto r3 = eight_tuple_distribution(core, vec({1, 0, 2}), vec({0, 1, 1}), 3);
  const auto r5 = eight_tuple_distribution(core, vec({1, 0, 2, 0, 0}), vec({0, 1, 1, 0, 0}), 5);
  EXPECT_TRUE(r5.support_ok);
  EXPECT_LT(r5.max_multiplicative_deviation, r3.max_multiplicative_deviation);
}

TEST(EightTuple, RejectsDependentDirections) {
  const CexCore core = make_core();
  EXPECT_THROW(eight_tuple_distribution(core, vec({1, 2, 0}), vec({2, 4, 0}), 3),
               DependentDirections);
  EXPECT_THROW(eight_tuple_distribution(core, vec({0, 0, 0}), vec({2, 4, 0}), 3),
               DependentDirections);
  EXPECT_EQ(classify(vec({1, 2}), vec({3, 1})), DirectionClass::Multiple);
  EXPECT_EQ(classify(vec({1, 2}), vec({0, 1})), DirectionClass::Generic);
  EXPECT_EQ(classify(vec({0, 0}), vec({0, 1})), DirectionClass::AxisA);
  EXPECT_EQ(classify(vec({1, 0}), vec({0, 0})), DirectionClass::AxisB);
}

TEST(Ap3, Examples) {
  EXPECT_TRUE(is_ap3_free({1, 2}, 5));
  EXPECT_FALSE(is_ap3_free({0, 1, 2}, 7));
  EXPECT_FALSE(is_ap3_free({1, 1}, 7));
  EXPECT_FALSE(is_ap3_free({0, 4}, 8));  // 0, 4, 0 with t = 4
  const auto greedy = ap3_free_set(20, Ap3Method::Greedy);
  EXPECT_TRUE(ap_scan(greedy, 20));
  EXPECT_GE(greedy.size(), 2u);
}

TEST(Ap3, ValidatorMatchesScan) {
  for (std::uint32_t l = 1; l <= 10; ++l) {
    for (std::uint32_t mask = 0; mask < (1u << l); ++mask) {
      std::vector<std::uint32_t> set;
      for (std::uint32_t i = 0; i < l; ++i) {
        if (mask >> i & 1) set.push_back(i);
      }
      EXPECT_EQ(is_ap3_free(set, l), ap_scan(set, l)) << l << " " << mask;
    }
  }
}

TEST(Ap3, ExhaustiveIsMaximum) {
  for (std::uint32_t l = 1; l <= 13; ++l) {
    std::size_t best = 0;
    for (std::uint32_t mask = 0; mask < (1u << l); ++mask) {
      std::vector<std::uint32_t> set;
      for (std::uint32_t i = 0; i < l; ++i) {
        if (mask >> i & 1) set.push_back(i);
      }
      if (set.size() > best && ap_scan(set, l)) best = set.size();
    }
    EXPECT_EQ(ap3_free_set(l, Ap3Method::ExhaustiveMax).size(), best) << l;
  }
}

TEST(Ap3, BehrendAndLargeExhaustive) {
  for (std::uint32_t l : {50u, 101u, 1000u, 5000u}) {
    const auto set = ap3_free_set(l, Ap3Method::Behrend);
    EXPECT_TRUE(ap_scan(set, l)) << l;
    EXPECT_GE(set.size(), 2u) << l;
  }
  EXPECT_TRUE(ap_scan(ap3_free_set(30, Ap3Method::ExhaustiveMax), 30));
  EXPECT_THROW(ap3_free_set(31, Ap3Method::ExhaustiveMax), TooLarge);
}

TEST(Hypergraph, SmallExample) {
  const Hypergraphon h(5, {1, 2});
  const auto e = hypergraph_expectations(h);
  EXPECT_EQ(e.mean_g2, make_rational(2, 25));
  EXPECT_EQ(e.pattern_a, make_rational(2, 15625));
  EXPECT_TRUE(e.mean_identity);
  EXPECT_TRUE(e.pattern_a_identity);
  EXPECT_TRUE(e.pattern_b_bound);
  EXPECT_TRUE(e.unique_triangles);
  EXPECT_EQ(h.cell_of(0.0), 0u);
  EXPECT_EQ(h.cell_of(0.2), 1u);
  EXPECT_EQ(h.cell_of(0.999), 4u);
  EXPECT_EQ(h.g2(0.1, 0.3, 0.5), 1.0);  // cells (0, 1, 2), t = 1
}

TEST(Hypergraph, RejectsProgressions) {
  EXPECT_THROW(Hypergraphon(7, {0, 1, 2}), InvalidArgument);
  EXPECT_THROW(Hypergraphon(7, {}), InvalidArgument);
}

TEST(Hypergraph, PatternsAgainstBruteForce) {
  for (std::uint32_t l : {5u, 7u}) {
    const Hypergraphon h(l, ap3_free_set(l, Ap3Method::ExhaustiveMax));
    const auto e = hypergraph_expectations(h);
    EXPECT_EQ(e.pattern_a, brute_pattern(h, pattern_a())) << l;
    EXPECT_EQ(e.pattern_b, brute_pattern(h, pattern_b())) << l;
    EXPECT_EQ(e.mean_g2, brute_pattern(h, CellPattern{1, 1, 1, {{0, 0, 0}}})) << l;
  }
}

TEST(Hypergraph, IdentitiesForEveryValidatedSet) {
  for (std::uint32_t l = 1; l <= 11; ++l) {
    for (auto method : {Ap3Method::ExhaustiveMax, Ap3Method::Greedy, Ap3Method::Behrend}) {
      const Hypergraphon h(l, ap3_free_set(l, method));
      const auto e = hypergraph_expectations(h);
      EXPECT_TRUE(e.unique_triangles) << l;
      EXPECT_TRUE(e.mean_identity) << l;
      EXPECT_TRUE(e.pattern_a_identity) << l;
      EXPECT_TRUE(e.pattern_b_bound) << l;
    }
  }
  for (std::uint32_t l = 12; l <= 30; ++l) {
    EXPECT_TRUE(Hypergraphon(l, ap3_free_set(l, Ap3Method::ExhaustiveMax)).unique_triangles());
  }
}

TEST(Dressing, FactorsMatchDependencyTable) {
  const Hypergraphon h(7, ap3_free_set(7, Ap3Method::ExhaustiveMax));
  const Rational a1 = cell_pattern_expectation(h, pattern_a());
  const Rational a2 = cell_pattern_expectation(h, pattern_b());
  const Rational b1 = cell_pattern_expectation(
      h, CellPattern{3, 2, 4, {{0, 0, 0}, {0, 1, 1}, {2, 0, 1}, {2, 1, 3}}});
  const Rational b2 = cell_pattern_expectation(
      h, CellPattern{3, 4, 3, {{0, 0, 0}, {1, 1, 0}, {2, 1, 2}, {0, 3, 2}}});
  const Rational mean = cell_pattern_expectation(h, CellPattern{1, 1, 1, {{0, 0, 0}}});
  const Vec a = vec({1, 2, 0});
  auto times = [&](std::int64_t s) {
    Vec v(a);
    for (auto& x : v) x = fp::reduce(s * x, 5);
    return v;
  };
  EXPECT_EQ(dressing_factor(h, a, times(1)), a1 * a2);
  EXPECT_EQ(dressing_factor(h, a, times(-1)), b1 * b2);
  EXPECT_EQ(dressing_factor(h, a, times(2)), a2 * b1);
  EXPECT_EQ(dressing_factor(h, a, times(-2)), b2 * a1);
  EXPECT_EQ(dressing_factor(h, a, times(0)), rational_pow(mean, 8));
  EXPECT_EQ(dressing_factor(h, times(0), a), rational_pow(mean, 8));
  EXPECT_EQ(dressing_factor(h, a, vec({0, 1, 1})), rational_pow(mean, 8));
}

TEST(Dressing, TablesAreSeededAndUniform) {
  EXPECT_EQ(table_uniform(3, 1, 17), table_uniform(3, 1, 17));
  EXPECT_NE(table_uniform(3, 1, 17), table_uniform(4, 1, 17));
  EXPECT_NE(table_uniform(3, 1, 17), table_uniform(3, 2, 17));
  double sum = 0;
  for (std::uint64_t e = 0; e < 20000; ++e) {
    const double u = table_uniform(9, 0, e);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 20000, 0.5, 0.01);
}

TEST(Dressing, DressedIsBelowF1) {
  const CexCore core = make_core();
  const GridFunction f1 = build_f1(core, 2);
  const Hypergraphon h(5, {1, 2});
  const GridFunction d = build_dressed(f1, h, 7);
  for (std::uint64_t i = 0; i < f1.size(); ++i) EXPECT_LE(d.rationals()[i], f1.rationals()[i]);
  EXPECT_EQ(d, build_dressed(f1, h, 7));
}

TEST(Dressing, MonteCarloMatchesProductFormulas) {
  const CexCore core = make_core();
  const Hypergraphon h(5, ap3_free_set(5, Ap3Method::ExhaustiveMax));
  const Vec a = vec({1, 0, 2});
  const std::vector<std::pair<Vec, Vec>> dirs = {{a, vec({0, 1, 1})}, {a, a}};
  const auto r = dress_and_measure(core, h, 3, 1000, 50, dirs);
  EXPECT_EQ(r.alpha_predicted, r.mean_f1 * r.mean_g2 * r.mean_g2);
  EXPECT_TRUE(r.alpha.within) << r.alpha.mean << " vs " << to_double(r.alpha_predicted)
                              << " se " << r.alpha.se;
  EXPECT_GT(r.alpha.se, 0.0);
  for (const auto& d : r.directions) {
    EXPECT_TRUE(d.measured.within) << to_string(d.cls) << " " << d.measured.mean;
  }
  const auto e = hypergraph_expectations(h);
  EXPECT_EQ(r.directions[0].factor, rational_pow(e.mean_g2, 8));
  EXPECT_EQ(r.directions[1].factor, e.pattern_a * e.pattern_b);
}

TEST(Dressing, MonteCarloHelper) {
  const auto mc = monte_carlo({1.0, 2.0, 3.0, 4.0}, 2.5, 0.0);
  EXPECT_DOUBLE_EQ(mc.mean, 2.5);
  EXPECT_NEAR(mc.se, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
  EXPECT_TRUE(mc.within);
  const auto flat = monte_carlo({0.0, 0.0, 0.0, 0.0}, 1e-9, 0.5);
  EXPECT_EQ(flat.se, 0.0);
  EXPECT_DOUBLE_EQ(flat.effective_se, 0.25);
  EXPECT_TRUE(flat.within);
}

TEST(Assembly, Subchecks) {
  EXPECT_TRUE(four_ap_free_012());
  EXPECT_GE(cube_log_ratio(), 4.15);
  EXPECT_NEAR(cube_log_ratio(), 4.15066, 1e-5);
  for (int g = 1; g <= 12; ++g) {
    EXPECT_LE(std::pow(3.0 / 25.0, g), std::pow(std::pow(3.0 / 5.0, g), 4.15));
  }
  EXPECT_TRUE(in_cube(vec({2, 4, 4}), 1));
  EXPECT_FALSE(in_cube(vec({3, 0, 0}), 1));
  EXPECT_FALSE(in_cube(vec({0, 3, 0}), 2));
}

TEST(Assembly, RandomAffineIsInvertible) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const AffineMap m = random_affine(3, rng);
    EXPECT_EQ(m.linear * m.inverse, FpMatrix::identity(3, 5));
  }
}

TEST(Assembly, MeanMatchesBetaSquaredOverSeeds) {
  const GridFunction h = build_f1(make_core(), 3);
  const Rational mean_h = h.mean_exact();
  std::vector<double> means;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto r = final_assembly(h, 1, seed);
    EXPECT_EQ(r.mean_h, mean_h);
    EXPECT_EQ(r.predicted_mean, make_rational(9, 25) * mean_h);
    means.push_back(to_double(r.mean_f));
  }
  const auto mc = monte_carlo(means, to_double(make_rational(9, 25) * mean_h),
                              1.0 / 15625.0);
  EXPECT_TRUE(mc.within) << mc.mean << " se " << mc.se;
}

TEST(Assembly, DirectionsAndPointwiseBound) {
  const GridFunction h = build_f1(make_core(), 2);
  const GridFunction f = assemble(h, 1, 4);
  for (std::uint64_t i = 0; i < h.size(); ++i) EXPECT_LE(f.rationals()[i], h.rationals()[i]);
  EXPECT_EQ(f, assemble(h, 1, 4));
  const auto r = final_assembly(h, 1, 4, {{vec({1, 0}), vec({0, 1})}, {vec({0, 0}), vec({1, 1})}});
  ASSERT_EQ(r.directions.size(), 2u);
  EXPECT_EQ(r.directions[0].cls, DirectionClass::Generic);
  EXPECT_NEAR(r.directions[0].reference,
              std::pow(0.6, 8) * to_double(r.directions[0].beta_h), 1e-15);
  EXPECT_NEAR(r.directions[1].reference, std::pow(0.6, 8.15), 1e-15);
  EXPECT_THROW(assemble(h, 0, 1), InvalidArgument);
  EXPECT_THROW(assemble(h, 3, 1), InvalidArgument);
}

TEST(Assembly, SparseCountsMatchDenseSearch) {
  std::mt19937_64 rng(8);
  const GridFunction f = random_indicator(2, 0.3, rng);
  const auto dense = popular_search(f, diagonalize_rotated_square().diagonal, 0.0);
  std::vector<Rational> sparse(f.size(), 0);
  for (const auto& [key, count] : pattern_counts_sparse(f)) {
    sparse[key] = make_rational(static_cast<std::int64_t>(count), 625);
  }
  EXPECT_EQ(sparse, dense.beta_exact);
}

TEST(Report, CertifiedPartsAndScope) {
  DressingParams params;
  params.seed = 2;
  params.n = 3;
  params.modulus = 5;
  params.gamma = 1;
  const auto r = cex_report(make_core(), params);
  EXPECT_EQ(r.core_ratio, make_rational(73, 80));
  EXPECT_TRUE(r.core.strict);
  EXPECT_TRUE(r.hypergraph.pattern_a_identity);
  EXPECT_TRUE(r.four_ap_free);
  EXPECT_FALSE(r.full_constant_certified);
  EXPECT_FALSE(r.scope.empty());
  EXPECT_EQ(r.classes.size(), 4u);
  EXPECT_GE(r.max_ratio_all, r.max_ratio_generic);
  EXPECT_THROW(cex_report(make_core(), DressingParams{0, 3, 5, 4}), InvalidArgument);
}

TEST(Report, GenericRatioBelowOneAtN4) {
  int below = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto r = cex_report(make_core(), DressingParams{seed, 4, 7, 1});
    below += r.max_ratio_generic < 1.0;
  }
  EXPECT_GE(below, 45);
}
