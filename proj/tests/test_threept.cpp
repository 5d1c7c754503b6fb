#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "popdiff/threept.hpp"

using namespace popdiff;

namespace {

// ||xi x / N|| < num/den by integer cross-multiplication.
bool oracle_in_bohr(std::int64_t n, const std::vector<std::int64_t>& freqs, std::int64_t x,
                    std::int64_t num, std::int64_t den) {
  for (std::int64_t xi : freqs) {
    const std::int64_t r = oracle::md(xi * x, n);
    const std::int64_t dist = std::min(r, n - r);
    if (dist * den >= num * n) return false;
  }
  return true;
}

std::vector<double> random_unit(std::size_t size, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(size);
  for (auto& x : v) x = u(rng);
  return v;
}

std::vector<Rational> random_thousandths(std::size_t size, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(0, 1000);
  std::vector<Rational> v(size);
  for (auto& x : v) x = make_rational(u(rng), 1000);
  return v;
}

// E_{b1, b2 in B} E_x f(x) f(x + m1 (b1 + b2)) f(x + m2 (b1 + b2)) over Z/NZ.
Rational oracle_smoothed(std::int64_t n, std::int64_t m1, std::int64_t m2,
                         const std::vector<Rational>& f, const std::vector<std::int64_t>& b) {
  Rational total = 0;
  for (std::int64_t b1 : b) {
    for (std::int64_t b2 : b) {
      const std::int64_t d = b1 + b2;
      for (std::int64_t x = 0; x < n; ++x) {
        total += f[x] * f[oracle::md(x + m1 * d, n)] * f[oracle::md(x + m2 * d, n)];
      }
    }
  }
  return total / Rational(BigInt(n) * b.size() * b.size());
}

FpMatrix int_matrix(std::vector<std::int64_t> entries, std::size_t k, std::uint32_t p) {
  FpMatrix m(k, k, p);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) m(i, j) = fp::reduce(entries[i * k + j], p);
  }
  return m;
}

}  // namespace

TEST(Group, CyclicArithmetic) {
  const auto g = FiniteGroup::cyclic(12);
  EXPECT_EQ(g.add(7, 8), 3u);
  EXPECT_EQ(g.neg(5), 7u);
  EXPECT_EQ(g.sub(2, 5), 9u);
  EXPECT_EQ(g.pairing(5, 7), 11u);
  EXPECT_EQ(g.apply(GroupMap(-1), 3), 9u);
  EXPECT_TRUE(g.is_automorphism(GroupMap(5)));
  EXPECT_FALSE(g.is_automorphism(GroupMap(4)));
  EXPECT_THROW(g.apply(GroupMap(FpMatrix::identity(1, 5)), 1), InvalidArgument);
}

TEST(Group, VectorMatchesGridShape) {
  const auto g = FiniteGroup::vector(5, 2, 2);
  const GridShape& s = g.shape();
  std::mt19937_64 rng(3);
  const FpMatrix m = oracle::random_invertible(2, 5, rng);
  std::uniform_int_distribution<std::uint64_t> pick(0, g.size() - 1);
  for (int t = 0; t < 200; ++t) {
    const std::uint64_t x = pick(rng), y = pick(rng);
    EXPECT_EQ(g.add(x, y), s.encode(s.add(s.decode(x), s.decode(y))));
    EXPECT_EQ(g.neg(x), s.encode(s.negate(s.decode(x))));
    EXPECT_EQ(g.apply(GroupMap(m), x), s.encode(s.apply_left(m, s.decode(x))));
    // <M^T xi, x> = <xi, M x>
    EXPECT_EQ(g.pairing(g.apply_dual(GroupMap(m), y), x), g.pairing(y, g.apply(GroupMap(m), x)));
    EXPECT_EQ(g.apply(GroupMap(3), x), g.apply(GroupMap(FpMatrix::scalar(2, 3, 5)), x));
  }
}

TEST(Group, SpecRequiresAutomorphisms) {
  EXPECT_NO_THROW(FiniteGroupSpec(FiniteGroup::cyclic(101), GroupMap(2), GroupMap(3)));
  EXPECT_THROW(FiniteGroupSpec(FiniteGroup::cyclic(12), GroupMap(2), GroupMap(1)),
               NotAutomorphism);
  EXPECT_THROW(FiniteGroupSpec(FiniteGroup::cyclic(12), GroupMap(5), GroupMap(1)),
               NotAutomorphism);  // 5 - 1 = 4
  EXPECT_THROW(FiniteGroupSpec(FiniteGroup::cyclic(7), GroupMap(3), GroupMap(3)),
               NotAutomorphism);
  const auto g = FiniteGroup::vector(3, 2, 1);
  EXPECT_THROW(FiniteGroupSpec(g, GroupMap(int_matrix({1, 1, 1, 1}, 2, 3)), GroupMap(1)),
               NotAutomorphism);
  EXPECT_NO_THROW(FiniteGroupSpec(g, GroupMap(int_matrix({0, 1, 2, 0}, 2, 3)), GroupMap(1)));
}

TEST(Bohr, Examples) {
  const auto z5 = FiniteGroup::cyclic(5);
  const auto b = bohr_set(z5, {1}, rational_from_double(0.3));
  EXPECT_EQ(b.elements, (std::vector<std::uint64_t>{0, 1, 4}));
  EXPECT_EQ(b.measure, make_rational(3, 5));
  const auto all = bohr_set(z5, {}, make_rational(1, 10));
  EXPECT_EQ(all.count(), 5u);
  EXPECT_EQ(all.measure, 1);
  // the boundary is strict: ||1/5|| = 1/5 is not < 1/5
  EXPECT_EQ(bohr_set(z5, {1}, make_rational(1, 5)).count(), 1u);
  EXPECT_THROW(bohr_set(z5, {1}, make_rational(0, 1)), InvalidArgument);
  EXPECT_THROW(bohr_set(z5, {1}, make_rational(3, 5)), InvalidArgument);
  EXPECT_THROW(bohr_set(z5, {7}, make_rational(1, 4)), InvalidArgument);
}

TEST(Bohr, RandomAgainstOracle) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 100; ++t) {
    const std::int64_t n = std::uniform_int_distribution<std::int64_t>(2, 200)(rng);
    const std::size_t s = std::uniform_int_distribution<std::size_t>(0, 3)(rng);
    const std::int64_t den = std::uniform_int_distribution<std::int64_t>(2, 40)(rng);
    const std::int64_t num = std::uniform_int_distribution<std::int64_t>(1, den / 2)(rng);
    std::vector<std::int64_t> freqs(s);
    std::vector<std::uint64_t> ufreqs(s);
    for (std::size_t i = 0; i < s; ++i) {
      freqs[i] = std::uniform_int_distribution<std::int64_t>(0, n - 1)(rng);
      ufreqs[i] = static_cast<std::uint64_t>(freqs[i]);
    }
    const auto g = FiniteGroup::cyclic(static_cast<std::uint64_t>(n));
    const auto b = bohr_set(g, ufreqs, make_rational(num, den));
    std::int64_t count = 0;
    for (std::int64_t x = 0; x < n; ++x) {
      const bool in = oracle_in_bohr(n, freqs, x, num, den);
      ASSERT_EQ(in, b.contains(static_cast<std::uint64_t>(x))) << n << " " << x;
      count += in;
      // symmetric
      ASSERT_EQ(b.contains(static_cast<std::uint64_t>(x)),
                b.contains(g.neg(static_cast<std::uint64_t>(x))));
    }
    EXPECT_TRUE(b.contains(0));
    EXPECT_EQ(b.measure, make_rational(count, n));
    // measure >= delta^|S| up to one element of slack
    const double delta = static_cast<double>(num) / static_cast<double>(den);
    EXPECT_GE(to_double(b.measure) + 1.0 / static_cast<double>(n), std::pow(delta, s))
        << n << " " << s << " " << delta;
  }
}

TEST(Bohr, SmoothingMeasure) {
  std::mt19937_64 rng(5);
  for (std::uint64_t n : {13u, 60u, 97u}) {
    const auto g = FiniteGroup::cyclic(n);
    const auto b = bohr_set(g, {1, 3}, make_rational(1, 4));
    const auto nu = smoothing_measure(g, b);
    Rational total = 0;
    for (std::uint64_t d = 0; d < n; ++d) total += nu.weight(d);
    EXPECT_EQ(total, 1);
    std::set<std::uint64_t> sums;
    for (auto x : b.elements) {
      for (auto y : b.elements) sums.insert(g.add(x, y));
    }
    EXPECT_EQ(std::vector<std::uint64_t>(sums.begin(), sums.end()), nu.support);
    // ||nu||_inf <= ||mu_B||_inf = |G| / |B|
    EXPECT_LE(nu.density_sup(n), Rational(n) / Rational(b.count()));
  }
}

TEST(Smoothed, ConstantGivesCube) {
  const FiniteGroupSpec spec(FiniteGroup::cyclic(31), GroupMap(2), GroupMap(5));
  const std::vector<Rational> f(31, make_rational(2, 7));
  for (auto radius : {make_rational(1, 10), make_rational(1, 3), make_rational(1, 2)}) {
    const auto b = bohr_set(spec.group, {1, 4}, radius);
    const auto c = smoothed_3pt_count(spec, f, b);
    ASSERT_TRUE(c.exact.has_value());
    EXPECT_EQ(*c.exact, make_rational(8, 343));
    EXPECT_NEAR(c.fourier, 8.0 / 343, 1e-12);
  }
}

TEST(Smoothed, WholeGroupIsPlainAverage) {
  std::mt19937_64 rng(8);
  const std::int64_t n = 23;
  const FiniteGroupSpec spec(FiniteGroup::cyclic(n), GroupMap(3), GroupMap(7));
  const auto f = random_thousandths(n, rng);
  const auto b = bohr_set(spec.group, {}, make_rational(1, 2));
  Rational plain = 0;
  for (std::int64_t d = 0; d < n; ++d) {
    for (std::int64_t x = 0; x < n; ++x) {
      plain += f[x] * f[oracle::md(x + 3 * d, n)] * f[oracle::md(x + 7 * d, n)];
    }
  }
  plain /= Rational(n * n);
  const auto c = smoothed_3pt_count(spec, f, b);
  EXPECT_EQ(*c.exact, plain);
  EXPECT_NEAR(c.fourier, to_double(plain), 1e-12);
}

TEST(Smoothed, ExactAgainstPairEnumeration) {
  std::mt19937_64 rng(9);
  for (std::int64_t n : {13, 20, 31}) {
    for (auto [m1, m2] : {std::pair{1, 2}, std::pair{2, 3}, std::pair{-1, 3}}) {
      if (std::gcd(m1 - m2, n) != 1 || std::gcd(m1, n) != 1 || std::gcd(m2, n) != 1) continue;
      const FiniteGroupSpec spec(FiniteGroup::cyclic(n), GroupMap(m1), GroupMap(m2));
      const auto f = random_thousandths(n, rng);
      const auto b = bohr_set(spec.group, {1, 5}, make_rational(1, 4));
      std::vector<std::int64_t> members(b.elements.begin(), b.elements.end());
      const auto c = smoothed_3pt_count(spec, f, b);
      EXPECT_EQ(*c.exact, oracle_smoothed(n, m1, m2, f, members));
      EXPECT_LT(c.discrepancy, 1e-9);
    }
  }
}

TEST(Smoothed, DirectAndFourierAgree) {
  std::mt19937_64 rng(10);
  const FiniteGroupSpec z31(FiniteGroup::cyclic(31), GroupMap(2), GroupMap(3));
  for (int t = 0; t < 20; ++t) {
    const auto f = random_unit(31, rng);
    const std::uint64_t xi = std::uniform_int_distribution<std::uint64_t>(1, 30)(rng);
    const auto b = bohr_set(z31.group, {xi}, make_rational(t % 5 + 1, 11));
    const auto c = smoothed_3pt_count(z31, f, b);
    EXPECT_LT(c.discrepancy, 1e-9) << t;
  }
  // vector group with matrix maps
  const auto g = FiniteGroup::vector(5, 2, 1);
  for (int t = 0; t < 10; ++t) {
    FpMatrix m1 = oracle::random_invertible(2, 5, rng), m2 = oracle::random_invertible(2, 5, rng);
    if (!is_invertible(m1 - m2)) continue;
    const FiniteGroupSpec spec(g, GroupMap(m1), GroupMap(m2));
    const auto f = random_unit(g.size(), rng);
    const auto b = bohr_set(g, {1, 7}, make_rational(1, 3));
    EXPECT_LT(smoothed_3pt_count(spec, f, b).discrepancy, 1e-9);
  }
}

TEST(Derived, IdentityMapsGiveSameSet) {
  const auto g = FiniteGroup::cyclic(50);
  const auto b = bohr_set(g, {3, 7}, make_rational(1, 5));
  const auto d = derived_bohr(b, g, GroupMap(1), GroupMap(1));
  EXPECT_TRUE(d.matches_direct);
  EXPECT_EQ(d.set.elements, b.elements);
}

TEST(Derived, Z7Example) {
  const FiniteGroupSpec spec(FiniteGroup::cyclic(7), GroupMap(2), GroupMap(3));
  const auto b = bohr_set(spec.group, {1}, rational_from_double(0.2));
  const auto d = derived_bohr(b, spec);
  EXPECT_TRUE(d.matches_direct);
  // B = {0, 1, 6}; r with 2r, 3r in B is only 0
  EXPECT_EQ(b.elements, (std::vector<std::uint64_t>{0, 1, 6}));
  EXPECT_EQ(d.set.elements, (std::vector<std::uint64_t>{0}));
  EXPECT_EQ(d.set.frequencies, (std::vector<std::uint64_t>{2, 3}));
}

TEST(Derived, RandomSetsMatchDirectScan) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 40; ++t) {
    const bool cyclic = t % 2 == 0;
    const auto g = cyclic ? FiniteGroup::cyclic(97) : FiniteGroup::vector(3, 2, 2);
    std::uniform_int_distribution<std::uint64_t> pick(0, g.size() - 1);
    std::vector<std::uint64_t> freqs(t % 4);
    for (auto& f : freqs) f = pick(rng);
    const auto b = bohr_set(g, freqs, make_rational(1 + t % 4, 9));
    GroupMap m1 = cyclic ? GroupMap(std::int64_t(1 + pick(rng) % 96))
                         : GroupMap(oracle::random_invertible(2, 3, rng));
    GroupMap m2 = cyclic ? GroupMap(std::int64_t(1 + pick(rng) % 96))
                         : GroupMap(oracle::random_invertible(2, 3, rng));
    const auto d = derived_bohr(b, g, m1, m2);
    EXPECT_TRUE(d.matches_direct) << t;
    EXPECT_LE(d.set.frequencies.size(), 2 * freqs.size());
  }
  EXPECT_THROW(derived_bohr(bohr_set(FiniteGroup::cyclic(10), {1}, make_rational(1, 4)),
                            FiniteGroup::cyclic(10), GroupMap(2), GroupMap(3)),
               NotAutomorphism);
}

TEST(Fourier, RoundTripAndParseval) {
  std::mt19937_64 rng(13);
  for (const auto& g : {FiniteGroup::cyclic(35), FiniteGroup::vector(3, 1, 3)}) {
    const auto f = random_unit(g.size(), rng);
    const auto c = fourier_transform(g, f);
    const auto back = inverse_fourier(g, c);
    double energy = 0, coeff = 0;
    for (std::uint64_t x = 0; x < g.size(); ++x) {
      EXPECT_NEAR(back[x].real(), f[x], 1e-12);
      EXPECT_NEAR(back[x].imag(), 0, 1e-12);
      energy += f[x] * f[x];
      coeff += std::norm(c[x]);
    }
    EXPECT_NEAR(energy / static_cast<double>(g.size()), coeff, 1e-12);
  }
}

TEST(Decompose, ConstantFunction) {
  const auto g = FiniteGroup::cyclic(101);
  const std::vector<Rational> f(101, make_rational(3, 7));
  const auto d = regularity_decompose(g, f, {});
  for (std::uint64_t x = 0; x < 101; ++x) {
    EXPECT_EQ(d.f1[x], make_rational(3, 7));
    EXPECT_EQ(d.f2[x], 0);
    EXPECT_EQ(d.f3[x], 0);
  }
  EXPECT_TRUE(d.contracts_hold);
}

TEST(Decompose, ContractsOnRandomFunctions) {
  std::mt19937_64 rng(14);
  const auto g = FiniteGroup::cyclic(101);
  for (int t = 0; t < 10; ++t) {
    const auto f = random_thousandths(101, rng);
    DecomposeOptions opt;
    opt.epsilon = 0.2;
    opt.initial_frequencies = {static_cast<std::uint64_t>(1 + t)};
    const auto d = regularity_decompose(g, f, opt);
    // sum and mean preservation, measured independently
    Rational mf = 0, mf1 = 0;
    double l2 = 0;
    for (std::uint64_t x = 0; x < 101; ++x) {
      ASSERT_EQ(d.f1[x] + d.f2[x] + d.f3[x], f[x]);
      ASSERT_GE(d.f1[x], 0);
      ASSERT_LE(d.f1[x], 1);
      mf += f[x];
      mf1 += d.f1[x];
      l2 += std::pow(to_double(d.f2[x]), 2);
    }
    EXPECT_EQ(mf, mf1);
    EXPECT_LE(std::sqrt(l2 / 101), opt.epsilon);
    std::vector<double> f3(101);
    for (std::uint64_t x = 0; x < 101; ++x) f3[x] = to_double(d.f3[x]);
    double sup = 0;
    for (std::uint64_t xi = 0; xi < 101; ++xi) {
      std::complex<double> c = 0;
      for (std::uint64_t x = 0; x < 101; ++x) {
        c += f3[x] * std::polar(1.0, -2 * M_PI * static_cast<double>(xi * x % 101) / 101);
      }
      sup = std::max(sup, std::abs(c) / 101);
    }
    EXPECT_LE(sup, d.gamma2 + 1e-12);
    EXPECT_NEAR(sup, d.f3_fourier_sup, 1e-12);
    EXPECT_TRUE(std::binary_search(d.frequencies.begin(), d.frequencies.end(),
                                   opt.initial_frequencies[0]));
    // Lipschitz over B(T, gamma1)
    const auto lip = bohr_set(g, d.frequencies,
                              std::max(rational_from_double(d.gamma1), make_rational(1, 202)));
    double worst = 0;
    for (auto r : lip.elements) {
      for (std::uint64_t x = 0; x < 101; ++x) {
        worst = std::max(worst, std::abs(to_double(d.f1[(x + r) % 101]) - to_double(d.f1[x])));
      }
    }
    EXPECT_LE(worst, d.lipschitz_constant * opt.epsilon + 1e-15);
    EXPECT_LE(d.lipschitz_constant, 1.0);
    EXPECT_TRUE(d.contracts_hold);
  }
}

TEST(Decompose, MeasurableSetSettlesAtFirstStage) {
  const auto g = FiniteGroup::cyclic(101);
  const auto b0 = bohr_set(g, {1}, make_rational(1, 4));
  std::vector<Rational> f(101);
  for (std::uint64_t x = 0; x < 101; ++x) f[x] = b0.contains(x) ? 1 : 0;
  DecomposeOptions opt;
  opt.initial_frequencies = {1};
  opt.omega1 = [](double t) { return std::exp(t); };
  const auto d = regularity_decompose(g, f, opt);
  EXPECT_EQ(d.stages, 1u);
  EXPECT_LE(d.f3_fourier_sup, d.gamma2);
  EXPECT_TRUE(d.contracts_hold);
}

TEST(Decompose, GrowthFunctionsAreUsed) {
  std::mt19937_64 rng(15);
  const auto g = FiniteGroup::cyclic(53);
  const auto f = random_thousandths(53, rng);
  DecomposeOptions opt;
  opt.omega2 = [](double t) { return 10 * t; };
  const auto d = regularity_decompose(g, f, opt);
  EXPECT_NEAR(d.gamma2, 1.0 / (10.0 / to_double(d.smoothing_radius)), 1e-15);
  EXPECT_TRUE(d.contracts_hold);
}

TEST(Decompose, StageCap) {
  const auto g = FiniteGroup::cyclic(101);
  std::vector<Rational> f(101, 0);
  for (std::uint64_t x = 0; x < 30; ++x) f[x] = 1;
  DecomposeOptions opt;
  opt.initial_frequencies = {1};
  opt.max_stages = 1;
  EXPECT_THROW(regularity_decompose(g, f, opt), NonConvergent);
  opt.max_stages.reset();
  EXPECT_TRUE(regularity_decompose(g, f, opt).contracts_hold);
  std::vector<Rational> bad(101, 2);
  EXPECT_THROW(regularity_decompose(g, bad, {}), InvalidArgument);
}

TEST(Search, WholeGroupHitsEverywhere) {
  const FiniteGroupSpec spec(FiniteGroup::cyclic(17), GroupMap(1), GroupMap(2));
  const auto r = popular_3pt_search(spec, std::vector<std::uint8_t>(17, 1), 0.1);
  EXPECT_EQ(r.threshold_hits, 16u);
  EXPECT_EQ(*r.alpha_exact, 1);
}

TEST(Search, SubgroupHitsExactlyOnSubgroup) {
  const auto g = FiniteGroup::vector(3, 1, 2);
  const FiniteGroupSpec spec(g, GroupMap(1), GroupMap(2));
  // H = {x : first coordinate 0}
  std::vector<std::uint8_t> a(g.size());
  for (std::uint64_t x = 0; x < g.size(); ++x) a[x] = g.shape().decode(x)[0] == 0;
  const auto r = popular_3pt_search(spec, a, 0.0);
  for (std::uint64_t d = 0; d < g.size(); ++d) {
    EXPECT_EQ(r.beta_exact[d], a[d] ? make_rational(1, 3) : Rational(0)) << d;
  }
  EXPECT_EQ(r.threshold_hits, 2u);
}

TEST(Search, RandomSetsOnF5Cubed) {
  std::mt19937_64 rng(16);
  const auto g = FiniteGroup::vector(5, 1, 3);
  const FiniteGroupSpec spec(g, GroupMap(1), GroupMap(2));
  for (int t = 0; t < 50; ++t) {
    const double density = std::uniform_real_distribution<double>(0.3, 0.6)(rng);
    std::bernoulli_distribution coin(density);
    std::vector<std::uint8_t> a(g.size());
    for (auto& v : a) v = coin(rng);
    const auto r = popular_3pt_search(spec, a, 0.1);
    EXPECT_GE(r.threshold_hits, 1u) << t;
    if (t < 3) {
      const auto& s = g.shape();
      for (std::uint64_t d = 0; d < g.size(); ++d) {
        std::uint64_t c = 0;
        const Vec dd = s.decode(d);
        for (std::uint64_t x = 0; x < g.size(); ++x) {
          const Vec xd = s.decode(x);
          const Vec y = s.add(xd, dd);
          const Vec z = s.add(y, dd);
          c += a[x] && a[s.encode(y)] && a[s.encode(z)];
        }
        ASSERT_EQ(r.beta_exact[d], make_rational(c, 125));
      }
    }
  }
}

TEST(Lift, Primes) {
  std::vector<bool> sieve(100001, true);
  sieve[0] = sieve[1] = false;
  for (std::size_t i = 2; i * i <= 100000; ++i) {
    if (sieve[i]) {
      for (std::size_t j = i * i; j <= 100000; j += i) sieve[j] = false;
    }
  }
  for (std::uint64_t n = 0; n <= 100000; ++n) ASSERT_EQ(is_prime_u64(n), sieve[n]) << n;
  EXPECT_TRUE(is_prime_u64((std::uint64_t{1} << 61) - 1));
  EXPECT_TRUE(is_prime_u64(18446744073709551557ULL));
  EXPECT_FALSE(is_prime_u64(3215031751ULL));  // strong pseudoprime to 2, 3, 5, 7
  EXPECT_FALSE(is_prime_u64(3825123056546413051ULL));
  EXPECT_EQ(next_prime(40), 41u);
  EXPECT_EQ(next_prime(41), 43u);
  EXPECT_EQ(next_prime(1), 2u);
}

TEST(Lift, IntegerDeterminant) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::int64_t> u(-9, 9);
  for (std::size_t k = 1; k <= 4; ++k) {
    for (int t = 0; t < 30; ++t) {
      IntMatrix m(k, std::vector<std::int64_t>(k));
      for (auto& row : m) {
        for (auto& v : row) v = u(rng);
      }
      // cofactor expansion over Z
      std::function<BigInt(const IntMatrix&)> cof = [&](const IntMatrix& a) -> BigInt {
        if (a.size() == 1) return a[0][0];
        BigInt s = 0;
        for (std::size_t j = 0; j < a.size(); ++j) {
          IntMatrix minor;
          for (std::size_t i = 1; i < a.size(); ++i) {
            std::vector<std::int64_t> row;
            for (std::size_t c = 0; c < a.size(); ++c) {
              if (c != j) row.push_back(a[i][c]);
            }
            minor.push_back(row);
          }
          s += (j % 2 ? -1 : 1) * a[0][j] * cof(minor);
        }
        return s;
      };
      EXPECT_EQ(integer_det(m), cof(m));
    }
  }
}

TEST(Lift, EvenNumbersUpToForty) {
  std::vector<std::vector<std::int64_t>> a;
  for (std::int64_t v = 0; v < 40; v += 2) a.push_back({v});
  LiftOptions opt;
  opt.epsilon = make_rational(1, 5);
  const auto r = lift_to_interval(40, a, {{1}}, {{2}}, opt);
  EXPECT_EQ(r.prime, 41u);
  EXPECT_FALSE(r.widened);
  EXPECT_GT(r.lifted, 0u);
  EXPECT_EQ(r.audit_failures, 0u);
  ASSERT_EQ(r.triples.size(), r.lifted);
  for (const auto& t : r.triples) {
    for (const auto* pt : {&t.x, &t.second, &t.third}) {
      ASSERT_GE((*pt)[0], 0);
      ASSERT_LT((*pt)[0], 40);
      ASSERT_EQ((*pt)[0] % 2, 0);
    }
    EXPECT_EQ(t.second[0] - t.x[0], r.best_d[0]);
    EXPECT_EQ(t.third[0] - t.x[0], 2 * r.best_d[0]);
  }
  EXPECT_NE(r.best_d[0], 0);
}

TEST(Lift, FullBoxKeepsMostPoints) {
  for (std::uint64_t n : {30u, 40u}) {
    std::vector<std::vector<std::int64_t>> a;
    for (std::int64_t v = 0; v < static_cast<std::int64_t>(n); ++v) a.push_back({v});
    const auto r = lift_to_interval(n, a, {{1}}, {{3}}, {});
    EXPECT_EQ(r.audit_failures, 0u);
    EXPECT_GE(static_cast<double>(r.lifted), (1 - 3 * 0.2) * static_cast<double>(n)) << n;
  }
}

TEST(Lift, TwoDimensionalAudit) {
  std::mt19937_64 rng(18);
  std::bernoulli_distribution coin(0.5);
  std::vector<std::vector<std::int64_t>> a;
  std::set<std::vector<std::int64_t>> members;
  for (std::int64_t i = 0; i < 12; ++i) {
    for (std::int64_t j = 0; j < 12; ++j) {
      if (coin(rng)) {
        a.push_back({i, j});
        members.insert({i, j});
      }
    }
  }
  LiftOptions opt;
  opt.epsilon = make_rational(1, 2);
  const auto r = lift_to_interval(12, a, {{1, 0}, {0, 1}}, {{2, 1}, {0, 2}}, opt);
  EXPECT_EQ(r.audit_failures, 0u);
  for (const auto& t : r.triples) {
    EXPECT_TRUE(members.count(t.x) && members.count(t.second) && members.count(t.third));
  }
}

TEST(Lift, WindowAndErrors) {
  std::vector<std::vector<std::int64_t>> a = {{0}, {1}};
  // (2, 2.4) holds no prime
  const auto r = lift_to_interval(2, a, {{1}}, {{2}}, {});
  EXPECT_TRUE(r.widened);
  EXPECT_EQ(r.prime, 3u);
  EXPECT_GT(Rational(2) * (1 + r.window_epsilon), Rational(3));
  LiftOptions strict;
  strict.widen = false;
  EXPECT_THROW(lift_to_interval(2, a, {{1}}, {{2}}, strict), NoPrimeInWindow);
  EXPECT_THROW(lift_to_interval(10, a, {{1}}, {{1}}, {}), NotAutomorphism);
  EXPECT_THROW(lift_to_interval(10, a, {{1, 1}, {1, 1}}, {{1, 0}, {0, 2}}, {}),
               NotAutomorphism);
  EXPECT_THROW(lift_to_interval(10, a, {{1, 0}, {0, 1}}, {{2}}, {}), DimensionMismatch);
  EXPECT_THROW(lift_to_interval(10, {{12}}, {{1}}, {{2}}, {}), InvalidArgument);
}
