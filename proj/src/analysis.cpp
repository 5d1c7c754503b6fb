#include "popdiff/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "counting_internal.hpp"
#include "popdiff/kahan.hpp"
#include "popdiff/parallel.hpp"

namespace popdiff {

namespace {

constexpr std::uint64_t kChunk = 64;

void require_points(int points) {
  if (points != 3 && points != 4) throw InvalidArgument("pattern has 3 or 4 points");
}

void require_compatible(const GridFunction& f, const PatternSpec& spec) {
  if (spec.p != f.shape().p() || spec.k != f.shape().k()) {
    throw DimensionMismatch("pattern spec and grid disagree on p or k");
  }
  if (f.kind() == ValueKind::ComplexFloat) {
    throw InvalidArgument("pattern counts need a real-valued function");
  }
}

std::vector<Vec> pattern_offsets(const GridShape& shape, const PatternSpec& spec,
                                 std::span<const Residue> d, int points) {
  std::vector<Vec> offsets = {shape.apply_left(spec.m1, d), shape.apply_left(spec.m2, d)};
  if (points == 4) offsets.push_back(shape.apply_left(spec.m1 + spec.m2, d));
  return offsets;
}

double float_sum(const std::vector<double>& v, OffsetWalker& walker,
                 std::uint64_t begin, std::uint64_t end, std::size_t m) {
  KahanSum<double> acc;
  walker.seek(begin);
  for (std::uint64_t i = begin; i < end; ++i, walker.next()) {
    double prod = v[walker.base()];
    for (std::size_t j = 0; j < m; ++j) prod *= v[walker.shifted(j)];
    acc += prod;
  }
  return acc.value();
}

Rational exact_average(const detail::ExactCounter& counter, const BigInt& sum,
                       std::size_t factors, std::uint64_t terms) {
  BigInt scale = terms;
  for (std::size_t i = 0; i < factors; ++i) scale *= counter.denom();
  return Rational(sum, scale);
}

std::vector<Complex> complex_values(const GridFunction& f) {
  return f.to_complex().complexes();
}

// ||f||_{U^1}^2 = |E f|^2
double u1_power(const std::vector<Complex>& v) {
  KahanSum<Complex> acc;
  for (const auto& x : v) acc += x;
  return std::norm(acc.value() / static_cast<double>(v.size()));
}

double recursive_power(const GridShape& shape, const std::vector<Complex>& v,
                       std::size_t s, bool top) {
  if (s == 1) return u1_power(v);
  const std::uint64_t size = shape.size();
  const std::uint64_t chunks = chunk_count(size, kChunk);
  std::vector<double> partial(chunks, 0.0);
  auto work = [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
    KahanSum<double> acc;
    std::vector<Complex> derivative(size);
    for (std::uint64_t h = begin; h < end; ++h) {
      OffsetWalker walker(shape, {shape.decode(h)});
      do {
        derivative[walker.base()] = v[walker.shifted(0)] * std::conj(v[walker.base()]);
      } while (walker.next());
      acc += recursive_power(shape, derivative, s - 1, false);
    }
    partial[c] = acc.value();
  };
  if (top) {
    for_each_chunk(size, kChunk, work);
  } else {
    work(0, 0, size);
    return partial[0] / static_cast<double>(size);
  }
  KahanSum<double> total;
  for (double x : partial) total += x;
  return total.value() / static_cast<double>(size);
}

double direct_power(const GridShape& shape, const std::vector<Complex>& v,
                    std::size_t s) {
  const std::uint64_t size = shape.size();
  std::uint64_t tuples = 1;
  for (std::size_t i = 0; i < s; ++i) tuples *= size;
  const std::size_t corners = std::size_t{1} << s;
  const std::uint64_t chunks = chunk_count(tuples, kChunk);
  std::vector<KahanSum<Complex>> partial(chunks);
  for_each_chunk(tuples, kChunk, [&](std::uint64_t c, std::uint64_t begin,
                                     std::uint64_t end) {
    std::vector<Vec> h(s);
    std::vector<Vec> offsets(corners - 1);
    for (std::uint64_t t = begin; t < end; ++t) {
      std::uint64_t rest = t;
      for (std::size_t i = 0; i < s; ++i) {
        h[i] = shape.decode(rest % size);
        rest /= size;
      }
      for (std::size_t w = 1; w < corners; ++w) {
        Vec e(shape.digits(), 0);
        for (std::size_t i = 0; i < s; ++i) {
          if (w >> i & 1) e = shape.add(e, h[i]);
        }
        offsets[w - 1] = std::move(e);
      }
      OffsetWalker walker(shape, offsets);
      KahanSum<Complex> acc;
      do {
        Complex prod = v[walker.base()];
        for (std::size_t w = 1; w < corners; ++w) {
          const Complex z = v[walker.shifted(w - 1)];
          prod *= (std::popcount(w) & 1) ? std::conj(z) : z;
        }
        acc += prod;
      } while (walker.next());
      partial[c].merge(acc);
    }
  });
  KahanSum<Complex> total;
  for (const auto& part : partial) total.merge(part);
  return total.value().real() / (static_cast<double>(size) * static_cast<double>(tuples));
}

}  // namespace

const char* to_string(Backend backend) {
  return backend == Backend::Exact ? "exact" : "float";
}

Backend backend_for(const GridFunction& f) {
  return f.kind() == ValueKind::ExactRational ? Backend::Exact : Backend::Float;
}

PatternValue pattern_count(const GridFunction& f, const PatternSpec& spec,
                           std::span<const Residue> d, int points) {
  require_points(points);
  require_compatible(f, spec);
  const GridShape& shape = f.shape();
  if (d.size() != shape.digits()) throw DimensionMismatch("difference has the wrong shape");
  OffsetWalker walker(shape, pattern_offsets(shape, spec, d, points));
  const auto m = static_cast<std::size_t>(points - 1);
  PatternValue out;
  if (f.kind() == ValueKind::ExactRational) {
    const detail::ExactCounter counter(f.rationals());
    out.exact = exact_average(counter, counter.sum(walker, 0, shape.size(), m),
                              m + 1, shape.size());
    out.value = to_double(*out.exact);
  } else {
    out.value = float_sum(f.reals(), walker, 0, shape.size(), m) /
                static_cast<double>(shape.size());
  }
  return out;
}

PatternCountReport popular_search(const GridFunction& f, const PatternSpec& spec,
                                  double epsilon, int points, const Guard& guard) {
  require_points(points);
  require_compatible(f, spec);
  const GridShape& shape = f.shape();
  const std::uint64_t size = shape.size();
  guard.require(static_cast<long double>(size) * size * points, "popular_search");
  const auto m = static_cast<std::size_t>(points - 1);

  PatternCountReport r;
  r.backend = backend_for(f);
  r.points = points;
  r.epsilon = epsilon;
  r.beta.assign(size, 0.0);

  std::optional<detail::ExactCounter> counter;
  std::optional<Rational> threshold_exact;
  if (r.backend == Backend::Exact) {
    counter.emplace(f.rationals());
    r.alpha_exact = f.mean_exact();
    r.alpha = to_double(*r.alpha_exact);
    threshold_exact = rational_pow(*r.alpha_exact, points) - rational_from_double(epsilon);
    r.threshold = to_double(*threshold_exact);
    r.beta_exact.assign(size, Rational(0));
  } else {
    r.alpha = f.mean().real();
    r.threshold = std::pow(r.alpha, points) - epsilon;
  }

  for_each_chunk(size, kChunk, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
    Vec d;
    for (std::uint64_t di = begin; di < end; ++di) {
      shape.decode_into(di, d);
      OffsetWalker walker(shape, pattern_offsets(shape, spec, d, points));
      if (counter) {
        r.beta_exact[di] = exact_average(*counter, counter->sum(walker, 0, size, m), m + 1, size);
        r.beta[di] = to_double(r.beta_exact[di]);
      } else {
        r.beta[di] = float_sum(f.reals(), walker, 0, size, m) / static_cast<double>(size);
      }
    }
  });

  bool first = true;
  for (std::uint64_t di = 1; di < size; ++di) {
    const bool hit = counter ? r.beta_exact[di] >= *threshold_exact : r.beta[di] >= r.threshold;
    if (hit) ++r.threshold_hits;
    const bool better = counter ? (first || r.beta_exact[di] > r.beta_exact[r.argmax_d])
                                : (first || r.beta[di] > r.max_beta);
    if (better) {
      r.argmax_d = di;
      r.max_beta = r.beta[di];
      first = false;
    }
  }
  return r;
}

double gowers_norm(const GridFunction& f, std::size_t s, GowersMode mode,
                   const Guard& guard) {
  if (s == 0) throw InvalidArgument("Gowers norm needs s >= 1");
  const GridShape& shape = f.shape();
  const auto v = complex_values(f);
  if (s == 1) return std::sqrt(u1_power(v));

  const long double direct_work =
      power_ld(shape.size(), s + 1) * static_cast<long double>(std::size_t{1} << s);
  if (mode == GowersMode::Auto) {
    mode = direct_work <= static_cast<long double>(guard.limit) ? GowersMode::Direct
                                                                : GowersMode::Recursive;
  }
  double power = 0;
  if (mode == GowersMode::Direct) {
    guard.require(direct_work, "gowers_norm (direct)");
    power = direct_power(shape, v, s);
  } else {
    guard.require(power_ld(shape.size(), s) * static_cast<long double>(s),
                  "gowers_norm (recursive)");
    power = recursive_power(shape, v, s, true);
  }
  return std::pow(std::max(power, 0.0), 1.0 / static_cast<double>(std::size_t{1} << s));
}

VonNeumannResult von_neumann_check(const std::vector<GridFunction>& fs,
                                   const std::vector<FpMatrix>& autos,
                                   const Guard& guard) {
  const std::size_t s = fs.size();
  if (s < 2) throw InvalidArgument("von Neumann check needs at least two functions");
  if (autos.size() != s) throw DimensionMismatch("one automorphism per function");
  const GridShape& shape = fs.front().shape();
  const std::size_t len = shape.digits();
  for (const auto& f : fs) {
    if (!(f.shape() == shape)) throw DimensionMismatch("functions live on different grids");
    if (!f.one_bounded()) throw InvalidArgument("von Neumann check needs 1-bounded functions");
  }
  for (std::size_t i = 0; i < s; ++i) {
    const auto& a = autos[i];
    if (a.rows() != len || a.cols() != len || a.modulus() != shape.p()) {
      throw DimensionMismatch("automorphisms act on F_p^{kn}");
    }
    if (!is_invertible(a)) {
      throw NotAutomorphism("A_" + std::to_string(i + 1) + " is singular");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (!is_invertible(a - autos[j])) {
        throw NotAutomorphism("A_" + std::to_string(i + 1) + " - A_" + std::to_string(j + 1) +
                              " is singular");
      }
    }
  }
  const std::uint64_t size = shape.size();
  guard.require(static_cast<long double>(size) * size * s, "von_neumann_check");

  std::vector<std::vector<Complex>> values;
  for (const auto& f : fs) values.push_back(complex_values(f));
  const std::uint64_t chunks = chunk_count(size, kChunk);
  std::vector<KahanSum<Complex>> partial(chunks);
  for_each_chunk(size, kChunk, [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
    Vec d;
    std::vector<Vec> offsets(s);
    for (std::uint64_t di = begin; di < end; ++di) {
      shape.decode_into(di, d);
      for (std::size_t i = 0; i < s; ++i) offsets[i] = autos[i].apply(d);
      OffsetWalker walker(shape, offsets);
      KahanSum<Complex> acc;
      do {
        Complex prod = 1;
        for (std::size_t i = 0; i < s; ++i) prod *= values[i][walker.shifted(i)];
        acc += prod;
      } while (walker.next());
      partial[c].merge(acc);
    }
  });
  KahanSum<Complex> total;
  for (const auto& part : partial) total.merge(part);

  VonNeumannResult out;
  out.lhs = std::abs(total.value()) / (static_cast<double>(size) * static_cast<double>(size));
  out.rhs = gowers_norm(fs.front(), s - 1, GowersMode::Auto, guard);
  for (std::size_t i = 1; i < s; ++i) {
    out.rhs = std::min(out.rhs, gowers_norm(fs[i], s - 1, GowersMode::Auto, guard));
  }
  out.holds = out.lhs <= out.rhs + 1e-9;
  return out;
}

}  // namespace popdiff
