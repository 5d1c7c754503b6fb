// Exhaustive equidistribution reports: histograms of factor images over all
// points (or pairs of points), compared with the predicted support and the
// uniform cell probability on it.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <unordered_map>

#include "counting_internal.hpp"
#include "equidist_internal.hpp"
#include "popdiff/analysis.hpp"
#include "popdiff/linalg.hpp"
#include "popdiff/parallel.hpp"

namespace popdiff {

namespace {

using detail::Histogram;
using detail::SupportModel;
using detail::merge_into;
using detail::summarize;

constexpr std::uint64_t kChunk = 16;

RowEchelon echelon_of(const SubspaceBasis& space) {
  RowEchelon e(space.coord_len(), space.modulus());
  for (const auto& v : space.basis()) e.insert(v);
  return e;
}

/// Unpacks the evaluator's upper-triangle coordinates into a full k x k
/// matrix appended to out (row-major).
void append_symmetric(const Residue* c, std::size_t k, std::uint32_t p, bool skew,
                      Vec& out) {
  const std::size_t start = out.size();
  out.resize(start + k * k, 0);
  std::size_t pos = 0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = skew ? a + 1 : a; b < k; ++b) {
      const Residue v = c[pos++];
      out[start + a * k + b] = v;
      out[start + b * k + a] = skew ? fp::neg(v, p) : v;
    }
  }
}

}  // namespace

EquidistributionReport linear_quadratic_distribution(const std::vector<Vec>& gamma,
                                                     const std::vector<FpMatrix>& phi,
                                                     std::size_t n, std::uint32_t p,
                                                     const Guard& guard) {
  const QuadraticFactor factor(p, n, gamma, phi, {});
  const GridShape shape(p, 1, n);
  shape.require_within(guard, "linear_quadratic_distribution");
  const FactorEvaluator ev(factor, shape);
  const std::size_t d1 = gamma.size(), d2 = phi.size();

  // image of x -> (r_i . x) is the column space of the d1 x n matrix of rows r_i
  RowEchelon image(d1, p);
  for (std::size_t j = 0; j < n; ++j) {
    Vec col(d1);
    for (std::size_t i = 0; i < d1; ++i) col[i] = gamma[i][j];
    image.insert(col);
  }

  Histogram hist;
  Vec x;
  for (std::uint64_t i = 0; i < shape.size(); ++i) {
    shape.decode_into(i, x);
    ++hist[ev.coords(x)];
  }
  SupportModel model;
  model.predicted_dim = image.rank() + d2;
  model.ambient_dim = d1 + d2;
  model.contains = [&](const Vec& cell) {
    return image.contains(Vec(cell.begin(), cell.begin() + static_cast<std::ptrdiff_t>(d1)));
  };
  model.ambient = [](const Vec& cell) { return cell; };
  return summarize(hist, shape.size(), p, model);
}

EquidistributionReport pattern_tuple_distribution(const QuadraticFactor& factor,
                                                  const FpMatrix& j, bool restrict_to_h,
                                                  const Guard& guard) {
  factor.validate();
  if (j.rows() != j.cols() || j.modulus() != factor.p) {
    throw DimensionMismatch("J must be a square matrix over the factor's field");
  }
  const std::uint32_t p = factor.p;
  const std::size_t k = j.rows();
  const GridShape shape(p, k, factor.n);
  const std::uint64_t size = shape.size();
  guard.require(static_cast<long double>(size) * size, "pattern_tuple_distribution");

  const ConstraintSpaces cs = constraint_spaces(j);
  const FactorEvaluator ev(factor, shape);
  const std::size_t c = ev.coord_count();
  const std::size_t d1 = factor.d1(), d2 = factor.d2(), d3 = factor.d3();
  const std::size_t sym = symmetric_dim(k), skw = skew_dim(k);

  std::vector<Residue> table(size * c);
  {
    Vec x;
    for (std::uint64_t i = 0; i < size; ++i) {
      shape.decode_into(i, x);
      ev.coords(x, table.data() + i * c);
    }
  }
  std::vector<std::uint64_t> differences;
  if (restrict_to_h) {
    const auto h = linear_kernel_H(factor, shape, guard);
    for (std::uint64_t i = 0; i < size; ++i) {
      if (h.indicator.rationals()[i] == 1) differences.push_back(i);
    }
  } else {
    differences.resize(size);
    for (std::uint64_t i = 0; i < size; ++i) differences[i] = i;
  }

  const FpMatrix ipj = FpMatrix::identity(k, p) + j;
  const std::uint64_t chunks = chunk_count(differences.size(), kChunk);
  std::vector<Histogram> partial(chunks);
  for_each_chunk(differences.size(), kChunk,
                 [&](std::uint64_t ci, std::uint64_t begin, std::uint64_t end) {
    Vec key(4 * c);
    for (std::uint64_t t = begin; t < end; ++t) {
      const Vec d = shape.decode(differences[t]);
      OffsetWalker walker(shape, {d, shape.apply_left(j, d), shape.apply_left(ipj, d)});
      do {
        const Residue* at[4] = {table.data() + walker.base() * c,
                                table.data() + walker.shifted(0) * c,
                                table.data() + walker.shifted(1) * c,
                                table.data() + walker.shifted(2) * c};
        for (std::size_t q = 0; q < 4; ++q) std::copy(at[q], at[q] + c, key.begin() + q * c);
        ++partial[ci][key];
      } while (walker.next());
    }
  });
  Histogram hist;
  for (const auto& part : partial) merge_into(hist, part);

  const SubspaceBasis linear_space =
      restrict_to_h ? [&] {
        std::vector<Vec> diag;
        for (std::size_t a = 0; a < k; ++a) {
          Vec v(4 * k, 0);
          for (std::size_t q = 0; q < 4; ++q) v[q * k + a] = 1;
          diag.push_back(std::move(v));
        }
        return SubspaceBasis::span(Ambient::Vectors, k, 4, p, diag);
      }()
                    : cs.psi;
  const SubspaceBasis sym_space = orth_complement(cs.lambda);
  const SubspaceBasis skew_space = orth_complement(cs.lambda_prime);
  const RowEchelon lin_e = echelon_of(linear_space);
  const RowEchelon sym_e = echelon_of(sym_space);
  const RowEchelon skew_e = echelon_of(skew_space);

  // splits a cell into its per-entry 4-tuples
  auto tuples = [&](const Vec& cell, std::size_t entry_kind, std::size_t idx) {
    Vec out;
    for (std::size_t q = 0; q < 4; ++q) {
      const Residue* base = cell.data() + q * c;
      if (entry_kind == 0) {
        out.insert(out.end(), base + idx * k, base + (idx + 1) * k);
      } else if (entry_kind == 1) {
        append_symmetric(base + d1 * k + idx * sym, k, p, false, out);
      } else {
        append_symmetric(base + d1 * k + d2 * sym + idx * skw, k, p, true, out);
      }
    }
    return out;
  };

  SupportModel model;
  model.predicted_dim = d1 * linear_space.dim() + d2 * sym_space.dim() + d3 * skew_space.dim();
  model.ambient_dim = 4 * (d1 * k + (d2 + d3) * k * k);
  model.contains = [&](const Vec& cell) {
    for (std::size_t i = 0; i < d1; ++i) {
      if (!lin_e.contains(tuples(cell, 0, i))) return false;
    }
    for (std::size_t i = 0; i < d2; ++i) {
      if (!sym_e.contains(tuples(cell, 1, i))) return false;
    }
    for (std::size_t i = 0; i < d3; ++i) {
      if (!skew_e.contains(tuples(cell, 2, i))) return false;
    }
    return true;
  };
  model.ambient = [&](const Vec& cell) {
    Vec out;
    for (std::size_t kind = 0; kind < 3; ++kind) {
      const std::size_t count = kind == 0 ? d1 : kind == 1 ? d2 : d3;
      for (std::size_t i = 0; i < count; ++i) {
        const Vec t = tuples(cell, kind, i);
        out.insert(out.end(), t.begin(), t.end());
      }
    }
    return out;
  };
  auto report = summarize(hist, differences.size() * size, p, model);
  report.prediction_reliable = cs.admissible && spectral_condition(j);
  return report;
}

EquidistributionReport abstract_atom_distribution(const QuadraticFactor& factor,
                                                  std::size_t k, const Guard& guard) {
  factor.validate();
  const std::uint32_t p = factor.p;
  const std::size_t n = factor.n;
  const GridShape shape(p, k, n);
  const std::uint64_t size = shape.size();
  guard.require(static_cast<long double>(size) * size, "abstract_atom_distribution");
  const FactorEvaluator ev(factor, shape);
  const std::size_t c = ev.coord_count();

  std::vector<const FpMatrix*> mats;
  for (const auto& m : factor.quadratic) mats.push_back(&m);
  for (const auto& m : factor.skew) mats.push_back(&m);

  // per point: its factor coordinates and X M for every matrix
  std::vector<Residue> coords(size * c);
  std::vector<Residue> xm(size * mats.size() * k * n);
  std::vector<Vec> points(size);
  for (std::uint64_t i = 0; i < size; ++i) {
    points[i] = shape.decode(i);
    ev.coords(points[i], coords.data() + i * c);
    const FpMatrix x(k, n, points[i], p);
    for (std::size_t m = 0; m < mats.size(); ++m) {
      const auto prod = (x * *mats[m]).entries();
      std::copy(prod.begin(), prod.end(), xm.begin() + (i * mats.size() + m) * k * n);
    }
  }

  const std::size_t cross = mats.size() * k * k;
  const std::uint64_t chunks = chunk_count(size, kChunk);
  std::vector<Histogram> partial(chunks);
  for_each_chunk(size, kChunk, [&](std::uint64_t ci, std::uint64_t begin, std::uint64_t end) {
    Vec key(2 * c + cross);
    for (std::uint64_t xi = begin; xi < end; ++xi) {
      std::copy_n(coords.begin() + xi * c, c, key.begin());
      for (std::uint64_t di = 0; di < size; ++di) {
        std::copy_n(coords.begin() + di * c, c, key.begin() + c);
        const Vec& d = points[di];
        std::size_t pos = 2 * c;
        for (std::size_t m = 0; m < mats.size(); ++m) {
          const Residue* row = xm.data() + (xi * mats.size() + m) * k * n;
          for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = 0; b < k; ++b) {
              std::uint64_t acc = 0;
              for (std::size_t t = 0; t < n; ++t) {
                acc += static_cast<std::uint64_t>(row[a * n + t]) * d[b * n + t];
              }
              key[pos++] = static_cast<Residue>(acc % p);
            }
          }
        }
        ++partial[ci][key];
      }
    }
  });
  Histogram hist;
  for (const auto& part : partial) merge_into(hist, part);

  SupportModel model;
  model.predicted_dim = 2 * c + cross;
  model.ambient_dim = model.predicted_dim;
  model.contains = [](const Vec&) { return true; };
  model.ambient = [](const Vec& cell) { return cell; };
  return summarize(hist, size * size, p, model);
}

StructuredAverage structured_pattern_average(const GridFunction& f,
                                             const QuadraticFactor& factor,
                                             const FpMatrix& j, const Guard& guard) {
  if (f.kind() != ValueKind::ExactRational) {
    throw InvalidArgument("structured pattern average is computed exactly; pass a rational function");
  }
  f.require_unit_interval("structured_pattern_average");
  const GridShape& shape = f.shape();
  const std::uint32_t p = shape.p();
  const std::size_t k = shape.k();
  if (j.rows() != k || j.cols() != k || j.modulus() != p || factor.p != p ||
      factor.n != shape.n()) {
    throw DimensionMismatch("function, factor and J disagree on p, k or n");
  }
  if (!is_measurable(f, factor, guard)) {
    throw NotMeasurable("function is not constant on the factor's atoms");
  }
  const std::uint64_t size = shape.size();
  guard.require(static_cast<long double>(size) * size, "structured_pattern_average");

  const auto h = linear_kernel_H(factor, shape, guard);
  const FpMatrix ipj = FpMatrix::identity(k, p) + j;
  const detail::ExactCounter counter(f.rationals());
  BigInt sum = 0;
  Vec d;
  for (std::uint64_t di = 0; di < size; ++di) {
    if (h.indicator.rationals()[di] != 1) continue;
    shape.decode_into(di, d);
    OffsetWalker walker(shape, {d, shape.apply_left(j, d), shape.apply_left(ipj, d)});
    sum += counter.sum(walker, 0, size, 3);
  }
  BigInt scale = BigInt(size) * size;
  for (int i = 0; i < 4; ++i) scale *= counter.denom();

  StructuredAverage out;
  out.lhs = Rational(sum, scale);

  const auto tuples = pattern_tuple_distribution(factor, j, true, guard);
  out.tuple_shortfall = tuples.support_ok ? std::clamp(1.0 - tuples.min_cell_ratio, 0.0, 1.0) : 1.0;

  const auto atoms = atom_partition(factor, shape, guard);
  const FactorEvaluator ev(factor, shape);
  const long double atom_scale = power_ld(p, ev.coord_count()) / static_cast<long double>(size);
  for (auto s : atoms.atom_size) {
    out.atom_excess = std::max(out.atom_excess,
                               static_cast<double>(static_cast<long double>(s) * atom_scale) - 1.0);
  }
  // the measured ratios are rounded doubles; shave a little so rounding never
  // makes the bound claim more than the exact ratios support
  const double keep =
      (1.0 - out.tuple_shortfall) / std::pow(1.0 + out.atom_excess, 4) * (1.0 - 1e-12);
  out.tolerance = 1.0 - keep;

  Rational bound = rational_pow(f.mean_exact(), 4) * rational_from_double(std::max(keep, 0.0));
  for (std::size_t i = 0; i < k * factor.d1(); ++i) bound /= p;
  out.bound = bound;
  out.holds = out.lhs >= out.bound;
  return out;
}

}  // namespace popdiff
