#include "popdiff/json_io.hpp"

#include <fstream>
#include <regex>

namespace popdiff {

Rational parse_rational(const std::string& text) {
  static const std::regex fraction(R"(\s*([+-]?\d+)\s*/\s*(\d+)\s*)");
  static const std::regex decimal(R"(\s*([+-]?)(\d*)(?:\.(\d*))?(?:[eE]([+-]?\d+))?\s*)");
  std::smatch m;
  if (std::regex_match(text, m, fraction)) {
    const BigInt den(m[2].str());
    if (den == 0) throw InvalidArgument("zero denominator in '" + text + "'");
    return Rational(BigInt(m[1].str()), den);
  }
  if (std::regex_match(text, m, decimal) && (m[2].length() > 0 || m[3].length() > 0)) {
    const std::string whole = m[2].str(), frac = m[3].str();
    BigInt num(whole.empty() && frac.empty() ? "0" : whole + frac);
    BigInt den = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac.size()));
    if (m[4].matched) {
      const long e = std::stol(m[4].str());
      if (e > 1000 || e < -1000) throw InvalidArgument("exponent out of range in '" + text + "'");
      const BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::abs(e)));
      if (e >= 0) num *= scale; else den *= scale;
    }
    if (m[1].str() == "-") num = -num;
    return Rational(num, den);
  }
  throw InvalidArgument("not a rational number: '" + text + "'");
}

namespace io {

namespace {

std::uint32_t modulus_of(const Json& j) {
  const auto p = j.at("p").get<std::int64_t>();
  if (p < 2 || p > kMaxModulus) throw InvalidModulus("bad modulus " + std::to_string(p));
  return static_cast<std::uint32_t>(p);
}

IntMatrix int_matrix(const Json& j) {
  if (!j.is_array() || j.empty()) throw InvalidArgument("matrix must be a non-empty array of rows");
  IntMatrix m;
  for (const auto& row : j) {
    if (!row.is_array()) throw InvalidArgument("matrix rows must be arrays");
    m.push_back(row.get<std::vector<std::int64_t>>());
    if (m.back().size() != m.front().size()) throw DimensionMismatch("ragged matrix");
  }
  return m;
}

GroupMap map_from_json(const Json& j, const FiniteGroup& g) {
  if (j.is_number_integer()) return GroupMap(j.get<std::int64_t>());
  return GroupMap(matrix_from_json(j, static_cast<std::uint32_t>(g.modulus())));
}

Json rationals(const std::vector<Rational>& v) {
  Json out = Json::array();
  for (const auto& r : v) out.push_back(to_json(r));
  return out;
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

Json to_json(const Rational& r) { return to_string(r); }

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(BigInt(j.get<std::int64_t>()));
  if (j.is_number_float()) return rational_from_double(j.get<double>());
  throw InvalidArgument("expected a rational, got " + j.dump());
}

Json to_json(const Vec& v) {
  Json out = Json::array();
  for (Residue x : v) out.push_back(x);
  return out;
}

Json to_json(const FpMatrix& m) { return m.to_rows(); }

FpMatrix matrix_from_json(const Json& j, std::uint32_t p) {
  const IntMatrix rows = int_matrix(j);
  FpMatrix m(rows.size(), rows.front().size(), p);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].size(); ++c) m(i, c) = fp::reduce(rows[i][c], p);
  }
  return m;
}

Vec vector_from_json(const Json& j, std::uint32_t p) {
  Vec v;
  for (const auto& x : j) v.push_back(fp::reduce(x.get<std::int64_t>(), p));
  return v;
}

PatternSpec pattern_spec_from_json(const Json& j) {
  const std::uint32_t p = modulus_of(j);
  // integer entries stand for scalar matrices of size k
  const std::size_t k = j.value("k", std::size_t{1});
  auto side = [&](const char* key) {
    const Json& m = j.at(key);
    return m.is_number_integer() ? FpMatrix::scalar(k, m.get<std::int64_t>(), p)
                                 : matrix_from_json(m, p);
  };
  PatternSpec spec(side("M1"), side("M2"));
  if (j.contains("k") && j.at("k").get<std::size_t>() != spec.k) {
    throw DimensionMismatch("k disagrees with the matrix size");
  }
  return spec;
}

Json to_json(const PatternSpec& spec) {
  return Json{{"p", spec.p}, {"k", spec.k}, {"M1", to_json(spec.m1)}, {"M2", to_json(spec.m2)}};
}

QuadraticFactor factor_from_json(const Json& j) {
  const std::uint32_t p = modulus_of(j);
  QuadraticFactor f(p, j.at("n").get<std::size_t>());
  for (const auto& r : j.value("linear", Json::array())) f.linear.push_back(vector_from_json(r, p));
  for (const auto& m : j.value("quadratic", Json::array())) {
    f.quadratic.push_back(matrix_from_json(m, p));
  }
  for (const auto& m : j.value("skew", Json::array())) f.skew.push_back(matrix_from_json(m, p));
  f.validate();
  return f;
}

Json to_json(const QuadraticFactor& factor) {
  Json linear = Json::array(), quadratic = Json::array(), skew = Json::array();
  for (const auto& r : factor.linear) linear.push_back(to_json(r));
  for (const auto& m : factor.quadratic) quadratic.push_back(to_json(m));
  for (const auto& m : factor.skew) skew.push_back(to_json(m));
  return Json{{"p", factor.p}, {"n", factor.n}, {"linear", linear},
              {"quadratic", quadratic}, {"skew", skew}};
}

FiniteGroup group_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "Z_N") return FiniteGroup::cyclic(j.at("N").get<std::uint64_t>());
  if (kind == "vector") {
    return FiniteGroup::vector(modulus_of(j), j.value("k", std::size_t{1}),
                               j.value("n", std::size_t{1}));
  }
  throw InvalidArgument("group kind must be \"Z_N\" or \"vector\"");
}

FiniteGroupSpec group_spec_from_json(const Json& j) {
  FiniteGroup g = group_from_json(j);
  GroupMap m1 = map_from_json(j.at("M1"), g);
  GroupMap m2 = map_from_json(j.at("M2"), g);
  return FiniteGroupSpec(std::move(g), std::move(m1), std::move(m2));
}

Json to_json(const FiniteGroup& g) {
  if (g.is_cyclic()) return Json{{"kind", "Z_N"}, {"N", g.modulus()}};
  return Json{{"kind", "vector"}, {"p", g.modulus()}, {"k", g.shape().k()}, {"n", g.shape().n()}};
}

Json to_json(const GroupMap& m) {
  if (m.is_multiplier()) return m.multiplier();
  return to_json(m.matrix());
}

Json to_json(const SubspaceBasis& s) {
  Json basis = Json::array();
  for (const auto& v : s.basis()) basis.push_back(to_json(v));
  return Json{{"ambient", to_string(s.kind())}, {"k", s.k()}, {"blocks", s.blocks()},
              {"p", s.modulus()}, {"dim", s.dim()}, {"basis", basis}};
}

Json to_json(const PatternCountReport& r, bool with_beta) {
  Json out{{"backend", to_string(r.backend)},
           {"points", r.points},
           {"epsilon", r.epsilon},
           {"alpha", r.alpha_exact ? to_json(*r.alpha_exact) : Json(r.alpha)},
           {"threshold", r.threshold},
           {"argmax", r.argmax_d},
           {"beta_max", r.beta_exact.empty() ? Json(r.max_beta)
                                             : to_json(r.beta_exact[r.argmax_d])},
           {"hits", r.threshold_hits}};
  out["max_d"] = r.beta.empty() ? 0 : r.beta.size() - 1;
  if (with_beta) {
    out["beta"] = r.beta_exact.empty() ? Json(r.beta) : rationals(r.beta_exact);
  }
  return out;
}

Json to_json(const EquidistributionReport& r) {
  return Json{{"support_ok", r.support_ok},
              {"prediction_reliable", r.prediction_reliable},
              {"predicted_dim", r.predicted_dim},
              {"ambient_dim", r.ambient_dim},
              {"predicted_cell_probability", to_json(r.predicted_cell_probability)},
              {"max_multiplicative_deviation", r.max_multiplicative_deviation},
              {"min_cell_ratio", r.min_cell_ratio},
              {"max_cell_ratio", r.max_cell_ratio},
              {"cells_observed", r.cells_observed},
              {"full_support", r.full_support},
              {"observed_span_dim", r.observed_span_dim},
              {"samples", r.samples}};
}

Json to_json(const StructuredAverage& r) {
  return Json{{"lhs", to_json(r.lhs)},           {"bound", to_json(r.bound)},
              {"tolerance", r.tolerance},        {"tuple_shortfall", r.tuple_shortfall},
              {"atom_excess", r.atom_excess},    {"holds", r.holds}};
}

Json to_json(const BohrSet& b, bool with_elements) {
  Json out{{"frequencies", b.frequencies},
           {"radius", to_json(b.radius)},
           {"size", b.count()},
           {"measure", to_json(b.measure)}};
  if (with_elements) out["elements"] = b.elements;
  return out;
}

Json to_json(const SmoothedCount& c) {
  Json out{{"direct", c.direct}, {"fourier", c.fourier}, {"discrepancy", c.discrepancy}};
  out["exact"] = c.exact ? to_json(*c.exact) : Json(nullptr);
  return out;
}

Json to_json(const RegularityDecomposition& d, bool with_functions) {
  Json out{{"stages", d.stages},
           {"T", d.frequencies},
           {"smoothing_radius", to_json(d.smoothing_radius)},
           {"gamma1", d.gamma1},
           {"gamma2", d.gamma2},
           {"mean_f", to_json(d.mean_f)},
           {"mean_f1", to_json(d.mean_f1)},
           {"mean_preserved", d.mean_f == d.mean_f1},
           {"f1_in_unit_interval", d.f1_in_unit_interval},
           {"f2_l2", d.f2_l2},
           {"f3_fourier_sup", d.f3_fourier_sup},
           {"lipschitz_sup", d.lipschitz_sup},
           {"lipschitz_constant", d.lipschitz_constant},
           {"lipschitz_set_size", d.lipschitz_set_size},
           {"f2_one_bounded", d.f2_one_bounded},
           {"f3_one_bounded", d.f3_one_bounded},
           {"contracts_hold", d.contracts_hold}};
  if (with_functions) {
    out["f1"] = rationals(d.f1);
    out["f2"] = rationals(d.f2);
    out["f3"] = rationals(d.f3);
  }
  return out;
}

Json to_json(const LiftReport& r) {
  Json triples = Json::array();
  for (const auto& t : r.triples) triples.push_back(Json::array({t.x, t.second, t.third}));
  return Json{{"N", r.n},
              {"k", r.k},
              {"epsilon", to_json(r.epsilon)},
              {"prime", r.prime},
              {"window_epsilon", to_json(r.window_epsilon)},
              {"widened", r.widened},
              {"bohr_radius", to_json(r.bohr_radius)},
              {"bohr_size", r.bohr_size},
              {"candidates", r.candidates},
              {"alpha", r.alpha},
              {"best_d", r.best_d},
              {"offset1", r.offset1},
              {"offset2", r.offset2},
              {"modp_count", r.modp_count},
              {"boundary_discarded", r.boundary_discarded},
              {"lifted", r.lifted},
              {"audit_failures", r.audit_failures},
              {"triples", triples}};
}

Json to_json(const cex::CoreTable& t) {
  Json shifts = Json::array();
  for (const auto& v : t.by_shift) shifts.push_back(to_json(v));
  return Json{{"sup", to_json(t.sup)},
              {"mean", to_json(t.mean_g1)},
              {"mean_fourth", to_json(rational_pow(t.mean_g1, 4))},
              {"strict", t.strict},
              {"by_shift", shifts}};
}

Json to_json(const cex::HypergraphExpectations& h) {
  return Json{{"mean_g2", to_json(h.mean_g2)},
              {"pattern_a", to_json(h.pattern_a)},
              {"pattern_b", to_json(h.pattern_b)},
              {"mean_identity", h.mean_identity},
              {"pattern_a_identity", h.pattern_a_identity},
              {"pattern_b_bound", h.pattern_b_bound},
              {"unique_triangles", h.unique_triangles}};
}

Json to_json(const cex::MonteCarlo& m) {
  return Json{{"mean", m.mean},         {"se", m.se},         {"se_floor", m.se_floor},
              {"effective_se", m.effective_se}, {"z", m.z}, {"within_3se", m.within}};
}

Json to_json(const cex::DressReport& r) {
  Json dirs = Json::array();
  for (const auto& d : r.directions) {
    dirs.push_back(Json{{"a", to_json(d.a)},
                        {"b", to_json(d.b)},
                        {"class", cex::to_string(d.cls)},
                        {"beta1", to_json(d.beta1)},
                        {"factor", to_json(d.factor)},
                        {"predicted", to_json(d.predicted)},
                        {"measured", to_json(d.measured)}});
  }
  return Json{{"n", r.n},
              {"L", r.modulus},
              {"first_seed", r.first_seed},
              {"seeds", r.seeds},
              {"mean_f1", to_json(r.mean_f1)},
              {"mean_g2", to_json(r.mean_g2)},
              {"alpha_predicted", to_json(r.alpha_predicted)},
              {"alpha", to_json(r.alpha)},
              {"directions", dirs}};
}

Json to_json(const cex::AssemblyReport& r) {
  Json dirs = Json::array();
  for (const auto& d : r.directions) {
    dirs.push_back(Json{{"a", to_json(d.a)},
                        {"b", to_json(d.b)},
                        {"class", cex::to_string(d.cls)},
                        {"beta_h", to_json(d.beta_h)},
                        {"beta_f", to_json(d.beta_f)},
                        {"reference", d.reference}});
  }
  return Json{{"gamma", r.gamma},
              {"seed", r.seed},
              {"beta", to_json(r.beta)},
              {"mean_h", to_json(r.mean_h)},
              {"mean_f", to_json(r.mean_f)},
              {"predicted_mean", to_json(r.predicted_mean)},
              {"four_ap_free", r.four_ap_free},
              {"log_ratio", r.log_ratio},
              {"log_ratio_ok", r.log_ratio_ok},
              {"cube_bound_ok", r.cube_bound_ok},
              {"directions", dirs}};
}

Json to_json(const cex::CexReport& r) {
  Json classes = Json::array();
  for (const auto& c : r.classes) {
    classes.push_back(Json{{"class", cex::to_string(c.cls)},
                           {"directions", c.directions},
                           {"max_ratio", c.max_ratio}});
  }
  return Json{{"seed", r.params.seed},
              {"n", r.params.n},
              {"L", r.params.modulus},
              {"gamma", r.params.gamma},
              {"set", r.set},
              {"core", to_json(r.core)},
              {"core_ratio", to_json(r.core_ratio)},
              {"hypergraph", to_json(r.hypergraph)},
              {"four_ap_free", r.four_ap_free},
              {"log_ratio", r.log_ratio},
              {"alpha_f", to_json(r.alpha_f)},
              {"support", r.support},
              {"classes", classes},
              {"max_ratio_generic", r.max_ratio_generic},
              {"max_ratio_all", r.max_ratio_all},
              {"full_constant_certified", r.full_constant_certified},
              {"scope", r.scope}};
}

}  // namespace io
}  // namespace popdiff
