#include <cmath>
#include <memory>

#include "cli.hpp"

namespace popdiff::cli {

namespace {

struct SpecSource {
  std::string path;
  std::uint32_t p = 5;
  std::size_t k = 1;
  std::int64_t m1 = 1;
  std::int64_t m2 = 2;
};

void add_spec_options(CLI::App* command, SpecSource& spec, bool with_shape) {
  command->add_option("--spec", spec.path, "pattern JSON {\"p\",\"M1\",\"M2\"}");
  if (with_shape) {
    command->add_option("--p", spec.p, "field size when no --spec is given");
    command->add_option("--k", spec.k, "matrix size when no --spec is given");
  }
  command->add_option("--m1", spec.m1, "scalar M1 when no --spec is given");
  command->add_option("--m2", spec.m2, "scalar M2 when no --spec is given");
}

PatternSpec spec_for(const SpecSource& spec) {
  return load_pattern_spec(spec.path, spec.p, spec.k, spec.m1, spec.m2);
}

// The function fixes p and k when the pattern is given by scalars.
PatternSpec spec_for(const SpecSource& spec, const GridFunction& f) {
  const PatternSpec s = load_pattern_spec(spec.path, f.shape().p(), f.shape().k(), spec.m1, spec.m2);
  if (s.p != f.shape().p() || s.k != f.shape().k()) {
    throw DimensionMismatch("pattern acts on (F_" + std::to_string(s.p) + ")^" +
                            std::to_string(s.k) + " rows but the function has p = " +
                            std::to_string(f.shape().p()) + ", k = " +
                            std::to_string(f.shape().k()));
  }
  return s;
}

Json describe(const GridFunction& f) {
  Json out{{"p", f.shape().p()},
           {"k", f.shape().k()},
           {"n", f.shape().n()},
           {"kind", to_string(f.kind())},
           {"size", f.size()}};
  if (f.kind() == ValueKind::ExactRational) {
    out["mean"] = io::to_json(f.mean_exact());
  } else if (f.kind() == ValueKind::Float) {
    out["mean"] = f.mean().real();
  } else {
    out["mean"] = Json::array({f.mean().real(), f.mean().imag()});
  }
  return out;
}

Json values_json(const GridFunction& f) {
  Json out = Json::array();
  for (std::uint64_t i = 0; i < f.size(); ++i) {
    switch (f.kind()) {
      case ValueKind::ExactRational: out.push_back(io::to_json(f.rationals()[i])); break;
      case ValueKind::Float: out.push_back(f.reals()[i]); break;
      case ValueKind::ComplexFloat:
        out.push_back(Json::array({f.complexes()[i].real(), f.complexes()[i].imag()}));
        break;
    }
  }
  return out;
}

void add_check(CLI::App& app, Registry& registry) {
  auto spec = std::make_shared<SpecSource>();
  CLI::App* cmd = app.add_subcommand("check", "admissibility and the spectral condition");
  add_spec_options(cmd, *spec, true);
  registry.bind(cmd, [spec](const RunConfig&) {
    const PatternSpec s = spec_for(*spec);
    Json r{{"p", s.p}, {"k", s.k}, {"M1", io::to_json(s.m1)}, {"M2", io::to_json(s.m2)}};
    const bool admissible = check_admissible(s);
    r["admissible"] = admissible;
    Outcome out;
    if (is_invertible(s.m1) && is_invertible(s.m2)) {
      const bool spectral = check_spectral(s);
      const FpMatrix j = s.j();
      r["spectral"] = spectral;
      r["J"] = io::to_json(j);
      r["min_poly_J"] = min_poly(j).to_string();
      // the condition is invariant under J -> J^-1
      const bool inverse_agrees = spectral_condition(j) == spectral;
      r["inverse_agrees"] = inverse_agrees;
      out.check(inverse_agrees);
      if (admissible && spectral) {
        const bool in_algebra = in_algebra_of_square(j);
        r["J_in_algebra_of_square"] = in_algebra;
        out.check(in_algebra);
      }
      r["assertions_ok"] = *out.assertions_ok;
    } else {
      r["spectral"] = nullptr;
    }
    out.add(std::move(r));
    return out;
  });
}

void add_subspaces(CLI::App& app, Registry& registry) {
  struct Options {
    SpecSource spec;
    bool bruteforce = false;
    std::size_t n = 1;
  };
  auto o = std::make_shared<Options>();
  CLI::App* cmd = app.add_subcommand("subspaces", "constraint subspaces of J = M2 M1^-1");
  add_spec_options(cmd, o->spec, true);
  cmd->add_flag("--bruteforce", o->bruteforce,
                "compare Lambda and Lambda' with the exhaustive annihilators");
  cmd->add_option("--n", o->n, "number of columns for the exhaustive annihilators");
  registry.bind(cmd, [o](const RunConfig& config) {
    const PatternSpec s = spec_for(o->spec);
    const FpMatrix j = s.j();
    const ConstraintSpaces cs = constraint_spaces(j);
    Json r{{"J", io::to_json(j)},
           {"admissible", cs.admissible},
           {"Xi", io::to_json(cs.xi)},
           {"Lambda", io::to_json(cs.lambda)},
           {"LambdaPrime", io::to_json(cs.lambda_prime)},
           {"Psi", io::to_json(cs.psi)},
           {"Omega", io::to_json(cs.omega)},
           {"OmegaPrime", io::to_json(cs.omega_prime)}};
    Outcome out;
    if (o->bruteforce) {
      const Guard guard = config.guard();
      const bool sym = annihilator_bruteforce(j, o->n, Symmetry::Symmetric, guard).same_as(cs.lambda);
      const bool skew = annihilator_bruteforce(j, o->n, Symmetry::Skew, guard).same_as(cs.lambda_prime);
      r["lambda_matches"] = sym;
      r["lambda_prime_matches"] = skew;
      out.check(sym && skew);
      r["assertions_ok"] = *out.assertions_ok;
    }
    out.add(std::move(r));
    return out;
  });
}

void add_count(CLI::App& app, Registry& registry) {
  struct Options {
    SpecSource spec;
    FunctionSource fn;
    std::string d;
    int points = 4;
  };
  auto o = std::make_shared<Options>();
  CLI::App* cmd = app.add_subcommand("count", "pattern count beta(d) for one difference");
  add_spec_options(cmd, o->spec, false);
  add_function_options(cmd, o->fn);
  cmd->add_option("--d", o->d, "difference as k*n comma separated digits, row major")->required();
  cmd->add_option("--points", o->points, "3 or 4 point pattern")->check(CLI::IsMember({3, 4}));
  registry.bind(cmd, [o](const RunConfig& config) {
    const GridFunction f = load_function(o->fn, config, config.seed);
    const PatternSpec s = spec_for(o->spec, f);
    const Vec d = parse_vec(o->d, s.p);
    if (d.size() != f.shape().digits()) throw DimensionMismatch("--d needs k*n digits");
    const PatternValue v = pattern_count(f, s, d, o->points);
    Json r{{"backend", to_string(backend_for(f))},
           {"function", describe(f)},
           {"d", io::to_json(d)},
           {"points", o->points}};
    r["value"] = v.exact ? io::to_json(*v.exact) : Json(v.value);
    Outcome out;
    out.add(std::move(r));
    return out;
  });
}

void add_popular(CLI::App& app, Registry& registry) {
  struct Options {
    SpecSource spec;
    FunctionSource fn;
    double eps = 0.05;
    int points = 4;
    bool with_beta = false;
    bool require = false;
  };
  auto o = std::make_shared<Options>();
  CLI::App* cmd = app.add_subcommand("popular", "exhaustive popular-difference search");
  add_spec_options(cmd, o->spec, false);
  add_function_options(cmd, o->fn);
  cmd->add_option("--eps", o->eps, "threshold alpha^points - eps");
  cmd->add_option("--points", o->points, "3 or 4 point pattern")->check(CLI::IsMember({3, 4}));
  cmd->add_flag("--with-beta", o->with_beta, "include beta(d) for every d");
  cmd->add_flag("--require-popular", o->require, "exit 2 unless a nonzero popular d exists");
  registry.bind(cmd, [o](const RunConfig& config) {
    const GridFunction f = load_function(o->fn, config, config.seed);
    const PatternSpec s = spec_for(o->spec, f);
    const auto report = popular_search(f, s, o->eps, o->points, config.guard());
    Json r = io::to_json(report, o->with_beta);
    r["function"] = describe(f);
    Outcome out;
    if (o->require) {
      out.check(report.threshold_hits > 0);
      r["assertions_ok"] = *out.assertions_ok;
    }
    out.add(std::move(r));
    return out;
  });
}

void add_gowers(CLI::App& app, Registry& registry) {
  struct Options {
    FunctionSource fn;
    std::size_t s = 2;
    std::string mode = "auto";
  };
  auto o = std::make_shared<Options>();
  o->fn.kind = "values";
  CLI::App* cmd = app.add_subcommand("gowers", "Gowers uniformity norm U^s");
  add_function_options(cmd, o->fn);
  cmd->add_option("--s", o->s, "order s >= 1");
  cmd->add_option("--mode", o->mode, "auto | direct | recursive | both")
      ->check(CLI::IsMember({"auto", "direct", "recursive", "both"}));
  registry.bind(cmd, [o](const RunConfig& config) {
    const GridFunction f = load_function(o->fn, config, config.seed);
    const Guard guard = config.guard();
    Json r{{"backend", "float"}, {"function", describe(f)}, {"s", o->s}};
    Outcome out;
    if (o->mode == "both") {
      const double direct = gowers_norm(f, o->s, GowersMode::Direct, guard);
      const double recursive = gowers_norm(f, o->s, GowersMode::Recursive, guard);
      r["direct"] = direct;
      r["recursive"] = recursive;
      r["difference"] = std::abs(direct - recursive);
      out.check(std::abs(direct - recursive) <= 1e-9);
      r["assertions_ok"] = *out.assertions_ok;
    } else {
      const GowersMode mode = o->mode == "direct"      ? GowersMode::Direct
                              : o->mode == "recursive" ? GowersMode::Recursive
                                                       : GowersMode::Auto;
      r["norm"] = gowers_norm(f, o->s, mode, guard);
    }
    out.add(std::move(r));
    return out;
  });
}

void add_equidist(CLI::App& app, Registry& registry) {
  struct Options {
    std::string factor;
    std::string spec;
    std::string fn;
    std::size_t k = 1;
    bool restrict_to_h = false;
  };
  auto o = std::make_shared<Options>();
  CLI::App* cmd = app.add_subcommand(
      "equidist", "exhaustive distribution of factor atoms or pattern tuples");
  cmd->add_option("--factor", o->factor, "quadratic factor JSON")->required();
  cmd->add_option("--spec", o->spec, "pattern JSON; switches to the pattern-tuple distribution");
  cmd->add_option("--fn", o->fn, "factor-measurable function for the structured average (needs --spec)");
  cmd->add_option("--k", o->k, "rows k for the atom distribution");
  cmd->add_flag("--restrict-h", o->restrict_to_h, "restrict X to the linear kernel H");
  registry.bind(cmd, [o](const RunConfig& config) {
    const QuadraticFactor factor = io::factor_from_json(io::read_json_file(o->factor));
    const Guard guard = config.guard();
    Outcome out;
    Json r;
    if (o->spec.empty()) {
      r["mode"] = "atoms";
      r.update(io::to_json(abstract_atom_distribution(factor, o->k, guard)));
    } else {
      const PatternSpec s = io::pattern_spec_from_json(io::read_json_file(o->spec));
      r["mode"] = "pattern_tuples";
      r["J"] = io::to_json(s.j());
      r.update(io::to_json(pattern_tuple_distribution(factor, s.j(), o->restrict_to_h, guard)));
      if (!o->fn.empty()) {
        const auto avg = structured_pattern_average(read_gridfn(o->fn), factor, s.j(), guard);
        r["structured_average"] = io::to_json(avg);
        out.check(avg.holds);
      }
    }
    out.check(r["support_ok"].get<bool>());
    r["assertions_ok"] = *out.assertions_ok;
    out.add(std::move(r));
    return out;
  });
}

void add_fnio(CLI::App& app, Registry& registry) {
  CLI::App* fnio = app.add_subcommand("fnio", "grid function files (PLGF)");
  fnio->require_subcommand(1);

  auto w = std::make_shared<std::pair<FunctionSource, std::string>>();
  w->first.kind = "values";
  CLI::App* write = fnio->add_subcommand("write", "write a random function");
  add_function_options(write, w->first);
  write->add_option("--out", w->second, "output file")->required();
  registry.bind(write, [w](const RunConfig& config) {
    const GridFunction f = load_function(w->first, config, config.seed);
    write_gridfn(w->second, f);
    Json r = describe(f);
    r["path"] = w->second;
    Outcome out;
    out.add(std::move(r));
    return out;
  });

  auto rd = std::make_shared<std::pair<std::string, bool>>();
  CLI::App* read = fnio->add_subcommand("read", "summarize a function file");
  read->add_option("--fn", rd->first, "function file")->required();
  read->add_flag("--values", rd->second, "include every value");
  registry.bind(read, [rd](const RunConfig&) {
    const GridFunction f = read_gridfn(rd->first);
    Json r = describe(f);
    if (rd->second) r["values"] = values_json(f);
    Outcome out;
    out.add(std::move(r));
    return out;
  });

  auto rt = std::make_shared<std::pair<FunctionSource, std::string>>();
  rt->first.kind = "values";
  CLI::App* roundtrip = fnio->add_subcommand("roundtrip", "encode, decode and compare");
  add_function_options(roundtrip, rt->first);
  roundtrip->add_option("--out", rt->second, "also round-trip through this file");
  registry.bind(roundtrip, [rt](const RunConfig& config) {
    const GridFunction f = load_function(rt->first, config, config.seed);
    const std::string bytes = encode_gridfn(f);
    bool same = decode_gridfn(bytes) == f;
    if (!rt->second.empty()) {
      write_gridfn(rt->second, f);
      same = same && read_gridfn(rt->second) == f;
    }
    Json r = describe(f);
    r["bytes"] = bytes.size();
    r["identical"] = same;
    Outcome out;
    out.check(same);
    r["assertions_ok"] = same;
    out.add(std::move(r));
    return out;
  });
}

}  // namespace

void register_core(CLI::App& app, Registry& registry) {
  add_check(app, registry);
  add_subspaces(app, registry);
  add_count(app, registry);
  add_popular(app, registry);
  add_gowers(app, registry);
  add_equidist(app, registry);
  add_fnio(app, registry);
}

}  // namespace popdiff::cli
