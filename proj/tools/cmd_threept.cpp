#include <memory>

#include "cli.hpp"

namespace popdiff::cli {

namespace {

struct GroupSource {
  std::string path;
  std::uint64_t order = 101;
  std::int64_t m1 = 1;
  std::int64_t m2 = 2;

  FiniteGroupSpec load() const {
    if (!path.empty()) return io::group_spec_from_json(io::read_json_file(path));
    return FiniteGroupSpec(FiniteGroup::cyclic(order), GroupMap(m1), GroupMap(m2));
  }
};

struct DataSource {
  std::string values;  // JSON array of |G| numbers; random when empty
  std::string kind = "set";
  double density = 0.5;

  std::vector<Rational> load(const FiniteGroup& g, const RunConfig& config) const {
    config.guard().require(static_cast<long double>(g.size()), "function on G");
    std::vector<Rational> f;
    if (!values.empty()) {
      const Json j = io::read_json_file(values);
      if (!j.is_array() || j.size() != g.size()) {
        throw DimensionMismatch("--values needs a JSON array of |G| = " +
                                std::to_string(g.size()) + " entries");
      }
      for (const auto& x : j) f.push_back(io::rational_from_json(x));
      return f;
    }
    std::mt19937_64 rng(config.seed);
    f.resize(g.size());
    for (auto& x : f) {
      if (kind == "set") {
        x = uniform01(rng) < density ? 1 : 0;
      } else {
        x = make_rational(static_cast<std::int64_t>(rng() % 1001), 1000);
      }
    }
    return f;
  }
};

void add_group_options(CLI::App* command, GroupSource& group) {
  command->add_option("--spec", group.path,
                      "group JSON {\"kind\":\"Z_N\",...} or {\"kind\":\"vector\",...}");
  command->add_option("--N", group.order, "order of Z/NZ when no --spec is given");
  command->add_option("--m1", group.m1, "multiplier M1 when no --spec is given");
  command->add_option("--m2", group.m2, "multiplier M2 when no --spec is given");
}

void add_data_options(CLI::App* command, DataSource& data) {
  command->add_option("--values", data.values, "JSON array of |G| values; random when absent");
  command->add_option("--kind", data.kind, "random data: set | values")
      ->check(CLI::IsMember({"set", "values"}));
  command->add_option("--density", data.density, "P(1) for a random set")
      ->check(CLI::Range(0.0, 1.0));
}

struct BohrOptions {
  std::string freqs;
  std::string radius = "1/5";
};

void add_bohr_options(CLI::App* command, BohrOptions& b) {
  command->add_option("--freqs", b.freqs, "frequency indices, comma separated");
  command->add_option("--radius", b.radius, "radius in (0, 1/2], e.g. 1/5 or 0.2");
}

std::vector<std::uint64_t> frequencies(const std::string& text, const FiniteGroup& g) {
  std::vector<std::uint64_t> out;
  if (text.empty()) return out;
  for (std::int64_t x : parse_ints(text)) {
    if (x < 0 || static_cast<std::uint64_t>(x) >= g.size()) {
      throw InvalidArgument("frequency " + std::to_string(x) + " is not an index of G");
    }
    out.push_back(static_cast<std::uint64_t>(x));
  }
  return out;
}

BohrSet bohr_for(const BohrOptions& b, const FiniteGroup& g, const Guard& guard) {
  return bohr_set(g, frequencies(b.freqs, g), parse_rational(b.radius), guard);
}

Json group_json(const FiniteGroupSpec& spec) {
  Json g = io::to_json(spec.group);
  g["M1"] = io::to_json(spec.m1);
  g["M2"] = io::to_json(spec.m2);
  return g;
}

void add_bohr(CLI::App* tp, Registry& registry) {
  struct Options {
    GroupSource group;
    BohrOptions bohr;
    bool derived = false;
  };
  auto o = std::make_shared<Options>();
  CLI::App* cmd = tp->add_subcommand("bohr", "Bohr set B(S, radius) and its smoothing measure");
  add_group_options(cmd, o->group);
  add_bohr_options(cmd, o->bohr);
  cmd->add_flag("--derived", o->derived, "also build B(T', radius) for the pattern maps");
  registry.bind(cmd, [o](const RunConfig& config) {
    const Guard guard = config.guard();
    const FiniteGroupSpec spec = o->group.load();
    const BohrSet b = bohr_for(o->bohr, spec.group, guard);
    const auto nu = smoothing_measure(spec.group, b, guard);
    Json r{{"group", group_json(spec)}};
    r.update(io::to_json(b));
    r["smoothing_support"] = nu.support.size();
    r["smoothing_density_sup"] = io::to_json(nu.density_sup(spec.group.size()));
    Outcome out;
    if (o->derived) {
      const DerivedBohr d = derived_bohr(b, spec, guard);
      r["derived"] = io::to_json(d.set);
      r["derived_matches_direct"] = d.matches_direct;
      out.check(d.matches_direct);
      r["assertions_ok"] = d.matches_direct;
    }
    out.add(std::move(r));
    return out;
  });
}

void add_count(CLI::App* tp, Registry& registry) {
  struct Options {
    GroupSource group;
    DataSource data;
    BohrOptions bohr;
  };
  auto o = std::make_shared<Options>();
  CLI::App* cmd = tp->add_subcommand(
      "count", "Bohr-smoothed 3-point count, direct and through the Fourier side");
  add_group_options(cmd, o->group);
  add_data_options(cmd, o->data);
  add_bohr_options(cmd, o->bohr);
  registry.bind(cmd, [o](const RunConfig& config) {
    const Guard guard = config.guard();
    const FiniteGroupSpec spec = o->group.load();
    const auto f = o->data.load(spec.group, config);
    const BohrSet b = bohr_for(o->bohr, spec.group, guard);
    const Backend backend = config.backend_or(Backend::Exact);
    SmoothedCount c;
    if (backend == Backend::Exact) {
      c = smoothed_3pt_count(spec, f, b, guard);
    } else {
      std::vector<double> fd(f.size());
      for (std::size_t i = 0; i < f.size(); ++i) fd[i] = to_double(f[i]);
      c = smoothed_3pt_count(spec, fd, b, guard);
    }
    Json r{{"backend", to_string(backend)}, {"group", group_json(spec)}, {"bohr_size", b.count()}};
    r.update(io::to_json(c));
    const bool ok = c.discrepancy <= 1e-9;
    Outcome out;
    out.check(ok);
    r["assertions_ok"] = ok;
    out.add(std::move(r));
    return out;
  });
}

void add_decompose(CLI::App* tp, Registry& registry) {
  struct Options {
    GroupSource group;
    DataSource data;
    double eps = 0.2;
    std::string delta = "1/5";
    std::string freqs;
    std::uint64_t max_stages = 0;
    bool with_functions = false;
  };
  auto o = std::make_shared<Options>();
  o->data.kind = "values";
  CLI::App* cmd = tp->add_subcommand("decompose", "regularity decomposition f = f1 + f2 + f3");
  add_group_options(cmd, o->group);
  add_data_options(cmd, o->data);
  cmd->add_option("--eps", o->eps, "bound on ||f2||_2 and the Lipschitz defect");
  cmd->add_option("--delta", o->delta, "initial smoothing radius");
  cmd->add_option("--freqs", o->freqs, "initial frequency set S0");
  cmd->add_option("--max-stages", o->max_stages, "stage cap (0: ceil(eps^-2 delta^-2))");
  cmd->add_flag("--with-functions", o->with_functions, "include f1, f2, f3");
  registry.bind(cmd, [o](const RunConfig& config) {
    const Guard guard = config.guard();
    const FiniteGroupSpec spec = o->group.load();
    const auto f = o->data.load(spec.group, config);
    DecomposeOptions options;
    options.epsilon = o->eps;
    options.delta = parse_rational(o->delta);
    options.initial_frequencies = frequencies(o->freqs, spec.group);
    if (o->max_stages > 0) options.max_stages = o->max_stages;
    const auto d = regularity_decompose(spec.group, f, options, guard);
    Json r{{"group", io::to_json(spec.group)}, {"epsilon", o->eps}};
    r.update(io::to_json(d, o->with_functions));
    Outcome out;
    out.check(d.contracts_hold);
    r["assertions_ok"] = d.contracts_hold;
    out.add(std::move(r));
    return out;
  });
}

void add_search(CLI::App* tp, Registry& registry) {
  struct Options {
    GroupSource group;
    DataSource data;
    double eps = 0.1;
    bool with_beta = false;
    bool require = false;
  };
  auto o = std::make_shared<Options>();
  CLI::App* cmd = tp->add_subcommand("search", "exhaustive search for a popular 3-point difference");
  add_group_options(cmd, o->group);
  add_data_options(cmd, o->data);
  cmd->add_option("--eps", o->eps, "threshold alpha^3 - eps");
  cmd->add_flag("--with-beta", o->with_beta, "include beta(d) for every d");
  cmd->add_flag("--require-popular", o->require, "exit 2 unless a nonzero popular d exists");
  registry.bind(cmd, [o](const RunConfig& config) {
    const FiniteGroupSpec spec = o->group.load();
    const auto f = o->data.load(spec.group, config);
    std::vector<std::uint8_t> indicator(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f[i] != 0 && f[i] != 1) throw InvalidArgument("search needs a 0/1 set");
      indicator[i] = f[i] == 1;
    }
    const auto report = popular_3pt_search(spec, indicator, o->eps, config.guard());
    Json r = io::to_json(report, o->with_beta);
    r["group"] = group_json(spec);
    Outcome out;
    if (o->require) {
      out.check(report.threshold_hits > 0);
      r["assertions_ok"] = report.threshold_hits > 0;
    }
    out.add(std::move(r));
    return out;
  });
}

void add_lift(CLI::App* tp, Registry& registry) {
  struct Options {
    std::uint64_t n = 30;
    std::size_t k = 1;
    std::string eps = "1/5";
    std::string spec;
    std::string points;
    std::int64_t m1 = 1;
    std::int64_t m2 = 2;
    double density = 0.5;
    bool no_widen = false;
    std::size_t keep = 20;
  };
  auto o = std::make_shared<Options>();
  CLI::App* cmd = tp->add_subcommand("lift", "transfer a popular difference mod p back to [N]^k");
  cmd->add_option("--N", o->n, "box [N]^k = {0, ..., N-1}^k");
  cmd->add_option("--k", o->k, "dimension k");
  cmd->add_option("--eps", o->eps, "epsilon in (0, 1)");
  cmd->add_option("--spec", o->spec, "integer matrices JSON {\"M1\":[[..]],\"M2\":[[..]]}");
  cmd->add_option("--m1", o->m1, "scalar M1 when no --spec is given");
  cmd->add_option("--m2", o->m2, "scalar M2 when no --spec is given");
  cmd->add_option("--points", o->points, "JSON list of points of A; random when absent");
  cmd->add_option("--density", o->density, "P(x in A) for a random A")->check(CLI::Range(0.0, 1.0));
  cmd->add_flag("--no-widen", o->no_widen, "fail when the prime window is empty");
  cmd->add_option("--keep", o->keep, "number of audited triples to print");
  registry.bind(cmd, [o](const RunConfig& config) {
    const Guard guard = config.guard();
    IntMatrix m1, m2;
    std::size_t k = o->k;
    if (!o->spec.empty()) {
      const Json j = io::read_json_file(o->spec);
      m1 = j.at("M1").get<IntMatrix>();
      m2 = j.at("M2").get<IntMatrix>();
      k = m1.size();
    } else {
      m1.assign(k, std::vector<std::int64_t>(k, 0));
      m2 = m1;
      for (std::size_t i = 0; i < k; ++i) {
        m1[i][i] = o->m1;
        m2[i][i] = o->m2;
      }
    }
    std::vector<std::vector<std::int64_t>> a;
    if (!o->points.empty()) {
      a = io::read_json_file(o->points).get<std::vector<std::vector<std::int64_t>>>();
    } else {
      guard.require(power_ld(o->n, k), "random subset of [N]^k");
      std::mt19937_64 rng(config.seed);
      std::vector<std::int64_t> x(k, 0);
      for (;;) {
        if (uniform01(rng) < o->density) a.push_back(x);
        std::size_t i = 0;
        while (i < k && ++x[i] == static_cast<std::int64_t>(o->n)) x[i++] = 0;
        if (i == k) break;
      }
    }
    LiftOptions options;
    options.epsilon = parse_rational(o->eps);
    options.widen = !o->no_widen;
    options.keep_triples = o->keep;
    const auto report = lift_to_interval(o->n, a, m1, m2, options, guard);
    Json r = io::to_json(report);
    const bool ok = report.audit_failures == 0;
    Outcome out;
    out.check(ok);
    r["assertions_ok"] = ok;
    out.add(std::move(r));
    return out;
  });
}

}  // namespace

void register_threept(CLI::App& app, Registry& registry) {
  CLI::App* tp = app.add_subcommand("threept", "3-point patterns: Bohr sets, smoothing, lifting");
  tp->require_subcommand(1);
  add_bohr(tp, registry);
  add_count(tp, registry);
  add_decompose(tp, registry);
  add_search(tp, registry);
  add_lift(tp, registry);
}

}  // namespace popdiff::cli
