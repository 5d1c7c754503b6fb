#include <memory>

#include "cli.hpp"

namespace popdiff::cli {

namespace {

using namespace popdiff::cex;

constexpr const char* kScope =
    "desk-scale check of the finite identities and product formulas; the asymptotic "
    "constant c is not reproduced at this size";

// a = e1 + 2 e3, b = e2 + e3 (or e1, e2 when n = 2): independent, generic.
std::pair<Vec, Vec> default_pair(std::size_t n) {
  if (n < 2) throw InvalidArgument("directions need n >= 2");
  Vec a(n, 0), b(n, 0);
  a[0] = 1;
  b[1] = 1;
  if (n >= 3) {
    a[2] = 2;
    b[2] = 1;
  }
  return {a, b};
}

struct Directions {
  std::string a;
  std::string b;

  std::pair<Vec, Vec> pair(std::size_t n) const {
    if (a.empty() && b.empty()) return default_pair(n);
    if (a.empty() || b.empty()) throw InvalidArgument("--a and --b go together");
    Vec va = parse_vec(a, kP), vb = parse_vec(b, kP);
    if (va.size() != n || vb.size() != n) throw DimensionMismatch("--a and --b need n entries");
    return {va, vb};
  }
  /// The chosen pair and the dependent pair (a, a).
  std::vector<std::pair<Vec, Vec>> measured(std::size_t n) const {
    const auto [va, vb] = pair(n);
    return {{va, vb}, {va, va}};
  }
};

void add_direction_options(CLI::App* command, Directions& d) {
  command->add_option("--a", d.a, "first direction in F_5^n, comma separated");
  command->add_option("--b", d.b, "second direction in F_5^n, comma separated");
}

Ap3Method method_from(const std::string& name) {
  if (name == "greedy") return Ap3Method::Greedy;
  if (name == "behrend") return Ap3Method::Behrend;
  return Ap3Method::ExhaustiveMax;
}

void add_core(CLI::App* cex, Registry& registry) {
  CLI::App* cmd = cex->add_subcommand("core", "exact expectation table of the F_5 core");
  registry.bind(cmd, [](const RunConfig& config) {
    const CoreTable t = core_expectation_table(make_core(), config.guard());
    Json r = io::to_json(t);
    Outcome out;
    out.check(t.strict);
    r["assertions_ok"] = t.strict;
    out.add(std::move(r));
    return out;
  });
}

void add_eight_tuple(CLI::App* cex, Registry& registry) {
  struct Options {
    Directions d;
    std::size_t n = 3;
  };
  auto o = std::make_shared<Options>();
  CLI::App* cmd = cex->add_subcommand("eight-tuple", "exhaustive 8-tuple distribution for a, b");
  add_direction_options(cmd, o->d);
  cmd->add_option("--n", o->n, "dimension n of F_5^n");
  registry.bind(cmd, [o](const RunConfig& config) {
    const auto [a, b] = o->d.pair(o->n);
    const CexCore core = make_core();
    const Guard guard = config.guard();
    Json r{{"n", o->n},
           {"a", io::to_json(a)},
           {"b", io::to_json(b)},
           {"class", to_string(classify(a, b))},
           {"beta1", io::to_json(beta1(core, a, b, o->n, guard))}};
    const auto report = eight_tuple_distribution(core, a, b, o->n, guard);
    r.update(io::to_json(report));
    Outcome out;
    out.check(report.support_ok);
    r["assertions_ok"] = report.support_ok;
    out.add(std::move(r));
    return out;
  });
}

void add_hypergraph(CLI::App* cex, Registry& registry) {
  struct Options {
    std::uint32_t modulus = 5;
    std::string method = "exhaustive";
  };
  auto o = std::make_shared<Options>();
  CLI::App* cmd = cex->add_subcommand("hypergraph", "3-AP-free set and hypergraphon identities");
  cmd->add_option("--L", o->modulus, "cyclic modulus L");
  cmd->add_option("--method", o->method, "exhaustive | greedy | behrend")
      ->check(CLI::IsMember({"exhaustive", "greedy", "behrend"}));
  registry.bind(cmd, [o](const RunConfig& config) {
    const auto set = ap3_free_set(o->modulus, method_from(o->method));
    const Hypergraphon h(o->modulus, set);
    const auto e = hypergraph_expectations(h, config.guard());
    Json r{{"L", o->modulus}, {"method", o->method}, {"set", set},
           {"ap3_free", is_ap3_free(set, o->modulus)}};
    r.update(io::to_json(e));
    const bool ok = r["ap3_free"].get<bool>() && e.mean_identity && e.pattern_a_identity &&
                    e.pattern_b_bound && e.unique_triangles;
    Outcome out;
    out.check(ok);
    r["assertions_ok"] = ok;
    out.add(std::move(r));
    return out;
  });
}

void add_dress(CLI::App* cex, Registry& registry) {
  struct Options {
    Directions d;
    std::size_t n = 3;
    std::uint32_t modulus = 5;
    std::size_t seeds = 50;
  };
  auto o = std::make_shared<Options>();
  CLI::App* cmd = cex->add_subcommand(
      "dress", "Monte Carlo over dressing seeds against the product formulas");
  add_direction_options(cmd, o->d);
  cmd->add_option("--n", o->n, "dimension n of F_5^n");
  cmd->add_option("--L", o->modulus, "cyclic modulus L of the hypergraphon");
  cmd->add_option("--seeds", o->seeds, "number of seeds, starting at --seed");
  registry.bind(cmd, [o](const RunConfig& config) {
    const Hypergraphon h(o->modulus, ap3_free_set(o->modulus, Ap3Method::ExhaustiveMax));
    const auto report = dress_and_measure(make_core(), h, o->n, config.seed, o->seeds,
                                          o->d.measured(o->n), config.guard());
    Json r = io::to_json(report);
    r["scope"] = kScope;
    bool ok = report.alpha.within;
    for (const auto& dm : report.directions) ok = ok && dm.measured.within;
    Outcome out;
    out.check(ok);
    r["assertions_ok"] = ok;
    out.add(std::move(r));
    return out;
  });
}

void add_assemble(CLI::App* cex, Registry& registry) {
  struct Options {
    Directions d;
    std::size_t n = 3;
    std::size_t gamma = 1;
    std::size_t seeds = 1;
  };
  auto o = std::make_shared<Options>();
  CLI::App* cmd = cex->add_subcommand("assemble", "random affine placement into the cube {0,1,2}^gamma");
  add_direction_options(cmd, o->d);
  cmd->add_option("--n", o->n, "dimension n of the dressed function");
  cmd->add_option("--gamma", o->gamma, "cube dimension gamma");
  cmd->add_option("--seeds", o->seeds, "number of seeds, starting at --seed; one line each");
  registry.bind(cmd, [o](const RunConfig& config) {
    const Guard guard = config.guard();
    const GridFunction h = build_f1(make_core(), o->n, guard);
    const auto dirs = std::vector<std::pair<Vec, Vec>>{o->d.pair(o->n)};
    Outcome out;
    std::vector<double> means;
    Rational predicted;
    for (std::uint64_t seed = config.seed; seed < config.seed + o->seeds; ++seed) {
      const auto report = final_assembly(h, o->gamma, seed, dirs, guard);
      const bool ok = report.four_ap_free && report.log_ratio_ok && report.cube_bound_ok;
      out.check(ok);
      Json r = io::to_json(report);
      r["assertions_ok"] = ok;
      out.add(std::move(r));
      means.push_back(to_double(report.mean_f));
      predicted = report.predicted_mean;
    }
    if (o->seeds > 1) {
      const double quantum = 1.0 / static_cast<double>(h.size());
      const auto mc = monte_carlo(means, to_double(predicted), quantum);
      Json summary{{"summary", true}, {"predicted_mean", io::to_json(predicted)}};
      summary["mean_f"] = io::to_json(mc);
      out.check(mc.within);
      summary["assertions_ok"] = mc.within;
      out.add(std::move(summary));
    }
    return out;
  });
}

void add_report(CLI::App* cex, Registry& registry) {
  auto params = std::make_shared<DressingParams>();
  CLI::App* cmd = cex->add_subcommand("report", "full counterexample pipeline for one seed");
  cmd->add_option("--n", params->n, "dimension n");
  cmd->add_option("--L", params->modulus, "cyclic modulus L");
  cmd->add_option("--gamma", params->gamma, "cube dimension gamma");
  registry.bind(cmd, [params](const RunConfig& config) {
    DressingParams p = *params;
    p.seed = config.seed;
    const auto report = cex_report(make_core(), p, config.guard());
    Json r = io::to_json(report);
    const bool ok = report.core.strict && report.four_ap_free &&
                    report.hypergraph.mean_identity && report.hypergraph.pattern_a_identity &&
                    report.hypergraph.pattern_b_bound && report.hypergraph.unique_triangles;
    Outcome out;
    out.check(ok);
    r["assertions_ok"] = ok;
    out.add(std::move(r));
    return out;
  });
}

}  // namespace

void register_cex(CLI::App& app, Registry& registry) {
  CLI::App* cex = app.add_subcommand("cex", "the F_5 counterexample pipeline");
  cex->require_subcommand(1);
  add_core(cex, registry);
  add_eight_tuple(cex, registry);
  add_hypergraph(cex, registry);
  add_dress(cex, registry);
  add_assemble(cex, registry);
  add_report(cex, registry);
}

}  // namespace popdiff::cli
