#include "cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "popdiff/parallel.hpp"

namespace popdiff::cli {

const Runner* Registry::find(CLI::App* command) const {
  const auto it = runners_.find(command);
  return it == runners_.end() ? nullptr : &it->second;
}

namespace {

// Options that change neither the mathematics nor the output bytes.
bool echoed(const std::string& name) {
  return name != "help" && name != "threads" && name != "json" && name != "deterministic";
}

void echo_options(const CLI::App* app, Json& config) {
  for (const CLI::Option* opt : app->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || !echoed(name)) continue;
    if (opt->get_type_size() == 0) {
      config[name] = opt->count() > 0;
      continue;
    }
    if (opt->count() > 0) {
      const auto& results = opt->results();
      std::string joined;
      for (std::size_t i = 0; i < results.size(); ++i) {
        joined += (i ? "," : "") + results[i];
      }
      config[name] = joined;
    } else if (!opt->get_default_str().empty()) {
      config[name] = opt->get_default_str();
    }
  }
}

/// Root to leaf chain of selected subcommands.
std::vector<CLI::App*> selected_chain(CLI::App& app) {
  std::vector<CLI::App*> chain{&app};
  for (;;) {
    const auto subs = chain.back()->get_subcommands();
    if (subs.empty()) break;
    chain.push_back(subs.front());
  }
  return chain;
}

Json envelope(const std::string& command, const Json& config, const RunConfig& run,
              const Json& result, double wall_ms) {
  Json line;
  line["version"] = POPDIFF_VERSION;
  line["command"] = command;
  line["seed"] = run.seed;
  if (result.contains("backend")) {
    line["backend"] = result["backend"];
  } else {
    line["backend"] = to_string(run.backend_or(Backend::Exact));
  }
  line["config"] = config;
  for (const auto& [key, value] : result.items()) {
    if (key != "backend") line[key] = value;
  }
  line["wall_ms"] = run.deterministic ? 0.0 : wall_ms;
  return line;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  CLI::App app("Popular differences for matrix patterns: exact desk-scale computations.",
               "popdiff");
  app.option_defaults()->always_capture_default();
  app.fallthrough();
  app.require_subcommand(1);

  std::string backend;
  app.add_option("--seed", config.seed, "64-bit seed; echoed in every report");
  app.add_option("--guard", config.guard_limit, "maximum enumeration size");
  app.add_option("--backend", backend, "exact | float")
      ->check(CLI::IsMember({"exact", "float"}));
  app.add_option("--json", config.output, "write JSON lines to this file instead of stdout");
  app.add_option("--threads", config.threads, "worker threads (0: hardware concurrency)");
  app.add_flag("--deterministic", config.deterministic,
               "report wall_ms as 0 so identical runs give identical bytes");

  Registry registry(config);
  register_core(app, registry);
  register_cex(app, registry);
  register_threept(app, registry);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  const auto chain = selected_chain(app);
  const Runner* run = registry.find(chain.back());
  if (run == nullptr) {
    err << "error: '" << chain.back()->get_name() << "' needs a subcommand\n\n"
        << chain.back()->help();
    return 1;
  }
  if (!backend.empty()) config.backend = backend == "exact" ? Backend::Exact : Backend::Float;
  if (config.threads > 0) set_worker_count(config.threads);

  std::string command;
  Json echo = Json::object();
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (i > 0) command += (i > 1 ? " " : "") + chain[i]->get_name();
    echo_options(chain[i], echo);
  }

  Outcome outcome;
  const auto start = std::chrono::steady_clock::now();
  try {
    outcome = (*run)(config);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();

  std::ostringstream lines;
  for (const Json& report : outcome.reports) {
    lines << envelope(command, echo, config, report, wall_ms).dump() << '\n';
  }
  if (config.output.empty()) {
    out << lines.str();
  } else {
    std::ofstream file(config.output, std::ios::binary | std::ios::trunc);
    if (!file || !(file << lines.str())) {
      err << "error: cannot write " << config.output << '\n';
      return 1;
    }
  }
  return outcome.assertions_ok.value_or(true) ? 0 : 2;
}

// ------------------------------------------------------------ input helpers

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<std::int64_t> parse_ints(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw InvalidArgument("expected comma separated integers, got '" + text + "'");
    }
  }
  return out;
}

Vec parse_vec(const std::string& text, std::uint32_t p) {
  Vec v;
  for (std::int64_t x : parse_ints(text)) v.push_back(fp::reduce(x, p));
  return v;
}

PatternSpec load_pattern_spec(const std::string& path, std::uint32_t p, std::size_t k,
                              std::int64_t m1, std::int64_t m2) {
  if (!path.empty()) return io::pattern_spec_from_json(io::read_json_file(path));
  return PatternSpec(FpMatrix::scalar(k, m1, p), FpMatrix::scalar(k, m2, p));
}

void add_function_options(CLI::App* command, FunctionSource& source) {
  command->add_option("--fn", source.path, "grid function file (PLGF); random when absent");
  command->add_option("--p", source.p, "field size for a random function");
  command->add_option("--k", source.k, "rows k of a random function on (F_p^n)^k");
  command->add_option("--n", source.n, "columns n of a random function");
  command->add_option("--density", source.density, "P(1) for a random set")
      ->check(CLI::Range(0.0, 1.0));
  command->add_option("--kind", source.kind, "random function: set | values | complex")
      ->check(CLI::IsMember({"set", "values", "complex"}));
}

GridFunction random_set(const GridShape& shape, double density, Backend backend,
                        std::mt19937_64& rng, const Guard& guard) {
  shape.require_within(guard, "random set");
  if (backend == Backend::Exact) {
    std::vector<Rational> v(shape.size());
    for (auto& x : v) x = uniform01(rng) < density ? 1 : 0;
    return GridFunction(shape, std::move(v));
  }
  std::vector<double> v(shape.size());
  for (auto& x : v) x = uniform01(rng) < density ? 1.0 : 0.0;
  return GridFunction(shape, std::move(v));
}

GridFunction load_function(const FunctionSource& source, const RunConfig& config,
                           std::uint64_t seed) {
  const Guard guard = config.guard();
  if (!source.path.empty()) {
    GridFunction f = read_gridfn(source.path);
    f.shape().require_within(guard, "grid function");
    if (config.backend == Backend::Float && f.kind() == ValueKind::ExactRational) {
      return f.to_float();
    }
    return f;
  }
  const GridShape shape(source.p, source.k, source.n);
  std::mt19937_64 rng(seed);
  const Backend backend = config.backend_or(Backend::Exact);
  if (source.kind == "set") return random_set(shape, source.density, backend, rng, guard);
  shape.require_within(guard, "random function");
  if (source.kind == "complex") {
    std::vector<Complex> v(shape.size());
    for (auto& x : v) x = std::polar(uniform01(rng), 2 * std::numbers::pi * uniform01(rng));
    return GridFunction(shape, std::move(v));
  }
  if (backend == Backend::Exact) {
    std::vector<Rational> v(shape.size());
    for (auto& x : v) x = make_rational(static_cast<std::int64_t>(rng() % 1001), 1000);
    return GridFunction(shape, std::move(v));
  }
  std::vector<double> v(shape.size());
  for (auto& x : v) x = uniform01(rng);
  return GridFunction(shape, std::move(v));
}

}  // namespace popdiff::cli
