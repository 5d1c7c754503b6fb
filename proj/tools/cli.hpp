#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "popdiff/json_io.hpp"

namespace popdiff::cli {

using io::Json;

struct RunConfig {
  std::uint64_t seed = 0;
  std::uint64_t guard_limit = Guard::kDefaultLimit;
  std::optional<Backend> backend;
  std::string output;  // empty: stdout
  std::size_t threads = 0;
  bool deterministic = false;

  Guard guard() const { return Guard{guard_limit}; }
  Backend backend_or(Backend fallback) const { return backend.value_or(fallback); }
};

/// What a subcommand produced. Commands that check a mathematical statement
/// set assertions_ok; false maps to exit code 2.
struct Outcome {
  std::vector<Json> reports;
  std::optional<bool> assertions_ok;

  void add(Json report) { reports.push_back(std::move(report)); }
  void check(bool ok) { assertions_ok = assertions_ok.value_or(true) && ok; }
};

using Runner = std::function<Outcome(const RunConfig&)>;

class Registry {
 public:
  explicit Registry(RunConfig& config) : config_(config) {}
  RunConfig& config() { return config_; }
  void bind(CLI::App* command, Runner run) { runners_[command] = std::move(run); }
  const Runner* find(CLI::App* command) const;

 private:
  RunConfig& config_;
  std::map<CLI::App*, Runner> runners_;
};

void register_core(CLI::App& app, Registry& registry);
void register_cex(CLI::App& app, Registry& registry);
void register_threept(CLI::App& app, Registry& registry);

/// Parses argv (without the program name), runs the selected command and
/// writes one JSON line per report. Returns 0, 1 (usage, IO, guard) or 2
/// (a checked statement failed).
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// ------------------------------------------------------------ input helpers

/// Uniform in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& rng);

/// Comma separated integers, e.g. "1,0,-2".
std::vector<std::int64_t> parse_ints(const std::string& text);
Vec parse_vec(const std::string& text, std::uint32_t p);

PatternSpec load_pattern_spec(const std::string& path, std::uint32_t p, std::size_t k,
                              std::int64_t m1, std::int64_t m2);

struct FunctionSource {
  std::string path;  // PLGF file; random when empty
  std::uint32_t p = 5;
  std::size_t k = 1;
  std::size_t n = 2;
  double density = 0.5;
  std::string kind = "set";  // set | values | complex
};

void add_function_options(CLI::App* command, FunctionSource& source);
GridFunction load_function(const FunctionSource& source, const RunConfig& config,
                           std::uint64_t seed);

/// 0/1 values with P(1) = density, exact or float per the backend.
GridFunction random_set(const GridShape& shape, double density, Backend backend,
                        std::mt19937_64& rng, const Guard& guard);

}  // namespace popdiff::cli
