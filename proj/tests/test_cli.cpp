#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

using namespace popdiff;
using popdiff::io::Json;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;

  std::vector<Json> lines() const {
    std::vector<Json> v;
    std::istringstream in(out);
    for (std::string line; std::getline(in, line);) v.push_back(Json::parse(line));
    return v;
  }
  Json first() const { return lines().at(0); }
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::dispatch(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class Scratch {
 public:
  Scratch() {
    dir_ = std::filesystem::temp_directory_path() /
           ("popdiff_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  ~Scratch() { std::filesystem::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

 private:
  std::filesystem::path dir_;
};

}  // namespace

TEST(Cli, UnknownSubcommandIsUsageError) {
  const CliRun r = run({"frobnicate"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("Usage"), std::string::npos) << r.err;
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"cex"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, CheckRotatedSquare) {
  Scratch tmp;
  const auto spec = tmp.write("rot.json", R"({"p":5,"M1":[[1,0],[0,1]],"M2":[[0,-1],[1,0]]})");
  const CliRun r = run({"check", "--spec", spec});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = r.first();
  EXPECT_EQ(j["admissible"], true);
  EXPECT_EQ(j["spectral"], false);
  EXPECT_EQ(j["command"], "check");
  EXPECT_TRUE(j.contains("version") && j.contains("wall_ms") && j.contains("config"));

  const Json scalar = run({"check", "--m1", "1", "--m2", "2"}).first();
  EXPECT_EQ(scalar["spectral"], true);
  EXPECT_EQ(scalar["J_in_algebra_of_square"], true);
}

TEST(Cli, CexCoreExactValues) {
  const CliRun r = run({"cex", "core"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = r.first();
  EXPECT_EQ(j["sup"], "73/3125");
  EXPECT_EQ(j["mean"], "2/5");
  EXPECT_EQ(j["strict"], true);
  EXPECT_EQ(j["command"], "cex core");
}

TEST(Cli, SeedEchoedAndDeterministicAcrossThreads) {
  const std::vector<std::string> base = {"popular", "--p", "5", "--n", "2", "--density",
                                         "0.4", "--seed", "17", "--deterministic"};
  auto with = [&](std::vector<std::string> extra) {
    auto a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return run(a);
  };
  const CliRun one = with({"--threads", "1"});
  const CliRun four = with({"--threads", "4"});
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(one.out, four.out);
  EXPECT_EQ(one.first()["seed"], 17u);
  EXPECT_EQ(one.first()["wall_ms"], 0.0);
  EXPECT_EQ(one.first()["config"]["density"], "0.4");
  EXPECT_NE(with({"--seed", "18"}).out, one.out);
}

TEST(Cli, GuardSentinel) {
  const CliRun r = run({"popular", "--p", "5", "--n", "3", "--guard", "100"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("guard"), std::string::npos) << r.err;
}

TEST(Cli, FailedAssertionExitsTwo) {
  Scratch tmp;
  // {0, 1} in F_5 holds no 4-term progression with d != 0
  std::vector<Rational> v(5, 0);
  v[0] = v[1] = 1;
  const auto fn = tmp.path("pair.plgf");
  write_gridfn(fn, GridFunction(GridShape(5, 1, 1), std::move(v)));
  const CliRun r = run({"popular", "--fn", fn, "--eps", "0", "--require-popular"});
  EXPECT_EQ(r.code, 2) << r.err;
  EXPECT_EQ(r.first()["assertions_ok"], false);
  EXPECT_EQ(run({"popular", "--fn", fn, "--eps", "0"}).code, 0);
}

TEST(Cli, FunctionFiles) {
  Scratch tmp;
  const auto fn = tmp.path("f.plgf");
  ASSERT_EQ(run({"fnio", "write", "--out", fn, "--n", "2", "--seed", "3"}).code, 0);
  const CliRun read = run({"fnio", "read", "--fn", fn, "--values"});
  ASSERT_EQ(read.code, 0) << read.err;
  EXPECT_EQ(read.first()["values"].size(), 25u);
  EXPECT_EQ(read.first()["kind"], "exact-rational");

  const CliRun rt = run({"fnio", "roundtrip", "--kind", "complex", "--out", tmp.path("c.plgf")});
  ASSERT_EQ(rt.code, 0) << rt.err;
  EXPECT_EQ(rt.first()["identical"], true);

  std::string bytes;
  {
    std::ifstream in(fn, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  std::ofstream(tmp.path("cut.plgf"), std::ios::binary) << bytes.substr(0, bytes.size() - 3);
  const CliRun cut = run({"fnio", "read", "--fn", tmp.path("cut.plgf")});
  EXPECT_EQ(cut.code, 1);
  EXPECT_FALSE(cut.err.empty());
  EXPECT_EQ(run({"fnio", "read", "--fn", tmp.path("missing.plgf")}).code, 1);
}

TEST(Cli, JsonOutputFile) {
  Scratch tmp;
  const auto out = tmp.path("out.jsonl");
  const CliRun r = run({"cex", "core", "--json", out, "--deterministic"});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(out);
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  EXPECT_EQ(Json::parse(line)["sup"], "73/3125");
}

TEST(Cli, SubspacesAgainstBruteForce) {
  const CliRun r = run({"subspaces", "--p", "3", "--k", "1", "--m1", "1", "--m2", "2", "--bruteforce"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.first()["lambda_matches"], true);
}

TEST(Cli, ThreePointCommands) {
  const CliRun bohr = run({"threept", "bohr", "--N", "5", "--freqs", "1", "--radius", "1/4"});
  ASSERT_EQ(bohr.code, 0) << bohr.err;
  EXPECT_EQ(bohr.first()["elements"], Json::array({0, 1, 4}));

  const CliRun count = run({"threept", "count", "--N", "31", "--freqs", "1,3"});
  ASSERT_EQ(count.code, 0) << count.err;
  EXPECT_TRUE(count.first()["exact"].is_string());

  Scratch tmp;
  const auto group = tmp.write(
      "g.json", R"({"kind":"vector","p":5,"k":1,"n":3,"M1":1,"M2":2})");
  const CliRun search = run({"threept", "search", "--spec", group, "--require-popular", "--seed", "4"});
  EXPECT_EQ(search.code, 0) << search.err;

  const CliRun decompose = run({"threept", "decompose", "--N", "101", "--seed", "2"});
  ASSERT_EQ(decompose.code, 0) << decompose.err;
  EXPECT_EQ(decompose.first()["mean_preserved"], true);

  const CliRun lift = run({"threept", "lift", "--N", "30", "--keep", "3"});
  ASSERT_EQ(lift.code, 0) << lift.err;
  EXPECT_EQ(lift.first()["audit_failures"], 0u);
  EXPECT_LE(lift.first()["triples"].size(), 3u);
}

TEST(Cli, CexSubcommands) {
  EXPECT_EQ(run({"cex", "hypergraph", "--L", "7"}).code, 0);
  const CliRun eight = run({"cex", "eight-tuple", "--n", "3"});
  ASSERT_EQ(eight.code, 0) << eight.err;
  EXPECT_EQ(eight.first()["class"], "generic");
  const CliRun assemble = run({"cex", "assemble", "--n", "2", "--seeds", "3"});
  ASSERT_EQ(assemble.code, 0) << assemble.err;
  EXPECT_EQ(assemble.lines().size(), 4u);
  EXPECT_EQ(run({"cex", "eight-tuple", "--a", "1,2"}).code, 1);
}
