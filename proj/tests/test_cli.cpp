#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "chainroute/commands.hpp"

using namespace chainroute;

namespace {

const std::string kData = CHAINROUTE_DATA_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "chainroute");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string graph(const char* name) { return kData + "/graphs/" + name + ".txt"; }
std::string scn(const char* name) { return kData + "/scenarios/" + name + ".scn"; }

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("chainroute_test_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("analyze single origin and all pairs") {
  Run r = cli({"analyze", graph("nested10"), "--origin", "s"});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "  s a b c d e f g h i\ns - A 2 A 3 A 1 1 B B\n");

  r = cli({"analyze", graph("arc3"), "--all-pairs", "--format", "csv"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.rfind("origin,dest,class,height,oracle_disjoint\n", 0) == 0);
  CHECK(r.out.find("chain") == std::string::npos);

  const auto out = temp_file("analyze.csv");
  r = cli({"analyze", graph("nested10"), "--origin", "s", "--format", "csv", "--out", out.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.empty());
  CHECK(slurp(out).find("s,d,chain,3,3") != std::string::npos);
  std::filesystem::remove(out);
}

TEST_CASE("analyze input errors exit 2") {
  CHECK(cli({"analyze", graph("nested10"), "--origin", "zz"}).code == kExitInput);
  CHECK(cli({"analyze", graph("nested10")}).code == kExitInput);
  CHECK(cli({"analyze", graph("nested10"), "--origin", "s", "--all-pairs"}).code == kExitInput);
  CHECK(cli({"analyze", "/nonexistent", "--origin", "s"}).code == kExitInput);
  CHECK(cli({"analyze", scn("varadhan-chain"), "--origin", "s"}).code == kExitInput);
  CHECK(cli({"analyze", graph("nested10"), "--origin", "s", "--format", "xml"}).code == kExitInput);
}

TEST_CASE("simulate exit codes follow the outcome") {
  Run r = cli({"simulate", scn("varadhan-baseline")});
  CHECK(r.code == kExitOscillation);
  CHECK(r.out.find("# summary oscillation tick 4 period 2") != std::string::npos);
  CHECK(cli({"simulate", scn("varadhan-chain")}).code == kExitOk);
  CHECK(cli({"simulate", scn("varadhan-chain"), "--max-ticks", "0"}).code == kExitExhausted);
  CHECK(cli({"simulate", graph("nested10")}).code == kExitInput);

  const auto trace = temp_file("griffin.trace");
  r = cli({"simulate", scn("griffin-chain"), "--trace", trace.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "outcome converged tick 31\n");
  CHECK(slurp(trace) == slurp(kData + "/golden/griffin-chain.trace"));
  std::filesystem::remove(trace);
}

TEST_CASE("verify prints the law matrix") {
  Run r = cli({"verify", "--n-max", "7"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find(" 7  pass  pass  pass  pass  pass  pass  pass   11   10\n") != std::string::npos);
  CHECK(r.out.find("next size n=8 (not checked): u=13 r=15\n") != std::string::npos);
  CHECK(r.out.find("all laws hold") != std::string::npos);

  r = cli({"verify", "--n-max", "3"});
  CHECK(r.out.find(" 2  pass  pass  pass  pass  n/a ") != std::string::npos);
  CHECK(r.out.find(" 3  pass  pass  pass  pass  pass  pass  pass    3    0\n") != std::string::npos);

  r = cli({"verify", "--n-max", "2"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("    1    0\n") != std::string::npos);

  CHECK(cli({"verify", "--n-max", "11"}).code == kExitInput);
  CHECK(cli({"verify"}).code == kExitInput);
}

TEST_CASE("histogram aggregates and skips bad files") {
  Run r = cli({"histogram", graph("chain3"), graph("chain4"), graph("chain5"), graph("chain6"), graph("chain7")});
  CHECK(r.code == kExitOk);
  for (const char* row : {"2,", "3,", "4,", "5,", "6,"}) CHECK(r.out.find(std::string("\n") + row) != std::string::npos);

  r = cli({"histogram", graph("star")});
  CHECK(r.out == "height,count,arc_only\n1,3,3\n");

  r = cli({"histogram", graph("star"), "/nonexistent"});
  CHECK(r.code == kExitOk);
  CHECK(r.err.find("skipping") != std::string::npos);

  CHECK(cli({"histogram", "/nonexistent"}).code == kExitInput);
  CHECK(cli({"histogram"}).code == kExitInput);
}

TEST_CASE("usage errors exit 2 and help exits 0") {
  CHECK(cli({}).code == kExitInput);
  CHECK(cli({"frobnicate"}).code == kExitInput);
  CHECK(cli({"analyze", "--bogus"}).code == kExitInput);
  const Run help = cli({"--help"});
  CHECK(help.code == kExitOk);
  CHECK(help.out.find("simulate") != std::string::npos);
}

TEST_CASE("every command is deterministic on the fixture corpus") {
  std::vector<std::vector<std::string>> commands;
  for (const auto& entry : std::filesystem::directory_iterator(kData + "/graphs"))
    commands.push_back({"analyze", entry.path().string(), "--all-pairs", "--format", "csv"});
  for (const auto& entry : std::filesystem::directory_iterator(kData + "/scenarios"))
    commands.push_back({"simulate", entry.path().string()});
  commands.push_back({"verify", "--n-max", "7", "--random", "4", "--seed", "9"});
  std::vector<std::string> all{"histogram", "--origin-all"};
  for (const auto& entry : std::filesystem::directory_iterator(kData + "/graphs")) all.push_back(entry.path().string());
  commands.push_back(all);
  for (const auto& c : commands) {
    CAPTURE(c[1]);
    const Run a = cli(c), b = cli(c);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
    CHECK(a.err == b.err);
  }
}
