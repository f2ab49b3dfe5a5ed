#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pqec/cli.hpp"
#include "pqec/randgen.hpp"
#include "pqec/serialize.hpp"

using namespace pqec;
namespace fs = std::filesystem;

namespace {

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"pqec"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("pqec_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("demo + check round trip passes at p = 1/3") {
  TempDir tmp;
  CHECK(run({"demo", "--out", tmp.file("demo")}) == 0);
  CHECK(fs::exists(tmp.file("demo.channel.json")));
  CHECK(fs::exists(tmp.file("demo.scheme.json")));
  CHECK(run({"check", "--channel", tmp.file("demo.channel.json"), "--scheme",
             tmp.file("demo.scheme.json")}) == 0);
  Scheme s = scheme_from_json(load_json(tmp.file("demo.scheme.json")));
  CHECK(s.success_prob == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("check with the identity pair and with a mismatched scheme") {
  TempDir tmp;
  Subchannel ident = Subchannel::identity(2);
  save_json(tmp.file("id.channel.json"), to_json(ident));
  save_json(tmp.file("id.scheme.json"),
            to_json(Scheme{ident, ident, 1.0, 0.0}));
  CHECK(run({"check", "--channel", tmp.file("id.channel.json"), "--scheme",
             tmp.file("id.scheme.json")}) == 0);

  save_json(tmp.file("dep.channel.json"), to_json(Subchannel::depolarizing(2)));
  CHECK(run({"check", "--channel", tmp.file("dep.channel.json"), "--scheme",
             tmp.file("id.scheme.json")}) == 2);
}

TEST_CASE("malformed JSON and missing files exit with code 1") {
  TempDir tmp;
  std::ofstream(tmp.file("broken.json")) << "{ nope";
  CHECK(run({"check", "--channel", tmp.file("broken.json"), "--scheme",
             tmp.file("broken.json")}) == 1);
  CHECK(run({"check", "--channel", tmp.file("absent.json"), "--scheme",
             tmp.file("absent.json")}) == 1);
  CHECK(run({"check", "--channel", tmp.file("absent.json")}) == 1);  // no scheme/witness
  CHECK(run({"bogus-command"}) == 1);
}

TEST_CASE("construct qubit-rank2 samples, writes, and reverifies") {
  TempDir tmp;
  CHECK(run({"construct", "qubit-rank2", "--seed", "5", "--out", tmp.file("q")}) == 0);
  CHECK(fs::exists(tmp.file("q.channel.json")));
  CHECK(fs::exists(tmp.file("q.witness.json")));
  CHECK(fs::exists(tmp.file("q.scheme.json")));
  CHECK(fs::exists(tmp.file("q.circuit.json")));
  CHECK(run({"check", "--channel", tmp.file("q.channel.json"), "--scheme",
             tmp.file("q.scheme.json")}) == 0);
  CHECK(run({"check", "--channel", tmp.file("q.channel.json"), "--witness",
             tmp.file("q.witness.json")}) == 0);
}

TEST_CASE("construct er-family writes the closed-form metadata") {
  TempDir tmp;
  CHECK(run({"construct", "er-family", "--lambda", "0.25", "0.5", "0.5", "0.5", "--out",
             tmp.file("er")}) == 0);
  Json meta = load_json(tmp.file("er.meta.json"));
  CHECK(meta["p0"].get<double>() == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(meta["p1"].get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(run({"check", "--channel", tmp.file("er.channel.json"), "--scheme",
             tmp.file("er.scheme.json")}) == 0);
}

TEST_CASE("construct schur respects the rank-bound precondition") {
  TempDir tmp;
  // ceil(4/1) = 4 diagonal projectors: precondition unmet.
  CHECK(run({"construct", "rank-bound-xi", "--dim", "4", "--logical-dim", "2", "--out",
             tmp.file("bound")}) == 0);
  CHECK(run({"construct", "schur", "--channel", tmp.file("bound.channel.json"),
             "--logical-dim", "2", "--out", tmp.file("code")}) == 2);

  CHECK(run({"construct", "schur", "--dim", "6", "--rank", "3", "--logical-dim", "2", "--seed",
             "9", "--out", tmp.file("ok")}) == 0);
  CHECK(run({"check", "--channel", tmp.file("ok.channel.json"), "--witness",
             tmp.file("ok.witness.json")}) == 0);
}

TEST_CASE("simulate produces a report consistent with the scheme") {
  TempDir tmp;
  REQUIRE(run({"construct", "qubit-rank2", "--seed", "11", "--out", tmp.file("q")}) == 0);
  CHECK(run({"simulate", "--channel", tmp.file("q.channel.json"), "--circuit",
             tmp.file("q.circuit.json"), "--shots", "20000", "--seed", "3", "--out",
             tmp.file("report.json")}) == 0);
  Json rep = load_json(tmp.file("report.json"));
  double p = rep["p_exact"].get<double>();
  double freq = rep["accept_freq"].get<double>();
  CHECK(std::abs(freq - p) < 5 * std::sqrt(p * (1 - p) / 20000.0) + 1e-12);
  CHECK(rep["shots"].get<uint64_t>() == 20000);

  CHECK(run({"simulate", "--channel", tmp.file("q.channel.json"), "--scheme",
             tmp.file("q.scheme.json"), "--shots", "5000", "--seed", "4", "--out",
             tmp.file("report2.json")}) == 0);
}

TEST_CASE("bench is deterministic under a fixed seed") {
  TempDir tmp;
  CHECK(run({"bench", "--dim", "4", "--rank", "2", "--samples", "8", "--seed", "21", "--out",
             tmp.file("a.csv")}) == 0);
  CHECK(run({"bench", "--dim", "4", "--rank", "2", "--samples", "8", "--seed", "21", "--out",
             tmp.file("b.csv")}) == 0);
  std::ifstream fa(tmp.file("a.csv")), fb(tmp.file("b.csv"));
  std::string a((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
  std::string b((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
  CHECK(a == b);
  CHECK(a.rfind("sample,constructor,success,p\n", 0) == 0);
  // Rank-2 noise on two qubits is always correctable.
  CHECK(a.find(",0,") == std::string::npos);
}

TEST_CASE("bench over Schur samples respects the correctability bound") {
  TempDir tmp;
  // Rank 4 on C^4 violates r < s/(d-1) = 4: every sample must fail.
  CHECK(run({"bench", "--constructor", "schur", "--dim", "4", "--rank", "4", "--logical-dim",
             "2", "--samples", "6", "--seed", "31", "--out", tmp.file("hi.csv")}) == 0);
  std::ifstream fh(tmp.file("hi.csv"));
  std::string hi((std::istreambuf_iterator<char>(fh)), std::istreambuf_iterator<char>());
  CHECK(hi.find(",1,") == std::string::npos);

  // Rank 2 sits inside the bound: every sample must succeed.
  CHECK(run({"bench", "--constructor", "schur", "--dim", "4", "--rank", "2", "--logical-dim",
             "2", "--samples", "6", "--seed", "31", "--out", tmp.file("lo.csv")}) == 0);
  std::ifstream fl(tmp.file("lo.csv"));
  std::string lo((std::istreambuf_iterator<char>(fl)), std::istreambuf_iterator<char>());
  CHECK(lo.find(",0,") == std::string::npos);
}

TEST_CASE("PQEC_TOL environment override is honored") {
  TempDir tmp;
  Subchannel ident = Subchannel::identity(2);
  // Slightly perturbed recovery: passes only at a loose tolerance.
  ComplexMatrix k = ComplexMatrix::identity(2);
  k(0, 0) = 1.0 - 1e-6;
  save_json(tmp.file("ch.json"), to_json(ident));
  save_json(tmp.file("s.json"), to_json(Scheme{ident, Subchannel::make({k}), 0.0, 0.0}));
  setenv("PQEC_TOL", "1e-12", 1);
  CHECK(run({"check", "--channel", tmp.file("ch.json"), "--scheme", tmp.file("s.json")}) == 2);
  setenv("PQEC_TOL", "1e-3", 1);
  CHECK(run({"check", "--channel", tmp.file("ch.json"), "--scheme", tmp.file("s.json")}) == 0);
  unsetenv("PQEC_TOL");
}
