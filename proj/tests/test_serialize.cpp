#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "pqec/randgen.hpp"
#include "pqec/serialize.hpp"

using namespace pqec;

TEST_CASE("matrix JSON round trip keeps full double fidelity") {
  Rng rng(91);
  ComplexMatrix m = ginibre(3, 5, rng);
  ComplexMatrix back = matrix_from_json(Json::parse(to_json(m).dump()));
  REQUIRE(back.rows() == 3);
  REQUIRE(back.cols() == 5);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 5; ++j) {
      CHECK(std::abs(back(i, j) - m(i, j)) <=
            1e-15 * std::max(1.0, std::abs(m(i, j))));
    }
}

TEST_CASE("matrix JSON rejects malformed inputs") {
  CHECK_THROWS_AS(matrix_from_json(Json{{"rows", 2}, {"cols", 2}}), std::runtime_error);
  CHECK_THROWS_AS(matrix_from_json(Json{{"rows", 2}, {"cols", 2}, {"data", Json::array({1.0})}}),
                  std::runtime_error);
  Json nan_entry{{"rows", 1}, {"cols", 1}, {"data", {{std::nan(""), 0.0}}}};
  CHECK_THROWS_AS(matrix_from_json(nan_entry), std::runtime_error);
}

TEST_CASE("channel and scheme round trips preserve semantics") {
  Rng rng(92);
  Subchannel ch = random_channel(4, 2, rng);
  Subchannel back = subchannel_from_json(Json::parse(to_json(ch).dump()));
  CHECK((choi(ch).matrix - choi(back).matrix).frobenius_norm() < 1e-12);

  Scheme scheme = qubit_code_circuit(ch).second;
  Scheme s_back = scheme_from_json(Json::parse(to_json(scheme).dump()));
  VerifyResult v = verify_scheme(ch, s_back, 1e-8);
  CHECK(v.ok);
  CHECK(std::abs(v.p - scheme.success_prob) < 1e-10);
}

TEST_CASE("witness and circuit round trips") {
  Rng rng(93);
  Subchannel ch = random_channel(4, 2, rng);
  ConditionDWitness w = qubit_rank2_witness(ch);
  ConditionDWitness w_back = witness_from_json(Json::parse(to_json(w).dump()));
  CHECK(check_condition_D(ch, w_back).ok);
  CHECK(w_back.coeffs.size() == w.coeffs.size());

  QubitCodeCircuit circ = qubit_code_circuit(ch).first;
  QubitCodeCircuit c_back = circuit_from_json(Json::parse(to_json(circ).dump()));
  CHECK((c_back.u_s - circ.u_s).frobenius_norm() < 1e-14);
  CHECK(c_back.p == circ.p);
}

TEST_CASE("report serialization carries branch counts") {
  SimReport rep;
  rep.p_exact = 0.25;
  rep.accept_freq = 0.26;
  rep.shots = 100;
  rep.seed = RngSeed{5, 6};
  rep.branch_counts["(0,0)"] = 26;
  rep.branch_counts["(1,1)"] = 74;
  Json j = to_json(rep);
  CHECK(j["branch_counts"]["(0,0)"] == 26);
  CHECK(j["seed"]["stream"] == 6);
}

TEST_CASE("file IO and malformed files") {
  auto dir = std::filesystem::temp_directory_path() / "pqec_serialize_test";
  std::filesystem::create_directories(dir);
  auto path = (dir / "m.json").string();
  Rng rng(94);
  ComplexMatrix m = ginibre(2, 2, rng);
  save_json(path, to_json(m));
  ComplexMatrix back = matrix_from_json(load_json(path));
  CHECK((m - back).frobenius_norm() < 1e-14);

  auto bad = (dir / "bad.json").string();
  std::ofstream(bad) << "{ not json";
  CHECK_THROWS_WITH_AS(load_json(bad), doctest::Contains("malformed JSON"), std::runtime_error);
  CHECK_THROWS_AS(load_json((dir / "missing.json").string()), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("format_double round trips through 17 significant digits") {
  double x = 1.0 / 3.0;
  CHECK(std::stod(format_double(x)) == x);
  CHECK(std::stod(format_double(1e-300)) == 1e-300);
}
