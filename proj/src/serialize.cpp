#include "pqec/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace pqec {

namespace {

void check(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error("json decode: " + msg);
}

}  // namespace

Json to_json(const ComplexMatrix& m) {
  Json data = Json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      data.push_back({m(i, j).real(), m(i, j).imag()});
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

ComplexMatrix matrix_from_json(const Json& j) {
  check(j.contains("rows") && j.contains("cols") && j.contains("data"),
        "matrix requires rows/cols/data");
  int rows = j.at("rows").get<int>();
  int cols = j.at("cols").get<int>();
  check(rows > 0 && cols > 0, "matrix dimensions must be positive");
  const Json& data = j.at("data");
  check(data.is_array() && static_cast<int>(data.size()) == rows * cols,
        "matrix data length must equal rows*cols");
  std::vector<Complex> entries;
  entries.reserve(data.size());
  for (const auto& pair : data) {
    check(pair.is_array() && pair.size() == 2, "matrix entries must be [re, im] pairs");
    entries.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  }
  ComplexMatrix m(rows, cols, std::move(entries));
  check(m.is_finite(), "matrix entries must be finite");
  return m;
}

Json to_json(const Subchannel& c) {
  Json kraus = Json::array();
  for (const auto& k : c.kraus()) kraus.push_back(to_json(k));
  return Json{{"in_dim", c.in_dim()}, {"out_dim", c.out_dim()}, {"kraus", std::move(kraus)}};
}

Subchannel subchannel_from_json(const Json& j) {
  check(j.contains("kraus") && j.at("kraus").is_array() && !j.at("kraus").empty(),
        "channel requires a nonempty kraus list");
  std::vector<ComplexMatrix> kraus;
  for (const auto& k : j.at("kraus")) kraus.push_back(matrix_from_json(k));
  if (j.contains("in_dim"))
    check(j.at("in_dim").get<int>() == kraus.front().cols(), "in_dim disagrees with kraus shape");
  if (j.contains("out_dim"))
    check(j.at("out_dim").get<int>() == kraus.front().rows(), "out_dim disagrees with kraus shape");
  return Subchannel::make(std::move(kraus), 1e-6);
}

Json to_json(const Scheme& s) {
  return Json{{"encoder", to_json(s.encoder)},
              {"recovery", to_json(s.recovery)},
              {"p", s.success_prob},
              {"residual", s.residual}};
}

Scheme scheme_from_json(const Json& j) {
  check(j.contains("encoder") && j.contains("recovery"), "scheme requires encoder and recovery");
  Scheme s{subchannel_from_json(j.at("encoder")), subchannel_from_json(j.at("recovery")),
           j.value("p", 0.0), j.value("residual", 0.0)};
  return s;
}

Json to_json(const ConditionDWitness& w) {
  Json coeffs = Json::array();
  for (const auto& c : w.coeffs) coeffs.push_back({c.real(), c.imag()});
  return Json{{"s_star", to_json(w.s_star)},
              {"r_star", to_json(w.r_star)},
              {"coeffs", std::move(coeffs)}};
}

ConditionDWitness witness_from_json(const Json& j) {
  check(j.contains("s_star"), "witness requires s_star");
  ConditionDWitness w;
  w.s_star = matrix_from_json(j.at("s_star"));
  if (j.contains("r_star")) w.r_star = matrix_from_json(j.at("r_star"));
  if (j.contains("coeffs"))
    for (const auto& c : j.at("coeffs")) w.coeffs.emplace_back(c[0].get<double>(), c[1].get<double>());
  return w;
}

Json to_json(const QubitCodeCircuit& c) {
  return Json{{"u_s", to_json(c.u_s)}, {"u_r", to_json(c.u_r)}, {"v_r", to_json(c.v_r)},
              {"p", c.p}};
}

QubitCodeCircuit circuit_from_json(const Json& j) {
  check(j.contains("u_s") && j.contains("u_r") && j.contains("v_r"),
        "circuit requires u_s, u_r, v_r");
  QubitCodeCircuit c;
  c.u_s = matrix_from_json(j.at("u_s"));
  c.u_r = matrix_from_json(j.at("u_r"));
  c.v_r = matrix_from_json(j.at("v_r"));
  c.p = j.value("p", 0.0);
  return c;
}

Json to_json(const SimReport& r) {
  Json counts = Json::object();
  for (const auto& [key, n] : r.branch_counts) counts[key] = n;
  return Json{{"p_exact", r.p_exact},
              {"accept_freq", r.accept_freq},
              {"accepted_fidelity_mean", r.accepted_fidelity_mean},
              {"accepted_fidelity_min", r.accepted_fidelity_min},
              {"shots", r.shots},
              {"seed", Json{{"seed", r.seed.seed}, {"stream", r.seed.stream}}},
              {"branch_counts", std::move(counts)}};
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

void save_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace pqec
