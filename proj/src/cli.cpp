#include "pqec/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pqec/codes.hpp"
#include "pqec/conditions.hpp"
#include "pqec/randgen.hpp"
#include "pqec/serialize.hpp"
#include "pqec/sim.hpp"

namespace pqec {

namespace {

constexpr int kExitPass = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFail = 2;

double env_tolerance() {
  if (const char* s = std::getenv("PQEC_TOL")) {
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end != s && v > 0.0) return v;
    std::cerr << "warning: ignoring invalid PQEC_TOL value '" << s << "'\n";
  }
  return kDefaultTol;
}

struct LoadedFile {
  Json json;
};

// I/O and parse problems surface as exit code 1.
Json load_or_throw(const std::string& path) { return load_json(path); }

void parallel_for(int n, const std::function<void(int)>& body) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  unsigned workers = std::min<unsigned>(hw, static_cast<unsigned>(n));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  for (auto& t : pool) t.join();
}

int cmd_check(const std::string& channel_path, const std::string& scheme_path,
              const std::string& witness_path, double tol) {
  Subchannel noise = subchannel_from_json(load_or_throw(channel_path));
  if (!scheme_path.empty()) {
    Scheme scheme = scheme_from_json(load_or_throw(scheme_path));
    VerifyResult v = verify_scheme(noise, scheme, tol);
    std::cout << "p        = " << format_double(v.p) << "\n";
    std::cout << "residual = " << format_double(v.residual) << "\n";
    std::cout << "result   = " << (v.ok && v.p > 0.0 ? "PASS" : "FAIL") << "\n";
    return v.ok && v.p > 0.0 ? kExitPass : kExitFail;
  }
  Json wj = load_or_throw(witness_path);
  ConditionDWitness w = witness_from_json(wj);
  if (!wj.contains("r_star")) {
    // Bare isometry: run the deterministic-correctability check.
    bool ok = kl_check(noise, w.s_star, tol);
    std::cout << "kl_check = " << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? kExitPass : kExitFail;
  }
  ConditionDResult res = check_condition_D(noise, w, tol);
  std::cout << "max_coeff = "
            << format_double([&] {
                 double m = 0.0;
                 for (const auto& c : res.coeffs) m = std::max(m, std::abs(c));
                 return m;
               }())
            << "\n";
  std::cout << "deviation = " << format_double(res.worst_deviation) << "\n";
  if (res.scheme) std::cout << "p         = " << format_double(res.scheme->success_prob) << "\n";
  std::cout << "result    = " << (res.ok ? "PASS" : "FAIL") << "\n";
  return res.ok ? kExitPass : kExitFail;
}

void write_scheme_files(const std::string& out, const Scheme& scheme) {
  save_json(out + ".scheme.json", to_json(scheme));
  std::cout << "wrote " << out << ".scheme.json (p = " << format_double(scheme.success_prob)
            << ")\n";
}

int cmd_construct(const std::string& name, const std::string& channel_path,
                  const std::vector<double>& lambda, int dim, int logical_dim, int rank,
                  uint64_t seed, const std::string& out, double tol) {
  std::optional<Subchannel> noise;
  if (!channel_path.empty()) noise = subchannel_from_json(load_or_throw(channel_path));

  if (name == "qubit-rank2") {
    if (!noise) {
      Rng rng(seed);
      noise = random_channel(4, rank > 0 ? rank : 2, rng);
      save_json(out + ".channel.json", to_json(*noise));
      std::cout << "wrote " << out << ".channel.json (sampled, seed " << seed << ")\n";
    }
    auto [circ, scheme] = qubit_code_circuit(*noise, tol);
    // Reverify from the serialized form before anything lands on disk.
    Scheme reread = scheme_from_json(to_json(scheme));
    VerifyResult v = verify_scheme(*noise, reread, std::max(tol, 1e-8));
    if (!v.ok || v.p <= 0.0) throw std::runtime_error("reverification of the scheme failed");
    save_json(out + ".witness.json", to_json(qubit_rank2_witness(*noise, tol)));
    save_json(out + ".circuit.json", to_json(circ));
    write_scheme_files(out, scheme);
    std::cout << "wrote " << out << ".witness.json and " << out << ".circuit.json\n";
    return kExitPass;
  }
  if (name == "schur") {
    if (!noise) {
      Rng rng(seed);
      noise = random_schur_channel(dim > 0 ? dim : 4, rank > 0 ? rank : 2, rng);
      save_json(out + ".channel.json", to_json(*noise));
      std::cout << "wrote " << out << ".channel.json (sampled, seed " << seed << ")\n";
    }
    ConditionDWitness w = schur_code(*noise, logical_dim, tol);
    ConditionDResult res = check_condition_D(*noise, w, std::max(tol, 1e-8));
    if (!res.ok) throw std::runtime_error("schur witness failed reverification");
    save_json(out + ".witness.json", to_json(w));
    std::cout << "wrote " << out << ".witness.json\n";
    if (res.scheme) write_scheme_files(out, *res.scheme);
    return kExitPass;
  }
  if (name == "er-family") {
    if (lambda.size() != 4)
      throw CLI::ValidationError("--lambda", "er-family needs exactly 4 lambda values");
    MagicFamilyParams params;
    std::copy(lambda.begin(), lambda.end(), params.lambda.begin());
    auto [p0, p1] = magic_p0_p1(params);
    ComplexMatrix r_op = magic_r_operator(params);
    Subchannel channel = er_channel(r_op, tol);
    ComplexMatrix p_weight = ComplexMatrix::identity(2) * Complex(p0 / 2.0, 0.0);
    Scheme scheme = er_optimal_scheme(r_op, p_weight, tol);
    save_json(out + ".channel.json", to_json(channel));
    save_json(out + ".meta.json",
              Json{{"lambda", lambda}, {"p0", p0}, {"p1", p1}});
    write_scheme_files(out, scheme);
    std::cout << "wrote " << out << ".channel.json and " << out << ".meta.json (p0 = "
              << format_double(p0) << ", p1 = " << format_double(p1) << ")\n";
    return kExitPass;
  }
  if (name == "rank-sat-xi" || name == "rank-sat-xi1") {
    RankKind kind = name == "rank-sat-xi" ? RankKind::xi : RankKind::xi1;
    auto [channel, scheme] = rank_saturating_channel(kind, logical_dim, dim);
    save_json(out + ".channel.json", to_json(channel));
    write_scheme_files(out, scheme);
    std::cout << "wrote " << out << ".channel.json (Choi rank " << choi_rank(channel) << ")\n";
    return kExitPass;
  }
  if (name == "rank-bound-xi" || name == "rank-bound-xi1") {
    RankKind kind = name == "rank-bound-xi" ? RankKind::xi : RankKind::xi1;
    Subchannel channel = rank_bound_counterexample(kind, logical_dim, dim);
    save_json(out + ".channel.json", to_json(channel));
    std::cout << "wrote " << out << ".channel.json (Choi rank " << choi_rank(channel) << ")\n";
    return kExitPass;
  }
  throw CLI::ValidationError("constructor", "unknown constructor '" + name + "'");
}

int cmd_simulate(const std::string& channel_path, const std::string& scheme_path,
                 const std::string& circuit_path, const std::string& state_path, uint64_t shots,
                 uint64_t seed, const std::string& out) {
  Subchannel noise = subchannel_from_json(load_or_throw(channel_path));
  RngSeed rng_seed{seed, 0};

  ComplexMatrix psi(1, 1);
  if (!state_path.empty()) {
    psi = matrix_from_json(load_or_throw(state_path));
  } else {
    Rng rng(seed, 1);
    int d = scheme_path.empty() ? 2 : 0;  // circuit input is a qubit
    if (!scheme_path.empty()) {
      Scheme s = scheme_from_json(load_or_throw(scheme_path));
      d = s.encoder.in_dim();
    }
    psi = random_pure_state(d, rng);
  }

  SimReport rep;
  if (!circuit_path.empty()) {
    QubitCodeCircuit circ = circuit_from_json(load_or_throw(circuit_path));
    rep = run_monte_carlo(noise, circ, psi, shots, rng_seed);
  } else {
    Scheme scheme = scheme_from_json(load_or_throw(scheme_path));
    rep = run_monte_carlo(noise, scheme, psi, shots, rng_seed);
  }
  Json j = to_json(rep);
  if (out.empty())
    std::cout << j.dump(2) << "\n";
  else {
    save_json(out, j);
    std::cout << "wrote " << out << "\n";
  }
  return kExitPass;
}

int cmd_demo(const std::string& out) {
  auto [channel, scheme] = rank_saturating_channel(RankKind::xi, 2, 4);
  save_json(out + ".channel.json", to_json(channel));
  write_scheme_files(out, scheme);
  std::cout << "wrote " << out << ".channel.json; try: pqec check --channel " << out
            << ".channel.json --scheme " << out << ".scheme.json\n";
  return kExitPass;
}

int cmd_bench(int dim, int rank, int samples, uint64_t seed, const std::string& constructor,
              int logical_dim, const std::string& out) {
  struct Row {
    bool success = false;
    double p = 0.0;
  };
  std::vector<Row> rows(samples);
  parallel_for(samples, [&](int i) {
    Rng rng(seed, static_cast<uint64_t>(i));
    try {
      if (constructor == "schur") {
        Subchannel ch = random_schur_channel(dim, rank, rng);
        ConditionDWitness w = schur_code(ch, logical_dim);
        ConditionDResult res = check_condition_D(ch, w, 1e-8);
        rows[i] = Row{res.ok, res.scheme ? res.scheme->success_prob : 0.0};
      } else {
        Subchannel ch = random_channel(dim, rank, rng);
        auto [circ, scheme] = qubit_code_circuit(ch);
        rows[i] = Row{true, scheme.success_prob};
      }
    } catch (const std::exception&) {
      rows[i] = Row{false, 0.0};
    }
  });

  std::ostringstream csv;
  csv << "sample,constructor,success,p\n";
  int successes = 0;
  for (int i = 0; i < samples; ++i) {
    csv << i << "," << constructor << "," << (rows[i].success ? 1 : 0) << ","
        << format_double(rows[i].p) << "\n";
    if (rows[i].success) ++successes;
  }
  if (out.empty())
    std::cout << csv.str();
  else {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write " + out);
    f << csv.str();
    std::cout << "wrote " << out << "\n";
  }
  std::cout << "success rate: " << successes << "/" << samples << "\n";
  return kExitPass;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Probabilistic quantum error correction toolkit"};
  app.require_subcommand(1);
  double tol = env_tolerance();

  std::string channel_path, scheme_path, witness_path, circuit_path, state_path, out;
  std::vector<double> lambda;
  int dim = 4, logical_dim = 2, rank = 2, samples = 100;
  uint64_t seed = 0, shots = 100000;
  std::string constructor_name = "qubit-rank2";

  auto* check = app.add_subcommand("check", "Verify a scheme or witness against a channel");
  check->add_option("--channel", channel_path, "Channel JSON file")->required();
  auto* check_scheme = check->add_option("--scheme", scheme_path, "Scheme JSON file");
  auto* check_witness = check->add_option("--witness", witness_path, "Witness JSON file");
  check_scheme->excludes(check_witness);
  check->add_option("--tol", tol, "Tolerance override");

  auto* construct = app.add_subcommand("construct", "Build a code/scheme and write artifacts");
  construct
      ->add_option("constructor", constructor_name,
                   "qubit-rank2 | schur | er-family | rank-sat-xi | rank-sat-xi1 | "
                   "rank-bound-xi | rank-bound-xi1")
      ->required();
  construct->add_option("--channel", channel_path, "Channel JSON file");
  construct->add_option("--lambda", lambda, "4 diagonal parameters of the er-family")
      ->expected(4);
  construct->add_option("--dim", dim, "Physical dimension");
  construct->add_option("--logical-dim", logical_dim, "Logical dimension");
  construct->add_option("--rank", rank, "Choi rank for sampled channels");
  construct->add_option("--seed", seed, "Sampling seed");
  construct->add_option("--out", out, "Output path prefix")->required();
  construct->add_option("--tol", tol, "Tolerance override");

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo postselection simulation");
  simulate->add_option("--channel", channel_path, "Channel JSON file")->required();
  auto* sim_scheme = simulate->add_option("--scheme", scheme_path, "Scheme JSON file");
  auto* sim_circuit = simulate->add_option("--circuit", circuit_path, "Circuit JSON file");
  sim_scheme->excludes(sim_circuit);
  simulate->add_option("--state", state_path, "Input pure state JSON (column vector)");
  simulate->add_option("--shots", shots, "Shot count");
  simulate->add_option("--seed", seed, "RNG seed");
  simulate->add_option("--out", out, "Report output file (stdout if omitted)");

  auto* demo = app.add_subcommand("demo", "Write a ready-made channel/scheme pair");
  demo->add_option("--out", out, "Output path prefix");

  auto* bench = app.add_subcommand("bench", "Random-channel correction rates, CSV output");
  bench->add_option("--dim", dim, "Physical dimension");
  bench->add_option("--rank", rank, "Choi rank of the samples");
  bench->add_option("--samples", samples, "Sample count");
  bench->add_option("--seed", seed, "Base seed");
  bench->add_option("--constructor", constructor_name, "qubit-rank2 | schur");
  bench->add_option("--logical-dim", logical_dim, "Logical dimension (schur)");
  bench->add_option("--out", out, "CSV output file (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (check->parsed()) {
      if (scheme_path.empty() && witness_path.empty()) {
        std::cerr << "check needs --scheme or --witness\n";
        return kExitUsage;
      }
      return cmd_check(channel_path, scheme_path, witness_path, tol);
    }
    if (construct->parsed())
      return cmd_construct(constructor_name, channel_path, lambda, dim, logical_dim, rank, seed,
                           out, tol);
    if (simulate->parsed()) {
      if (scheme_path.empty() && circuit_path.empty()) {
        std::cerr << "simulate needs --scheme or --circuit\n";
        return kExitUsage;
      }
      return cmd_simulate(channel_path, scheme_path, circuit_path, state_path, shots, seed, out);
    }
    if (demo->parsed()) return cmd_demo(out.empty() ? "demo" : out);
    if (bench->parsed())
      return cmd_bench(dim, rank, samples, seed, constructor_name, logical_dim, out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  } catch (const std::runtime_error& e) {
    // I/O and decode problems are usage errors; domain failures are semantic.
    std::string msg = e.what();
    std::cerr << "error: " << msg << "\n";
    bool io = msg.rfind("cannot open", 0) == 0 || msg.rfind("cannot write", 0) == 0 ||
              msg.rfind("malformed JSON", 0) == 0 || msg.rfind("json decode", 0) == 0 ||
              msg.rfind("write failed", 0) == 0;
    return io ? kExitUsage : kExitFail;
  }
  return kExitUsage;
}

}  // namespace pqec
