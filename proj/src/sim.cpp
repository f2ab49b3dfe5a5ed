#include "pqec/sim.hpp"

#include <cmath>
#include <stdexcept>

namespace pqec {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// (1_2 (x) <i|): projects the second qubit of a 2-qubit system onto |i>.
ComplexMatrix second_qubit_bra(int i) {
  ComplexMatrix m(2, 4);
  m(0, i) = 1.0;
  m(1, 2 + i) = 1.0;
  return m;
}

std::string branch_key(int i, int j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

}  // namespace

double state_fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  require(rho.is_square() && sigma.is_square() && rho.rows() == sigma.rows(),
          "state_fidelity: dimension mismatch");
  Eigh e = eigh(rho, 1e-7);
  int rank = 0;
  for (double v : e.eigenvalues)
    if (v > 1e-10) ++rank;
  if (rank <= 1) {
    ComplexMatrix psi = e.vectors.column(0);
    return (psi.adjoint() * sigma * psi)(0, 0).real();
  }
  ComplexMatrix root = matrix_sqrt(rho, 1e-7);
  ComplexMatrix inner_op = matrix_sqrt(root * sigma * root, 1e-6);
  double t = inner_op.trace().real();
  return t * t;
}

std::vector<ExactRun> run_exact(const Subchannel& noise, const Scheme& scheme,
                                const std::vector<ComplexMatrix>& states) {
  std::vector<ExactRun> out;
  out.reserve(states.size());
  for (const auto& rho : states) {
    require(rho.rows() == scheme.encoder.in_dim() && rho.is_square(),
            "run_exact: state dimension mismatch");
    ComplexMatrix raw = scheme.recovery.apply(noise.apply(scheme.encoder.apply(rho)));
    double p = raw.trace().real();
    ExactRun run;
    run.p = p;
    if (p > 1e-15) {
      run.post_state = raw * Complex(1.0 / p, 0.0);
      run.fidelity = state_fidelity(rho, run.post_state);
    } else {
      run.post_state = ComplexMatrix::zero(raw.rows(), raw.cols());
      run.fidelity = 0.0;
    }
    out.push_back(std::move(run));
  }
  return out;
}

std::array<std::array<CircuitBranch, 2>, 2> circuit_branches(const Subchannel& noise,
                                                             const QubitCodeCircuit& circuit,
                                                             const ComplexMatrix& psi) {
  require(psi.rows() == 2 && psi.cols() == 1, "circuit_branches: psi must be a qubit state");
  require(noise.in_dim() == 4 && noise.out_dim() == 4,
          "circuit_branches: noise must act on two qubits");

  ComplexMatrix ket0 = ComplexMatrix::basis_vector(2, 0);
  ComplexMatrix input = kron(psi * psi.adjoint(), ket0 * ket0.adjoint());
  ComplexMatrix rho = circuit.u_s * input * circuit.u_s.adjoint();
  rho = noise.apply(rho);
  rho = circuit.u_r * rho * circuit.u_r.adjoint();

  std::array<std::array<CircuitBranch, 2>, 2> branches;
  for (int i = 0; i < 2; ++i) {
    ComplexMatrix bra_i = second_qubit_bra(i);
    ComplexMatrix sigma = bra_i * rho * bra_i.adjoint();  // unnormalized, 2x2
    ComplexMatrix lifted = kron(sigma, ket0 * ket0.adjoint());
    ComplexMatrix tau = circuit.v_r * lifted * circuit.v_r.adjoint();
    for (int j = 0; j < 2; ++j) {
      ComplexMatrix bra_j = second_qubit_bra(j);
      ComplexMatrix omega = bra_j * tau * bra_j.adjoint();
      double p = omega.trace().real();
      CircuitBranch& b = branches[i][j];
      b.prob = std::max(0.0, p);
      b.state = p > 1e-15 ? omega * Complex(1.0 / p, 0.0) : ComplexMatrix::zero(2, 2);
    }
  }
  return branches;
}

SimReport run_monte_carlo(const Subchannel& noise, const QubitCodeCircuit& circuit,
                          const ComplexMatrix& psi, uint64_t shots, RngSeed seed) {
  require(shots > 0, "run_monte_carlo: shots must be positive");
  auto branches = circuit_branches(noise, circuit, psi);

  double marginal0 = branches[0][0].prob + branches[0][1].prob;
  double accepted_fid =
      branches[0][0].prob > 0.0 ? (psi.adjoint() * branches[0][0].state * psi)(0, 0).real() : 0.0;

  SimReport rep;
  rep.p_exact = branches[0][0].prob;
  rep.shots = shots;
  rep.seed = seed;
  uint64_t counts[2][2] = {{0, 0}, {0, 0}};
  for (uint64_t shot = 0; shot < shots; ++shot) {
    int i = shot_uniform(seed, shot, 0) < marginal0 ? 0 : 1;
    double qi = branches[i][0].prob + branches[i][1].prob;
    double cond0 = qi > 0.0 ? branches[i][0].prob / qi : 0.0;
    int j = shot_uniform(seed, shot, 1) < cond0 ? 0 : 1;
    ++counts[i][j];
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) rep.branch_counts[branch_key(i, j)] = counts[i][j];
  rep.accept_freq = static_cast<double>(counts[0][0]) / static_cast<double>(shots);
  rep.accepted_fidelity_mean = counts[0][0] > 0 ? accepted_fid : 0.0;
  rep.accepted_fidelity_min = rep.accepted_fidelity_mean;
  return rep;
}

SimReport run_monte_carlo(const Subchannel& noise, const Scheme& scheme,
                          const ComplexMatrix& psi, uint64_t shots, RngSeed seed) {
  require(shots > 0, "run_monte_carlo: shots must be positive");
  require(psi.cols() == 1 && psi.rows() == scheme.encoder.in_dim(),
          "run_monte_carlo: state dimension mismatch");
  ComplexMatrix rho = psi * psi.adjoint();
  ComplexMatrix raw = scheme.recovery.apply(noise.apply(scheme.encoder.apply(rho)));
  double p = std::max(0.0, raw.trace().real());
  double fid = 0.0;
  if (p > 1e-15) {
    ComplexMatrix sigma = raw * Complex(1.0 / p, 0.0);
    fid = (psi.adjoint() * sigma * psi)(0, 0).real();
  }

  SimReport rep;
  rep.p_exact = p;
  rep.shots = shots;
  rep.seed = seed;
  uint64_t accepted = 0;
  for (uint64_t shot = 0; shot < shots; ++shot)
    if (shot_uniform(seed, shot, 0) < p) ++accepted;
  rep.branch_counts["(0)"] = accepted;
  rep.branch_counts["(1)"] = shots - accepted;
  rep.accept_freq = static_cast<double>(accepted) / static_cast<double>(shots);
  rep.accepted_fidelity_mean = accepted > 0 ? fid : 0.0;
  rep.accepted_fidelity_min = rep.accepted_fidelity_mean;
  return rep;
}

}  // namespace pqec
