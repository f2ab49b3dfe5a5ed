#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pqec/codes.hpp"
#include "pqec/conditions.hpp"
#include "pqec/randgen.hpp"

namespace pqec {

struct SimReport {
  double p_exact = 0.0;
  double accept_freq = 0.0;
  double accepted_fidelity_mean = 0.0;
  double accepted_fidelity_min = 0.0;
  uint64_t shots = 0;
  RngSeed seed;
  std::map<std::string, uint64_t> branch_counts;
};

struct ExactRun {
  double p = 0.0;
  ComplexMatrix post_state;
  double fidelity = 0.0;
};

// Fidelity <psi|sigma|psi> for pure rho, Uhlmann fidelity otherwise.
double state_fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma);

// Applies R.E.S to each state; p is the output trace, the post state is
// normalized, fidelity is taken against the input.
std::vector<ExactRun> run_exact(const Subchannel& noise, const Scheme& scheme,
                                const std::vector<ComplexMatrix>& states);

struct CircuitBranch {
  double prob = 0.0;
  ComplexMatrix state;  // normalized conditional state, zero when prob = 0
};

// Exact density-matrix evolution of the two-measurement circuit; branch
// (i, j) indexes the qubit-2 then ancilla outcomes. Probabilities sum to 1.
std::array<std::array<CircuitBranch, 2>, 2> circuit_branches(const Subchannel& noise,
                                                             const QubitCodeCircuit& circuit,
                                                             const ComplexMatrix& psi);

// Samples the classical labels of the circuit (states evolve exactly;
// measurements are sampled). Accepts on (0,0).
SimReport run_monte_carlo(const Subchannel& noise, const QubitCodeCircuit& circuit,
                          const ComplexMatrix& psi, uint64_t shots, RngSeed seed);

// Scheme-level sampling: accept with probability tr(R.E.S(psi)).
SimReport run_monte_carlo(const Subchannel& noise, const Scheme& scheme,
                          const ComplexMatrix& psi, uint64_t shots, RngSeed seed);

}  // namespace pqec
