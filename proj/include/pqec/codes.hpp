#pragma once

#include <array>
#include <utility>

#include "pqec/channel.hpp"
#include "pqec/conditions.hpp"
#include "pqec/matcore.hpp"

namespace pqec {

// Two-qubit circuit realization of a probabilistic qubit code.
// U_S encodes (qubit 2 starts in |0>), U_R rotates before the first
// measurement, V_R acts on the data qubit and a fresh ancilla before the
// second. Accepting (0,0) restores the input with probability p.
struct QubitCodeCircuit {
  ComplexMatrix u_s;  // 4x4 unitary, U_S (1 (x) |0>) = S
  ComplexMatrix u_r;  // 4x4 unitary sending the recovery row space onto |00>, |10>
  ComplexMatrix v_r;  // 4x4 unitary with (1 (x) <0|) V_R (1 (x) |0>) = R'
  double p = 0.0;
};

// Diagonal parameters of the mixed-encoding noise family, 0 < lambda_i <= 1.
struct MagicFamilyParams {
  std::array<double, 4> lambda{1.0, 1.0, 1.0, 1.0};
};

// Fixed unitary whose columns are the two-qubit magic basis.
ComplexMatrix magic_unitary();
// R = U diag(lambda) U+ in the magic basis.
ComplexMatrix magic_r_operator(const MagicFamilyParams& params);

// Closed forms {p0, p1} for the optimal mixed- and pure-encoding success
// probabilities of the magic-basis family.
std::pair<double, double> magic_p0_p1(const MagicFamilyParams& params);

// Brute-force p1 via a Bloch-sphere grid of pure encodings; validates the
// closed form. Grid of n_theta x n_phi points.
double magic_p1_oracle(const MagicFamilyParams& params, int n_theta, int n_phi);

// Noise family E_R(Y) = |0><0| (x) tr_1(sqrt(R) Y sqrt(R))
//                     + |1><1| (x) tr((1-R) Y) I/2 on two qubits.
Subchannel er_channel(const ComplexMatrix& r_op, double tol = kDefaultTol);

// Optimal scheme for E_R at encoding weight P: S(X) = sqrt(R)^-1 (P (x) X)
// sqrt(R)^-1, recovery keeps the |0> sector. Succeeds with p = tr(P).
Scheme er_optimal_scheme(const ComplexMatrix& r_op, const ComplexMatrix& p_weight,
                         double tol = kDefaultTol);

// Witness for any channel on C^4 with Choi rank <= 2, following the joint
// singular-value structure of the two Kraus operators.
ConditionDWitness qubit_rank2_witness(const Subchannel& noise, double tol = kDefaultTol);

// Full circuit synthesis for the probabilistic qubit code plus the
// verified scheme it implements.
std::pair<QubitCodeCircuit, Scheme> qubit_code_circuit(const Subchannel& noise,
                                                       double tol = kDefaultTol);

// Recursive witness construction for Schur channels with Choi rank below
// dim(Y)/(d-1). Throws std::invalid_argument when the rank precondition is
// unmet (the channel may still be correctable).
ConditionDWitness schur_code(const Subchannel& noise, int d, double tol = kDefaultTol);

enum class RankKind { xi, xi1 };

// Channels saturating the maximal Choi rank of (probabilistically /
// perfectly) correctable noise, with their schemes: xi1 reaches rank
// s^2 - s d + floor(s/d) at p = 1, xi reaches s^2 - d^2 + 1 at p = 1/(s-d+1).
std::pair<Subchannel, Scheme> rank_saturating_channel(RankKind kind, int d, int s);

// Schur channels just past the correctability bounds: rank ceil(s/(d-1))
// escapes probabilistic correction, rank ceil(sqrt(ceil(s/(d-1)))) escapes
// perfect correction.
Subchannel rank_bound_counterexample(RankKind kind, int d, int s);

}  // namespace pqec
