#pragma once

#include <optional>
#include <vector>

#include "pqec/channel.hpp"
#include "pqec/matcore.hpp"

namespace pqec {

// Error-correcting scheme: encoder X->Y, recovery Y->X, with the certified
// success probability and the Frobenius distance of R.E.S from p*Identity.
struct Scheme {
  Subchannel encoder;
  Subchannel recovery;
  double success_prob = 0.0;
  double residual = 0.0;
};

struct VerifyResult {
  double p = 0.0;
  double residual = 0.0;
  bool ok = false;
};

// Proportionality witness: A = coeff * Identity within deviation.
struct PropResult {
  bool ok = false;
  Complex coeff{0.0, 0.0};
  double deviation = 0.0;
};

// Tests A = c*1 with c = tr(A)/d; passes when ||A - c*1||_F <= tol*max(1, ||A||_F).
PropResult prop_to_identity(const ComplexMatrix& a, double tol = kDefaultTol);

// Fits the best p >= 0 with Choi(R.E.S) ~ p |1><1| by least squares.
// ok means residual <= tol * max(1, p * dim).
VerifyResult verify_scheme(const Subchannel& noise, const Subchannel& encoder,
                           const Subchannel& recovery, double tol = kDefaultTol);
VerifyResult verify_scheme(const Subchannel& noise, const Scheme& scheme,
                           double tol = kDefaultTol);
// Builds a Scheme and throws std::runtime_error unless it verifies with p > 0.
Scheme make_verified_scheme(const Subchannel& noise, const Subchannel& encoder,
                            const Subchannel& recovery, double tol = kDefaultTol);

struct ConditionBResult {
  bool ok = false;
  // Canonical Kraus list of sqrt(R).E.S and the alphas with A+A = alpha*1.
  std::vector<ComplexMatrix> a_ops;
  std::vector<double> alphas;
  double worst_deviation = 0.0;
};

ConditionBResult check_condition_B(const Subchannel& noise, const Subchannel& encoder,
                                   const ComplexMatrix& r_op, double tol = kDefaultTol);

// M indexed by flattened pairs (noise index, encoder index), noise-major.
struct ConditionCReport {
  ComplexMatrix m;
  ComplexMatrix r_op;
  double trace_m = 0.0;
};

// Computes every block S_l+ E_j+ R E_i S_k and assembles M; throws with the
// worst offending block when one is not proportional to the identity.
ConditionCReport build_condition_C(const Subchannel& noise, const Subchannel& encoder,
                                   const ComplexMatrix& r_op, double tol = kDefaultTol);

// Recovery subchannel from the spectral decomposition of M; the result passes
// verify_scheme with p = tr(M).
Subchannel recovery_from_M(const ConditionCReport& report, const Subchannel& noise,
                           const Subchannel& encoder, double tol = kDefaultTol);

// Single-operator witness: R* E_i S* = coeffs[i] * 1 with some coeff nonzero.
struct ConditionDWitness {
  ComplexMatrix s_star;  // X -> Y
  ComplexMatrix r_star;  // Y -> X
  std::vector<Complex> coeffs;
};

struct ConditionDResult {
  bool ok = false;
  std::vector<Complex> coeffs;  // for unit-norm scaled S*, R*
  double worst_deviation = 0.0;
  std::optional<Scheme> scheme;  // materialized on success
};

// Scale-invariant check of the witness equations; on success also returns the
// scheme obtained by rescaling S* and R* into subchannels.
ConditionDResult check_condition_D(const Subchannel& noise, const ConditionDWitness& witness,
                                   double tol = kDefaultTol);

// Solves F_i S = c_i * 1 for all i as a homogeneous linear system over S.
// Returns a witness with R* = 1 and maximal |c|_inf over a deterministic
// search of null-space combinations, or nullopt when only c = 0 solutions
// exist.
std::optional<ConditionDWitness> solve_linear_condition_D(const std::vector<ComplexMatrix>& f_ops,
                                                          double tol = kDefaultTol);

// For noise with rank(E(1)) = d: projects the Kraus operators onto the image
// of E(1) through the isometry V and returns F_i = V+ E_i.
std::vector<ComplexMatrix> reduce_full_output_rank(const Subchannel& noise, int d);

// Knill-Laflamme check: every S+ E_j+ E_i S proportional to the identity.
bool kl_check(const Subchannel& noise, const ComplexMatrix& s_iso, double tol = kDefaultTol);

// Equivalent scheme with a trace-preserving encoder and the same p.
Scheme realization_shift(const Subchannel& noise, const Scheme& scheme,
                         double tol = kDefaultTol);

// Completes a recovery into a channel Y -> X (x) C^2 carrying a classical
// flag: flag 0 reproduces R, flag 1 dumps the rejected weight on the
// maximally mixed state.
Subchannel flagged_decoder(const Subchannel& recovery);

using Ensemble = std::vector<std::pair<double, Subchannel>>;

// Convex mixture at the Choi level; weights must be positive and sum to 1.
Subchannel average_channel(const Ensemble& ensemble);

struct EnsembleReport {
  double p_average = 0.0;
  std::vector<double> member_p;
};

// Verifies the scheme on the average channel, then per member; a member that
// fails proportionality is an inconsistency and throws.
EnsembleReport check_ensemble(const Ensemble& ensemble, const Scheme& scheme,
                              double tol = kDefaultTol);

}  // namespace pqec
