#include "pqec/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pqec {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// 0 <= R <= 1 within tolerance.
void require_effect(const ComplexMatrix& r_op, double tol, const char* who) {
  Eigh e = eigh(r_op, 1e-6);
  if (e.eigenvalues.empty()) return;
  if (e.eigenvalues.back() < -1e3 * tol || e.eigenvalues.front() > 1.0 + 1e3 * tol)
    throw std::invalid_argument(std::string(who) + ": R operator not in [0, 1] (eigenvalues in [" +
                                std::to_string(e.eigenvalues.back()) + ", " +
                                std::to_string(e.eigenvalues.front()) + "])");
}

// Products sqrt(R) E_i S_k, noise-major flat order.
std::vector<ComplexMatrix> weighted_products(const Subchannel& noise, const Subchannel& encoder,
                                             const ComplexMatrix& sqrt_r) {
  std::vector<ComplexMatrix> out;
  out.reserve(noise.kraus().size() * encoder.kraus().size());
  for (const auto& e : noise.kraus()) {
    ComplexMatrix we = sqrt_r * e;
    for (const auto& s : encoder.kraus()) out.push_back(we * s);
  }
  return out;
}

constexpr double kNonzeroCoeffFloor = 1e-7;

}  // namespace

PropResult prop_to_identity(const ComplexMatrix& a, double tol) {
  if (!a.is_square()) return PropResult{false, Complex(0, 0), a.frobenius_norm()};
  const int d = a.rows();
  Complex c = a.trace() / static_cast<double>(d);
  double dev = (a - ComplexMatrix::identity(d) * c).frobenius_norm();
  bool ok = dev <= tol * std::max(1.0, a.frobenius_norm());
  return PropResult{ok, c, dev};
}

VerifyResult verify_scheme(const Subchannel& noise, const Subchannel& encoder,
                           const Subchannel& recovery, double tol) {
  require(encoder.out_dim() == noise.in_dim() && noise.out_dim() == recovery.in_dim() &&
              recovery.out_dim() == encoder.in_dim(),
          "verify_scheme: dimensions do not compose");
  const int d = encoder.in_dim();
  ChoiOperator j = choi(compose(recovery, compose(noise, encoder)));
  ComplexMatrix one = vectorize(ComplexMatrix::identity(d));
  // Least-squares fit of J ~ p |1><1| over the Hilbert-Schmidt inner product.
  Complex overlap = (one.adjoint() * j.matrix * one)(0, 0);
  double p = std::max(0.0, overlap.real() / static_cast<double>(d * d));
  double residual = (j.matrix - (one * one.adjoint()) * Complex(p, 0.0)).frobenius_norm();
  bool ok = residual <= tol * std::max(1.0, p * d);
  return VerifyResult{p, residual, ok};
}

VerifyResult verify_scheme(const Subchannel& noise, const Scheme& scheme, double tol) {
  return verify_scheme(noise, scheme.encoder, scheme.recovery, tol);
}

Scheme make_verified_scheme(const Subchannel& noise, const Subchannel& encoder,
                            const Subchannel& recovery, double tol) {
  VerifyResult v = verify_scheme(noise, encoder, recovery, tol);
  if (!v.ok || v.p <= 0.0)
    throw std::runtime_error("scheme failed verification (p = " + std::to_string(v.p) +
                             ", residual = " + std::to_string(v.residual) + ")");
  return Scheme{encoder, recovery, v.p, v.residual};
}

ConditionBResult check_condition_B(const Subchannel& noise, const Subchannel& encoder,
                                   const ComplexMatrix& r_op, double tol) {
  require(r_op.is_square() && r_op.rows() == noise.out_dim(), "check_condition_B: R shape");
  require_effect(r_op, tol, "check_condition_B");
  ComplexMatrix sqrt_r = matrix_sqrt(r_op, 1e-6);
  Subchannel weighted = Subchannel::make_unchecked(weighted_products(noise, encoder, sqrt_r));
  Subchannel canon = canonicalize(weighted);

  ConditionBResult res;
  res.a_ops = canon.kraus();
  if (res.a_ops.size() == 1 && res.a_ops.front().frobenius_norm() == 0.0) {
    res.ok = false;  // the weighted map vanished entirely
    return res;
  }
  res.ok = true;
  for (size_t i = 0; i < res.a_ops.size(); ++i) {
    PropResult pr = prop_to_identity(res.a_ops[i].adjoint() * res.a_ops[i], tol);
    res.worst_deviation = std::max(res.worst_deviation, pr.deviation);
    if (!pr.ok || pr.coeff.real() <= 0.0) res.ok = false;
    res.alphas.push_back(pr.coeff.real());
  }
  for (size_t i = 0; i < res.a_ops.size(); ++i) {
    for (size_t j = 0; j < res.a_ops.size(); ++j) {
      if (i == j) continue;
      double dev = (res.a_ops[j].adjoint() * res.a_ops[i]).frobenius_norm();
      double scale = std::max(1.0, res.a_ops[i].frobenius_norm() * res.a_ops[j].frobenius_norm());
      res.worst_deviation = std::max(res.worst_deviation, dev);
      if (dev > tol * scale) res.ok = false;
    }
  }
  return res;
}

ConditionCReport build_condition_C(const Subchannel& noise, const Subchannel& encoder,
                                   const ComplexMatrix& r_op, double tol) {
  require(r_op.is_square() && r_op.rows() == noise.out_dim(), "build_condition_C: R shape");
  require_effect(r_op, tol, "build_condition_C");
  ComplexMatrix sqrt_r = matrix_sqrt(r_op, 1e-6);
  std::vector<ComplexMatrix> g = weighted_products(noise, encoder, sqrt_r);
  const int n = static_cast<int>(g.size());
  const int n_enc = static_cast<int>(encoder.kraus().size());

  ComplexMatrix m(n, n);
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      // S_l+ E_j+ R E_i S_k with b = (j,l), a = (i,k).
      ComplexMatrix block = g[b].adjoint() * g[a];
      PropResult pr = prop_to_identity(block, tol);
      if (!pr.ok) {
        throw std::runtime_error(
            "condition (C) block (j=" + std::to_string(b / n_enc) +
            ", l=" + std::to_string(b % n_enc) + ", i=" + std::to_string(a / n_enc) +
            ", k=" + std::to_string(a % n_enc) +
            ") not proportional to identity (deviation " + std::to_string(pr.deviation) + ")");
      }
      m(b, a) = pr.coeff;
    }
  }
  ConditionCReport rep;
  rep.m = std::move(m);
  rep.r_op = r_op;
  rep.trace_m = rep.m.trace().real();
  return rep;
}

Subchannel recovery_from_M(const ConditionCReport& report, const Subchannel& noise,
                           const Subchannel& encoder, double tol) {
  Eigh e = eigh(report.m, 1e-6);
  double lmax = e.eigenvalues.empty() ? 0.0 : e.eigenvalues.front();
  if (lmax <= 0.0) throw std::runtime_error("recovery_from_M: M has no positive eigenvalues");
  if (e.eigenvalues.back() < -1e3 * tol * lmax)
    throw std::runtime_error("recovery_from_M: M not PSD (min eigenvalue " +
                             std::to_string(e.eigenvalues.back()) + ")");

  ComplexMatrix sqrt_r = matrix_sqrt(report.r_op, 1e-6);
  std::vector<ComplexMatrix> g = weighted_products(noise, encoder, sqrt_r);
  require(static_cast<int>(g.size()) == report.m.rows(), "recovery_from_M: M size mismatch");

  std::vector<ComplexMatrix> recovery_kraus;
  for (size_t midx = 0; midx < e.eigenvalues.size(); ++midx) {
    if (e.eigenvalues[midx] <= 1e3 * tol * lmax) continue;
    ComplexMatrix a = ComplexMatrix::zero(g.front().rows(), g.front().cols());
    for (size_t k = 0; k < g.size(); ++k)
      a = a + g[k] * e.vectors(static_cast<int>(k), static_cast<int>(midx));
    PropResult pr = prop_to_identity(a.adjoint() * a, std::max(tol, 1e-8));
    if (!pr.ok || pr.coeff.real() <= 0.0)
      throw std::runtime_error("recovery_from_M: A+A not proportional to identity (deviation " +
                               std::to_string(pr.deviation) + ")");
    double alpha = pr.coeff.real();
    recovery_kraus.push_back((a.adjoint() * sqrt_r) * Complex(1.0 / std::sqrt(alpha), 0.0));
  }
  return Subchannel::make(std::move(recovery_kraus), 1e-7);
}

ConditionDResult check_condition_D(const Subchannel& noise, const ConditionDWitness& witness,
                                   double tol) {
  require(witness.s_star.rows() == noise.in_dim() &&
              witness.r_star.cols() == noise.out_dim() &&
              witness.r_star.rows() == witness.s_star.cols(),
          "check_condition_D: witness dimensions do not compose");
  ConditionDResult res;
  double s_norm = witness.s_star.operator_norm();
  double r_norm = witness.r_star.operator_norm();
  if (s_norm == 0.0 || r_norm == 0.0) return res;
  ComplexMatrix s = witness.s_star * Complex(1.0 / s_norm, 0.0);
  ComplexMatrix r = witness.r_star * Complex(1.0 / r_norm, 0.0);

  double max_c = 0.0;
  bool all_prop = true;
  for (const auto& e : noise.kraus()) {
    PropResult pr = prop_to_identity(r * e * s, tol);
    res.worst_deviation = std::max(res.worst_deviation, pr.deviation);
    if (!pr.ok) all_prop = false;
    res.coeffs.push_back(pr.coeff);
    max_c = std::max(max_c, std::abs(pr.coeff));
  }
  res.ok = all_prop && max_c > kNonzeroCoeffFloor;
  if (res.ok) {
    Subchannel enc = Subchannel::make({s}, 1e-7);
    Subchannel rec = Subchannel::make({r}, 1e-7);
    res.scheme = make_verified_scheme(noise, enc, rec, std::max(tol, 1e-8));
  }
  return res;
}

std::optional<ConditionDWitness> solve_linear_condition_D(const std::vector<ComplexMatrix>& f_ops,
                                                          double tol) {
  require(!f_ops.empty(), "solve_linear_condition_D: empty operator list");
  const int d = f_ops.front().rows();
  const int s = f_ops.front().cols();
  for (const auto& f : f_ops)
    require(f.rows() == d && f.cols() == s, "solve_linear_condition_D: inconsistent shapes");

  const int n_ops = static_cast<int>(f_ops.size());
  ComplexMatrix id = ComplexMatrix::identity(d);
  // Row-block i holds vec(F_i S - tr(F_i S)/d * 1) as a linear map of vec(S).
  ComplexMatrix constraint(n_ops * d * d, s * d);
  for (int rr = 0; rr < s; ++rr) {
    for (int cc = 0; cc < d; ++cc) {
      ComplexMatrix basis = ComplexMatrix::basis_matrix(s, d, rr, cc);
      int col = rr * d + cc;
      for (int i = 0; i < n_ops; ++i) {
        ComplexMatrix fs = f_ops[i] * basis;
        ComplexMatrix l = fs - id * (fs.trace() / static_cast<double>(d));
        ComplexMatrix v = vectorize(l);
        for (int row = 0; row < d * d; ++row) constraint(i * d * d + row, col) = v(row, 0);
      }
    }
  }

  std::vector<ComplexMatrix> basis = null_space(constraint, tol);
  if (basis.empty()) return std::nullopt;

  auto coeffs_for = [&](const ComplexMatrix& sol) {
    std::vector<Complex> c(n_ops);
    for (int i = 0; i < n_ops; ++i)
      c[i] = (f_ops[i] * sol).trace() / static_cast<double>(d);
    return c;
  };

  // Deterministic search: basis vectors, pairwise sums, and pairwise
  // i-weighted sums, scored by |c|_inf at unit Frobenius norm.
  std::vector<ComplexMatrix> candidates;
  for (const auto& v : basis) candidates.push_back(v);
  for (size_t a = 0; a < basis.size(); ++a)
    for (size_t b = a + 1; b < basis.size(); ++b) {
      candidates.push_back(basis[a] + basis[b]);
      candidates.push_back(basis[a] + basis[b] * Complex(0.0, 1.0));
    }

  double best_score = 0.0;
  ComplexMatrix best;
  for (const auto& cand : candidates) {
    double n = cand.frobenius_norm();
    if (n < 1e-12) continue;
    ComplexMatrix sol = unvectorize(cand * Complex(1.0 / n, 0.0), s, d);
    double score = 0.0;
    for (const auto& c : coeffs_for(sol)) score = std::max(score, std::abs(c));
    if (score > best_score) {
      best_score = score;
      best = sol;
    }
  }

  double f_scale = 1.0;
  for (const auto& f : f_ops) f_scale = std::max(f_scale, f.frobenius_norm());
  if (best_score <= kNonzeroCoeffFloor * f_scale) return std::nullopt;

  ConditionDWitness w;
  w.s_star = best;
  w.r_star = ComplexMatrix::identity(d);
  w.coeffs = coeffs_for(best);
  return w;
}

std::vector<ComplexMatrix> reduce_full_output_rank(const Subchannel& noise, int d) {
  ComplexMatrix image = noise.apply(ComplexMatrix::identity(noise.in_dim()));
  Eigh e = eigh(image, 1e-7);
  double lmax = e.eigenvalues.empty() ? 0.0 : e.eigenvalues.front();
  int rank = 0;
  for (double lam : e.eigenvalues)
    if (lam > kRankCutoff * std::max(lmax, 0.0)) ++rank;
  if (rank != d)
    throw std::invalid_argument("reduce_full_output_rank: rank(E(1)) = " + std::to_string(rank) +
                                ", expected " + std::to_string(d));
  ComplexMatrix v_pi(noise.out_dim(), d);
  for (int j = 0; j < d; ++j) v_pi.set_block(0, j, e.vectors.column(j));
  std::vector<ComplexMatrix> f_ops;
  f_ops.reserve(noise.kraus().size());
  for (const auto& k : noise.kraus()) f_ops.push_back(v_pi.adjoint() * k);
  return f_ops;
}

bool kl_check(const Subchannel& noise, const ComplexMatrix& s_iso, double tol) {
  require(s_iso.rows() == noise.in_dim(), "kl_check: isometry shape");
  ComplexMatrix gram = s_iso.adjoint() * s_iso;
  require(approx_equal(gram, ComplexMatrix::identity(s_iso.cols()), 1e-6),
          "kl_check: S is not an isometry");
  for (const auto& ej : noise.kraus()) {
    ComplexMatrix left = s_iso.adjoint() * ej.adjoint();
    for (const auto& ei : noise.kraus()) {
      if (!prop_to_identity(left * ei * s_iso, tol).ok) return false;
    }
  }
  return true;
}

Scheme realization_shift(const Subchannel& noise, const Scheme& scheme, double tol) {
  ComplexMatrix s_op = scheme.encoder.kraus_sum();
  Eigh e = eigh(s_op, 1e-6);
  if (e.eigenvalues.empty() || e.eigenvalues.back() <= 1e3 * tol)
    throw std::runtime_error(
        "realization_shift: encoder normalization is singular, inconsistent with p > 0");
  std::vector<Complex> inv_sqrt(e.eigenvalues.size()), sqrt_v(e.eigenvalues.size());
  for (size_t i = 0; i < e.eigenvalues.size(); ++i) {
    sqrt_v[i] = std::sqrt(e.eigenvalues[i]);
    inv_sqrt[i] = 1.0 / std::sqrt(e.eigenvalues[i]);
  }
  ComplexMatrix s_half = e.vectors * ComplexMatrix::diagonal(sqrt_v) * e.vectors.adjoint();
  ComplexMatrix s_inv_half = e.vectors * ComplexMatrix::diagonal(inv_sqrt) * e.vectors.adjoint();

  std::vector<ComplexMatrix> enc_kraus, rec_kraus;
  for (const auto& k : scheme.encoder.kraus()) enc_kraus.push_back(k * s_inv_half);
  for (const auto& l : scheme.recovery.kraus()) rec_kraus.push_back(s_half * l);
  Subchannel enc = Subchannel::make(std::move(enc_kraus), 1e-7);
  Subchannel rec = Subchannel::make(std::move(rec_kraus), 1e-7);
  return make_verified_scheme(noise, enc, rec, std::max(tol, 1e-8));
}

Subchannel flagged_decoder(const Subchannel& recovery) {
  const int d = recovery.out_dim();
  const int s = recovery.in_dim();
  // Embeddings X -> X (x) C^2 tagging the flag qubit.
  ComplexMatrix tag0(2 * d, d), tag1(2 * d, d);
  for (int x = 0; x < d; ++x) {
    tag0(2 * x, x) = 1.0;
    tag1(2 * x + 1, x) = 1.0;
  }
  std::vector<ComplexMatrix> ks;
  for (const auto& l : recovery.kraus()) ks.push_back(tag0 * l);

  ComplexMatrix leftover = ComplexMatrix::identity(s) - recovery.kraus_sum();
  Eigh e = eigh(leftover, 1e-6);
  for (size_t m = 0; m < e.eigenvalues.size(); ++m) {
    double mu = e.eigenvalues[m];
    if (mu <= 1e-12) continue;
    ComplexMatrix bra_v = e.vectors.column(static_cast<int>(m)).adjoint();
    Complex w(std::sqrt(mu / d), 0.0);
    for (int b = 0; b < d; ++b)
      ks.push_back(tag1 * (ComplexMatrix::basis_vector(d, b) * bra_v) * w);
  }
  return Subchannel::make(std::move(ks), 1e-7);
}

Subchannel average_channel(const Ensemble& ensemble) {
  require(!ensemble.empty(), "average_channel: empty ensemble");
  double total = 0.0;
  const int in = ensemble.front().second.in_dim();
  const int out = ensemble.front().second.out_dim();
  ComplexMatrix j(out * in, out * in);
  for (const auto& [w, member] : ensemble) {
    require(w > 0.0, "average_channel: weights must be positive");
    require(member.in_dim() == in && member.out_dim() == out,
            "average_channel: mixed dimensions");
    total += w;
    j = j + choi(member).matrix * Complex(w, 0.0);
  }
  require(std::abs(total - 1.0) <= 1e-9, "average_channel: weights must sum to 1");
  return canonical_kraus(ChoiOperator{std::move(j), in, out});
}

EnsembleReport check_ensemble(const Ensemble& ensemble, const Scheme& scheme, double tol) {
  Subchannel avg = average_channel(ensemble);
  VerifyResult avg_res = verify_scheme(avg, scheme, tol);
  if (!avg_res.ok || avg_res.p <= 0.0)
    throw std::runtime_error("check_ensemble: scheme does not correct the average channel");
  EnsembleReport rep;
  rep.p_average = avg_res.p;
  for (const auto& [w, member] : ensemble) {
    (void)w;
    VerifyResult r = verify_scheme(member, scheme, tol);
    if (!r.ok)
      throw std::runtime_error(
          "check_ensemble: member fails proportionality, ensemble is inconsistent (residual " +
          std::to_string(r.residual) + ")");
    rep.member_p.push_back(r.p);
  }
  return rep;
}

}  // namespace pqec
