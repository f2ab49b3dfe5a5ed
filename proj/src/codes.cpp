#include "pqec/codes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pqec {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// (<i| (x) 1_2): 2x4 selector of the first-qubit-i sector.
ComplexMatrix sector_bra(int i) {
  ComplexMatrix m(2, 4);
  m(0, 2 * i) = 1.0;
  m(1, 2 * i + 1) = 1.0;
  return m;
}

// (|i> (x) 1_2): 4x2 embedding into the first-qubit-i sector.
ComplexMatrix sector_ket(int i) { return sector_bra(i).adjoint(); }

void require_effect(const ComplexMatrix& r_op, const char* who) {
  Eigh e = eigh(r_op, 1e-6);
  if (e.eigenvalues.back() < -1e-7 || e.eigenvalues.front() > 1.0 + 1e-7)
    throw std::invalid_argument(std::string(who) + ": R operator not in [0, 1]");
}

Complex det2(const ComplexMatrix& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

// Solves the 2x2 system m b = rhs.
ComplexMatrix solve2(const ComplexMatrix& m, const ComplexMatrix& rhs) {
  Complex det = det2(m);
  if (std::abs(det) < 1e-14)
    throw std::runtime_error("singular 2x2 system in witness construction");
  ComplexMatrix b(2, 1);
  b(0, 0) = (m(1, 1) * rhs(0, 0) - m(0, 1) * rhs(1, 0)) / det;
  b(1, 0) = (m(0, 0) * rhs(1, 0) - m(1, 0) * rhs(0, 0)) / det;
  return b;
}

}  // namespace

ComplexMatrix magic_unitary() {
  const double s = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  return ComplexMatrix{{s, 0, 0, s * i},
                       {0, s * i, s, 0},
                       {0, s * i, -s, 0},
                       {s, 0, 0, -s * i}};
}

ComplexMatrix magic_r_operator(const MagicFamilyParams& params) {
  for (double l : params.lambda)
    require(l > 0.0 && l <= 1.0, "magic family: lambda entries must lie in (0, 1]");
  ComplexMatrix u = magic_unitary();
  std::vector<Complex> d(params.lambda.begin(), params.lambda.end());
  return u * ComplexMatrix::diagonal(d) * u.adjoint();
}

std::pair<double, double> magic_p0_p1(const MagicFamilyParams& params) {
  const auto& l = params.lambda;
  for (double v : l) require(v > 0.0 && v <= 1.0, "magic family: lambda entries must lie in (0, 1]");
  double tr_inv = 1.0 / l[0] + 1.0 / l[1] + 1.0 / l[2] + 1.0 / l[3];
  double term_a = std::abs(1.0 / l[0] - 1.0 / l[1] - 1.0 / l[2] + 1.0 / l[3]);
  double term_b = std::abs(std::abs(1.0 / l[0] - 1.0 / l[3]) - std::abs(1.0 / l[1] - 1.0 / l[2]));
  double p0 = 4.0 / tr_inv;
  double p1 = 4.0 / (tr_inv + std::min(term_a, term_b));
  return {p0, p1};
}

double magic_p1_oracle(const MagicFamilyParams& params, int n_theta, int n_phi) {
  require(n_theta >= 2 && n_phi >= 1, "magic_p1_oracle: grid too small");
  ComplexMatrix u = magic_unitary();
  std::vector<Complex> dinv(4);
  for (int i = 0; i < 4; ++i) dinv[i] = 1.0 / params.lambda[i];
  ComplexMatrix r_inv = u * ComplexMatrix::diagonal(dinv) * u.adjoint();
  // 2x2 blocks of R^-1 in the (first qubit) block structure.
  ComplexMatrix b00 = r_inv.block(0, 0, 2, 2), b01 = r_inv.block(0, 2, 2, 2);
  ComplexMatrix b10 = r_inv.block(2, 0, 2, 2), b11 = r_inv.block(2, 2, 2, 2);

  double best = 0.0;
  for (int kt = 0; kt < n_theta; ++kt) {
    double theta = M_PI * kt / (n_theta - 1);
    double c = std::cos(theta / 2), s = std::sin(theta / 2);
    for (int kp = 0; kp < n_phi; ++kp) {
      double phi = 2.0 * M_PI * kp / n_phi;
      Complex a0(c, 0.0);
      Complex a1 = std::polar(s, phi);
      // (<psi| (x) 1) R^-1 (|psi> (x) 1)
      ComplexMatrix m = b00 * std::norm(a0) + b11 * std::norm(a1) +
                        b01 * (std::conj(a0) * a1) + b10 * (std::conj(a1) * a0);
      double half_tr = 0.5 * (m(0, 0).real() + m(1, 1).real());
      double gap = 0.5 * (m(0, 0).real() - m(1, 1).real());
      double lmax = half_tr + std::sqrt(gap * gap + std::norm(m(0, 1)));
      best = std::max(best, 1.0 / lmax);
    }
  }
  return best;
}

Subchannel er_channel(const ComplexMatrix& r_op, double tol) {
  require(r_op.is_square() && r_op.rows() == 4, "er_channel: R must be 4x4");
  require_effect(r_op, "er_channel");
  ComplexMatrix sqrt_r = matrix_sqrt(r_op, 1e-6);

  std::vector<ComplexMatrix> kraus;
  for (int i = 0; i < 2; ++i) kraus.push_back(sector_ket(0) * sector_bra(i) * sqrt_r);

  ComplexMatrix leftover = ComplexMatrix::identity(4) - r_op;
  Eigh e = eigh(leftover, 1e-6);
  for (size_t m = 0; m < e.eigenvalues.size(); ++m) {
    double mu = e.eigenvalues[m];
    if (mu <= 1e-12) continue;
    ComplexMatrix bra_v = e.vectors.column(static_cast<int>(m)).adjoint();
    Complex w(std::sqrt(mu / 2.0), 0.0);
    for (int b = 0; b < 2; ++b)
      kraus.push_back((ComplexMatrix::basis_vector(4, 2 + b) * bra_v) * w);
  }
  Subchannel out = Subchannel::make(std::move(kraus), std::max(tol, 1e-8));
  if (!out.is_trace_preserving(1e-8))
    throw std::runtime_error("er_channel: construction is not trace preserving");
  return out;
}

Scheme er_optimal_scheme(const ComplexMatrix& r_op, const ComplexMatrix& p_weight, double tol) {
  require(r_op.is_square() && r_op.rows() == 4, "er_optimal_scheme: R must be 4x4");
  require(p_weight.is_square() && p_weight.rows() == 2, "er_optimal_scheme: P must be 2x2");
  require_effect(r_op, "er_optimal_scheme");

  Eigh er = eigh(r_op, 1e-6);
  double lmax = er.eigenvalues.front();
  std::vector<Complex> inv(4, Complex(0, 0)), inv_sqrt(4, Complex(0, 0));
  ComplexMatrix support(4, 4);
  for (int k = 0; k < 4; ++k) {
    if (er.eigenvalues[k] > kRankCutoff * lmax) {
      inv[k] = 1.0 / er.eigenvalues[k];
      inv_sqrt[k] = 1.0 / std::sqrt(er.eigenvalues[k]);
      ComplexMatrix v = er.vectors.column(k);
      support = support + v * v.adjoint();
    }
  }
  ComplexMatrix r_inv = er.vectors * ComplexMatrix::diagonal(inv) * er.vectors.adjoint();
  ComplexMatrix sqrt_r_inv = er.vectors * ComplexMatrix::diagonal(inv_sqrt) * er.vectors.adjoint();

  Eigh ep = eigh(p_weight, 1e-7);
  if (ep.eigenvalues.back() < -1e-9)
    throw std::invalid_argument("er_optimal_scheme: P is not PSD");

  // Constraint 1: tr_1(R^-1 (P (x) 1)) <= 1.
  ComplexMatrix weighted = partial_trace(r_inv * kron(p_weight, ComplexMatrix::identity(2)), 1, 2, 2);
  Eigh ew = eigh(weighted, 1e-6);
  if (ew.eigenvalues.front() > 1.0 + 1e-7)
    throw std::invalid_argument(
        "er_optimal_scheme: trace constraint violated, tr_1(R^-1 (P (x) 1)) has eigenvalue " +
        std::to_string(ew.eigenvalues.front()));

  // Constraint 2: Pi_R (P (x) X) Pi_R = P (x) X on a basis of X.
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      ComplexMatrix t = kron(p_weight, ComplexMatrix::basis_matrix(2, 2, a, b));
      double dev = (support * t * support - t).frobenius_norm();
      if (dev > 1e-7 * std::max(1.0, t.frobenius_norm()))
        throw std::invalid_argument(
            "er_optimal_scheme: support constraint violated on basis element (" +
            std::to_string(a) + "," + std::to_string(b) + "), deviation " + std::to_string(dev));
    }

  std::vector<ComplexMatrix> enc_kraus;
  for (int k = 0; k < 2; ++k) {
    double pk = ep.eigenvalues[k];
    if (pk <= 1e-12) continue;
    ComplexMatrix vk = ep.vectors.column(k);
    enc_kraus.push_back(sqrt_r_inv * kron(vk, ComplexMatrix::identity(2)) *
                        Complex(std::sqrt(pk), 0.0));
  }
  require(!enc_kraus.empty(), "er_optimal_scheme: P is zero");
  Subchannel encoder = Subchannel::make(std::move(enc_kraus), 1e-7);
  Subchannel recovery = Subchannel::make({sector_bra(0)}, 1e-7);

  Scheme scheme = make_verified_scheme(er_channel(r_op), encoder, recovery, std::max(tol, 1e-8));
  double expected = p_weight.trace().real();
  if (std::abs(scheme.success_prob - expected) > 1e-8 * std::max(1.0, expected))
    throw std::runtime_error("er_optimal_scheme: verified p " +
                             std::to_string(scheme.success_prob) + " differs from tr(P) " +
                             std::to_string(expected));
  return scheme;
}

namespace {

struct JointVectors {
  // x_i = E0 W|i>, y_i = E1 W|i> for the shared right factor W of the joint
  // singular decomposition; x's are mutually orthogonal, same for y's, and
  // |x_i|^2 + |y_i|^2 = 1.
  std::array<ComplexMatrix, 4> x, y;
  std::array<double, 4> nx, ny;
  ComplexMatrix w;
};

JointVectors joint_vectors(const ComplexMatrix& e0, const ComplexMatrix& e1) {
  JointVectors jv;
  Eigh w = eigh(e0.adjoint() * e0, 1e-7);
  jv.w = w.vectors;
  for (int i = 0; i < 4; ++i) {
    ComplexMatrix col = w.vectors.column(i);
    jv.x[i] = e0 * col;
    jv.y[i] = e1 * col;
    jv.nx[i] = jv.x[i].frobenius_norm();
    jv.ny[i] = jv.y[i].frobenius_norm();
  }
  return jv;
}

constexpr double kZeroVec = 1e-7;       // vectors live on the unit scale
constexpr double kIndepThreshold = 1e-9;  // on the normalized Gram determinant

}  // namespace

ConditionDWitness qubit_rank2_witness(const Subchannel& noise, double tol) {
  require(noise.in_dim() == 4 && noise.out_dim() == 4,
          "qubit_rank2_witness: noise must act on C^4");
  Subchannel canon = canonicalize(noise);
  if (canon.kraus().size() > 2)
    throw std::invalid_argument("qubit_rank2_witness: Choi rank " +
                                std::to_string(canon.kraus().size()) + " exceeds 2");
  ComplexMatrix e0 = canon.kraus()[0];
  ComplexMatrix e1 =
      canon.kraus().size() > 1 ? canon.kraus()[1] : ComplexMatrix::zero(4, 4);
  JointVectors jv = joint_vectors(e0, e1);

  ComplexMatrix s0vec(4, 1), s1vec(4, 1), r0(4, 1), r1(4, 1);

  std::vector<int> zero_y;
  for (int i = 0; i < 4; ++i)
    if (jv.ny[i] <= kZeroVec) zero_y.push_back(i);

  if (zero_y.size() >= 2) {
    // Two vanishing y's: the matching x's are orthonormal and E1 dies on them.
    int i0 = zero_y[0], i1 = zero_y[1];
    s0vec = ComplexMatrix::basis_vector(4, i0);
    s1vec = ComplexMatrix::basis_vector(4, i1);
    r0 = jv.x[i0];
    r1 = jv.x[i1];
  } else {
    // Look for the best linearly independent pair (x_i, y_i).
    int i3 = -1;
    double best_rel = 0.0;
    for (int i = 0; i < 4; ++i) {
      if (jv.nx[i] <= kZeroVec || jv.ny[i] <= kZeroVec) continue;
      double n2 = jv.nx[i] * jv.nx[i] * jv.ny[i] * jv.ny[i];
      double det = n2 - std::norm(inner(jv.x[i], jv.y[i]));
      double rel = det / n2;
      if (rel > best_rel) {
        best_rel = rel;
        i3 = i;
      }
    }

    if (i3 >= 0 && best_rel > kIndepThreshold) {
      std::array<int, 3> rest{};
      for (int i = 0, t = 0; i < 4; ++i)
        if (i != i3) rest[t++] = i;
      // a in the joint kernel of <y_i3|x_m> and <x_i3|y_m>.
      ComplexMatrix cons(2, 3);
      for (int m = 0; m < 3; ++m) {
        cons(0, m) = inner(jv.y[i3], jv.x[rest[m]]);
        cons(1, m) = inner(jv.x[i3], jv.y[rest[m]]);
      }
      auto ns = null_space(cons, 1e-10);
      require(!ns.empty(), "qubit_rank2_witness: empty orthogonality kernel");
      ComplexMatrix a = ns.front();

      ComplexMatrix xc(4, 1), yc(4, 1);
      s0vec = ComplexMatrix(4, 1);
      for (int m = 0; m < 3; ++m) {
        xc = xc + jv.x[rest[m]] * a(m, 0);
        yc = yc + jv.y[rest[m]] * a(m, 0);
        s0vec = s0vec + ComplexMatrix::basis_vector(4, rest[m]) * a(m, 0);
      }
      s1vec = ComplexMatrix::basis_vector(4, i3);
      r0 = xc.frobenius_norm() >= yc.frobenius_norm() ? xc : yc;

      ComplexMatrix gram(2, 2), rhs(2, 1);
      gram(0, 0) = inner(jv.x[i3], jv.x[i3]);
      gram(0, 1) = inner(jv.y[i3], jv.x[i3]);
      gram(1, 0) = inner(jv.x[i3], jv.y[i3]);
      gram(1, 1) = inner(jv.y[i3], jv.y[i3]);
      rhs(0, 0) = inner(r0, xc);
      rhs(1, 0) = inner(r0, yc);
      ComplexMatrix b = solve2(gram, rhs);
      r1 = jv.x[i3] * std::conj(b(0, 0)) + jv.y[i3] * std::conj(b(1, 0));
    } else {
      // Every pair is parallel and at most one y vanishes.
      int i3 = 0;
      for (int i = 1; i < 4; ++i)
        if (jv.ny[i] < jv.ny[i3]) i3 = i;
      std::array<int, 3> rest{};
      for (int i = 0, t = 0; i < 4; ++i)
        if (i != i3) rest[t++] = i;

      std::array<Complex, 3> m0, m1;
      for (int m = 0; m < 3; ++m) {
        m0[m] = inner(jv.y[rest[m]], jv.x[rest[m]]);
        m1[m] = inner(jv.y[rest[m]], jv.y[rest[m]]);
      }
      // Rank of the 2x3 matrix [m0; m1] decides the sub-case.
      int bj1 = -1, bj2 = -1;
      double best_det = 0.0;
      for (int j1 = 0; j1 < 3; ++j1)
        for (int j2 = j1 + 1; j2 < 3; ++j2) {
          double det = std::abs(m0[j1] * m1[j2] - m0[j2] * m1[j1]);
          if (det > best_det) {
            best_det = det;
            bj1 = j1;
            bj2 = j2;
          }
        }
      double scale = 0.0;
      for (int m = 0; m < 3; ++m) scale = std::max(scale, std::abs(m0[m]) + std::abs(m1[m]));

      if (best_det > 1e-10 * std::max(1e-12, scale * scale)) {
        int j0 = 3 - bj1 - bj2;
        ComplexMatrix sub(2, 2), rhs(2, 1);
        sub(0, 0) = m0[bj1];
        sub(0, 1) = m0[bj2];
        sub(1, 0) = m1[bj1];
        sub(1, 1) = m1[bj2];
        rhs(0, 0) = m0[j0];
        rhs(1, 0) = m1[j0];
        ComplexMatrix b = solve2(sub, rhs);
        s0vec = ComplexMatrix::basis_vector(4, rest[j0]);
        s1vec = ComplexMatrix::basis_vector(4, rest[bj1]) +
                ComplexMatrix::basis_vector(4, rest[bj2]);
        r0 = jv.y[rest[j0]];
        r1 = jv.y[rest[bj1]] * std::conj(b(0, 0)) + jv.y[rest[bj2]] * std::conj(b(1, 0));
      } else {
        // All three columns proportional.
        if (std::abs(m1[0]) < 1e-14)
          throw std::runtime_error(
              "qubit_rank2_witness: internal inconsistency, vanishing y norms in the "
              "parallel case");
        Complex ratio = m1[1] / m1[0];
        s0vec = ComplexMatrix::basis_vector(4, rest[0]);
        s1vec = ComplexMatrix::basis_vector(4, rest[1]);
        r0 = jv.y[rest[0]];
        r1 = jv.y[rest[1]] * (1.0 / ratio);
      }
    }
  }

  ConditionDWitness w;
  w.s_star = ComplexMatrix(4, 2);
  w.s_star.set_block(0, 0, jv.w * s0vec);
  w.s_star.set_block(0, 1, jv.w * s1vec);
  w.r_star = ComplexMatrix(2, 4);
  w.r_star.set_block(0, 0, r0.adjoint());
  w.r_star.set_block(1, 0, r1.adjoint());

  double max_c = 0.0;
  for (const auto& e : noise.kraus()) {
    PropResult pr = prop_to_identity(w.r_star * e * w.s_star, std::max(tol, 1e-8));
    w.coeffs.push_back(pr.coeff);
    max_c = std::max(max_c, std::abs(pr.coeff));
    if (!pr.ok)
      throw std::runtime_error(
          "qubit_rank2_witness: internal inconsistency, witness block deviates by " +
          std::to_string(pr.deviation));
  }
  if (max_c <= 1e-10)
    throw std::runtime_error("qubit_rank2_witness: internal inconsistency, all coefficients vanish");
  return w;
}

std::pair<QubitCodeCircuit, Scheme> qubit_code_circuit(const Subchannel& noise, double tol) {
  ConditionDWitness w = qubit_rank2_witness(noise, tol);

  ComplexMatrix q = w.s_star.adjoint() * w.s_star;
  Eigh eq = eigh(q, 1e-8);
  if (eq.eigenvalues.back() <= 1e-12)
    throw std::runtime_error("qubit_code_circuit: witness encoder is rank deficient");
  std::vector<Complex> sq(2), isq(2);
  for (int k = 0; k < 2; ++k) {
    sq[k] = std::sqrt(eq.eigenvalues[k]);
    isq[k] = 1.0 / std::sqrt(eq.eigenvalues[k]);
  }
  ComplexMatrix q_half = eq.vectors * ComplexMatrix::diagonal(sq) * eq.vectors.adjoint();
  ComplexMatrix q_inv_half = eq.vectors * ComplexMatrix::diagonal(isq) * eq.vectors.adjoint();

  ComplexMatrix s = w.s_star * q_inv_half;          // isometry
  ComplexMatrix r_raw = q_half * w.r_star;          // 2x4
  double n = r_raw.operator_norm();
  if (n <= 1e-14) throw std::runtime_error("qubit_code_circuit: recovery operator vanished");
  ComplexMatrix r = r_raw * Complex(1.0 / n, 0.0);

  Scheme scheme = make_verified_scheme(noise, Subchannel::make({s}, 1e-7),
                                       Subchannel::make({r}, 1e-7), std::max(tol, 1e-8));

  QubitCodeCircuit circ;
  circ.p = scheme.success_prob;
  circ.u_s = unitary_completion(4, {{0, s.column(0)}, {2, s.column(1)}}, 1e-6);

  // U_R maps the recovery row space onto |00>, |10>.
  Svd rs = svd(r);
  std::vector<std::pair<int, ComplexMatrix>> slots{{0, rs.v.column(0)}};
  if (rs.singular_values.size() > 1 && rs.singular_values[1] > 1e-9)
    slots.emplace_back(2, rs.v.column(1));
  ComplexMatrix u_r_dag = unitary_completion(4, slots, 1e-6);
  circ.u_r = u_r_dag.adjoint();

  ComplexMatrix emb(4, 2);  // 1_2 (x) |0>
  emb(0, 0) = 1.0;
  emb(2, 1) = 1.0;
  ComplexMatrix r_prime = r * u_r_dag * emb;

  // Dilation blocks rearranged onto the (data (x) ancilla) tensor layout.
  ComplexMatrix dil = unitary_dilation(r_prime, 1e-7);
  ComplexMatrix v_r(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) v_r(2 * a + i, 2 * b + j) = dil(2 * i + a, 2 * j + b);
  circ.v_r = v_r;

  // Slot equations.
  if ((circ.u_s * emb - s).frobenius_norm() > 1e-8)
    throw std::runtime_error("qubit_code_circuit: U_S slot equation violated");
  if ((emb.adjoint() * circ.v_r * emb - r_prime).frobenius_norm() > 1e-8)
    throw std::runtime_error("qubit_code_circuit: V_R corner equation violated");
  return {circ, scheme};
}

namespace {

struct SchurRec {
  ComplexMatrix s_cols;        // s x d
  ComplexMatrix r_rows;        // d x s
  std::vector<Complex> coeffs; // one per input diagonal
};

// Witness recursion over diagonal vectors restricted to `active`.
SchurRec schur_recurse(const std::vector<std::vector<Complex>>& vecs,
                       const std::vector<int>& active, int d, int s) {
  const int n = static_cast<int>(vecs.size());
  require(!active.empty(), "schur recursion ran out of active coordinates");

  if (d == 1) {
    int bj = -1;
    double best = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j : active) {
        double mag = std::abs(vecs[i][j]);
        if (mag > best) {
          best = mag;
          bj = j;
        }
      }
    if (best <= 1e-12)
      throw std::runtime_error("schur_code: all diagonals vanish on the active set");
    SchurRec rec;
    rec.s_cols = ComplexMatrix(s, 1);
    for (int j : active) rec.s_cols(j, 0) = 1.0;  // flat superposition
    rec.r_rows = ComplexMatrix(1, s);
    rec.r_rows(0, bj) = 1.0;
    rec.coeffs.resize(n);
    for (int i = 0; i < n; ++i) rec.coeffs[i] = vecs[i][bj];
    return rec;
  }

  const int na = static_cast<int>(active.size());
  ComplexMatrix emat(na, n);
  for (int a = 0; a < na; ++a)
    for (int i = 0; i < n; ++i) emat(a, i) = vecs[i][active[a]];
  Svd sv = svd(emat);
  double smax = sv.singular_values.empty() ? 0.0 : sv.singular_values.front();
  if (smax <= 1e-12)
    throw std::runtime_error("schur_code: all diagonals vanish on the active set");
  int rp = 0;
  for (double sig : sv.singular_values)
    if (sig > kRankCutoff * smax) ++rp;
  if (rp * (d - 1) >= na)
    throw std::runtime_error("schur_code: local rank " + std::to_string(rp) +
                             " too large for " + std::to_string(na) +
                             " active coordinates at d = " + std::to_string(d));

  // e_i|_active = sum_m W(i,m) f_m with f_m the left singular columns.
  ComplexMatrix w_mix(n, rp);
  for (int i = 0; i < n; ++i)
    for (int m = 0; m < rp; ++m)
      w_mix(i, m) = sv.singular_values[m] * std::conj(sv.v(i, m));

  // Greedy max-volume selection of rp active coordinates on which the f_m
  // block is invertible.
  std::vector<ComplexMatrix> ortho;
  std::vector<bool> taken(na, false);
  for (int t = 0; t < rp; ++t) {
    int best_a = -1;
    double best_norm = -1.0;
    for (int a = 0; a < na; ++a) {
      if (taken[a]) continue;
      ComplexMatrix col(rp, 1);
      for (int m = 0; m < rp; ++m) col(m, 0) = sv.u(a, m);
      for (const auto& b : ortho) col = col - b * inner(b, col);
      double nn = col.frobenius_norm();
      if (nn > best_norm + 1e-15) {
        best_norm = nn;
        best_a = a;
      }
    }
    require(best_a >= 0 && best_norm > 1e-10, "schur_code: coordinate selection degenerated");
    taken[best_a] = true;
    ComplexMatrix col(rp, 1);
    for (int m = 0; m < rp; ++m) col(m, 0) = sv.u(best_a, m);
    for (const auto& b : ortho) col = col - b * inner(b, col);
    ortho.push_back(col * Complex(1.0 / col.frobenius_norm(), 0.0));
  }
  std::vector<int> picked, picked_idx, remaining;
  for (int a = 0; a < na; ++a) {
    if (taken[a]) {
      picked.push_back(active[a]);
      picked_idx.push_back(a);
    } else {
      remaining.push_back(active[a]);
    }
  }

  SchurRec child = schur_recurse(vecs, remaining, d - 1, s);

  // gamma solves W gamma = child coefficients (consistent by construction).
  ComplexMatrix cvec(n, 1);
  for (int i = 0; i < n; ++i) cvec(i, 0) = child.coeffs[i];
  ComplexMatrix gamma = pseudo_inverse(w_mix, 1e-10) * cvec;

  // New recovery row rho on the picked block: sum_j rho_j f_m(j) = gamma_m
  // (the flat superposition puts weight 1 on every picked coordinate).
  ComplexMatrix t_mat(rp, rp);
  for (int m = 0; m < rp; ++m)
    for (int jj = 0; jj < rp; ++jj) t_mat(m, jj) = sv.u(picked_idx[jj], m);
  ComplexMatrix rho = pseudo_inverse(t_mat, 1e-12) * gamma;

  SchurRec rec;
  rec.s_cols = ComplexMatrix(s, d);
  rec.s_cols.set_block(0, 0, child.s_cols);
  for (int j : picked) rec.s_cols(j, d - 1) = 1.0;
  rec.r_rows = ComplexMatrix(d, s);
  rec.r_rows.set_block(0, 0, child.r_rows);
  for (int jj = 0; jj < rp; ++jj) rec.r_rows(d - 1, picked[jj]) = rho(jj, 0);
  rec.coeffs = child.coeffs;
  return rec;
}

}  // namespace

ConditionDWitness schur_code(const Subchannel& noise, int d, double tol) {
  require(d >= 1, "schur_code: target dimension must be positive");
  require(noise.in_dim() == noise.out_dim(), "schur_code: noise must be square");
  require(is_schur(noise, 1e-8), "schur_code: Kraus operators must be diagonal");
  const int s = noise.in_dim();
  int r = choi_rank(noise);
  if (d > 1 && !(static_cast<double>(r) < static_cast<double>(s) / (d - 1)))
    throw std::invalid_argument("schur_code: precondition unmet, Choi rank " + std::to_string(r) +
                                " is not below dim(Y)/(d-1) = " + std::to_string(s) + "/" +
                                std::to_string(d - 1));

  std::vector<std::vector<Complex>> vecs;
  for (const auto& k : noise.kraus()) {
    std::vector<Complex> v(s);
    for (int j = 0; j < s; ++j) v[j] = k(j, j);
    vecs.push_back(std::move(v));
  }
  std::vector<int> active(s);
  std::iota(active.begin(), active.end(), 0);
  SchurRec rec = schur_recurse(vecs, active, d, s);

  ConditionDWitness w;
  w.s_star = rec.s_cols;
  w.r_star = rec.r_rows;
  double max_c = 0.0;
  for (size_t i = 0; i < noise.kraus().size(); ++i) {
    PropResult pr =
        prop_to_identity(w.r_star * noise.kraus()[i] * w.s_star, std::max(tol, 1e-8));
    if (!pr.ok)
      throw std::runtime_error("schur_code: construction failed, block " + std::to_string(i) +
                               " deviates by " + std::to_string(pr.deviation));
    w.coeffs.push_back(pr.coeff);
    max_c = std::max(max_c, std::abs(pr.coeff));
  }
  if (max_c <= 1e-10)
    throw std::runtime_error("schur_code: construction failed, all coefficients vanish");
  return w;
}

std::pair<Subchannel, Scheme> rank_saturating_channel(RankKind kind, int d, int s) {
  require(d >= 1 && s >= d, "rank_saturating_channel: need 1 <= d <= s");
  ComplexMatrix embed(s, d);  // S = sum |j>_Y <j|_X
  for (int j = 0; j < d; ++j) embed(j, j) = 1.0;

  std::vector<ComplexMatrix> kraus;
  Subchannel encoder = Subchannel::make({embed}, 1e-9);

  if (kind == RankKind::xi1) {
    const int k = s / d;
    const double w = 1.0 / std::sqrt(static_cast<double>(k));
    std::vector<ComplexMatrix> shifts;
    for (int i = 0; i < k; ++i) {
      ComplexMatrix e(s, s);
      for (int j = 0; j < d; ++j) e(j + i * d, j) = w;
      shifts.push_back(e);
      kraus.push_back(e);
    }
    // tr((1 - Pi) Y) * I/s on the complement of the shift images' domain.
    const double dw = 1.0 / std::sqrt(static_cast<double>(s));
    for (int m = 0; m < s; ++m)
      for (int j = d; j < s; ++j)
        kraus.push_back(ComplexMatrix::basis_matrix(s, s, m, j) * Complex(dw, 0.0));
    Subchannel noise = Subchannel::make(std::move(kraus), 1e-9);

    std::vector<ComplexMatrix> rec_kraus;
    const Complex rk(std::sqrt(static_cast<double>(k)), 0.0);
    for (const auto& e : shifts) rec_kraus.push_back(embed.adjoint() * e.adjoint() * rk);
    Subchannel recovery = Subchannel::make(std::move(rec_kraus), 1e-9);
    Scheme scheme = make_verified_scheme(noise, encoder, recovery, 1e-8);
    return {noise, scheme};
  }

  const int t = s - d + 1;
  const double wt = 1.0 / std::sqrt(static_cast<double>(t));
  ComplexMatrix pi(s, s);
  for (int j = 0; j < d; ++j) pi(j, j) = 1.0;
  kraus.push_back(pi * Complex(wt, 0.0));
  for (int m = d; m < s; ++m)
    for (int j = 0; j < d; ++j)
      kraus.push_back(ComplexMatrix::basis_matrix(s, s, m, j) * Complex(wt, 0.0));
  const double dw = 1.0 / std::sqrt(static_cast<double>(s));
  for (int m = 0; m < s; ++m)
    for (int j = d; j < s; ++j)
      kraus.push_back(ComplexMatrix::basis_matrix(s, s, m, j) * Complex(dw, 0.0));
  Subchannel noise = Subchannel::make(std::move(kraus), 1e-9);
  Subchannel recovery = Subchannel::make({embed.adjoint()}, 1e-9);
  Scheme scheme = make_verified_scheme(noise, encoder, recovery, 1e-8);
  return {noise, scheme};
}

Subchannel rank_bound_counterexample(RankKind kind, int d, int s) {
  require(d >= 2 && s >= d, "rank_bound_counterexample: need 2 <= d <= s");
  const int block = d - 1;
  const int k = (s + block - 1) / block;
  const int pad = k * block - s;  // trailing block loses this many slots

  std::vector<std::vector<Complex>> blocks(k, std::vector<Complex>(s, Complex(0, 0)));
  for (int i = 0; i < k; ++i) {
    int width = (i == k - 1) ? block - pad : block;
    for (int j = 0; j < width; ++j) blocks[i][j + block * i] = 1.0;
  }
  if (kind == RankKind::xi) return schur_channel(blocks);

  // Perfect-correction counterexample: mix the blocks through a state family
  // whose projectors span the full operator space.
  const int l = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(k))));
  std::vector<ComplexMatrix> family;
  for (int j = 0; j < l; ++j) family.push_back(ComplexMatrix::basis_vector(l, j));
  const Complex half(1.0 / std::sqrt(2.0), 0.0);
  const Complex ihalf(0.0, 1.0 / std::sqrt(2.0));
  for (int a = 0; a < l; ++a)
    for (int b = a + 1; b < l; ++b)
      family.push_back(ComplexMatrix::basis_vector(l, a) * half +
                       ComplexMatrix::basis_vector(l, b) * half);
  for (int a = 0; a < l; ++a)
    for (int b = a + 1; b < l; ++b)
      family.push_back(ComplexMatrix::basis_vector(l, a) * half +
                       ComplexMatrix::basis_vector(l, b) * ihalf);

  // The l*l projectors must span M(C^l).
  ComplexMatrix span(l * l, static_cast<int>(family.size()));
  for (size_t a = 0; a < family.size(); ++a) {
    ComplexMatrix proj = vectorize(family[a] * family[a].adjoint());
    span.set_block(0, static_cast<int>(a), proj);
  }
  if (matrix_rank(span, 1e-9) != l * l)
    throw std::logic_error("rank_bound_counterexample: state family does not span");

  std::vector<std::vector<Complex>> mixed(l, std::vector<Complex>(s, Complex(0, 0)));
  for (int i = 0; i < l; ++i)
    for (int a = 0; a < k; ++a) {
      Complex coeff = std::conj(family[a](i, 0));
      for (int j = 0; j < s; ++j) mixed[i][j] += coeff * blocks[a][j];
    }
  return schur_channel(mixed);
}

}  // namespace pqec
