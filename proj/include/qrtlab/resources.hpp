// Copyright 2026 The qrtlab Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "qrtlab/clifford.hpp"
#include "qrtlab/haar.hpp"
#include "qrtlab/parallel.hpp"
#include "qrtlab/pauli.hpp"
#include "qrtlab/qcore.hpp"

namespace qrtlab {

enum class RgpMode { Exact, MonteCarlo };

struct RgpValue {
  double value = 0.0;
  double std_err = 0.0;
};

inline void require_unitary_input(const DenseOperator& u) {
  if (!is_unitary(u.matrix(), tol::kUnitaryInput)) throw DomainError("RGP evaluation needs a unitary input");
}

// ---------------------------------------------------------------------------
// Z2 asymmetry

// <Z_0> and <Z_1>: weights of the even and odd parity sectors.
inline std::array<double, 2> sector_weights(const Vec& a) {
  std::array<double, 2> w{0.0, 0.0};
  for (Index x = 0; x < a.size(); ++x) w[parity(x)] += std::norm(a(x));
  return w;
}

inline double linear_asymmetry(const StateVector& s) {
  const auto w = sector_weights(s.amps());
  return 1.0 - w[0] * w[0] - w[1] * w[1];
}

// Tr(Z_0^{(x)2} Pi^(2)) = D0 (D0 + 1) / 2 with D0 = 2^{N-1}.
inline double z2_partition_function(int n) {
  const double d0 = static_cast<double>(pow2(n - 1));
  return 0.5 * d0 * (d0 + 1.0);
}

inline double haar_agp(int n) {
  const double d = static_cast<double>(pow2(n));
  return d / (2.0 * (d + 1.0));
}

// OTOC form: 1 - (1/4Z) sum_{s1,s2} [Tr(Z_s1 U Z_s2 U^dag)^2 + Tr((Z_s1 U Z_s2 U^dag)^2)].
// With W = Z_s1 U Z_s2 the traces are ||W||_F^2 and ||W W^dag||_F^2.
inline double agp_of_matrix(const Mat& u, int n) {
  const auto s0 = sector_indices(n, 0);
  const auto s1 = sector_indices(n, 1);
  const Index h = static_cast<Index>(s0.size());
  const std::vector<Index>* sec[2] = {&s0, &s1};
  double total = 0.0;
  Mat blk(h, h), g(h, h);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (Index j = 0; j < h; ++j)
        for (Index i = 0; i < h; ++i) blk(i, j) = u((*sec[a])[i], (*sec[b])[j]);
      const double two = blk.squaredNorm();
      g.setZero();
      g.selfadjointView<Eigen::Lower>().rankUpdate(blk);
      double four = 0.0;
      for (Index j = 0; j < h; ++j) {
        four += std::norm(g(j, j));
        for (Index i = j + 1; i < h; ++i) four += 2.0 * std::norm(g(i, j));
      }
      total += two * two + four;
    }
  }
  return 1.0 - total / (4.0 * z2_partition_function(n));
}

inline double agp_exact(const DenseOperator& u) {
  require(u.replica_order() == 1, "agp_exact needs a physical-space operator");
  const int n = u.n_qubits();
  require(n >= 1 && n <= guard::kMaxQubits, "agp_exact supports N <= 12");
  require_unitary_input(u);
  return agp_of_matrix(u.matrix(), n);
}

inline RgpValue agp_monte_carlo(const DenseOperator& u, std::size_t n_samples, const SeededRng& rng, int workers = 1) {
  const int n = u.n_qubits();
  auto vals = parallel_map<double>(n_samples, workers, [&](std::size_t i) {
    SeededRng r = rng.derive(i);
    const StateVector psi = sample_z2_free_state(n, r);
    return linear_asymmetry(apply_unitary(psi, u));
  });
  const auto st = mean_stat(vals);
  return {st.mean, st.std_err};
}

// ---------------------------------------------------------------------------
// Non-stabilizerness

inline void walsh_hadamard(Vec& f) {
  const Index n = f.size();
  for (Index len = 1; len < n; len <<= 1)
    for (Index i = 0; i < n; i += 2 * len)
      for (Index j = i; j < i + len; ++j) {
        const cplx a = f(j), b = f(j + len);
        f(j) = a + b;
        f(j + len) = a - b;
      }
}

// sum over all 4^N Pauli strings of <P>^4. For each X-part x the Z-part sum
// is a Walsh-Hadamard transform of conj(psi_{k^x}) psi_k.
inline double pauli_fourth_power_sum(const StateVector& s, int workers = 1) {
  const Vec& a = s.amps();
  const Index d = a.size();
  auto per_x = parallel_map<double>(static_cast<std::size_t>(d), workers, [&](std::size_t xi) {
    const Index x = static_cast<Index>(xi);
    Vec f(d);
    for (Index k = 0; k < d; ++k) f(k) = std::conj(a(k ^ x)) * a(k);
    walsh_hadamard(f);
    double acc = 0.0;
    for (Index z = 0; z < d; ++z) {
      const double m2 = std::norm(f(z));
      acc += m2 * m2;
    }
    return acc;
  });
  return pairwise_sum(per_x.data(), per_x.size());
}

// m(psi) = 1 - 2^{-N} sum_P <P>^4.
inline double linear_stabilizer_entropy(const StateVector& s, int workers = 1) {
  require(s.n_qubits() <= guard::kMaxQubits, "linear_stabilizer_entropy supports N <= 12");
  return 1.0 - pauli_fourth_power_sum(s, workers) / static_cast<double>(s.dim());
}

// Tr(Q Pi^(4)) from the permutation sum: Tr(P^{(x)4} pi) factorizes over
// qubits and over the cycles of pi, and for a single qubit
// sum_p prod_cycles tr(p^len) = 2^{#cycles} (1 + 3 [all cycles even]).
inline double tr_q_pi(int n) {
  double total = 0.0;
  for (const auto& p : all_permutations(4)) {
    std::array<bool, 4> seen{};
    int cycles = 0;
    bool all_even = true;
    for (int s = 0; s < 4; ++s) {
      if (seen[s]) continue;
      int len = 0;
      for (int c = s; !seen[c]; c = p[c]) {
        seen[c] = true;
        ++len;
      }
      ++cycles;
      if (len % 2) all_even = false;
    }
    const double g = std::ldexp(1.0, cycles) * (all_even ? 4.0 : 1.0);
    total += std::pow(g, n);
  }
  return total / (24.0 * std::pow(4.0, n));
}

inline double tr_pi(Index d, int t) { return sym_dim(d, t); }

inline double haar_rgp_nonstab(int n) {
  static std::mutex mu;
  static std::map<int, double> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  const double d = static_cast<double>(pow2(n));
  const double v = 1.0 - d * tr_q_pi(n) / tr_pi(pow2(n), 4);
  cache.emplace(n, v);
  return v;
}

// Q = 4^{-N} sum_P P^{(x)4} as a dense operator on four replicas.
inline DenseOperator stabilizer_projector_q(int n) {
  const Index d = pow2(n);
  const Index dim = d * d * d * d;
  require_size(dim <= guard::kReplicaDim, "Q dimension exceeds guard");
  Mat q = Mat::Zero(dim, dim);
  const double w = 1.0 / static_cast<double>(d * d);
  for (Index x = 0; x < d; ++x)
    for (Index z = 0; z < d; ++z) {
      const cplx c4 = std::pow(i_pow(popcount(static_cast<std::uint64_t>(x & z))), 4);
      for (Index col = 0; col < dim; ++col) {
        Index row = 0;
        int sgn = 0;
        for (int r = 0; r < 4; ++r) {
          const Index k = (col / ipow(d, 3 - r)) % d;
          row = row * d + (k ^ x);
          sgn += popcount(static_cast<std::uint64_t>(k & z));
        }
        q(row, col) += w * c4 * ((sgn & 1) ? -1.0 : 1.0);
      }
    }
  return DenseOperator::hermitian(std::move(q), 4);
}

// rho_s = (1/D) Q Pi / Tr(Q Pi) + (1 - 1/D) Q_perp Pi / Tr(Q_perp Pi).
inline DenseOperator stabilizer_fourth_moment(int n) {
  const Index d = pow2(n);
  require_size(ipow(d, 4) <= guard::kReplicaDim, "stabilizer fourth moment exceeds guard");
  const Mat pi = permutation_projector(d, 4).matrix();
  const Mat qpi = stabilizer_projector_q(n).matrix() * pi;
  const double tq = qpi.trace().real();
  const double tp = pi.trace().real();
  const double D = static_cast<double>(d);
  Mat rho = (1.0 / D) * qpi / tq + (1.0 - 1.0 / D) * (pi - qpi) / (tp - tq);
  return DenseOperator::hermitian(std::move(rho), 4);
}

enum class MagicExactMethod { Auto, Dense, PauliPair };

// f(M) = Tr(M^{(x)4} Pi^(4)) from the cycle structure of S_4.
inline double sym4_trace(const Mat& m) {
  const cplx t1 = m.trace();
  const Mat m2 = m * m;
  const cplx t2 = m2.trace();
  const cplx t3 = (m2.cwiseProduct(m.transpose())).sum();
  const cplx t4 = (m2.cwiseProduct(m2.transpose())).sum();
  const cplx v = t1 * t1 * t1 * t1 + 6.0 * t2 * t1 * t1 + 3.0 * t2 * t2 + 8.0 * t3 * t1 + 6.0 * t4;
  return v.real() / 24.0;
}

// Tr[Q U^{(x)4} Q U^{dag(x)4} Pi] = D^{-4} sum_{P,P'} f(P U P' U^dag).
inline double tr_q_uqu_pi(const Mat& u, int n) {
  const Index d = pow2(n);
  double total = 0.0;
  Mat v(d, d), m(d, d);
  for (Index x2 = 0; x2 < d; ++x2)
    for (Index z2 = 0; z2 < d; ++z2) {
      const PauliString p2{n, static_cast<std::uint64_t>(x2), static_cast<std::uint64_t>(z2), 0};
      v = u * p2.dense() * u.adjoint();
      for (Index x = 0; x < d; ++x)
        for (Index z = 0; z < d; ++z) {
          const cplx c = i_pow(popcount(static_cast<std::uint64_t>(x & z)));
          for (Index r = 0; r < d; ++r) {
            const Index k = r ^ x;
            const double s = (popcount(static_cast<std::uint64_t>(k & z)) & 1) ? -1.0 : 1.0;
            m.row(r) = (c * s) * v.row(k);
          }
          total += sym4_trace(m);
        }
    }
  return total / static_cast<double>(d * d * d * d);
}

inline double nonstabilizing_power_exact(const Mat& u, int n, MagicExactMethod method = MagicExactMethod::Auto) {
  const Index d = pow2(n);
  const double D = static_cast<double>(d);
  if (method == MagicExactMethod::Auto) method = n <= 2 ? MagicExactMethod::Dense : MagicExactMethod::PauliPair;
  if (method == MagicExactMethod::Dense) {
    require_size(ipow(d, 4) <= guard::kReplicaDim, "dense replica path exceeds guard; use PauliPair");
    const Mat rho = stabilizer_fourth_moment(n).matrix();
    const Mat q = stabilizer_projector_q(n).matrix();
    const Mat x = conjugate_replicas(rho, u, 4);
    return 1.0 - D * (q.cwiseProduct(x.transpose())).sum().real();
  }
  require_size(n <= 4, "Pauli-pair exact path supports N <= 4");
  const double tq = tr_q_pi(n);
  const double tp = tr_pi(d, 4);
  const double alpha = 1.0 / (D * tq);
  const double beta = (1.0 - 1.0 / D) / (tp - tq);
  const double tr = (alpha - beta) * tr_q_uqu_pi(u, n) + beta * tq;
  return 1.0 - D * tr;
}

inline RgpValue nonstabilizing_power(const DenseOperator& u, RgpMode mode, std::size_t n_samples,
                                     const SeededRng& rng, int workers = 1) {
  require(u.replica_order() == 1, "nonstabilizing_power needs a physical-space operator");
  const int n = u.n_qubits();
  require_unitary_input(u);
  if (mode == RgpMode::Exact) {
    require_size(n <= 4, "exact non-stabilizing power requires N <= 4");
    return {nonstabilizing_power_exact(u.matrix(), n), 0.0};
  }
  require_size(n <= guard::kMaxQubits, "Monte-Carlo non-stabilizing power requires N <= 12");
  require(n_samples >= 2, "Monte-Carlo path needs at least two samples");
  auto vals = parallel_map<double>(n_samples, workers, [&](std::size_t i) {
    SeededRng r = rng.derive(i);
    const StateVector psi = sample_stabilizer_state(n, r);
    return linear_stabilizer_entropy(apply_unitary(psi, u));
  });
  const auto st = mean_stat(vals);
  return {st.mean, st.std_err};
}

// ---------------------------------------------------------------------------
// Entanglement (one-sided linear entropy across A|B)

inline double linear_entanglement(const StateVector& s, const Bipartition& part) {
  const Mat m = as_ab_matrix(s, part);
  const Mat rho_b = m.transpose() * m.conjugate();
  return 1.0 - rho_b.squaredNorm();
}

inline double haar_entangling_power(Index d_a, Index d_b) {
  const double a = static_cast<double>(d_a), b = static_cast<double>(d_b);
  return 1.0 - (a + b) / (a * b + 1.0);
}

// U in (A, B) ordering: row/col index a * d_B + b.
inline Mat reorder_ab(const Mat& u, const Bipartition& part) {
  const Index da = part.d_a(), db = part.d_b();
  Mat out(da * db, da * db);
  for (Index a2 = 0; a2 < da; ++a2)
    for (Index b2 = 0; b2 < db; ++b2) {
      const Index c = part.index(a2, b2);
      for (Index a1 = 0; a1 < da; ++a1)
        for (Index b1 = 0; b1 < db; ++b1) out(a1 * db + b1, a2 * db + b2) = u(part.index(a1, b1), c);
    }
  return out;
}

// 1 - Tr(U^{(x)2} rho_f U^{dag(x)2} S_BB') with rho_f the product-state second
// moment. Expanding rho_f in {1, S_A, S_B, S_A S_B} leaves two swap
// contractions, each a sum of Tr_B[Tr_A(U E U^dag) Tr_A(U E' U^dag)].
inline double entangling_power_exact(const Mat& u_in, const Bipartition& part) {
  const Index da = part.d_a(), db = part.d_b();
  const Mat u = reorder_ab(u_in, part);
  auto contract = [&](bool over_a) {
    const Index di = over_a ? da : db;  // index carried by E_ij
    const Index dk = over_a ? db : da;  // summed column index
    // blocks[i][alpha] : (beta, k) -> U[(alpha, beta), col(i, k)]
    std::vector<std::vector<Mat>> blocks(static_cast<std::size_t>(di), std::vector<Mat>(static_cast<std::size_t>(da)));
    for (Index i = 0; i < di; ++i)
      for (Index al = 0; al < da; ++al) {
        Mat b(db, dk);
        for (Index be = 0; be < db; ++be)
          for (Index k = 0; k < dk; ++k) {
            const Index col = over_a ? (i * db + k) : (k * db + i);
            b(be, k) = u(al * db + be, col);
          }
        blocks[i][al] = std::move(b);
      }
    std::vector<Mat> kmat(static_cast<std::size_t>(di * di), Mat::Zero(db, db));
    for (Index i = 0; i < di; ++i)
      for (Index j = 0; j < di; ++j)
        for (Index al = 0; al < da; ++al) kmat[i * di + j].noalias() += blocks[i][al] * blocks[j][al].adjoint();
    cplx t = 0.0;
    for (Index i = 0; i < di; ++i)
      for (Index j = 0; j < di; ++j) t += (kmat[i * di + j].cwiseProduct(kmat[j * di + i].transpose())).sum();
    return t.real();
  };
  const double ta = contract(true);
  const double tb = contract(false);
  const double a = static_cast<double>(da), b = static_cast<double>(db);
  return 1.0 - (a * a * b + ta + tb + a * b * b) / (a * (a + 1.0) * b * (b + 1.0));
}

inline StateVector sample_product_state(const Bipartition& part, SeededRng& rng) {
  const Vec pa = haar_vector(part.d_a(), rng);
  const Vec pb = haar_vector(part.d_b(), rng);
  Vec v(pow2(part.n()));
  for (Index a = 0; a < part.d_a(); ++a)
    for (Index b = 0; b < part.d_b(); ++b) v(part.index(a, b)) = pa(a) * pb(b);
  return StateVector(part.n(), std::move(v), false);
}

inline RgpValue entangling_power(const DenseOperator& u, const Bipartition& part, RgpMode mode,
                                 std::size_t n_samples, const SeededRng& rng, int workers = 1) {
  require(u.replica_order() == 1, "entangling_power needs a physical-space operator");
  require_dim(u.dim() == pow2(part.n()), "bipartition does not match unitary");
  require(part.proper(), "entangling_power needs both sides non-empty");
  require_unitary_input(u);
  if (mode == RgpMode::Exact) {
    require_size(u.dim() <= guard::kLocalPairDim, "exact entangling power supports dimension <= 2^12");
    return {entangling_power_exact(u.matrix(), part), 0.0};
  }
  require(n_samples >= 2, "Monte-Carlo path needs at least two samples");
  auto vals = parallel_map<double>(n_samples, workers, [&](std::size_t i) {
    SeededRng r = rng.derive(i);
    return linear_entanglement(apply_unitary(sample_product_state(part, r), u), part);
  });
  const auto st = mean_stat(vals);
  return {st.mean, st.std_err};
}

// ---------------------------------------------------------------------------
// Coherence in the computational basis

inline double coherence(const StateVector& s) {
  double acc = 0.0;
  for (Index i = 0; i < s.dim(); ++i) {
    const double p = std::norm(s[i]);
    acc += p * p;
  }
  return 1.0 - acc;
}

inline double cgp_of_matrix(const Mat& u) {
  double acc = 0.0;
  for (Index j = 0; j < u.cols(); ++j)
    for (Index i = 0; i < u.rows(); ++i) {
      const double p = std::norm(u(i, j));
      acc += p * p;
    }
  return 1.0 - acc / static_cast<double>(u.rows());
}

inline double cgp(const DenseOperator& u) {
  require_unitary_input(u);
  return cgp_of_matrix(u.matrix());
}

inline double haar_cgp(Index d) { return (static_cast<double>(d) - 1.0) / (static_cast<double>(d) + 1.0); }

// ---------------------------------------------------------------------------
// Closed-form free-state moments (dense, guarded)

inline DenseOperator free_state_second_moment_z2(int n) {
  const Index d = pow2(n);
  require_size(d * d <= guard::kReplicaDim, "Z2 free-state moment exceeds guard");
  const Mat pi = permutation_projector(d, 2).matrix();
  const double zf = z2_partition_function(n);
  Mat rho = Mat::Zero(d * d, d * d);
  for (Index r = 0; r < d * d; ++r)
    for (Index c = 0; c < d * d; ++c) {
      const int pr1 = parity(r / d), pr2 = parity(r % d);
      const int pc1 = parity(c / d), pc2 = parity(c % d);
      if (pr1 == pr2 && pc1 == pr1 && pc2 == pr1) rho(r, c) = pi(r, c);
    }
  rho /= 2.0 * zf;
  return DenseOperator::hermitian(std::move(rho), 2);
}

// Swap of the qubits in `mask` between the two replicas of a (x, y) index.
inline Index swap_masked(Index xy, Index d, Index mask) {
  const Index x = xy / d, y = xy % d;
  const Index x2 = (x & ~mask) | (y & mask);
  const Index y2 = (y & ~mask) | (x & mask);
  return x2 * d + y2;
}

inline Index qubit_mask(int n, const std::vector<int>& qubits) {
  Index m = 0;
  for (int q : qubits) m |= Index{1} << (n - 1 - q);
  return m;
}

// Second moment of Haar product states over A|B.
inline DenseOperator product_state_second_moment(const Bipartition& part) {
  const int n = part.n();
  const Index d = pow2(n);
  require_size(d * d <= guard::kReplicaDim, "product-state moment exceeds guard");
  const Index ma = qubit_mask(n, part.qubits_a()), mb = qubit_mask(n, part.qubits_b());
  Mat rho = Mat::Zero(d * d, d * d);
  for (Index c = 0; c < d * d; ++c) {
    rho(c, c) += 1.0;
    rho(swap_masked(c, d, ma), c) += 1.0;
    rho(swap_masked(c, d, mb), c) += 1.0;
    rho(swap_masked(c, d, ma | mb), c) += 1.0;
  }
  const double a = static_cast<double>(part.d_a()), b = static_cast<double>(part.d_b());
  rho /= a * (a + 1.0) * b * (b + 1.0);
  return DenseOperator::hermitian(std::move(rho), 2);
}

inline DenseOperator coherence_free_moment(Index d) {
  require_size(d * d <= guard::kReplicaDim, "coherence free moment exceeds guard");
  Mat rho = Mat::Zero(d * d, d * d);
  for (Index i = 0; i < d; ++i) rho(i * d + i, i * d + i) = 1.0 / static_cast<double>(d);
  return DenseOperator::hermitian(std::move(rho), 2);
}

inline DenseOperator haar_moment(Index d, int t) {
  const DenseOperator pi = permutation_projector(d, t);
  return DenseOperator::hermitian(pi.matrix() / pi.trace().real(), t);
}

}  // namespace qrtlab
