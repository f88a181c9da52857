// Copyright 2026 The qrtlab Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <vector>

#include "qrtlab/qrt.hpp"

namespace qrtlab {

struct TwirlReport {
  QrtId qrt_id = QrtId::Z2Asymmetry;
  std::size_t n_samples = 0;
  double frobenius_error = 0.0;
  double predicted_weight = 0.0;
  double empirical_weight = 0.0;
  double weight_std_err = 0.0;
};

inline void require_twirl_size(const QrtSpec& qrt) {
  require_size(ipow(qrt.dim(), qrt.replica_order()) <= guard::kReplicaDim,
               "replica dimension exceeds dense guard (t=2: N <= 6, t=4: N <= 3)");
}

// (1 - w) rho_free + w Pi/Tr Pi.
inline DenseOperator twirl_mixture(const QrtSpec& qrt, double w) {
  const Mat rho = qrt.free_moment().matrix();
  const Mat h = qrt.haar_moment_op().matrix();
  return DenseOperator::hermitian((1.0 - w) * rho + w * h, qrt.replica_order());
}

inline DenseOperator twirl_closed_form(const QrtSpec& qrt, const DenseOperator& u) {
  require_twirl_size(qrt);
  const double w = qrt.rgp_exact(u) / qrt.haar_rgp();
  return twirl_mixture(qrt, w);
}

// Least-squares coefficients (c_free, c_haar) of x in the pair
// {rho_free, Pi/Tr Pi}, from the 2x2 real Gram system.
inline std::array<double, 2> twirl_weights(const Mat& x, const Mat& rho, const Mat& h) {
  auto ip = [](const Mat& a, const Mat& b) { return (a.adjoint() * b).trace().real(); };
  const double g11 = ip(rho, rho), g12 = ip(rho, h), g22 = ip(h, h);
  const double r1 = ip(rho, x), r2 = ip(h, x);
  const double det = g11 * g22 - g12 * g12;
  if (std::abs(det) < 1e-14 * g11 * g22) throw NumericError("free and Haar moments are numerically parallel");
  return {(g22 * r1 - g12 * r2) / det, (g11 * r2 - g12 * r1) / det};
}

inline double extract_twirl_weight(const QrtSpec& qrt, const Mat& x) {
  return twirl_weights(x, qrt.free_moment().matrix(), qrt.haar_moment_op().matrix())[1];
}

struct TwirlEstimate {
  DenseOperator mean;
  std::vector<double> batch_weights;
  double weight = 0.0;
  double weight_std_err = 0.0;
};

// Sample mean of (FU)^{(x)t} rho_free (FU)^{dag (x)t}, with batch-mean error
// bars on the extracted weight.
inline TwirlEstimate twirl_monte_carlo_batches(const QrtSpec& qrt, const DenseOperator& u, std::size_t n_samples,
                                               const SeededRng& rng, int workers = 1, std::size_t n_batches = 20) {
  require_twirl_size(qrt);
  require_dim(u.dim() == qrt.dim(), "unitary does not match QRT size");
  require(n_samples >= n_batches && n_batches >= 2, "need at least one sample per batch");
  const int t = qrt.replica_order();
  const Mat rho = qrt.free_moment().matrix();
  const Mat h = qrt.haar_moment_op().matrix();
  const Mat x0 = conjugate_replicas(rho, u.matrix(), t);
  const Index dim = x0.rows();

  std::vector<Mat> batch_sums(n_batches, Mat::Zero(dim, dim));
  parallel_for(n_batches, workers, [&](std::size_t b) {
    const std::size_t lo = b * n_samples / n_batches, hi = (b + 1) * n_samples / n_batches;
    Mat acc = Mat::Zero(dim, dim);
    for (std::size_t i = lo; i < hi; ++i) {
      SeededRng r = rng.derive(i);
      acc += conjugate_replicas(x0, qrt.sample_free_unitary(r).matrix(), t);
    }
    batch_sums[b] = std::move(acc);
  });

  TwirlEstimate out;
  Mat total = tree_reduce(batch_sums, [](const Mat& a, const Mat& b) -> Mat { return a + b; });
  total /= static_cast<double>(n_samples);
  std::vector<double> w;
  for (std::size_t b = 0; b < n_batches; ++b) {
    const double cnt = static_cast<double>((b + 1) * n_samples / n_batches - b * n_samples / n_batches);
    w.push_back(twirl_weights(batch_sums[b] / cnt, rho, h)[1]);
  }
  const auto st = mean_stat(w);
  out.weight = twirl_weights(total, rho, h)[1];
  out.weight_std_err = st.std_err;
  out.batch_weights = std::move(w);
  out.mean = DenseOperator::hermitian(std::move(total), t);
  return out;
}

inline DenseOperator twirl_monte_carlo(const QrtSpec& qrt, const DenseOperator& u, std::size_t n_samples,
                                       const SeededRng& rng, int workers = 1) {
  return twirl_monte_carlo_batches(qrt, u, n_samples, rng, workers, std::min<std::size_t>(20, n_samples)).mean;
}

inline TwirlReport verify_twirl(const QrtSpec& qrt, const DenseOperator& u, std::size_t n_samples,
                                const SeededRng& rng, int workers = 1) {
  const TwirlEstimate est = twirl_monte_carlo_batches(qrt, u, n_samples, rng, workers);
  const double omega = qrt.rgp_exact(u) / qrt.haar_rgp();
  TwirlReport rep;
  rep.qrt_id = qrt.id();
  rep.n_samples = n_samples;
  rep.frobenius_error = (est.mean.matrix() - twirl_mixture(qrt, omega).matrix()).norm();
  rep.predicted_weight = omega;
  rep.empirical_weight = est.weight;
  rep.weight_std_err = est.weight_std_err;
  return rep;
}

// Free-averaged RGP of V F U: R(U) + R(V) - R(U) R(V) / Rbar.
inline double sandwich_rgp(const QrtSpec& qrt, const DenseOperator& u, const DenseOperator& v) {
  require_dim(u.dim() == v.dim() && u.dim() == qrt.dim(), "sandwich operands must share the QRT dimension");
  const double ru = qrt.rgp_exact(u), rv = qrt.rgp_exact(v);
  return ru + rv - ru * rv / qrt.haar_rgp();
}

inline RgpValue sandwich_rgp_monte_carlo(const QrtSpec& qrt, const DenseOperator& u, const DenseOperator& v,
                                         std::size_t n_samples, const SeededRng& rng, int workers = 1) {
  require_dim(u.dim() == v.dim() && u.dim() == qrt.dim(), "sandwich operands must share the QRT dimension");
  auto vals = parallel_map<double>(n_samples, workers, [&](std::size_t i) {
    SeededRng r = rng.derive(i);
    const Mat w = v.matrix() * qrt.sample_free_unitary(r).matrix() * u.matrix();
    return qrt.rgp_exact_matrix(w);
  });
  const auto st = mean_stat(vals);
  return {st.mean, st.std_err};
}

// Projection of `a` onto the commutant of the Z2 free group: order 1 gives
// Tr(a)/d I; order 2 uses the four orthogonal projectors
// (Z0Z0 + Z1Z1) Pi_{+/-} and Zperp Pi_{+/-}.
inline DenseOperator z2_subgroup_moments(int n, int order, const DenseOperator& a) {
  require(order == 1 || order == 2, "order must be 1 or 2");
  const Index d = pow2(n);
  if (order == 1) {
    require_dim(a.dim() == d, "operator does not match 2^n");
    Mat m = a.trace() / static_cast<double>(d) * Mat::Identity(d, d);
    return DenseOperator(std::move(m), a.is_hermitian_flagged() ? OpKind::Hermitian : OpKind::General);
  }
  require_size(d * d <= guard::kReplicaDim, "Z2 second moment exceeds guard");
  require_dim(a.dim() == d * d, "operator does not match 4^n");
  const Mat& m = a.matrix();
  // Each projector is diagonal in the (same-sector, sym/antisym) decomposition;
  // the swap S acts on |x y> -> |y x>.
  Mat out = Mat::Zero(d * d, d * d);
  for (int same = 0; same < 2; ++same) {
    for (int sign = 0; sign < 2; ++sign) {
      const double s = sign == 0 ? 1.0 : -1.0;
      // P = D (I + s S)/2 with D the diagonal sector mask.
      Mat p = Mat::Zero(d * d, d * d);
      for (Index x = 0; x < d; ++x)
        for (Index y = 0; y < d; ++y) {
          if ((parity(x) == parity(y)) != (same == 0)) continue;
          p(x * d + y, x * d + y) += 0.5;
          p(y * d + x, x * d + y) += 0.5 * s;
        }
      const double tr = p.trace().real();
      if (tr < 0.5) continue;
      const cplx c = (p * m).trace() / tr;
      out += c * p;
    }
  }
  return DenseOperator(std::move(out), a.is_hermitian_flagged() ? OpKind::Hermitian : OpKind::General, 2);
}

}  // namespace qrtlab
