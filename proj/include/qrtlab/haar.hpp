// Copyright 2026 The qrtlab Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <vector>

#include "qrtlab/pauli.hpp"
#include "qrtlab/qcore.hpp"
#include "qrtlab/rng.hpp"

namespace qrtlab {

enum class HaarMethod { Polar, QR };

inline Mat ginibre_matrix(Index rows, Index cols, SeededRng& rng) {
  Mat z(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) z(i, j) = rng.complex_normal();
  return z;
}

inline DenseOperator sample_ginibre(Index d, SeededRng& rng) {
  require(d >= 1, "d must be >= 1");
  return DenseOperator(ginibre_matrix(d, d, rng));
}

// Unitary factor of the polar decomposition, Z (Z^dag Z)^{-1/2} = W V^dag.
// Returns false when the smallest singular value is below the resampling
// threshold.
inline bool polar_unitary(const Mat& z, Mat& u) {
  if (z.rows() <= 16) {
    Eigen::JacobiSVD<Mat> svd(z, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.singularValues().minCoeff() < tol::kSingular) return false;
    u = svd.matrixU() * svd.matrixV().adjoint();
  } else {
    Eigen::BDCSVD<Mat> svd(z, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.singularValues().minCoeff() < tol::kSingular) return false;
    u = svd.matrixU() * svd.matrixV().adjoint();
  }
  return true;
}

inline Mat haar_matrix_polar(Index d, SeededRng& rng) {
  Mat u;
  for (;;) {
    if (polar_unitary(ginibre_matrix(d, d, rng), u)) return u;
  }
}

// QR of a Ginibre matrix with the R-diagonal phases absorbed into Q.
inline Mat haar_matrix_qr(Index d, SeededRng& rng) {
  Eigen::HouseholderQR<Mat> qr(ginibre_matrix(d, d, rng));
  Mat q = qr.householderQ();
  const Mat& r = qr.matrixQR();
  for (Index j = 0; j < d; ++j) {
    const double a = std::abs(r(j, j));
    q.col(j) *= a > 0.0 ? r(j, j) / a : cplx(1.0);
  }
  return q;
}

inline Mat haar_matrix(Index d, SeededRng& rng, HaarMethod method) {
  return method == HaarMethod::Polar ? haar_matrix_polar(d, rng) : haar_matrix_qr(d, rng);
}

inline DenseOperator haar_unitary_polar(Index d, SeededRng& rng) {
  require(d >= 1, "d must be >= 1");
  return DenseOperator::unitary(haar_matrix_polar(d, rng));
}

inline DenseOperator haar_unitary_qr(Index d, SeededRng& rng) {
  require(d >= 1, "d must be >= 1");
  return DenseOperator::unitary(haar_matrix_qr(d, rng));
}

inline Vec haar_vector(Index d, SeededRng& rng) {
  Vec v(d);
  for (Index i = 0; i < d; ++i) v(i) = rng.complex_normal();
  v.normalize();
  return v;
}

inline StateVector haar_state(int n, SeededRng& rng) { return StateVector(n, haar_vector(pow2(n), rng), false); }

// ---------------------------------------------------------------------------
// Z2 charge sectors: sector 0 is the +1 eigenspace of sigma_z^{(x)N} (even
// parity), sector 1 the -1 eigenspace.

inline int parity(Index x) { return popcount(static_cast<std::uint64_t>(x)) & 1; }

inline std::vector<Index> sector_indices(int n, int sector) {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(pow2(n - 1)));
  for (Index x = 0; x < pow2(n); ++x)
    if (parity(x) == sector) out.push_back(x);
  return out;
}

// Fixed sector-swap permutation: flips qubit 0.
inline Index sector_swap_mask(int n) { return pow2(n - 1); }

inline Mat sector_swap_matrix(int n) {
  const Index d = pow2(n);
  Mat p = Mat::Zero(d, d);
  for (Index x = 0; x < d; ++x) p(x ^ sector_swap_mask(n), x) = 1.0;
  return p;
}

inline Mat sigma_z_string(int n) {
  const Index d = pow2(n);
  Mat s = Mat::Zero(d, d);
  for (Index x = 0; x < d; ++x) s(x, x) = parity(x) ? -1.0 : 1.0;
  return s;
}

enum class Z2Branch { Commuting, Anticommuting };

struct Z2FreeOptions {
  double anticommuting_prob = 0.5;
  HaarMethod method = HaarMethod::Polar;
};

// Commuting branch: polar decomposition of Z + S Z S with S = sigma_z^{(x)N}.
// The symmetrized matrix is block diagonal over the charge sectors, so its
// polar factor is assembled block by block.
inline Mat z2_commuting_matrix(int n, SeededRng& rng, HaarMethod method = HaarMethod::Polar) {
  const Index d = pow2(n);
  const auto s0 = sector_indices(n, 0);
  const auto s1 = sector_indices(n, 1);
  const Index h = static_cast<Index>(s0.size());
  for (;;) {
    Mat u = Mat::Zero(d, d);
    bool ok = true;
    if (method == HaarMethod::Polar) {
      const Mat z = ginibre_matrix(d, d, rng);
      Mat zs(d, d);
      for (Index j = 0; j < d; ++j)
        for (Index i = 0; i < d; ++i) zs(i, j) = parity(i) == parity(j) ? 2.0 * z(i, j) : cplx(0.0);
      for (const auto* sec : {&s0, &s1}) {
        Mat blk(h, h), ub;
        for (Index j = 0; j < h; ++j)
          for (Index i = 0; i < h; ++i) blk(i, j) = zs((*sec)[i], (*sec)[j]);
        if (!polar_unitary(blk, ub)) {
          ok = false;
          break;
        }
        for (Index j = 0; j < h; ++j)
          for (Index i = 0; i < h; ++i) u((*sec)[i], (*sec)[j]) = ub(i, j);
      }
    } else {
      for (const auto* sec : {&s0, &s1}) {
        const Mat ub = haar_matrix_qr(h, rng);
        for (Index j = 0; j < h; ++j)
          for (Index i = 0; i < h; ++i) u((*sec)[i], (*sec)[j]) = ub(i, j);
      }
    }
    if (ok) return u;
  }
}

inline DenseOperator sample_z2_free_unitary_branch(int n, Z2Branch branch, SeededRng& rng,
                                                   HaarMethod method = HaarMethod::Polar) {
  require(n >= 1, "n must be >= 1");
  Mat u = z2_commuting_matrix(n, rng, method);
  if (branch == Z2Branch::Anticommuting) {
    const Index m = sector_swap_mask(n);
    Mat pu(u.rows(), u.cols());
    for (Index x = 0; x < u.rows(); ++x) pu.row(x ^ m) = u.row(x);
    u.swap(pu);
  }
  return DenseOperator::unitary(std::move(u));
}

inline DenseOperator sample_z2_free_unitary(int n, SeededRng& rng, const Z2FreeOptions& opt = {}) {
  const Z2Branch b = rng.bernoulli(opt.anticommuting_prob) ? Z2Branch::Anticommuting : Z2Branch::Commuting;
  return sample_z2_free_unitary_branch(n, b, rng, opt.method);
}

inline StateVector sample_z2_free_state(int n, SeededRng& rng) {
  require(n >= 1, "n must be >= 1");
  const int k = static_cast<int>(rng.index(2));
  Vec v = Vec::Zero(pow2(n));
  for (Index x : sector_indices(n, k)) v(x) = rng.complex_normal();
  v.normalize();
  return StateVector(n, std::move(v), false);
}

// Applies a freshly sampled Z2 free unitary to a state without building it.
// A Haar block maps the sector component v_k to |v_k| times an independent
// Haar unit vector of that sector, so the output has exactly the
// distribution of F|psi>.
inline void apply_random_z2_free(Vec& amps, int n, SeededRng& rng, double anticommuting_prob = 0.5) {
  const Index d = pow2(n);
  double w[2] = {0.0, 0.0};
  for (Index x = 0; x < d; ++x) w[parity(x)] += std::norm(amps(x));
  const bool swap = rng.bernoulli(anticommuting_prob);
  Vec out(d);
  double nrm[2] = {0.0, 0.0};
  for (Index x = 0; x < d; ++x) {
    out(x) = rng.complex_normal();
    nrm[parity(x)] += std::norm(out(x));
  }
  const double sc[2] = {std::sqrt(w[0] / nrm[0]), std::sqrt(w[1] / nrm[1])};
  const Index m = sector_swap_mask(n);
  for (Index x = 0; x < d; ++x) {
    const cplx v = out(x) * sc[parity(x)];
    amps(swap ? (x ^ m) : x) = v;
  }
}

// Left-multiplies every column of W by a freshly sampled Z2 free unitary.
inline void left_multiply_random_z2_free(Mat& w, int n, SeededRng& rng, double anticommuting_prob = 0.5,
                                         HaarMethod method = HaarMethod::QR) {
  const bool swap = rng.bernoulli(anticommuting_prob);
  for (int s = 0; s < 2; ++s) {
    const auto idx = sector_indices(n, s);
    const Index h = static_cast<Index>(idx.size());
    Mat blk(h, w.cols());
    for (Index i = 0; i < h; ++i) blk.row(i) = w.row(idx[i]);
    if (method == HaarMethod::QR) {
      Eigen::HouseholderQR<Mat> qr(ginibre_matrix(h, h, rng));
      const Mat& r = qr.matrixQR();
      for (Index j = 0; j < h; ++j) {
        const double a = std::abs(r(j, j));
        blk.row(j) *= a > 0.0 ? r(j, j) / a : cplx(1.0);
      }
      blk.applyOnTheLeft(qr.householderQ());
    } else {
      blk = haar_matrix_polar(h, rng) * blk;
    }
    for (Index i = 0; i < h; ++i) w.row(idx[i]) = blk.row(i);
  }
  if (swap) {
    const Index m = sector_swap_mask(n);
    Mat pw(w.rows(), w.cols());
    for (Index x = 0; x < w.rows(); ++x) pw.row(x ^ m) = w.row(x);
    w.swap(pw);
  }
}

// ---------------------------------------------------------------------------
// Entanglement and coherence free operations.

inline DenseOperator sample_local_unitary_pair(Index d_a, Index d_b, SeededRng& rng) {
  require(d_a >= 1 && d_b >= 1, "local dimensions must be >= 1");
  require_size(d_a * d_b <= guard::kLocalPairDim, "d_a * d_b exceeds 2^12");
  const Mat ua = haar_matrix_polar(d_a, rng);
  const Mat ub = haar_matrix_polar(d_b, rng);
  return DenseOperator::unitary(kron(ua, ub));
}

inline std::vector<Index> random_permutation(Index d, SeededRng& rng) {
  std::vector<Index> p(static_cast<std::size_t>(d));
  std::iota(p.begin(), p.end(), Index{0});
  for (Index i = d - 1; i > 0; --i) std::swap(p[i], p[static_cast<Index>(rng.index(static_cast<std::uint64_t>(i + 1)))]);
  return p;
}

// pi * V_diag: column j carries phase e^{i theta_j} into row pi(j).
inline DenseOperator sample_coherence_free_unitary(Index d, SeededRng& rng) {
  require(d >= 2, "d must be >= 2");
  const auto pi = random_permutation(d, rng);
  Mat u = Mat::Zero(d, d);
  for (Index j = 0; j < d; ++j) u(pi[j], j) = std::polar(1.0, rng.phase());
  return DenseOperator::unitary(std::move(u));
}

inline void apply_random_coherence_free(Vec& amps, SeededRng& rng) {
  const Index d = amps.size();
  const auto pi = random_permutation(d, rng);
  Vec out(d);
  for (Index j = 0; j < d; ++j) out(pi[j]) = std::polar(1.0, rng.phase()) * amps(j);
  amps.swap(out);
}

}  // namespace qrtlab
