// Copyright 2026 The qrtlab Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <vector>

#include "qrtlab/pauli.hpp"
#include "qrtlab/qcore.hpp"
#include "qrtlab/rng.hpp"

namespace qrtlab {

namespace detail {

struct SymVec {
  std::uint64_t x = 0, z = 0;
  bool zero() const { return x == 0 && z == 0; }
};

inline SymVec operator^(SymVec a, SymVec b) { return {a.x ^ b.x, a.z ^ b.z}; }

inline int omega(SymVec a, SymVec b) { return (popcount(a.x & b.z) + popcount(a.z & b.x)) & 1; }

inline SymVec random_combination(const std::vector<SymVec>& basis, SeededRng& rng) {
  SymVec v;
  for (const auto& b : basis)
    if (rng.bits() & 1) v = v ^ b;
  return v;
}

// Symplectic basis (e_1, f_1, e_2, f_2, ...) of the span of `vs`, which must
// span a symplectic (non-degenerate) subspace.
inline std::vector<SymVec> symplectic_gram_schmidt(std::vector<SymVec> vs) {
  std::vector<SymVec> out;
  while (!vs.empty()) {
    std::size_t ia = vs.size();
    for (std::size_t i = 0; i < vs.size(); ++i)
      if (!vs[i].zero()) {
        ia = i;
        break;
      }
    if (ia == vs.size()) break;
    const SymVec a = vs[ia];
    std::size_t ib = vs.size();
    for (std::size_t i = 0; i < vs.size(); ++i)
      if (omega(a, vs[i])) {
        ib = i;
        break;
      }
    require(ib != vs.size(), "symplectic Gram-Schmidt met a degenerate span");
    const SymVec b = vs[ib];
    out.push_back(a);
    out.push_back(b);
    std::vector<SymVec> rest;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (i == ia || i == ib) continue;
      SymVec w = vs[i];
      if (omega(w, b)) w = w ^ a;
      if (omega(w, a)) w = w ^ b;
      rest.push_back(w);
    }
    vs = std::move(rest);
  }
  return out;
}

// Solves rows[i] . x = rhs[i] over GF(2) for an n-bit x; returns any solution.
inline bool solve_gf2(std::vector<std::uint64_t> rows, std::vector<int> rhs, int n, std::uint64_t& sol) {
  const std::size_t m = rows.size();
  std::vector<int> pivot_col;
  std::size_t r = 0;
  for (int c = n - 1; c >= 0 && r < m; --c) {
    const std::uint64_t bit = std::uint64_t{1} << c;
    std::size_t p = r;
    while (p < m && !(rows[p] & bit)) ++p;
    if (p == m) continue;
    std::swap(rows[p], rows[r]);
    std::swap(rhs[p], rhs[r]);
    for (std::size_t i = 0; i < m; ++i)
      if (i != r && (rows[i] & bit)) {
        rows[i] ^= rows[r];
        rhs[i] ^= rhs[r];
      }
    pivot_col.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < m; ++i)
    if (rhs[i]) return false;
  sol = 0;
  for (std::size_t i = 0; i < r; ++i)
    if (rhs[i]) sol |= std::uint64_t{1} << pivot_col[i];
  return true;
}

}  // namespace detail

// Heisenberg-picture tableau: images[q] = C X_q C^dag and images[n+q] =
// C Z_q C^dag, each a signed Hermitian Pauli string.
class CliffordTableau {
 public:
  CliffordTableau() = default;
  CliffordTableau(int n, std::vector<PauliString> images) : n_(n), images_(std::move(images)) {
    require(n_ >= 1 && n_ <= guard::kMaxCliffordQubits, "Clifford size must be in [1, 12]");
    require(static_cast<int>(images_.size()) == 2 * n_, "tableau needs 2n images");
    for (const auto& p : images_) require(p.n == n_ && p.is_hermitian(), "tableau rows must be signed Hermitian Paulis");
  }

  static CliffordTableau identity(int n) {
    std::vector<PauliString> im;
    for (int q = 0; q < n; ++q) im.push_back(PauliString{n, std::uint64_t{1} << (n - 1 - q), 0, 0});
    for (int q = 0; q < n; ++q) im.push_back(PauliString{n, 0, std::uint64_t{1} << (n - 1 - q), 0});
    return CliffordTableau(n, std::move(im));
  }

  int n_qubits() const { return n_; }
  const std::vector<PauliString>& images() const { return images_; }
  const PauliString& x_image(int q) const { return images_[q]; }
  const PauliString& z_image(int q) const { return images_[n_ + q]; }

  // Row r = (x_0..x_{n-1} | z_0..z_{n-1}) of image r, qubit order.
  std::vector<std::vector<int>> symplectic_matrix() const {
    std::vector<std::vector<int>> m(2 * n_, std::vector<int>(2 * n_, 0));
    for (int r = 0; r < 2 * n_; ++r)
      for (int q = 0; q < n_; ++q) {
        const std::uint64_t bit = std::uint64_t{1} << (n_ - 1 - q);
        m[r][q] = (images_[r].x & bit) ? 1 : 0;
        m[r][n_ + q] = (images_[r].z & bit) ? 1 : 0;
      }
    return m;
  }

  std::vector<int> phase_bits() const {
    std::vector<int> b;
    for (const auto& p : images_) b.push_back(p.phase == 2 ? 1 : 0);
    return b;
  }

  bool is_symplectic() const {
    for (int i = 0; i < 2 * n_; ++i)
      for (int j = 0; j < 2 * n_; ++j) {
        const int expect = (j == i + n_ || i == j + n_) ? 1 : 0;
        const int got = commutes(images_[i], images_[j]) ? 0 : 1;
        if (got != expect) return false;
      }
    return true;
  }

  // C|0...0>, the common +1 eigenvector of the Z images (global phase fixed
  // arbitrarily).
  Vec stabilizer_state() const {
    const int n = n_;
    std::vector<PauliString> gens(images_.begin() + n, images_.end());
    // Row-reduce on x to expose Z-type group elements.
    std::vector<PauliString> work = gens;
    std::size_t r = 0;
    for (int c = n - 1; c >= 0; --c) {
      const std::uint64_t bit = std::uint64_t{1} << c;
      std::size_t p = r;
      while (p < work.size() && !(work[p].x & bit)) ++p;
      if (p == work.size()) continue;
      std::swap(work[p], work[r]);
      for (std::size_t i = 0; i < work.size(); ++i)
        if (i != r && (work[i].x & bit)) work[i] = multiply(work[i], work[r]);
      ++r;
    }
    std::vector<std::uint64_t> rows;
    std::vector<int> rhs;
    for (std::size_t i = r; i < work.size(); ++i) {
      rows.push_back(work[i].z);
      rhs.push_back(work[i].phase == 2 ? 1 : 0);
    }
    std::uint64_t x0 = 0;
    require(detail::solve_gf2(rows, rhs, n, x0), "inconsistent stabilizer generators");
    Vec v = Vec::Zero(pow2(n));
    v(static_cast<Index>(x0)) = 1.0;
    for (const auto& g : gens) {
      Vec gv = v;
      g.apply_in_place(gv);
      v = 0.5 * (v + gv);
    }
    v.normalize();
    return v;
  }

  // Dense unitary (up to global phase): column x is C X^x C^dag C|0>.
  Mat dense() const {
    const Index d = pow2(n_);
    Mat u(d, d);
    u.col(0) = stabilizer_state();
    for (Index x = 1; x < d; ++x) {
      const int b = std::countr_zero(static_cast<std::uint64_t>(x));
      Vec c = u.col(x ^ (Index{1} << b));
      images_[n_ - 1 - b].apply_in_place(c);
      u.col(x) = c;
    }
    return u;
  }

  DenseOperator dense_operator() const { return DenseOperator::unitary(dense()); }

  Vec apply(const Vec& psi) const {
    require_dim(psi.size() == pow2(n_), "state size does not match Clifford");
    return dense() * psi;
  }

 private:
  int n_ = 0;
  std::vector<PauliString> images_;
};

// Uniform Clifford (modulo global phase): images of (X_q, Z_q) are chosen as a
// uniformly random symplectic basis, one anticommuting pair at a time inside
// the symplectic complement of the pairs already fixed, then uniform signs.
inline CliffordTableau sample_clifford(int n, SeededRng& rng) {
  require(n >= 1 && n <= guard::kMaxCliffordQubits, "sample_clifford supports 1 <= n <= 12");
  using detail::SymVec;
  std::vector<SymVec> basis;
  for (int q = 0; q < n; ++q) {
    basis.push_back({std::uint64_t{1} << (n - 1 - q), 0});
    basis.push_back({0, std::uint64_t{1} << (n - 1 - q)});
  }
  std::vector<SymVec> ex(static_cast<std::size_t>(n)), fz(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    SymVec v;
    do {
      v = detail::random_combination(basis, rng);
    } while (v.zero());
    SymVec f;
    do {
      f = detail::random_combination(basis, rng);
    } while (!detail::omega(v, f));
    ex[k] = v;
    fz[k] = f;
    std::vector<SymVec> proj;
    for (const auto& w0 : basis) {
      SymVec w = w0;
      const int wf = detail::omega(w, f), wv = detail::omega(w, v);
      if (wf) w = w ^ v;
      if (wv) w = w ^ f;
      proj.push_back(w);
    }
    basis = detail::symplectic_gram_schmidt(std::move(proj));
  }
  std::vector<PauliString> im;
  for (int k = 0; k < n; ++k) im.push_back(PauliString{n, ex[k].x, ex[k].z, (rng.bits() & 1) ? 2 : 0});
  for (int k = 0; k < n; ++k) im.push_back(PauliString{n, fz[k].x, fz[k].z, (rng.bits() & 1) ? 2 : 0});
  return CliffordTableau(n, std::move(im));
}

inline StateVector sample_stabilizer_state(int n, SeededRng& rng) {
  return StateVector(n, sample_clifford(n, rng).stabilizer_state(), false);
}

inline void apply_random_clifford(Vec& amps, int n, SeededRng& rng) { amps = sample_clifford(n, rng).apply(amps); }

// ---------------------------------------------------------------------------
// Explicit enumeration of the Clifford group modulo phases, for small n.

namespace detail {

inline std::vector<long long> phase_key(const Mat& u) {
  cplx ref = 0.0;
  for (Index j = 0; j < u.cols() && ref == cplx(0.0); ++j)
    for (Index i = 0; i < u.rows(); ++i)
      if (std::abs(u(i, j)) > 1e-6) {
        ref = std::conj(u(i, j)) / std::abs(u(i, j));
        break;
      }
  std::vector<long long> key;
  key.reserve(static_cast<std::size_t>(2 * u.size()));
  for (Index j = 0; j < u.cols(); ++j)
    for (Index i = 0; i < u.rows(); ++i) {
      const cplx v = u(i, j) * ref;
      key.push_back(std::llround(v.real() * 1e6));
      key.push_back(std::llround(v.imag() * 1e6));
    }
  return key;
}

}  // namespace detail

inline std::vector<Mat> clifford_group_generators(int n) {
  const double s = 1.0 / std::sqrt(2.0);
  Mat h(2, 2), sg(2, 2), cx = Mat::Zero(4, 4);
  h << s, s, s, -s;
  sg << 1, 0, 0, cplx(0, 1);
  cx(0, 0) = cx(1, 1) = cx(2, 3) = cx(3, 2) = 1.0;
  std::vector<Mat> gens;
  for (int q = 0; q < n; ++q) {
    gens.push_back(embed_gate(n, {q}, h));
    gens.push_back(embed_gate(n, {q}, sg));
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b) gens.push_back(embed_gate(n, {a, b}, cx));
  return gens;
}

// Breadth-first closure under H, S and CNOT; one representative per element
// of C_n / U(1).
inline std::vector<Mat> enumerate_clifford_group(int n) {
  require(n >= 1 && n <= 2, "enumerate_clifford_group supports n <= 2");
  const auto gens = clifford_group_generators(n);
  std::map<std::vector<long long>, std::size_t> seen;
  std::vector<Mat> out;
  std::queue<std::size_t> todo;
  const Mat id = Mat::Identity(pow2(n), pow2(n));
  seen.emplace(detail::phase_key(id), 0);
  out.push_back(id);
  todo.push(0);
  while (!todo.empty()) {
    const std::size_t i = todo.front();
    todo.pop();
    for (const auto& g : gens) {
      Mat m = g * out[i];
      auto key = detail::phase_key(m);
      if (seen.emplace(std::move(key), out.size()).second) {
        out.push_back(std::move(m));
        todo.push(out.size() - 1);
      }
    }
  }
  return out;
}

}  // namespace qrtlab
