// Copyright 2026 The qrtlab Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qrtlab/constants.hpp"
#include "qrtlab/errors.hpp"

namespace qrtlab {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Index = std::int64_t;

inline Index pow2(int n) { return Index{1} << n; }

inline int log2_exact(Index d) {
  int n = 0;
  while ((Index{1} << n) < d) ++n;
  require_dim((Index{1} << n) == d, "dimension " + std::to_string(d) + " is not a power of two");
  return n;
}

inline Index ipow(Index base, int e) {
  Index r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline bool is_unitary(const Mat& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return max_abs(u.adjoint() * u - Mat::Identity(u.rows(), u.cols())) <= tol;
}

inline bool is_hermitian(const Mat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return max_abs(a - a.adjoint()) <= tol;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Vec kron(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

// ---------------------------------------------------------------------------
// StateVector

class StateVector {
 public:
  explicit StateVector(int n_qubits) : n_(n_qubits), amps_(Vec::Zero(pow2(checked(n_qubits)))) {
    amps_(0) = 1.0;
  }

  StateVector(int n_qubits, Vec amps, bool normalize_amps = true) : n_(checked(n_qubits)), amps_(std::move(amps)) {
    require_dim(amps_.size() == pow2(n_), "amplitude vector length must be 2^n_qubits");
    if (normalize_amps) normalize();
  }

  static StateVector basis(int n_qubits, Index x) {
    require_dim(x >= 0 && x < pow2(n_qubits), "basis index out of range");
    Vec v = Vec::Zero(pow2(n_qubits));
    v(x) = 1.0;
    return StateVector(n_qubits, std::move(v), false);
  }

  static StateVector from_amplitudes(Vec amps, bool normalize_amps = true) {
    const int n = log2_exact(amps.size());
    return StateVector(n, std::move(amps), normalize_amps);
  }

  int n_qubits() const { return n_; }
  Index dim() const { return amps_.size(); }
  const Vec& amps() const { return amps_; }
  Vec& amps() { return amps_; }
  cplx operator[](Index i) const { return amps_(i); }

  double norm() const { return amps_.norm(); }

  void normalize() {
    const double nrm = amps_.norm();
    if (nrm > 0.0) amps_ /= nrm;
  }

  bool is_normalized(double tol = tol::kNorm) const { return std::abs(amps_.squaredNorm() - 1.0) <= tol; }

  Mat density() const { return amps_ * amps_.adjoint(); }

 private:
  static int checked(int n) {
    require_dim(n >= 1 && n <= 30, "n_qubits must be in [1, 30]");
    return n;
  }

  int n_;
  Vec amps_;
};

inline StateVector tensor(const StateVector& a, const StateVector& b) {
  return StateVector(a.n_qubits() + b.n_qubits(), kron(a.amps(), b.amps()), false);
}

// ---------------------------------------------------------------------------
// DenseOperator

enum class OpKind { General, Unitary, Hermitian };

class DenseOperator {
 public:
  DenseOperator() = default;

  explicit DenseOperator(Mat m, OpKind kind = OpKind::General, int replica_order = 1)
      : m_(std::move(m)), kind_(kind), replica_(replica_order) {
    require_dim(m_.rows() == m_.cols(), "operator must be square");
    require(replica_ >= 1, "replica_order must be >= 1");
    if (kind_ == OpKind::Unitary && !is_unitary(m_, tol::kUnitary))
      throw DomainError("operator flagged unitary fails ||U^dag U - I|| <= 1e-10");
    if (kind_ == OpKind::Hermitian && !is_hermitian(m_, tol::kHermitian))
      throw DomainError("operator flagged Hermitian fails ||A - A^dag|| <= 1e-12");
  }

  static DenseOperator unitary(Mat m, int replica_order = 1) {
    return DenseOperator(std::move(m), OpKind::Unitary, replica_order);
  }

  // Symmetrizes away rounding before flagging.
  static DenseOperator hermitian(Mat m, int replica_order = 1) {
    Mat h = 0.5 * (m + m.adjoint());
    return DenseOperator(std::move(h), OpKind::Hermitian, replica_order);
  }

  static DenseOperator identity(Index d) { return unitary(Mat::Identity(d, d)); }

  Index dim() const { return m_.rows(); }
  const Mat& matrix() const { return m_; }
  OpKind kind() const { return kind_; }
  bool is_unitary_flagged() const { return kind_ == OpKind::Unitary; }
  bool is_hermitian_flagged() const { return kind_ == OpKind::Hermitian; }
  int replica_order() const { return replica_; }
  int n_qubits() const { return log2_exact(m_.rows()); }
  cplx operator()(Index i, Index j) const { return m_(i, j); }
  cplx trace() const { return m_.trace(); }

  DenseOperator adjoint() const { return DenseOperator(m_.adjoint(), kind_, replica_); }

 private:
  Mat m_;
  OpKind kind_ = OpKind::General;
  int replica_ = 1;
};

inline DenseOperator operator*(const DenseOperator& a, const DenseOperator& b) {
  require_dim(a.dim() == b.dim(), "operator product dimension mismatch");
  const bool uni = a.is_unitary_flagged() && b.is_unitary_flagged();
  Mat p = a.matrix() * b.matrix();
  return DenseOperator(std::move(p), uni ? OpKind::Unitary : OpKind::General, a.replica_order());
}

// ---------------------------------------------------------------------------
// Bipartition. Qubit 0 is the most significant bit of an amplitude index.
// Subsystem indices list their qubits in increasing order, first qubit most
// significant.

enum class Part : char { A = 'A', B = 'B' };

class Bipartition {
 public:
  Bipartition() = default;

  explicit Bipartition(std::vector<Part> assignment) : assign_(std::move(assignment)) {
    const int n = static_cast<int>(assign_.size());
    require_dim(n >= 1 && n <= 30, "bipartition must cover 1..30 qubits");
    for (int q = 0; q < n; ++q) (assign_[q] == Part::A ? qa_ : qb_).push_back(q);
    build_tables();
  }

  // First n_a qubits form A.
  static Bipartition contiguous(int n, int n_a) {
    require(n_a >= 0 && n_a <= n, "n_a must lie in [0, n]");
    std::vector<Part> a(static_cast<std::size_t>(n), Part::B);
    for (int q = 0; q < n_a; ++q) a[q] = Part::A;
    return Bipartition(std::move(a));
  }

  static Bipartition from_b_qubits(int n, const std::vector<int>& b_qubits) {
    std::vector<Part> a(static_cast<std::size_t>(n), Part::A);
    for (int q : b_qubits) {
      require(q >= 0 && q < n, "qubit index out of range in bipartition");
      a[q] = Part::B;
    }
    return Bipartition(std::move(a));
  }

  int n() const { return static_cast<int>(assign_.size()); }
  int n_a() const { return static_cast<int>(qa_.size()); }
  int n_b() const { return static_cast<int>(qb_.size()); }
  Index d_a() const { return pow2(n_a()); }
  Index d_b() const { return pow2(n_b()); }
  const std::vector<Part>& assignment() const { return assign_; }
  const std::vector<int>& qubits_a() const { return qa_; }
  const std::vector<int>& qubits_b() const { return qb_; }

  // Full amplitude index of the pair (a, b).
  Index index(Index a, Index b) const { return table_[static_cast<std::size_t>(b * d_a() + a)]; }

  bool proper() const { return n_a() > 0 && n_b() > 0; }

  std::string to_string() const {
    std::string s;
    for (Part p : assign_) s.push_back(static_cast<char>(p));
    return s;
  }

 private:
  void build_tables() {
    const int n = this->n();
    const Index da = d_a(), db = d_b();
    table_.assign(static_cast<std::size_t>(da * db), 0);
    for (Index b = 0; b < db; ++b) {
      for (Index a = 0; a < da; ++a) {
        Index x = 0;
        for (int i = 0; i < n_a(); ++i)
          if ((a >> (n_a() - 1 - i)) & 1) x |= Index{1} << (n - 1 - qa_[i]);
        for (int i = 0; i < n_b(); ++i)
          if ((b >> (n_b() - 1 - i)) & 1) x |= Index{1} << (n - 1 - qb_[i]);
        table_[static_cast<std::size_t>(b * da + a)] = x;
      }
    }
  }

  std::vector<Part> assign_;
  std::vector<int> qa_, qb_;
  std::vector<Index> table_;
};

// Amplitudes reshaped as a d_A x d_B matrix.
inline Mat as_ab_matrix(const StateVector& s, const Bipartition& part) {
  require_dim(s.n_qubits() == part.n(), "bipartition does not match state size");
  Mat m(part.d_a(), part.d_b());
  for (Index b = 0; b < part.d_b(); ++b)
    for (Index a = 0; a < part.d_a(); ++a) m(a, b) = s[part.index(a, b)];
  return m;
}

// ---------------------------------------------------------------------------
// Operations

inline StateVector apply_unitary(const StateVector& state, const DenseOperator& u) {
  require_dim(u.dim() == state.dim(), "unitary dimension does not match state");
  require(u.replica_order() == 1, "apply_unitary needs a physical-space operator");
  require(u.is_unitary_flagged(), "apply_unitary needs a unitary-flagged operator");
  return StateVector(state.n_qubits(), u.matrix() * state.amps(), false);
}

struct Projection {
  double probability = 0.0;
  bool defined = false;  // false when probability < 1e-14
  std::optional<StateVector> projected;
};

inline Projection project_subsystem(const StateVector& state, const Bipartition& part, Index outcome_b) {
  require_dim(state.n_qubits() == part.n(), "bipartition does not match state size");
  require(part.n_b() >= 1, "measured subsystem B is empty");
  require(outcome_b >= 0 && outcome_b < part.d_b(), "outcome_b out of range");
  Vec phi(part.d_a());
  for (Index a = 0; a < part.d_a(); ++a) phi(a) = state[part.index(a, outcome_b)];
  Projection r;
  r.probability = phi.squaredNorm();
  if (r.probability >= tol::kProjectedProb && part.n_a() >= 1) {
    r.defined = true;
    r.projected.emplace(part.n_a(), phi / std::sqrt(r.probability), false);
  }
  return r;
}

inline DenseOperator partial_trace(const StateVector& state, const Bipartition& part, Part keep) {
  const Mat m = as_ab_matrix(state, part);
  Mat rho = keep == Part::A ? Mat(m * m.adjoint()) : Mat(m.transpose() * m.conjugate());
  return DenseOperator::hermitian(std::move(rho));
}

inline DenseOperator replica_tensor(const DenseOperator& op, int t) {
  require(t >= 1, "replica order must be >= 1");
  require(op.replica_order() == 1, "replica_tensor expects a physical-space operator");
  require_size(ipow(op.dim(), t) <= guard::kReplicaDim,
               "replica dimension " + std::to_string(op.dim()) + "^" + std::to_string(t) + " exceeds guard " +
                   std::to_string(guard::kReplicaDim));
  Mat out = op.matrix();
  for (int k = 1; k < t; ++k) out = kron(out, op.matrix());
  OpKind kind = op.kind();
  if (kind == OpKind::Unitary && !is_unitary(out, tol::kUnitary)) kind = OpKind::General;
  if (kind == OpKind::Hermitian) out = 0.5 * (out + out.adjoint());
  return DenseOperator(std::move(out), kind, t);
}

// Replica index digits, replica 0 most significant.
inline void replica_digits(Index x, Index d, int t, std::vector<Index>& digits) {
  digits.resize(static_cast<std::size_t>(t));
  for (int k = t - 1; k >= 0; --k) {
    digits[k] = x % d;
    x /= d;
  }
}

inline Index replica_compose(const std::vector<Index>& digits, Index d) {
  Index x = 0;
  for (Index v : digits) x = x * d + v;
  return x;
}

// Operator W_pi |i_0 ... i_{t-1}> = |i_{pi^{-1}(0)} ... i_{pi^{-1}(t-1)}>, i.e.
// the content of replica k moves to replica pi(k).
inline Mat permutation_operator(Index d, const std::vector<int>& pi) {
  const int t = static_cast<int>(pi.size());
  const Index dim = ipow(d, t);
  Mat w = Mat::Zero(dim, dim);
  std::vector<Index> in, out(static_cast<std::size_t>(t));
  for (Index x = 0; x < dim; ++x) {
    replica_digits(x, d, t, in);
    for (int k = 0; k < t; ++k) out[pi[k]] = in[k];
    w(replica_compose(out, d), x) = 1.0;
  }
  return w;
}

inline std::vector<std::vector<int>> all_permutations(int t) {
  std::vector<int> p(static_cast<std::size_t>(t));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline DenseOperator permutation_projector(Index d, int t) {
  require(d >= 1, "d must be >= 1");
  require(t >= 1 && t <= 6, "permutation_projector supports 1 <= t <= 6");
  const Index dim = ipow(d, t);
  require_size(dim <= guard::kReplicaDim, "symmetric projector dimension exceeds guard");
  const auto perms = all_permutations(t);
  const double w = 1.0 / static_cast<double>(perms.size());
  Mat pi = Mat::Zero(dim, dim);
  std::vector<Index> in, out(static_cast<std::size_t>(t));
  for (Index x = 0; x < dim; ++x) {
    replica_digits(x, d, t, in);
    for (const auto& p : perms) {
      for (int k = 0; k < t; ++k) out[p[k]] = in[k];
      pi(replica_compose(out, d), x) += w;
    }
  }
  return DenseOperator::hermitian(std::move(pi), t);
}

inline double binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (Index i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// Dimension of the symmetric subspace, C(d + t - 1, t).
inline double sym_dim(Index d, int t) { return binomial(d + t - 1, t); }

// ---------------------------------------------------------------------------
// Replica-space helpers used by twirl and moment computations.

// Left-multiplies tensor factor k of the rows of X (d^t rows) by w.
inline Mat apply_to_replica_factor(const Mat& x, const Mat& w, int t, int k) {
  const Index d = w.rows();
  const Index inner = ipow(d, t - 1 - k);
  const Index outer = ipow(d, k);
  require_dim(x.rows() == outer * d * inner, "replica factor dimension mismatch");
  Mat out(x.rows(), x.cols());
  using RowMap = Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  using RowMapMut = Eigen::Map<Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  for (Index c = 0; c < x.cols(); ++c) {
    for (Index a = 0; a < outer; ++a) {
      const Index off = a * d * inner;
      RowMap in(x.col(c).data() + off, d, inner);
      RowMapMut res(out.col(c).data() + off, d, inner);
      res.noalias() = w * in;
    }
  }
  return out;
}

// W^{(x)t} X W^{dag (x)t}.
inline Mat conjugate_replicas(const Mat& x, const Mat& w, int t) {
  Mat y = x;
  for (int k = 0; k < t; ++k) y = apply_to_replica_factor(y, w, t, k);
  Mat yt = y.adjoint();
  for (int k = 0; k < t; ++k) yt = apply_to_replica_factor(yt, w, t, k);
  return yt.adjoint();
}

inline Vec tensor_power(const Vec& v, int t) {
  Vec out = v;
  for (int k = 1; k < t; ++k) out = kron(out, v);
  return out;
}

// Orthonormal basis of the symmetric subspace of (C^d)^{(x)t}, indexed by
// nondecreasing index tuples.
class SymmetricBasis {
 public:
  SymmetricBasis(Index d, int t) : d_(d), t_(t) {
    require(d >= 1 && t >= 1, "symmetric basis needs d, t >= 1");
    std::vector<Index> cur(static_cast<std::size_t>(t), 0);
    build(cur, 0, 0);
    double tf = 1.0;
    for (int i = 2; i <= t; ++i) tf *= i;
    for (const auto& tup : tuples_) {
      double denom = 1.0;
      Index run = 1;
      for (std::size_t i = 1; i <= tup.size(); ++i) {
        if (i < tup.size() && tup[i] == tup[i - 1]) {
          ++run;
        } else {
          for (Index r = 2; r <= run; ++r) denom *= static_cast<double>(r);
          run = 1;
        }
      }
      weights_.push_back(std::sqrt(tf / denom));
    }
  }

  Index d() const { return d_; }
  int t() const { return t_; }
  Index size() const { return static_cast<Index>(tuples_.size()); }
  const std::vector<std::vector<Index>>& tuples() const { return tuples_; }

  // Coordinates of phi^{(x)t} in this basis.
  Vec coords(const Vec& phi) const {
    Vec out(size());
    for (Index m = 0; m < size(); ++m) {
      cplx p = weights_[static_cast<std::size_t>(m)];
      for (Index i : tuples_[static_cast<std::size_t>(m)]) p *= phi(i);
      out(m) = p;
    }
    return out;
  }

  // Coordinates of a vector already lying in the symmetric subspace.
  Vec coords_of_symmetric(const Vec& full) const {
    Vec out(size());
    for (Index m = 0; m < size(); ++m)
      out(m) = weights_[static_cast<std::size_t>(m)] * full(replica_compose(tuples_[static_cast<std::size_t>(m)], d_));
    return out;
  }

  // Isometry V (d^t x size) whose columns are the basis vectors.
  Mat isometry() const {
    const Index dim = ipow(d_, t_);
    require_size(dim <= guard::kReplicaDim, "symmetric isometry dimension exceeds guard");
    Mat v = Mat::Zero(dim, size());
    const auto perms = all_permutations(t_);
    std::vector<Index> out(static_cast<std::size_t>(t_));
    for (Index m = 0; m < size(); ++m) {
      const auto& tup = tuples_[static_cast<std::size_t>(m)];
      for (const auto& p : perms) {
        for (int k = 0; k < t_; ++k) out[p[k]] = tup[k];
        v(replica_compose(out, d_), m) = 1.0;
      }
      v.col(m).normalize();
    }
    return v;
  }

 private:
  void build(std::vector<Index>& cur, int pos, Index lo) {
    if (pos == t_) {
      tuples_.push_back(cur);
      return;
    }
    for (Index i = lo; i < d_; ++i) {
      cur[pos] = i;
      build(cur, pos + 1, i);
    }
  }

  Index d_;
  int t_;
  std::vector<std::vector<Index>> tuples_;
  std::vector<double> weights_;
};

// Schatten-1 norm of a Hermitian matrix.
inline double trace_norm_hermitian(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

// ---------------------------------------------------------------------------
// Local gates acting on listed qubits, applied in place.

inline void apply_gate(cplx* amps, int n, const std::vector<int>& qubits, const Mat& g) {
  const int k = static_cast<int>(qubits.size());
  const Index gd = pow2(k);
  require_dim(g.rows() == gd && g.cols() == gd, "gate size does not match qubit list");
  std::vector<Index> masks(static_cast<std::size_t>(k));
  Index all = 0;
  for (int i = 0; i < k; ++i) {
    require(qubits[i] >= 0 && qubits[i] < n, "gate qubit out of range");
    masks[i] = Index{1} << (n - 1 - qubits[i]);
    all |= masks[i];
  }
  std::vector<Index> offs(static_cast<std::size_t>(gd));
  for (Index s = 0; s < gd; ++s) {
    Index o = 0;
    for (int i = 0; i < k; ++i)
      if ((s >> (k - 1 - i)) & 1) o |= masks[i];
    offs[s] = o;
  }
  std::vector<cplx> in(static_cast<std::size_t>(gd));
  const Index dim = pow2(n);
  for (Index base = 0; base < dim; ++base) {
    if (base & all) continue;
    for (Index s = 0; s < gd; ++s) in[s] = amps[base | offs[s]];
    for (Index r = 0; r < gd; ++r) {
      cplx acc = 0.0;
      for (Index s = 0; s < gd; ++s) acc += g(r, s) * in[s];
      amps[base | offs[r]] = acc;
    }
  }
}

inline void apply_gate(Vec& amps, int n, const std::vector<int>& qubits, const Mat& g) {
  apply_gate(amps.data(), n, qubits, g);
}

inline void apply_gate_to_columns(Mat& m, int n, const std::vector<int>& qubits, const Mat& g) {
  for (Index c = 0; c < m.cols(); ++c) apply_gate(m.col(c).data(), n, qubits, g);
}

// Embeds a gate on `qubits` into the full 2^n space.
inline Mat embed_gate(int n, const std::vector<int>& qubits, const Mat& g) {
  Mat m = Mat::Identity(pow2(n), pow2(n));
  apply_gate_to_columns(m, n, qubits, g);
  return m;
}

}  // namespace qrtlab
