// Copyright 2026 The qrtlab Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <string>

#include "qrtlab/resources.hpp"

namespace qrtlab {

enum class QrtId { Z2Asymmetry, Nonstabilizerness, Entanglement, Coherence };

inline std::string to_string(QrtId id) {
  switch (id) {
    case QrtId::Z2Asymmetry: return "z2_asymmetry";
    case QrtId::Nonstabilizerness: return "nonstabilizerness";
    case QrtId::Entanglement: return "entanglement";
    case QrtId::Coherence: return "coherence";
  }
  return "unknown";
}

inline QrtId parse_qrt_id(const std::string& s) {
  if (s == "z2_asymmetry" || s == "z2") return QrtId::Z2Asymmetry;
  if (s == "nonstabilizerness" || s == "magic") return QrtId::Nonstabilizerness;
  if (s == "entanglement") return QrtId::Entanglement;
  if (s == "coherence") return QrtId::Coherence;
  throw SchemaError("unknown qrt '" + s + "'");
}

// One resource theory on N qubits. `cut` is the A|B split that defines
// entanglement and is ignored by the other theories.
class QrtSpec {
 public:
  QrtSpec() : QrtSpec(QrtId::Z2Asymmetry, 2) {}
  QrtSpec(QrtId id, int n) : QrtSpec(id, n, Bipartition::contiguous(n, n / 2)) {}
  QrtSpec(QrtId id, int n, Bipartition cut) : id_(id), n_(n), cut_(std::move(cut)) {
    require(n_ >= 1, "QRT needs at least one qubit");
    require_size(n_ <= guard::kMaxQubits, "QRT size exceeds N = 12");
    if (id_ == QrtId::Entanglement) {
      require(cut_.n() == n_ && cut_.proper(), "entanglement needs a proper A|B cut over all qubits");
    }
  }

  QrtId id() const { return id_; }
  std::string name() const { return to_string(id_); }
  int n_qubits() const { return n_; }
  Index dim() const { return pow2(n_); }
  const Bipartition& cut() const { return cut_; }
  double anticommuting_prob() const { return anticommuting_prob_; }
  void set_anticommuting_prob(double p) {
    require(p >= 0.0 && p <= 1.0, "branch probability must lie in [0, 1]");
    anticommuting_prob_ = p;
  }

  int replica_order() const { return id_ == QrtId::Nonstabilizerness ? 4 : 2; }

  StateVector sample_free_state(SeededRng& rng) const {
    switch (id_) {
      case QrtId::Z2Asymmetry: return sample_z2_free_state(n_, rng);
      case QrtId::Nonstabilizerness: return sample_stabilizer_state(n_, rng);
      case QrtId::Entanglement: return sample_product_state(cut_, rng);
      case QrtId::Coherence: return StateVector::basis(n_, static_cast<Index>(rng.index(static_cast<std::uint64_t>(dim()))));
    }
    return StateVector(n_);
  }

  DenseOperator sample_free_unitary(SeededRng& rng) const {
    switch (id_) {
      case QrtId::Z2Asymmetry: {
        Z2FreeOptions opt;
        opt.anticommuting_prob = anticommuting_prob_;
        return sample_z2_free_unitary(n_, rng, opt);
      }
      case QrtId::Nonstabilizerness: return sample_clifford(n_, rng).dense_operator();
      case QrtId::Entanglement: {
        const DenseOperator f = sample_local_unitary_pair(cut_.d_a(), cut_.d_b(), rng);
        return DenseOperator::unitary(from_ab_order(f.matrix()));
      }
      case QrtId::Coherence: return sample_coherence_free_unitary(dim(), rng);
    }
    return DenseOperator::identity(dim());
  }

  // Replaces amps by F amps for a freshly sampled free F. Equal in
  // distribution to applying sample_free_unitary, without building F when a
  // cheaper exact route exists.
  void apply_random_free(Vec& amps, SeededRng& rng) const {
    switch (id_) {
      case QrtId::Z2Asymmetry: apply_random_z2_free(amps, n_, rng, anticommuting_prob_); return;
      case QrtId::Nonstabilizerness: apply_random_clifford(amps, n_, rng); return;
      case QrtId::Entanglement: {
        const Mat ua = haar_matrix_polar(cut_.d_a(), rng);
        const Mat ub = haar_matrix_polar(cut_.d_b(), rng);
        Mat m(cut_.d_a(), cut_.d_b());
        for (Index a = 0; a < cut_.d_a(); ++a)
          for (Index b = 0; b < cut_.d_b(); ++b) m(a, b) = amps(cut_.index(a, b));
        const Mat r = ua * m * ub.transpose();
        for (Index a = 0; a < cut_.d_a(); ++a)
          for (Index b = 0; b < cut_.d_b(); ++b) amps(cut_.index(a, b)) = r(a, b);
        return;
      }
      case QrtId::Coherence: apply_random_coherence_free(amps, rng); return;
    }
  }

  double resource(const StateVector& s) const {
    switch (id_) {
      case QrtId::Z2Asymmetry: return linear_asymmetry(s);
      case QrtId::Nonstabilizerness: return linear_stabilizer_entropy(s);
      case QrtId::Entanglement: return linear_entanglement(s, cut_);
      case QrtId::Coherence: return coherence(s);
    }
    return 0.0;
  }

  bool has_exact_rgp() const { return id_ != QrtId::Nonstabilizerness || n_ <= 4; }

  double rgp_exact_matrix(const Mat& u) const {
    switch (id_) {
      case QrtId::Z2Asymmetry: return agp_of_matrix(u, n_);
      case QrtId::Nonstabilizerness:
        require_size(n_ <= 4, "exact non-stabilizing power requires N <= 4");
        return nonstabilizing_power_exact(u, n_);
      case QrtId::Entanglement: return entangling_power_exact(u, cut_);
      case QrtId::Coherence: return cgp_of_matrix(u);
    }
    return 0.0;
  }

  double rgp_exact(const DenseOperator& u) const {
    require_dim(u.dim() == dim(), "unitary does not match QRT size");
    require_unitary_input(u);
    return rgp_exact_matrix(u.matrix());
  }

  RgpValue rgp_monte_carlo(const DenseOperator& u, std::size_t n_samples, const SeededRng& rng, int workers = 1) const {
    require_dim(u.dim() == dim(), "unitary does not match QRT size");
    require(n_samples >= 2, "Monte-Carlo path needs at least two samples");
    auto vals = parallel_map<double>(n_samples, workers, [&](std::size_t i) {
      SeededRng r = rng.derive(i);
      return resource(apply_unitary(sample_free_state(r), u));
    });
    const auto st = mean_stat(vals);
    return {st.mean, st.std_err};
  }

  double haar_rgp() const {
    switch (id_) {
      case QrtId::Z2Asymmetry: return haar_agp(n_);
      case QrtId::Nonstabilizerness: return haar_rgp_nonstab(n_);
      case QrtId::Entanglement: return haar_entangling_power(cut_.d_a(), cut_.d_b());
      case QrtId::Coherence: return haar_cgp(dim());
    }
    return 0.0;
  }

  DenseOperator free_moment() const {
    switch (id_) {
      case QrtId::Z2Asymmetry: return free_state_second_moment_z2(n_);
      case QrtId::Nonstabilizerness: return stabilizer_fourth_moment(n_);
      case QrtId::Entanglement: return product_state_second_moment(cut_);
      case QrtId::Coherence: return coherence_free_moment(dim());
    }
    return {};
  }

  DenseOperator haar_moment_op() const { return haar_moment(dim(), replica_order()); }

  // Entanglement cut restricted to the kept (A) side of a protocol split.
  Bipartition kept_cut(const Bipartition& protocol_part) const {
    std::vector<Part> a;
    for (int q : protocol_part.qubits_a()) a.push_back(cut_.assignment()[q]);
    return Bipartition(std::move(a));
  }

  // Resource of a projected state living on the kept qubits of `protocol_part`.
  double subsystem_resource(const StateVector& phi, const Bipartition& protocol_part) const {
    switch (id_) {
      case QrtId::Z2Asymmetry: return linear_asymmetry(phi);
      case QrtId::Nonstabilizerness: return linear_stabilizer_entropy(phi);
      case QrtId::Entanglement: return linear_entanglement(phi, kept_cut(protocol_part));
      case QrtId::Coherence: return coherence(phi);
    }
    return 0.0;
  }

 private:
  // Maps a Kronecker product u_A (x) u_B given in (a, b) order to qubit order.
  Mat from_ab_order(const Mat& f) const {
    const Index da = cut_.d_a(), db = cut_.d_b();
    Mat out(dim(), dim());
    for (Index a2 = 0; a2 < da; ++a2)
      for (Index b2 = 0; b2 < db; ++b2)
        for (Index a1 = 0; a1 < da; ++a1)
          for (Index b1 = 0; b1 < db; ++b1)
            out(cut_.index(a1, b1), cut_.index(a2, b2)) = f(a1 * db + b1, a2 * db + b2);
    return out;
  }

  QrtId id_;
  int n_;
  Bipartition cut_;
  double anticommuting_prob_ = 0.5;
};

// Haar average of the resource over states of the kept subsystem.
inline double haar_subsystem_resource(const QrtSpec& qrt, const Bipartition& protocol_part) {
  const int na = protocol_part.n_a();
  require(na >= 1, "subsystem must contain at least one qubit");
  switch (qrt.id()) {
    case QrtId::Z2Asymmetry: return haar_agp(na);
    case QrtId::Nonstabilizerness: return haar_rgp_nonstab(na);
    case QrtId::Entanglement: {
      const Bipartition k = qrt.kept_cut(protocol_part);
      require(k.proper(), "kept region must contain qubits from both sides of the cut");
      return haar_entangling_power(k.d_a(), k.d_b());
    }
    case QrtId::Coherence: return haar_cgp(pow2(na));
  }
  return 0.0;
}

inline double haar_subsystem_resource(const QrtSpec& qrt, int n_a) {
  require(qrt.id() != QrtId::Entanglement, "entanglement needs the full protocol split");
  return haar_subsystem_resource(qrt, Bipartition::contiguous(qrt.n_qubits(), n_a));
}

}  // namespace qrtlab
