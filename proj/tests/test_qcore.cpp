// Copyright 2026 The qrtlab Authors.
// Licensed under the Apache License, Version 2.0.

#include <gtest/gtest.h>

#include "qrtlab/qrtlab.hpp"

using namespace qrtlab;

namespace {

Vec random_vec(Index d, SeededRng& r) {
  Vec v(d);
  for (Index i = 0; i < d; ++i) v(i) = r.complex_normal();
  return v.normalized();
}

// Brute-force tensor of t copies via repeated Kronecker products.
Mat kron_power(const Mat& m, int t) {
  Mat out = m;
  for (int k = 1; k < t; ++k) out = kron(out, m);
  return out;
}

}  // namespace

TEST(StateVector, ConstructionAndNormalization) {
  StateVector s(3);
  EXPECT_EQ(s.dim(), 8);
  EXPECT_DOUBLE_EQ(std::abs(s[0]), 1.0);
  Vec v = Vec::Ones(4);
  StateVector t(2, v);
  EXPECT_NEAR(t.norm(), 1.0, 1e-15);
  EXPECT_THROW(StateVector(2, Vec::Ones(3)), DimensionError);
  EXPECT_THROW(StateVector(0), DimensionError);
  EXPECT_TRUE(StateVector::basis(2, 3).is_normalized());
}

TEST(DenseOperator, FlagsAreValidated) {
  Mat m = Mat::Identity(2, 2);
  m(0, 1) = 0.5;
  EXPECT_THROW(DenseOperator::unitary(m), DomainError);
  EXPECT_THROW(DenseOperator(m, OpKind::Hermitian), DomainError);
  EXPECT_NO_THROW(DenseOperator(m));
  EXPECT_THROW(DenseOperator(Mat::Zero(2, 3)), DimensionError);
  const DenseOperator h = DenseOperator::hermitian(m);
  EXPECT_TRUE(is_hermitian(h.matrix(), 0.0));
}

TEST(Bipartition, IndexMatchesBitLayout) {
  // A = {1, 3}, B = {0, 2, 4}.
  const Bipartition p({Part::B, Part::A, Part::B, Part::A, Part::B});
  EXPECT_EQ(p.n_a(), 2);
  EXPECT_EQ(p.n_b(), 3);
  for (Index a = 0; a < 4; ++a)
    for (Index b = 0; b < 8; ++b) {
      // Qubit q carries bit 4 - q of the full index; first listed qubit is
      // the most significant digit of its subsystem index.
      int bits[5];
      bits[1] = (a >> 1) & 1;
      bits[3] = a & 1;
      bits[0] = (b >> 2) & 1;
      bits[2] = (b >> 1) & 1;
      bits[4] = b & 1;
      Index x = 0;
      for (int q = 0; q < 5; ++q) x = 2 * x + bits[q];
      EXPECT_EQ(p.index(a, b), x);
    }
}

TEST(Projection, GhzOutcomes) {
  Vec v = Vec::Zero(8);
  v(0) = v(7) = 1.0 / std::sqrt(2.0);
  const StateVector ghz(3, v);
  const auto part = Bipartition::contiguous(3, 1);
  const auto p0 = project_subsystem(ghz, part, 0);
  const auto p3 = project_subsystem(ghz, part, 3);
  const auto p1 = project_subsystem(ghz, part, 1);
  EXPECT_NEAR(p0.probability, 0.5, 1e-15);
  EXPECT_NEAR(p3.probability, 0.5, 1e-15);
  EXPECT_FALSE(p1.defined);
  EXPECT_NEAR(std::abs((*p0.projected)[0]), 1.0, 1e-15);
  EXPECT_NEAR(std::abs((*p3.projected)[1]), 1.0, 1e-15);
}

TEST(Projection, ProbabilitiesSumToOne) {
  SeededRng r(3, 0);
  const StateVector s(5, random_vec(32, r));
  const auto part = Bipartition::from_b_qubits(5, {0, 3});
  double tot = 0;
  for (Index b = 0; b < 4; ++b) {
    const auto pr = project_subsystem(s, part, b);
    tot += pr.probability;
    EXPECT_NEAR(pr.projected->norm(), 1.0, 1e-12);
  }
  EXPECT_NEAR(tot, 1.0, 1e-12);
}

TEST(PartialTrace, MatchesDensityContraction) {
  SeededRng r(4, 0);
  const StateVector s(3, random_vec(8, r));
  const auto part = Bipartition::from_b_qubits(3, {1});
  const Mat rho = s.density().matrix();
  Mat ra = Mat::Zero(4, 4);
  for (Index a1 = 0; a1 < 4; ++a1)
    for (Index a2 = 0; a2 < 4; ++a2)
      for (Index b = 0; b < 2; ++b) ra(a1, a2) += rho(part.index(a1, b), part.index(a2, b));
  EXPECT_LT((partial_trace(s, part, Part::A).matrix() - ra).norm(), 1e-13);
  EXPECT_NEAR(partial_trace(s, part, Part::B).trace().real(), 1.0, 1e-13);
}

TEST(Replicas, PermutationOperatorsCompose) {
  const Index d = 2;
  const auto perms = all_permutations(3);
  ASSERT_EQ(perms.size(), 6u);
  for (const auto& p : perms)
    for (const auto& q : perms) {
      std::vector<int> pq(3);
      for (int k = 0; k < 3; ++k) pq[k] = p[q[k]];
      const Mat lhs = permutation_operator(d, p) * permutation_operator(d, q);
      EXPECT_LT((lhs - permutation_operator(d, pq)).norm(), 1e-14);
    }
}

TEST(Replicas, SymmetricProjector) {
  for (Index d : {2, 3, 4})
    for (int t : {2, 3, 4}) {
      if (ipow(d, t) > 256) continue;
      const Mat pi = permutation_projector(d, t).matrix();
      EXPECT_LT((pi * pi - pi).norm(), 1e-12);
      EXPECT_NEAR(pi.trace().real(), binomial(d + t - 1, t), 1e-10);
    }
}

TEST(Replicas, SizeGuard) {
  EXPECT_THROW(permutation_projector(16, 4), SizeGuardError);
  EXPECT_THROW(replica_tensor(DenseOperator::identity(128), 2), SizeGuardError);
}

TEST(Replicas, ConjugationMatchesExplicitTensorPower) {
  SeededRng r(5, 0);
  const Mat w = haar_matrix_polar(3, r);
  const Mat x = ginibre_matrix(27, 27, r);
  const Mat w3 = kron_power(w, 3);
  EXPECT_LT((conjugate_replicas(x, w, 3) - w3 * x * w3.adjoint()).norm(), 1e-12);
  EXPECT_LT((replica_tensor(DenseOperator::unitary(w), 3).matrix() - w3).norm(), 1e-12);
  // Single-factor action.
  const Mat e = kron(kron(Mat::Identity(3, 3), w), Mat::Identity(3, 3));
  EXPECT_LT((apply_to_replica_factor(x, w, 3, 1) - e * x).norm(), 1e-12);
}

TEST(SymmetricBasis, IsometryAndCoordinates) {
  SeededRng r(6, 0);
  for (auto [d, t] : {std::pair<Index, int>{2, 2}, {4, 2}, {4, 4}, {3, 3}}) {
    const SymmetricBasis sb(d, t);
    EXPECT_NEAR(static_cast<double>(sb.size()), sym_dim(d, t), 1e-12);
    const Mat v = sb.isometry();
    EXPECT_LT((v.adjoint() * v - Mat::Identity(sb.size(), sb.size())).norm(), 1e-12);
    EXPECT_LT((v * v.adjoint() - permutation_projector(d, t).matrix()).norm(), 1e-12);
    const Vec phi = random_vec(d, r);
    const Vec full = tensor_power(phi, t);
    EXPECT_LT((sb.coords(phi) - v.adjoint() * full).norm(), 1e-12);
    EXPECT_LT((sb.coords_of_symmetric(full) - v.adjoint() * full).norm(), 1e-12);
  }
}

TEST(TraceNorm, ProductStateAgainstHaarSecondMoment) {
  // Spectrum of |00><00| - Pi/3 is {2/3, -1/3, -1/3, 0}.
  Mat m = -permutation_projector(2, 2).matrix() / 3.0;
  m(0, 0) += 1.0;
  EXPECT_NEAR(trace_norm_hermitian(m), 4.0 / 3.0, 1e-12);
}

TEST(Gates, ApplyGateMatchesEmbedding) {
  SeededRng r(8, 0);
  const Mat g = haar_matrix_polar(4, r);
  const Vec v = random_vec(16, r);
  // Qubits (2, 0): reorder to check non-adjacent, reversed placement.
  Vec w = v;
  apply_gate(w, 4, {2, 0}, g);
  EXPECT_LT((w - embed_gate(4, {2, 0}, g) * v).norm(), 1e-12);
  // Contiguous case against an explicit Kronecker product.
  Vec u = v;
  apply_gate(u, 4, {1, 2}, g);
  const Mat k = kron(kron(Mat::Identity(2, 2), g), Mat::Identity(2, 2));
  EXPECT_LT((u - k * v).norm(), 1e-12);
  Mat cols = Mat::Identity(16, 16);
  apply_gate_to_columns(cols, 4, {1, 2}, g);
  EXPECT_LT((cols - k).norm(), 1e-12);
}

TEST(Pauli, LabelsPhasesAndProducts) {
  const auto p = PauliString::from_label("XYZ");
  EXPECT_EQ(p.label(), "+XYZ");
  EXPECT_EQ(PauliString::from_label("-iZX").label(), "-iZX");
  SeededRng r(9, 0);
  const auto all = all_pauli_strings(2);
  for (int k = 0; k < 50; ++k) {
    PauliString a = all[r.index(16)], b = all[r.index(16)];
    a.phase = static_cast<int>(r.index(4));
    const Mat prod = a.dense() * b.dense();
    EXPECT_LT((multiply(a, b).dense() - prod).norm(), 1e-14);
    const Mat comm = a.dense() * b.dense() - b.dense() * a.dense();
    EXPECT_EQ(commutes(a, b), comm.norm() < 1e-12);
  }
  const Mat y = PauliString::from_label("Y").dense();
  EXPECT_NEAR(std::abs(y(0, 1) - cplx(0, -1)), 0.0, 1e-15);
}

TEST(Pauli, ExpectationMatchesDense) {
  SeededRng r(10, 0);
  const StateVector s(3, random_vec(8, r));
  for (const auto& p : all_pauli_strings(3)) {
    const cplx dense = s.amps().dot(p.dense() * s.amps());
    EXPECT_NEAR(pauli_expectation(s, p), dense.real(), 1e-13);
  }
}
