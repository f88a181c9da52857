// Copyright 2026 The qrtlab Authors.
// Licensed under the Apache License, Version 2.0.

#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "qrtlab/qrtlab.hpp"

using namespace qrtlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

Mat pauli_x() {
  Mat x = Mat::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  return x;
}

Mat expm_i(const Mat& h, double s) { return Mat(cplx(0, -s) * h).exp(); }

Mat kron_power(const Mat& m, int t) {
  Mat out = m;
  for (int k = 1; k < t; ++k) out = kron(out, m);
  return out;
}

CircuitConfig circuit(QrtSpec q, StepUnitary step, int depth, std::size_t reals, RgpPath path) {
  CircuitConfig c;
  c.qrt = std::move(q);
  c.step = std::move(step);
  c.depth = depth;
  c.n_realizations = reals;
  c.path = path;
  c.workers = default_workers();
  return c;
}

void expect_tracks_prediction(const ThermalizationCurve& c, double k_sigma, const std::string& tag) {
  for (std::size_t i = 0; i < c.t.size(); ++i)
    EXPECT_LE(std::abs(c.mean[i] - c.prediction[i]), k_sigma * c.std_err[i] + 1e-10) << tag << " t=" << c.t[i];
}

ThermalizationCurve synthetic_curve(double r_bar, double omega, int depth, double se) {
  ThermalizationCurve c;
  c.r_bar = r_bar;
  c.omega = omega;
  for (int t = 1; t <= depth; ++t) {
    c.t.push_back(t);
    c.mean.push_back(thermalization_prediction(r_bar, omega, t));
    c.std_err.push_back(se);
  }
  return c;
}

}  // namespace

TEST(Gates, MatchMatrixExponentials) {
  for (double a : {0.1, kPi / 24, 1.3}) EXPECT_LT((rx_gate(a) - expm_i(pauli_x(), a)).norm(), 1e-12);
  const Mat xx = kron(pauli_x(), pauli_x());
  for (double c : {0.2, kPi / 4, 2.0}) EXPECT_LT((xx_gate(c) - expm_i(xx, c / 2)).norm(), 1e-12);
}

TEST(StepUnitary, ActionsAgree) {
  SeededRng r(1, 0);
  const Mat g1 = rx_gate(0.3), g2 = haar_matrix_polar(4, r);
  const auto tp = StepUnitary::tensor_power(4, g1);
  EXPECT_LT((tp.matrix() - kron_power(g1, 4)).norm(), 1e-12);
  const auto em = StepUnitary::embedded(4, {3, 1}, g2);
  EXPECT_LT((em.matrix() - embed_gate(4, {3, 1}, g2)).norm(), 1e-12);
  Vec v = haar_vector(16, r);
  const Vec expect = em.matrix() * v;
  em.apply(v);
  EXPECT_LT((v - expect).norm(), 1e-12);
  Mat w = haar_matrix_polar(16, r);
  const Mat we = tp.matrix() * w;
  tp.apply_columns(w);
  EXPECT_LT((w - we).norm(), 1e-12);
}

TEST(Thermalization, FreeStepKeepsCurveAtZero) {
  for (QrtId id : {QrtId::Z2Asymmetry, QrtId::Coherence, QrtId::Nonstabilizerness}) {
    const QrtSpec q(id, 3);
    SeededRng r(2, 0);
    const auto c = thermalization_curve_rgp(
        circuit(q, StepUnitary::dense(q.sample_free_unitary(r)), 8, 20, RgpPath::Auto), SeededRng(3, 0));
    EXPECT_NEAR(c.omega, 0.0, 1e-10);
    for (double m : c.mean) EXPECT_NEAR(m, 0.0, 1e-10) << q.name();
  }
}

TEST(Thermalization, Z2ExactPathFollowsLaw) {
  const QrtSpec q(QrtId::Z2Asymmetry, 6);
  const auto c = thermalization_curve_rgp(
      circuit(q, StepUnitary::tensor_power(6, rx_gate(kPi / 24)), 15, 200, RgpPath::Exact), SeededRng(4, 0));
  EXPECT_NEAR(c.r_bar, haar_agp(6), 1e-15);
  expect_tracks_prediction(c, 4.0, "z2 exact");
  // The first step is deterministic: R_p(F U) = R_p(U).
  EXPECT_NEAR(c.mean[0], c.r_bar * c.omega, 1e-10);
}

TEST(Thermalization, StatePathAgreesWithExactPath) {
  const QrtSpec q(QrtId::Z2Asymmetry, 4);
  const auto step = StepUnitary::tensor_power(4, rx_gate(kPi / 12));
  const auto s = thermalization_curve_rgp(circuit(q, step, 10, 4000, RgpPath::State), SeededRng(5, 0));
  expect_tracks_prediction(s, 4.0, "z2 state");
}

TEST(Thermalization, OtherTheoriesFollowLaw) {
  {
    const QrtSpec q(QrtId::Coherence, 4);
    const auto c = thermalization_curve_rgp(
        circuit(q, StepUnitary::tensor_power(4, rx_gate(0.2)), 12, 200, RgpPath::Exact), SeededRng(6, 0));
    expect_tracks_prediction(c, 4.0, "coherence");
  }
  {
    // The step must cross the 2|2 cut to generate entanglement.
    const QrtSpec q(QrtId::Entanglement, 4);
    const auto c = thermalization_curve_rgp(
        circuit(q, StepUnitary::embedded(4, {1, 2}, xx_gate(0.6)), 12, 200, RgpPath::Exact), SeededRng(7, 0));
    EXPECT_GT(c.omega, 0.05);
    expect_tracks_prediction(c, 4.0, "entanglement");
  }
  {
    const QrtSpec q(QrtId::Nonstabilizerness, 3);
    const auto c = thermalization_curve_rgp(
        circuit(q, StepUnitary::embedded(3, {0, 1}, xx_gate(kPi / 4)), 12, 2000, RgpPath::State), SeededRng(8, 0));
    expect_tracks_prediction(c, 4.0, "magic");
  }
}

TEST(Thermalization, ErrorBarsShrinkWithRealizations) {
  const QrtSpec q(QrtId::Z2Asymmetry, 4);
  const auto step = StepUnitary::tensor_power(4, rx_gate(kPi / 12));
  const auto a = thermalization_curve_rgp(circuit(q, step, 3, 400, RgpPath::State), SeededRng(9, 0));
  const auto b = thermalization_curve_rgp(circuit(q, step, 3, 1600, RgpPath::State), SeededRng(9, 1));
  EXPECT_NEAR(a.std_err[2] / b.std_err[2], 2.0, 0.6);
}

TEST(Fit, RecoversSyntheticRate) {
  const auto c = synthetic_curve(0.4, 0.3, 30, 1e-6);
  const auto fr = fit_exponential_rate(c);
  EXPECT_NEAR(fr.rate, -std::log(0.7), 1e-6);
  EXPECT_FALSE(fr.oscillating);
  EXPECT_GE(fr.n_points, 5u);
  EXPECT_NEAR(fr.r_squared, 1.0, 1e-9);
}

TEST(Fit, FlagsOscillation) {
  const auto c = synthetic_curve(0.4, 1.5, 30, 1e-6);
  const auto fr = fit_exponential_rate(c);
  EXPECT_TRUE(fr.oscillating);
  EXPECT_NEAR(fr.rate, -std::log(0.5), 1e-6);
}

TEST(Fit, RefusesSaturatedCurves) {
  EXPECT_THROW(fit_exponential_rate(synthetic_curve(0.4, 0.99, 30, 1e-6)), DomainError);
}

TEST(Fit, LongTimeReference) {
  auto c = synthetic_curve(0.4, 0.3, 40, 1e-6);
  for (double& m : c.mean) m *= 0.9;  // saturates below r_bar
  FitOptions opt;
  opt.long_time_reference = true;
  const auto fr = fit_exponential_rate(c, opt);
  EXPECT_NEAR(fr.reference, 0.36, 1e-5);
  EXPECT_NEAR(fr.rate, -std::log(0.7), 1e-3);
  EXPECT_NEAR(long_time_average({1, 2, 3, 4, 5, 6, 7, 8}), 7.5, 1e-15);
}

TEST(ProjectedEnsemble, GhzOutcomes) {
  Vec v = Vec::Zero(8);
  v(0) = v(7) = 1.0 / std::sqrt(2.0);
  const auto ens = build_projected_ensemble(StateVector(3, v), Bipartition::contiguous(3, 2));
  ASSERT_EQ(ens.entries.size(), 2u);
  EXPECT_NEAR(ens.entries[0].p, 0.5, 1e-15);
  EXPECT_NEAR(std::abs(ens.entries[0].phi[0]), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(ens.entries[1].phi[3]), 1.0, 1e-15);
  EXPECT_NEAR(ens.total_probability(), 1.0, 1e-15);
}

TEST(ProjectedEnsemble, MomentsOfARandomState) {
  SeededRng r(10, 0);
  const auto part = Bipartition::contiguous(6, 2);
  const StateVector s = haar_state(6, r);
  const auto ens = build_projected_ensemble(s, part);
  EXPECT_EQ(ens.entries.size(), 16u);
  EXPECT_NEAR(ens.total_probability(), 1.0, 1e-12);
  EXPECT_LT((ensemble_moment(ens, 1).matrix() - partial_trace(s, part, Part::A).matrix()).norm(), 1e-12);
  for (int t : {2, 3, 4}) {
    const Mat m = ensemble_moment(ens, t).matrix();
    const Mat pi = permutation_projector(4, t).matrix();
    EXPECT_NEAR(m.trace().real(), 1.0, 1e-12);
    EXPECT_LT((pi * m * pi - m).norm(), 1e-10);
    const double dense = trace_norm_hermitian(m - pi / pi.trace().real());
    EXPECT_NEAR(design_distance(ens, t), dense, 1e-10) << t;
  }
}

TEST(DesignDistance, SimpleEnsembles) {
  // A single product state on one qubit.
  const auto single = build_projected_ensemble(StateVector(2), Bipartition::contiguous(2, 1));
  EXPECT_NEAR(design_distance(single, 2), 4.0 / 3.0, 1e-12);
  EXPECT_NEAR(design_distance_sym(Mat::Identity(5, 5) / 5.0), 0.0, 1e-15);

  // The six single-qubit stabilizer states are a 3-design but not a 4-design.
  ProjectedEnsemble six;
  six.part = Bipartition::contiguous(2, 1);
  const double h = 1.0 / std::sqrt(2.0);
  const cplx vecs[6][2] = {{1, 0}, {0, 1}, {h, h}, {h, -h}, {h, cplx(0, h)}, {h, cplx(0, -h)}};
  for (const auto& a : vecs) {
    Vec v(2);
    v << a[0], a[1];
    six.entries.push_back({0, 1.0 / 6.0, StateVector(1, v)});
  }
  EXPECT_NEAR(design_distance(six, 2), 0.0, 1e-12);
  EXPECT_NEAR(design_distance(six, 3), 0.0, 1e-12);
  EXPECT_GT(design_distance(six, 4), 0.01);
}

TEST(DesignDistance, CliffordSymmetrization) {
  SeededRng r(11, 0);
  const auto ens = build_projected_ensemble(haar_state(4, r), Bipartition::contiguous(4, 2));
  const SymmetricBasis b2(4, 2), b4(4, 4);
  const Mat s2 = clifford_symmetrize_sym(ensemble_moment_sym(ens, b2), 2, 2);
  EXPECT_NEAR(design_distance_sym(s2), 0.0, 1e-10);
  const Mat s4 = clifford_symmetrize_sym(ensemble_moment_sym(ens, b4), 2, 4);
  EXPECT_NEAR(s4.trace().real(), 1.0, 1e-12);
  EXPECT_LT((clifford_symmetrize_sym(s4, 2, 4) - s4).norm(), 1e-10);
}

TEST(DeepThermalization, StabilizerGeneratorAtTimeZero) {
  const QrtSpec q(QrtId::Nonstabilizerness, 6);
  auto cfg = circuit(q, StepUnitary::embedded(6, {2, 3}, xx_gate(kPi / 4)), 1, 40, RgpPath::State);
  cfg.part = Bipartition::contiguous(6, 2);
  cfg.design_orders = {2, 4};
  const auto res = deep_thermalization_run(cfg, SeededRng(12, 0));
  EXPECT_NEAR(res.curve.mean[0], 0.0, 1e-10);
  const double d2 = design_distance_sym(clifford_symmetrize_sym(res.pooled_initial_moments[0], 2, 2));
  const double d4 = design_distance_sym(clifford_symmetrize_sym(res.pooled_initial_moments[1], 2, 4));
  EXPECT_LE(d2, 1e-8);
  // Oracle: distance of the uniform two-qubit stabilizer-state moment.
  const auto group = enumerate_clifford_group(2);
  Mat m = Mat::Zero(256, 256);
  for (const Mat& c : group) m += kron_power(c.col(0) * c.col(0).adjoint(), 4);
  m /= static_cast<double>(group.size());
  const Mat pi = permutation_projector(4, 4).matrix();
  EXPECT_NEAR(d4, trace_norm_hermitian(m - pi / pi.trace().real()), 1e-8);
  EXPECT_GT(d4, 0.01);
}

TEST(DeepThermalization, ResourceStartsFreeAndGrows) {
  const QrtSpec q(QrtId::Z2Asymmetry, 6);
  auto cfg = circuit(q, StepUnitary::tensor_power(6, rx_gate(kPi / 12)), 12, 100, RgpPath::State);
  cfg.part = Bipartition::contiguous(6, 3);
  const auto c = deep_thermalization_experiment(cfg, SeededRng(13, 0));
  EXPECT_EQ(c.t.front(), 0);
  EXPECT_NEAR(c.mean[0], 0.0, 1e-10);
  EXPECT_NEAR(c.global_mean[0], 0.0, 1e-10);
  EXPECT_GT(c.mean.back(), 0.8);
  EXPECT_NEAR(c.prediction[0], 0.0, 1e-15);
}

TEST(DeepThermalization, RejectsOversizedDesignOrder) {
  const QrtSpec q(QrtId::Z2Asymmetry, 8);
  auto cfg = circuit(q, StepUnitary::tensor_power(8, rx_gate(0.1)), 2, 4, RgpPath::State);
  cfg.part = Bipartition::contiguous(8, 4);
  cfg.design_orders = {4};
  EXPECT_THROW(deep_thermalization_run(cfg, SeededRng(14, 0)), SizeGuardError);
}
