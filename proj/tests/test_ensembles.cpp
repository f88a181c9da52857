// Copyright 2026 The qrtlab Authors.
// Licensed under the Apache License, Version 2.0.

#include <gtest/gtest.h>

#include <map>

#include "qrtlab/qrtlab.hpp"

using namespace qrtlab;

namespace {

Mat projector(const Vec& v) { return v * v.adjoint(); }

Mat kron_power(const Mat& m, int t) {
  Mat out = m;
  for (int k = 1; k < t; ++k) out = kron(out, m);
  return out;
}

}  // namespace

TEST(Haar, BothSamplersAreUnitary) {
  SeededRng r(1, 0);
  for (Index d : {1, 2, 5, 16}) {
    EXPECT_TRUE(is_unitary(haar_matrix_polar(d, r), 1e-12));
    EXPECT_TRUE(is_unitary(haar_matrix_qr(d, r), 1e-12));
  }
}

TEST(Haar, EntryAndTraceMoments) {
  // E|U_00|^2 = 1/d, E|U_00|^4 = 2/(d(d+1)), E|Tr U|^2 = 1, E|Tr U|^4 = 2.
  const Index d = 4;
  const int n = 20000;
  for (HaarMethod m : {HaarMethod::Polar, HaarMethod::QR}) {
    SeededRng r(2, static_cast<int>(m));
    std::vector<double> e2, e4, t2, t4;
    for (int k = 0; k < n; ++k) {
      const Mat u = haar_matrix(d, r, m);
      const double a = std::norm(u(0, 0)), tr = std::norm(u.trace());
      e2.push_back(a);
      e4.push_back(a * a);
      t2.push_back(tr);
      t4.push_back(tr * tr);
    }
    auto check = [](const std::vector<double>& x, double expect) {
      const auto st = mean_stat(x);
      EXPECT_LE(std::abs(st.mean - expect), 4.0 * st.std_err) << expect;
    };
    check(e2, 1.0 / d);
    check(e4, 2.0 / (d * (d + 1.0)));
    check(t2, 1.0);
    check(t4, 2.0);
  }
}

TEST(Haar, StateSecondMoment) {
  SeededRng r(3, 0);
  const Index d = 4;
  Mat acc = Mat::Zero(d * d, d * d);
  const int n = 20000;
  for (int k = 0; k < n; ++k) acc += kron_power(projector(haar_vector(d, r)), 2);
  acc /= n;
  EXPECT_LT((acc - haar_moment(d, 2).matrix()).norm(), 2e-2);
}

TEST(Z2Free, UnitariesRespectTheSymmetry) {
  SeededRng r(4, 0);
  for (int n : {1, 2, 3, 5}) {
    const Mat s = sigma_z_string(n);
    for (int k = 0; k < 20; ++k) {
      const Mat u = sample_z2_free_unitary(n, r).matrix();
      const Mat sus = s * u * s;
      const bool commuting = (sus - u).cwiseAbs().maxCoeff() <= 1e-9;
      const bool anti = (sus + u).cwiseAbs().maxCoeff() <= 1e-9;
      EXPECT_TRUE(commuting || anti);
      EXPECT_TRUE(is_unitary(u, 1e-10));
    }
  }
}

TEST(Z2Free, ProductsAndInversesStayFree) {
  SeededRng r(5, 0);
  const int n = 3;
  const Mat s = sigma_z_string(n);
  auto is_free = [&](const Mat& u) {
    const Mat sus = s * u * s;
    return (sus - u).cwiseAbs().maxCoeff() <= 1e-9 || (sus + u).cwiseAbs().maxCoeff() <= 1e-9;
  };
  for (int k = 0; k < 100; ++k) {
    const Mat a = sample_z2_free_unitary(n, r).matrix();
    const Mat b = sample_z2_free_unitary(n, r).matrix();
    EXPECT_TRUE(is_free(a * b));
    EXPECT_TRUE(is_free(a.adjoint()));
  }
}

TEST(Z2Free, BranchFrequency) {
  SeededRng r(6, 0);
  const Mat s = sigma_z_string(2);
  int anti = 0;
  const int n = 4000;
  Z2FreeOptions opt;
  opt.anticommuting_prob = 0.25;
  for (int k = 0; k < n; ++k) {
    const Mat u = sample_z2_free_unitary(2, r, opt).matrix();
    if ((s * u * s + u).cwiseAbs().maxCoeff() <= 1e-9) ++anti;
  }
  const double se = std::sqrt(0.25 * 0.75 / n);
  EXPECT_LE(std::abs(anti / static_cast<double>(n) - 0.25), 4 * se);
}

TEST(Z2Free, StatesLiveInOneSector) {
  SeededRng r(7, 0);
  int even = 0;
  for (int k = 0; k < 2000; ++k) {
    const auto s = sample_z2_free_state(4, r);
    const auto w = sector_weights(s.amps());
    EXPECT_TRUE(std::abs(w[0] - 1) < 1e-12 || std::abs(w[1] - 1) < 1e-12);
    if (w[0] > 0.5) ++even;
  }
  EXPECT_NEAR(even / 2000.0, 0.5, 4 * std::sqrt(0.25 / 2000));
}

TEST(Z2Free, StateLevelActionMatchesDenseUnitary) {
  // Second moments of F|psi> via a sampled dense F and via the shortcut.
  SeededRng r(8, 0);
  const int n = 2;
  Vec psi(4);
  psi << 0.6, cplx(0.0, 0.48), 0.2, cplx(-0.3, 0.1);
  psi.normalize();
  Mat m_dense = Mat::Zero(16, 16), m_fast = Mat::Zero(16, 16);
  const int n_samples = 20000;
  for (int k = 0; k < n_samples; ++k) {
    const Vec a = sample_z2_free_unitary(n, r).matrix() * psi;
    Vec b = psi;
    apply_random_z2_free(b, n, r);
    m_dense += kron_power(projector(a), 2);
    m_fast += kron_power(projector(b), 2);
  }
  EXPECT_LT((m_dense - m_fast).norm() / n_samples, 3e-2);
}

TEST(CoherenceFree, MonomialUnitaries) {
  SeededRng r(9, 0);
  for (int k = 0; k < 20; ++k) {
    const Mat u = sample_coherence_free_unitary(8, r).matrix();
    for (Index c = 0; c < 8; ++c) {
      int nz = 0;
      for (Index i = 0; i < 8; ++i)
        if (std::abs(u(i, c)) > 1e-12) {
          ++nz;
          EXPECT_NEAR(std::abs(u(i, c)), 1.0, 1e-12);
        }
      EXPECT_EQ(nz, 1);
    }
  }
}

TEST(EntanglementFree, LocalPairsAreFree) {
  SeededRng r(10, 0);
  const auto part = Bipartition::from_b_qubits(4, {0, 2});
  const QrtSpec q(QrtId::Entanglement, 4, part);
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(entangling_power_exact(q.sample_free_unitary(r).matrix(), part), 0.0, 1e-12);
  for (int k = 0; k < 20; ++k) EXPECT_NEAR(linear_entanglement(q.sample_free_state(r), part), 0.0, 1e-12);
}

TEST(Clifford, TableauIsSymplecticAndMatchesDense) {
  SeededRng r(11, 0);
  for (int n : {1, 2, 3, 4}) {
    for (int k = 0; k < 10; ++k) {
      const auto c = sample_clifford(n, r);
      EXPECT_TRUE(c.is_symplectic());
      const Mat u = c.dense();
      EXPECT_TRUE(is_unitary(u, 1e-10));
      for (int q = 0; q < n; ++q) {
        PauliString x{n, std::uint64_t{1} << (n - 1 - q), 0, 0};
        PauliString z{n, 0, std::uint64_t{1} << (n - 1 - q), 0};
        EXPECT_LT((u * x.dense() * u.adjoint() - c.x_image(q).dense()).norm(), 1e-10);
        EXPECT_LT((u * z.dense() * u.adjoint() - c.z_image(q).dense()).norm(), 1e-10);
      }
    }
  }
}

TEST(Clifford, GroupOrders) {
  EXPECT_EQ(enumerate_clifford_group(1).size(), 24u);
  EXPECT_EQ(enumerate_clifford_group(2).size(), 11520u);
}

TEST(Clifford, SingleQubitSamplerIsUniform) {
  const auto group = enumerate_clifford_group(1);
  std::map<std::vector<long long>, int> index;
  for (std::size_t i = 0; i < group.size(); ++i) index[detail::phase_key(group[i])] = static_cast<int>(i);
  ASSERT_EQ(index.size(), 24u);
  SeededRng r(12, 0);
  std::vector<int> counts(24, 0);
  const int n = 24000;
  for (int k = 0; k < n; ++k) {
    const auto it = index.find(detail::phase_key(sample_clifford(1, r).dense()));
    ASSERT_NE(it, index.end());
    ++counts[it->second];
  }
  double chi2 = 0;
  for (int c : counts) chi2 += (c - 1000.0) * (c - 1000.0) / 1000.0;
  EXPECT_LT(chi2, 60.0);  // 23 dof; p < 1e-4
}

TEST(Clifford, OrbitIsExactThreeDesignNotFour) {
  for (int n : {1, 2}) {
    const Index d = pow2(n);
    const auto group = enumerate_clifford_group(n);
    for (int t : {2, 3, 4}) {
      if (ipow(d, t) > 256) continue;
      Mat acc = Mat::Zero(ipow(d, t), ipow(d, t));
      for (const Mat& c : group) acc += kron_power(projector(c.col(0)), t);
      acc /= static_cast<double>(group.size());
      const double dist = (acc - haar_moment(d, t).matrix()).norm();
      if (t <= 3) {
        EXPECT_LT(dist, 1e-10) << "n=" << n << " t=" << t;
      } else {
        EXPECT_GT(dist, 1e-2);
      }
    }
  }
}

TEST(Clifford, SampledStatesFormTwoDesign) {
  SeededRng r(13, 0);
  const int n_samples = 20000;
  Mat acc2 = Mat::Zero(16, 16);
  for (int k = 0; k < n_samples; ++k) acc2 += kron_power(projector(sample_stabilizer_state(2, r).amps()), 2);
  acc2 /= n_samples;
  EXPECT_LT((acc2 - haar_moment(4, 2).matrix()).norm(), 2e-2);

  Mat acc3 = Mat::Zero(8, 8);
  for (int k = 0; k < n_samples; ++k) acc3 += kron_power(projector(sample_stabilizer_state(1, r).amps()), 3);
  acc3 /= n_samples;
  EXPECT_LT((acc3 - haar_moment(2, 3).matrix()).norm(), 2e-2);
}

TEST(Clifford, StabilizerStatesHaveFlatPauliSpectrum) {
  SeededRng r(14, 0);
  for (int n : {1, 3, 5}) {
    for (int k = 0; k < 5; ++k) {
      const auto s = sample_stabilizer_state(n, r);
      int ones = 0;
      for (const auto& p : all_pauli_strings(n)) {
        const double e = std::abs(pauli_expectation(s, p));
        EXPECT_TRUE(e < 1e-10 || std::abs(e - 1) < 1e-10);
        if (e > 0.5) ++ones;
      }
      EXPECT_EQ(ones, pow2(n));
    }
  }
}
