// Copyright 2026 The qrtlab Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qrtlab/qrt.hpp"

namespace qrtlab {

// Protocol split: A is kept, B is measured in the computational basis.
inline constexpr Index kAllOutcomes = -1;

struct ProtocolConstants {
  double k1 = 0.0;  // Haar value of <p_b^t>
  double k2 = 0.0;  // free value of <p_b^t>
};

inline void require_protocol_split(const QrtSpec& qrt, const Bipartition& part) {
  require_dim(part.n() == qrt.n_qubits(), "bipartition does not match QRT size");
  if (!part.proper()) throw DomainError("protocol needs 0 < N_A < N");
}

inline ProtocolConstants protocol_constants(const QrtSpec& qrt, const Bipartition& part) {
  require_protocol_split(qrt, part);
  const double d = static_cast<double>(qrt.dim());
  const double da = static_cast<double>(part.d_a());
  const double db = static_cast<double>(part.d_b());
  ProtocolConstants c;
  switch (qrt.id()) {
    case QrtId::Z2Asymmetry:
      c.k1 = da * (da + 1.0) / (d * (d + 1.0));
      c.k2 = da * (da + 2.0) / (d * (d + 2.0));
      break;
    case QrtId::Nonstabilizerness: {
      const int n = qrt.n_qubits(), na = part.n_a();
      const double tqp = tr_q_pi(n), tp = tr_pi(qrt.dim(), 4);
      const double tqp_a = tr_q_pi(na), tp_a = tr_pi(part.d_a(), 4);
      const double beta = (1.0 - 1.0 / d) / (tp - tqp);
      c.k1 = tp_a / tp;
      c.k2 = tqp_a / (d * db * tqp) + beta * (tp_a - tqp_a / db);
      break;
    }
    case QrtId::Entanglement: {
      // Measured block is A2 u B2 with A2 in the entanglement cut's A side.
      const Bipartition& cut = qrt.cut();
      const Bipartition kept = qrt.kept_cut(part);
      const double a = static_cast<double>(cut.d_a()), b = static_cast<double>(cut.d_b());
      const double a1 = static_cast<double>(kept.d_a()), b1 = static_cast<double>(kept.d_b());
      const double dk = static_cast<double>(part.d_a());
      c.k1 = dk * (dk + 1.0) / (d * (d + 1.0));
      c.k2 = a1 * (a1 + 1.0) * b1 * (b1 + 1.0) / (a * (a + 1.0) * b * (b + 1.0));
      break;
    }
    case QrtId::Coherence:
      c.k1 = da * (da + 1.0) / (d * (d + 1.0));
      c.k2 = 1.0 / db;
      break;
  }
  if (!(c.k2 > c.k1)) throw NumericError("protocol constants violate k2 > k1");
  return c;
}

// Source of the unitary applied in step two of the protocol.
struct UnitarySource {
  std::optional<DenseOperator> fixed;
  bool haar_per_shot = false;

  static UnitarySource of(DenseOperator u) { return {std::move(u), false}; }
  static UnitarySource haar() { return {std::nullopt, true}; }
};

struct ProtocolOptions {
  int workers = 1;
  // Number of simulated measurements per shot; 0 means exact Born weights.
  std::size_t finite_shots = 0;
};

struct ProtocolRun {
  QrtId qrt_id = QrtId::Z2Asymmetry;
  int n_qubits = 0;
  Bipartition bipartition;
  Index outcome = kAllOutcomes;
  std::size_t n_shots = 0;
  double moment = 0.0;
  double moment_std_err = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double omega_hat = 0.0;
  double std_err = 0.0;
};

// Born probabilities of every outcome on B.
inline std::vector<double> outcome_probabilities(const Vec& amps, const Bipartition& part) {
  std::vector<double> p(static_cast<std::size_t>(part.d_b()), 0.0);
  for (Index b = 0; b < part.d_b(); ++b) {
    double s = 0.0;
    for (Index a = 0; a < part.d_a(); ++a) s += std::norm(amps(part.index(a, b)));
    p[static_cast<std::size_t>(b)] = s;
  }
  return p;
}

namespace detail {

// Unbiased estimate of p^t from n hits in s draws: falling factorials.
inline double falling_ratio(std::uint64_t hits, std::uint64_t s, int t) {
  double r = 1.0;
  for (int k = 0; k < t; ++k) {
    if (hits < static_cast<std::uint64_t>(k) + 1) return 0.0;
    r *= static_cast<double>(hits - k) / static_cast<double>(s - k);
  }
  return r;
}

// One protocol shot: free state, U, free F. Returns the post-circuit state.
inline Vec protocol_shot(const QrtSpec& qrt, const UnitarySource& src, SeededRng& r) {
  Vec v;
  if (src.haar_per_shot) {
    // U Haar makes U|psi> Haar-distributed for any fixed |psi>.
    v = haar_vector(qrt.dim(), r);
  } else {
    v = src.fixed->matrix() * qrt.sample_free_state(r).amps();
  }
  qrt.apply_random_free(v, r);
  return v;
}

}  // namespace detail

inline ProtocolRun estimate_rgp(const QrtSpec& qrt, const UnitarySource& src, const Bipartition& part, Index outcome,
                                std::size_t n_shots, const SeededRng& rng, const ProtocolOptions& opt = {}) {
  require_protocol_split(qrt, part);
  require(n_shots >= 100, "estimate_rgp needs at least 100 shots");
  require(src.haar_per_shot || src.fixed.has_value(), "no unitary supplied");
  if (src.fixed) {
    require_dim(src.fixed->dim() == qrt.dim(), "unitary does not match QRT size");
    require_unitary_input(*src.fixed);
  }
  require(outcome == kAllOutcomes || (outcome >= 0 && outcome < part.d_b()), "outcome out of range");
  const int t = qrt.replica_order();
  const ProtocolConstants kc = protocol_constants(qrt, part);

  auto vals = parallel_map<double>(n_shots, opt.workers, [&](std::size_t i) {
    SeededRng r = rng.derive(i);
    const Vec v = detail::protocol_shot(qrt, src, r);
    const auto p = outcome_probabilities(v, part);
    if (opt.finite_shots == 0) {
      if (outcome != kAllOutcomes) return std::pow(p[static_cast<std::size_t>(outcome)], t);
      double s = 0.0;
      for (double pb : p) s += std::pow(pb, t);
      return s / static_cast<double>(p.size());
    }
    // Multinomial counts by sequential binomials.
    const std::uint64_t s_tot = opt.finite_shots;
    std::uint64_t left = s_tot;
    double rest = 1.0, acc = 0.0;
    for (std::size_t b = 0; b < p.size(); ++b) {
      std::uint64_t hits = left;
      if (b + 1 < p.size()) {
        const double q = rest > 0.0 ? std::clamp(p[b] / rest, 0.0, 1.0) : 0.0;
        hits = std::binomial_distribution<std::uint64_t>(left, q)(r.engine());
      }
      left -= hits;
      rest -= p[b];
      if (outcome == kAllOutcomes || static_cast<Index>(b) == outcome) acc += detail::falling_ratio(hits, s_tot, t);
    }
    return outcome == kAllOutcomes ? acc / static_cast<double>(p.size()) : acc;
  });
  const auto st = mean_stat(vals);

  ProtocolRun run;
  run.qrt_id = qrt.id();
  run.n_qubits = qrt.n_qubits();
  run.bipartition = part;
  run.outcome = outcome;
  run.n_shots = n_shots;
  run.moment = st.mean;
  run.moment_std_err = st.std_err;
  run.k1 = kc.k1;
  run.k2 = kc.k2;
  run.omega_hat = (kc.k2 - st.mean) / (kc.k2 - kc.k1);
  run.std_err = st.std_err / (kc.k2 - kc.k1);
  if (!std::isfinite(run.omega_hat) || !std::isfinite(run.std_err)) throw NumericError("non-finite estimator output");
  return run;
}

inline ProtocolRun estimate_rgp(const QrtSpec& qrt, const DenseOperator& u, const Bipartition& part, Index outcome,
                                std::size_t n_shots, const SeededRng& rng, const ProtocolOptions& opt = {}) {
  return estimate_rgp(qrt, UnitarySource::of(u), part, outcome, n_shots, rng, opt);
}

struct ProjectedResourceEstimate {
  double mean_resource = 0.0;  // unweighted mean over kept shots
  double std_err = 0.0;
  double eq2_prediction = 0.0;
  double ratio_estimate = 0.0;  // <p_b^t R> / <p_b^t>, the quantity the prediction models
  double ratio_std_err = 0.0;
  double omega = 0.0;
  double haar_subsystem = 0.0;
  std::size_t n_used = 0;
  std::size_t n_skipped = 0;
};

// Leading-order resource of projected states given the weight omega.
inline double projected_resource_prediction(double omega, double r_bar_a, const ProtocolConstants& kc) {
  return omega * r_bar_a * kc.k1 / ((1.0 - omega) * kc.k2 + omega * kc.k1);
}

inline ProjectedResourceEstimate projected_resource_estimate(const QrtSpec& qrt, const DenseOperator& u,
                                                             const Bipartition& part, Index outcome,
                                                             std::size_t n_shots, const SeededRng& rng,
                                                             std::optional<double> omega = std::nullopt,
                                                             int workers = 1) {
  require_protocol_split(qrt, part);
  require(outcome >= 0 && outcome < part.d_b(), "projected resource needs a fixed outcome");
  require_unitary_input(u);
  const int t = qrt.replica_order();
  const ProtocolConstants kc = protocol_constants(qrt, part);
  if (!omega) omega = qrt.rgp_exact(u) / qrt.haar_rgp();
  const UnitarySource src = UnitarySource::of(u);

  struct Shot {
    double p = 0.0;
    double r = 0.0;
    bool ok = false;
  };
  auto shots = parallel_map<Shot>(n_shots, workers, [&](std::size_t i) {
    SeededRng r = rng.derive(i);
    const Vec v = detail::protocol_shot(qrt, src, r);
    const Projection pr = project_subsystem(StateVector(qrt.n_qubits(), v, false), part, outcome);
    Shot s;
    s.p = pr.probability;
    if (pr.probability > tol::kProtocolProb && pr.projected) {
      s.ok = true;
      s.r = qrt.subsystem_resource(*pr.projected, part);
    }
    return s;
  });

  ProjectedResourceEstimate out;
  std::vector<double> rs;
  double num = 0.0, den = 0.0;
  for (const auto& s : shots) {
    if (!s.ok) {
      ++out.n_skipped;
      continue;
    }
    rs.push_back(s.r);
    const double w = std::pow(s.p, t);
    num += w * s.r;
    den += w;
  }
  if (rs.empty()) throw NumericError("every shot had a vanishing outcome probability");
  const auto st = mean_stat(rs);
  out.n_used = rs.size();
  out.mean_resource = st.mean;
  out.std_err = st.std_err;
  out.ratio_estimate = den > 0.0 ? num / den : 0.0;
  if (den > 0.0) {
    // Delta method for a ratio of sample means.
    double v = 0.0;
    for (const auto& s : shots)
      if (s.ok) {
        const double e = std::pow(s.p, t) * (s.r - out.ratio_estimate);
        v += e * e;
      }
    out.ratio_std_err = std::sqrt(v) / den;
  }
  out.omega = *omega;
  out.haar_subsystem = haar_subsystem_resource(qrt, part);
  out.eq2_prediction = projected_resource_prediction(*omega, out.haar_subsystem, kc);
  return out;
}

}  // namespace qrtlab
