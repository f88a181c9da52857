// Copyright 2026 The qrtlab Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "qrtlab/protocol.hpp"

namespace qrtlab {

// exp(-i alpha sigma_x).
inline Mat rx_gate(double alpha) {
  Mat g(2, 2);
  g << std::cos(alpha), cplx(0, -std::sin(alpha)), cplx(0, -std::sin(alpha)), std::cos(alpha);
  return g;
}

// exp(-i c sigma_x (x) sigma_x / 2).
inline Mat xx_gate(double c) {
  Mat g = Mat::Zero(4, 4);
  const cplx co = std::cos(c / 2.0), si = cplx(0, -std::sin(c / 2.0));
  for (Index i = 0; i < 4; ++i) {
    g(i, i) = co;
    g(3 - i, i) = si;
  }
  return g;
}

struct Gate {
  std::vector<int> qubits;
  Mat matrix;
};

// Fixed non-free step unitary, stored as a gate list so that states can be
// advanced without a dense 2^N x 2^N product when the step is local.
class StepUnitary {
 public:
  StepUnitary() = default;

  static StepUnitary tensor_power(int n, const Mat& u1) {
    require(u1.rows() == 2 && is_unitary(u1, tol::kUnitary), "single-qubit factor must be a 2x2 unitary");
    StepUnitary s;
    s.n_ = n;
    for (int q = 0; q < n; ++q) s.gates_.push_back({{q}, u1});
    s.label_ = "tensor_power";
    return s;
  }

  static StepUnitary embedded(int n, std::vector<int> qubits, const Mat& g) {
    require(g.rows() == pow2(static_cast<int>(qubits.size())) && is_unitary(g, tol::kUnitary),
            "embedded gate must be unitary on the listed qubits");
    for (int q : qubits) require(q >= 0 && q < n, "gate qubit out of range");
    StepUnitary s;
    s.n_ = n;
    s.gates_.push_back({std::move(qubits), g});
    s.label_ = "embedded";
    return s;
  }

  static StepUnitary dense(const DenseOperator& u) {
    require(u.is_unitary_flagged() || is_unitary(u.matrix(), tol::kUnitaryInput), "step must be unitary");
    StepUnitary s;
    s.n_ = log2_exact(u.dim());
    std::vector<int> all(static_cast<std::size_t>(s.n_));
    std::iota(all.begin(), all.end(), 0);
    s.gates_.push_back({std::move(all), u.matrix()});
    s.label_ = "dense";
    return s;
  }

  int n_qubits() const { return n_; }
  const std::string& label() const { return label_; }
  const std::vector<Gate>& gates() const { return gates_; }

  void apply(Vec& v) const {
    for (const auto& g : gates_) {
      if (static_cast<int>(g.qubits.size()) == n_ && is_identity_order(g.qubits)) {
        v = g.matrix * v;
      } else {
        apply_gate(v, n_, g.qubits, g.matrix);
      }
    }
  }

  void apply_columns(Mat& w) const {
    for (const auto& g : gates_) {
      if (static_cast<int>(g.qubits.size()) == n_ && is_identity_order(g.qubits)) {
        w = g.matrix * w;
      } else {
        apply_gate_to_columns(w, n_, g.qubits, g.matrix);
      }
    }
  }

  Mat matrix() const {
    Mat w = Mat::Identity(pow2(n_), pow2(n_));
    apply_columns(w);
    return w;
  }

  DenseOperator op() const { return DenseOperator::unitary(matrix()); }

 private:
  static bool is_identity_order(const std::vector<int>& q) {
    for (std::size_t i = 0; i < q.size(); ++i)
      if (q[i] != static_cast<int>(i)) return false;
    return true;
  }

  int n_ = 0;
  std::vector<Gate> gates_;
  std::string label_;
};

enum class RgpPath { Auto, Exact, State };

struct CircuitConfig {
  QrtSpec qrt;
  StepUnitary step;
  int depth = 1;
  std::size_t n_realizations = 100;
  Bipartition part;  // A kept, B measured (deep thermalization only)
  RgpPath path = RgpPath::Auto;
  std::vector<int> design_orders;  // subset of {2, 4}
  std::optional<double> omega;     // overrides the computed step weight
  std::size_t rgp_samples = 20000;  // MC samples when no exact RGP path exists
  int workers = 1;
};

struct ThermalizationCurve {
  std::vector<int> t;
  std::vector<double> mean;
  std::vector<double> std_err;
  std::vector<double> prediction;
  std::vector<double> delta2;  // empty when not computed
  std::vector<double> delta4;
  double omega = 0.0;
  double r_bar = 0.0;
  // Deep thermalization only: full-state resource over Rbar.
  std::vector<double> global_mean;
};

inline double thermalization_prediction(double r_bar, double omega, int t) {
  return r_bar * (1.0 - std::pow(1.0 - omega, t));
}

// Weight of the step unitary: exact where available, else free-state MC.
inline double step_weight(const CircuitConfig& cfg, const SeededRng& rng) {
  if (cfg.omega) return *cfg.omega;
  const DenseOperator u = cfg.step.op();
  if (cfg.qrt.has_exact_rgp()) return cfg.qrt.rgp_exact(u) / cfg.qrt.haar_rgp();
  return cfg.qrt.rgp_monte_carlo(u, cfg.rgp_samples, rng.derive(0x5eed), cfg.workers).value / cfg.qrt.haar_rgp();
}

inline void require_circuit(const CircuitConfig& cfg) {
  require(cfg.depth >= 1, "depth must be >= 1");
  require(cfg.n_realizations >= 2, "need at least two realizations");
  require_dim(cfg.step.n_qubits() == cfg.qrt.n_qubits(), "step unitary does not match QRT size");
}

namespace detail {

inline void left_multiply_random_free(const QrtSpec& qrt, Mat& w, SeededRng& r) {
  if (qrt.id() == QrtId::Z2Asymmetry) {
    left_multiply_random_z2_free(w, qrt.n_qubits(), r, qrt.anticommuting_prob());
  } else {
    w = qrt.sample_free_unitary(r).matrix() * w;
  }
}

inline ThermalizationCurve summarize(const std::vector<std::vector<double>>& per_real, int t0) {
  ThermalizationCurve c;
  const std::size_t steps = per_real.front().size();
  for (std::size_t k = 0; k < steps; ++k) {
    std::vector<double> col;
    col.reserve(per_real.size());
    for (const auto& r : per_real) col.push_back(r[k]);
    const auto st = mean_stat(col);
    c.t.push_back(t0 + static_cast<int>(k));
    c.mean.push_back(st.mean);
    c.std_err.push_back(st.std_err);
  }
  return c;
}

inline std::vector<double> column_means(const std::vector<std::vector<double>>& per_real) {
  std::vector<double> out(per_real.front().size(), 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::vector<double> col;
    for (const auto& r : per_real) col.push_back(r[k]);
    out[k] = mean_stat(col).mean;
  }
  return out;
}

}  // namespace detail

// <R_p(U^(t))> for t = 1..T, U^(t) = F_t U ... F_1 U.
inline ThermalizationCurve thermalization_curve_rgp(const CircuitConfig& cfg, const SeededRng& rng) {
  require_circuit(cfg);
  const QrtSpec& qrt = cfg.qrt;
  RgpPath path = cfg.path;
  if (path == RgpPath::Auto) path = qrt.id() == QrtId::Nonstabilizerness ? RgpPath::State : RgpPath::Exact;
  if (path == RgpPath::Exact) {
    require(qrt.has_exact_rgp(), "no exact RGP path for this QRT size");
    require_size(qrt.dim() <= 1024, "exact trajectory path limited to N <= 10");
  }
  const int depth = cfg.depth;
  auto per_real = parallel_map<std::vector<double>>(cfg.n_realizations, cfg.workers, [&](std::size_t i) {
    SeededRng r = rng.derive(i);
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(depth));
    if (path == RgpPath::Exact) {
      Mat w = Mat::Identity(qrt.dim(), qrt.dim());
      for (int t = 1; t <= depth; ++t) {
        cfg.step.apply_columns(w);
        detail::left_multiply_random_free(qrt, w, r);
        vals.push_back(qrt.rgp_exact_matrix(w));
      }
    } else {
      Vec v = qrt.sample_free_state(r).amps();
      for (int t = 1; t <= depth; ++t) {
        cfg.step.apply(v);
        qrt.apply_random_free(v, r);
        vals.push_back(qrt.resource(StateVector(qrt.n_qubits(), v, false)));
      }
    }
    return vals;
  });
  ThermalizationCurve c = detail::summarize(per_real, 1);
  c.r_bar = qrt.haar_rgp();
  c.omega = step_weight(cfg, rng);
  for (int t : c.t) c.prediction.push_back(thermalization_prediction(c.r_bar, c.omega, t));
  for (double m : c.mean)
    if (!std::isfinite(m)) throw NumericError("non-finite thermalization mean");
  return c;
}

// ---------------------------------------------------------------------------
// Projected ensembles

struct ProjectedEnsemble {
  struct Entry {
    Index b = 0;
    double p = 0.0;
    StateVector phi{1};
  };
  Bipartition part;
  std::vector<Entry> entries;
  double dropped_mass = 0.0;
  std::string generator;

  double total_probability() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.p;
    return s;
  }
};

inline ProjectedEnsemble build_projected_ensemble(const StateVector& state, const Bipartition& part,
                                                  std::string generator = {}) {
  require_dim(state.n_qubits() == part.n(), "bipartition does not match state size");
  if (!part.proper()) throw DomainError("projected ensemble needs 0 < N_A < N");
  ProjectedEnsemble ens;
  ens.part = part;
  ens.generator = std::move(generator);
  for (Index b = 0; b < part.d_b(); ++b) {
    Projection pr = project_subsystem(state, part, b);
    if (!pr.defined) {
      ens.dropped_mass += pr.probability;
      continue;
    }
    ens.entries.push_back({b, pr.probability, std::move(*pr.projected)});
  }
  return ens;
}

inline DenseOperator ensemble_moment(const ProjectedEnsemble& ens, int t) {
  require(t >= 1, "moment order must be >= 1");
  const Index dim = ipow(ens.part.d_a(), t);
  require_size(dim <= guard::kReplicaDim, "ensemble moment dimension exceeds guard");
  Mat m = Mat::Zero(dim, dim);
  for (const auto& e : ens.entries) {
    const Vec v = tensor_power(e.phi.amps(), t);
    m.noalias() += e.p * (v * v.adjoint());
  }
  return DenseOperator::hermitian(std::move(m), t);
}

// Moment restricted to the symmetric subspace, in SymmetricBasis coordinates.
inline Mat ensemble_moment_sym(const ProjectedEnsemble& ens, const SymmetricBasis& basis) {
  require(basis.d() == ens.part.d_a(), "symmetric basis does not match subsystem");
  Mat m = Mat::Zero(basis.size(), basis.size());
  for (const auto& e : ens.entries) {
    const Vec c = basis.coords(e.phi.amps());
    m.noalias() += e.p * (c * c.adjoint());
  }
  return m;
}

// ||M - I/dim||_1 for a moment given in symmetric coordinates.
inline double design_distance_sym(const Mat& m_sym) {
  const Index k = m_sym.rows();
  return trace_norm_hermitian(m_sym - Mat::Identity(k, k) / static_cast<double>(k));
}

// Schatten-1 distance to the Haar moment, no 1/2 prefactor. The moment lives
// on the symmetric subspace, so the norm is evaluated there.
inline double design_distance(const ProjectedEnsemble& ens, int t) {
  require(t >= 1, "moment order must be >= 1");
  require_size(ipow(ens.part.d_a(), t) <= guard::kReplicaDim, "design distance dimension exceeds guard");
  const SymmetricBasis basis(ens.part.d_a(), t);
  return design_distance_sym(ensemble_moment_sym(ens, basis));
}

// Average of C^{(x)t} M C^{dag (x)t} over the n_a-qubit Clifford group, for M
// in symmetric coordinates. M is eigendecomposed so each group element only
// acts on rank(M) vectors.
inline Mat clifford_symmetrize_sym(const Mat& m_sym, int n_a, int t) {
  const Index d = pow2(n_a);
  const SymmetricBasis basis(d, t);
  require(m_sym.rows() == basis.size(), "moment does not match symmetric basis");
  const Mat iso = basis.isometry();
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m_sym + m_sym.adjoint()));
  std::vector<std::pair<double, Vec>> comps;
  for (Index k = 0; k < es.eigenvalues().size(); ++k)
    if (std::abs(es.eigenvalues()(k)) > 1e-15) comps.emplace_back(es.eigenvalues()(k), iso * es.eigenvectors().col(k));
  const auto group = enumerate_clifford_group(n_a);
  Mat out = Mat::Zero(basis.size(), basis.size());
  for (const Mat& c : group) {
    for (const auto& [lam, full] : comps) {
      Mat x = full;
      for (int k = 0; k < t; ++k) x = apply_to_replica_factor(x, c, t, k);
      const Vec s = basis.coords_of_symmetric(x.col(0));
      out.noalias() += lam * (s * s.adjoint());
    }
  }
  return out / static_cast<double>(group.size());
}

// ---------------------------------------------------------------------------
// Deep thermalization

struct DeepThermalizationResult {
  ThermalizationCurve curve;
  // Realization-pooled moments at t = 0 in symmetric coordinates, keyed by
  // the entries of design_orders.
  std::vector<Mat> pooled_initial_moments;
};

inline DeepThermalizationResult deep_thermalization_run(const CircuitConfig& cfg, const SeededRng& rng) {
  require_circuit(cfg);
  const QrtSpec& qrt = cfg.qrt;
  const Bipartition& part = cfg.part;
  require_dim(part.n() == qrt.n_qubits(), "bipartition does not match QRT size");
  if (!part.proper()) throw DomainError("deep thermalization needs 0 < N_A < N");
  for (int t : cfg.design_orders) {
    require(t == 2 || t == 4, "design orders must be 2 or 4");
    require_size(ipow(part.d_a(), t) <= guard::kReplicaDim,
                 "design distance needs N_A <= 6 for t = 2 and N_A <= 3 for t = 4");
  }
  const double r_bar_a = haar_subsystem_resource(qrt, part);
  const double r_bar = qrt.haar_rgp();
  std::vector<SymmetricBasis> bases;
  for (int t : cfg.design_orders) bases.emplace_back(part.d_a(), t);
  const int depth = cfg.depth;
  const std::size_t n_ord = bases.size();

  struct Real {
    std::vector<double> res, glob;
    std::vector<std::vector<double>> delta;
    std::vector<Mat> m0;
  };
  auto reals = parallel_map<Real>(cfg.n_realizations, cfg.workers, [&](std::size_t i) {
    SeededRng r = rng.derive(i);
    Real out;
    out.delta.assign(n_ord, {});
    Vec v = qrt.sample_free_state(r).amps();
    for (int t = 0; t <= depth; ++t) {
      if (t > 0) {
        cfg.step.apply(v);
        qrt.apply_random_free(v, r);
      }
      const StateVector s(qrt.n_qubits(), v, false);
      const ProjectedEnsemble ens = build_projected_ensemble(s, part);
      double acc = 0.0;
      for (const auto& e : ens.entries) acc += e.p * qrt.subsystem_resource(e.phi, part);
      out.res.push_back(acc / r_bar_a);
      out.glob.push_back(qrt.resource(s) / r_bar);
      for (std::size_t k = 0; k < n_ord; ++k) {
        Mat m = ensemble_moment_sym(ens, bases[k]);
        out.delta[k].push_back(design_distance_sym(m));
        if (t == 0) out.m0.push_back(std::move(m));
      }
    }
    return out;
  });

  std::vector<std::vector<double>> res, glob;
  for (const auto& r : reals) {
    res.push_back(r.res);
    glob.push_back(r.glob);
  }
  DeepThermalizationResult out;
  ThermalizationCurve& c = out.curve;
  c = detail::summarize(res, 0);
  c.global_mean = detail::column_means(glob);
  c.r_bar = 1.0;
  c.omega = step_weight(cfg, rng);
  for (int t : c.t) c.prediction.push_back(thermalization_prediction(1.0, c.omega, t));
  for (std::size_t k = 0; k < n_ord; ++k) {
    std::vector<std::vector<double>> dk;
    Mat pooled = Mat::Zero(bases[k].size(), bases[k].size());
    for (const auto& r : reals) {
      dk.push_back(r.delta[k]);
      pooled += r.m0[k];
    }
    (cfg.design_orders[k] == 2 ? c.delta2 : c.delta4) = detail::column_means(dk);
    out.pooled_initial_moments.push_back(pooled / static_cast<double>(reals.size()));
  }
  for (double m : c.mean)
    if (!std::isfinite(m)) throw NumericError("non-finite projected resource");
  return out;
}

inline ThermalizationCurve deep_thermalization_experiment(const CircuitConfig& cfg, const SeededRng& rng) {
  return deep_thermalization_run(cfg, rng).curve;
}

// ---------------------------------------------------------------------------
// Rate fitting

struct FitOptions {
  // Reference level; defaults to the curve's r_bar.
  std::optional<double> reference;
  // Use the mean of the final 25% of steps as the reference.
  bool long_time_reference = false;
  double min_level = 0.01;
  double se_factor = 3.0;
  std::size_t min_points = 5;
};

struct FitResult {
  double rate = 0.0;
  double r_squared = 0.0;
  double intercept = 0.0;
  double reference = 0.0;
  std::size_t n_points = 0;
  bool oscillating = false;
};

inline double long_time_average(const std::vector<double>& v, double frac = 0.25) {
  require(!v.empty(), "empty series");
  const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(frac * static_cast<double>(v.size()))));
  double s = 0.0;
  for (std::size_t i = v.size() - k; i < v.size(); ++i) s += v[i];
  return s / static_cast<double>(k);
}

// Weighted least squares of ln|1 - mean/ref| against t over the leading run
// of resolvable points.
inline FitResult fit_exponential_rate(const ThermalizationCurve& c, const FitOptions& opt = {}) {
  require(c.t.size() == c.mean.size(), "curve arrays disagree");
  FitResult fr;
  fr.reference = opt.reference ? *opt.reference : (opt.long_time_reference ? long_time_average(c.mean) : c.r_bar);
  require(fr.reference > 0.0, "reference level must be positive");
  std::vector<double> xs, ys, ws;
  int sign_prev = 0;
  for (std::size_t i = 0; i < c.t.size(); ++i) {
    if (c.t[i] < 1) continue;
    const double dev = 1.0 - c.mean[i] / fr.reference;
    const double y = std::abs(dev);
    const double se = c.std_err.empty() ? 0.0 : c.std_err[i] / fr.reference;
    if (y < opt.min_level || y <= opt.se_factor * se) break;
    const int sg = dev > 0 ? 1 : -1;
    if (sign_prev != 0 && sg != sign_prev) fr.oscillating = true;
    sign_prev = sg;
    xs.push_back(static_cast<double>(c.t[i]));
    ys.push_back(std::log(y));
    // Exact points (se = 0) get a large but finite weight.
    const double se_eff = std::max(se, 1e-8);
    ws.push_back((y / se_eff) * (y / se_eff));
  }
  if (xs.size() < opt.min_points) throw DomainError("insufficient unsaturated points for a rate fit");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sw += ws[i];
    sx += ws[i] * xs[i];
    sy += ws[i] * ys[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += ws[i] * (xs[i] - mx) * (xs[i] - mx);
    sxy += ws[i] * (xs[i] - mx) * (ys[i] - my);
    syy += ws[i] * (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  fr.rate = -slope;
  fr.intercept = my - slope * mx;
  fr.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fr.n_points = xs.size();
  return fr;
}

}  // namespace qrtlab
