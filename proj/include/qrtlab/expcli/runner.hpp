// Copyright 2026 The qrtlab Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>

#include "qrtlab/expcli/artifacts.hpp"
#include "qrtlab/expcli/config.hpp"
#include "qrtlab/expcli/plot.hpp"
#include "qrtlab/twirl.hpp"

namespace qrtlab::expcli {

// Stream tags keep the sub-experiments of one run on disjoint RNG streams.
enum StreamTag : std::uint64_t { kStreamShots = 1, kStreamUnitary = 2, kStreamRealizations = 3, kStreamMc = 4 };

inline StepUnitary build_step(const RunConfig& c, std::size_t k) {
  const UnitarySpec& u = c.unitary;
  const int n = c.n_qubits;
  if (u.kind == "identity") return StepUnitary::dense(DenseOperator::identity(pow2(n)));
  if (u.kind == "rx_tensor_power") return StepUnitary::tensor_power(n, rx_gate(u.alpha[std::min(k, u.alpha.size() - 1)]));
  if (u.kind == "xx") return StepUnitary::embedded(n, u.qubits, xx_gate(u.c[std::min(k, u.c.size() - 1)]));
  if (u.kind == "haar") {
    SeededRng r(c.seed, kStreamUnitary);
    return StepUnitary::dense(haar_unitary_polar(pow2(n), r));
  }
  if (u.kind == "matrix_file") {
    std::filesystem::path p = u.path;
    if (p.is_relative()) p = c.base_dir / p;
    DenseOperator op = load_unitary_file(p);
    if (op.dim() != pow2(n)) throw SchemaError("unitary.path: matrix dimension does not match 2^n_qubits");
    return StepUnitary::dense(op);
  }
  throw SchemaError("unitary.kind: unknown value '" + u.kind + "'");
}

inline double sweep_value(const UnitarySpec& u, std::size_t k) {
  if (!u.alpha.empty()) return u.alpha[std::min(k, u.alpha.size() - 1)];
  if (!u.c.empty()) return u.c[std::min(k, u.c.size() - 1)];
  return 0.0;
}

inline std::string outcome_label(Index o) { return o == kAllOutcomes ? "all" : std::to_string(o); }

inline std::string curve_cell(const std::vector<double>& v, std::size_t i) {
  return v.empty() ? std::string() : format_number(v[i]);
}

inline CsvTable curve_table(const ThermalizationCurve& c) {
  CsvTable tab({"t", "mean", "std_err", "prediction", "delta2", "delta4"});
  for (std::size_t i = 0; i < c.t.size(); ++i)
    tab.add_row({std::to_string(c.t[i]), format_number(c.mean[i]), format_number(c.std_err[i]),
                 format_number(c.prediction[i]), curve_cell(c.delta2, i), curve_cell(c.delta4, i)});
  return tab;
}

inline PlotSpec default_plot(const RunConfig& c, const ThermalizationCurve* curve) {
  PlotSpec p;
  switch (c.experiment) {
    case Experiment::EstimateRgp:
      p.x = "omega_exact";
      p.y = {"omega_hat", "omega_exact"};
      p.err = "std_err";
      p.title = "estimated vs exact weight";
      break;
    case Experiment::Thermalize:
      p.x = "t";
      p.y = {"mean", "prediction"};
      p.err = "std_err";
      p.log_y = true;
      if (curve) p.one_minus_over = curve->r_bar;
      p.title = "relaxation of the mean RGP";
      break;
    case Experiment::DeepThermalize:
      p.x = "t";
      p.y = {"mean", "prediction"};
      p.err = "std_err";
      p.title = "projected-ensemble resource";
      break;
    case Experiment::HaarAverages:
      p.x = "N_A";
      p.y = {"exact", "mc_mean"};
      p.err = "mc_std_err";
      break;
    case Experiment::VerifyTwirl: break;
  }
  return p;
}

struct RunResult {
  RunManifest manifest;
  std::filesystem::path manifest_path;
};

inline RunResult run(RunConfig c, const std::filesystem::path& out_dir, int workers,
                     std::optional<std::uint64_t> seed_override = std::nullopt, bool want_plot = false) {
  const auto t_start = std::chrono::steady_clock::now();
  if (seed_override) c.seed = *seed_override;
  std::filesystem::create_directories(out_dir);
  RunManifest man;
  man.config = c.snapshot;
  man.config["seed"] = c.seed;
  man.seed = c.seed;
  man.workers = workers;
  const QrtSpec qrt = c.qrt_spec();
  std::optional<ThermalizationCurve> curve;
  std::filesystem::path csv_path;

  switch (c.experiment) {
    case Experiment::EstimateRgp: {
      const Bipartition part = c.partition();
      const std::size_t ns = c.unitary.sweep_size();
      const std::string sweep_col = c.unitary.alpha.empty() ? "c" : "alpha";
      std::vector<std::string> cols{"qrt", "N", "N_A", "outcome", "n_shots", "moment", "k1", "k2", "omega_hat", "std_err", "omega_exact"};
      // Sweeps carry their parameter as a trailing column so plots can use it as x.
      if (ns > 1) cols.push_back(sweep_col);
      CsvTable tab(cols);
      ProtocolOptions opt;
      opt.workers = workers;
      opt.finite_shots = c.finite_shots;
      for (std::size_t k = 0; k < ns; ++k) {
        const SeededRng rng(c.seed, kStreamShots + 16 * k);
        ProtocolRun pr;
        double omega_exact = 1.0;
        if (c.unitary.kind == "haar") {
          pr = estimate_rgp(qrt, UnitarySource::haar(), part, c.outcome, c.shots, rng, opt);
        } else {
          const DenseOperator u = build_step(c, k).op();
          pr = estimate_rgp(qrt, u, part, c.outcome, c.shots, rng, opt);
          omega_exact = qrt.has_exact_rgp()
                            ? qrt.rgp_exact(u) / qrt.haar_rgp()
                            : qrt.rgp_monte_carlo(u, c.rgp_samples, SeededRng(c.seed, kStreamMc), workers).value /
                                  qrt.haar_rgp();
        }
        std::vector<std::string> row{qrt.name(), std::to_string(c.n_qubits), std::to_string(part.n_a()),
                                     outcome_label(c.outcome), std::to_string(pr.n_shots), format_number(pr.moment),
                                     format_number(pr.k1), format_number(pr.k2), format_number(pr.omega_hat),
                                     format_number(pr.std_err), format_number(omega_exact)};
        if (ns > 1) row.push_back(format_number(sweep_value(c.unitary, k)));
        tab.add_row(row);
      }
      csv_path = out_dir / "estimate_rgp.csv";
      tab.write(csv_path);
      man.add_output(csv_path);
      break;
    }
    case Experiment::Thermalize:
    case Experiment::DeepThermalize: {
      CircuitConfig cc;
      cc.qrt = qrt;
      cc.step = build_step(c, 0);
      cc.depth = c.depth;
      cc.n_realizations = c.realizations;
      cc.path = c.path;
      cc.omega = c.omega;
      cc.rgp_samples = c.rgp_samples;
      cc.workers = workers;
      const SeededRng rng(c.seed, kStreamRealizations);
      if (c.experiment == Experiment::Thermalize) {
        curve = thermalization_curve_rgp(cc, rng);
        csv_path = out_dir / "thermalize.csv";
      } else {
        cc.part = c.partition();
        cc.design_orders = c.design_orders;
        curve = deep_thermalization_experiment(cc, rng);
        csv_path = out_dir / "deep_thermalize.csv";
      }
      curve_table(*curve).write(csv_path);
      man.add_output(csv_path);
      man.summary["omega"] = curve->omega;
      man.summary["r_bar"] = curve->r_bar;
      if (curve->omega > 0.0 && curve->omega != 1.0)
        man.summary["predicted_rate"] = -std::log(std::abs(1.0 - curve->omega));
      try {
        FitOptions fo;
        fo.long_time_reference = c.experiment == Experiment::DeepThermalize;
        const FitResult fr = fit_exponential_rate(*curve, fo);
        man.summary["fitted_rate"] = fr.rate;
        man.summary["fit_r_squared"] = fr.r_squared;
        man.summary["fit_points"] = fr.n_points;
        man.summary["fit_oscillating"] = fr.oscillating;
      } catch (const DomainError& e) {
        man.summary["fit_error"] = e.what();
      }
      break;
    }
    case Experiment::VerifyTwirl: {
      const DenseOperator u = build_step(c, 0).op();
      const TwirlReport rep = verify_twirl(qrt, u, c.samples, SeededRng(c.seed, kStreamMc), workers);
      nlohmann::json j;
      j["qrt_id"] = to_string(rep.qrt_id);
      j["n_samples"] = rep.n_samples;
      j["frobenius_error"] = rep.frobenius_error;
      j["predicted_weight"] = rep.predicted_weight;
      j["empirical_weight"] = rep.empirical_weight;
      j["weight_std_err"] = rep.weight_std_err;
      for (double v : {rep.frobenius_error, rep.predicted_weight, rep.empirical_weight, rep.weight_std_err})
        format_number(v);
      const auto p = out_dir / "twirl_report.json";
      std::ofstream(p) << j.dump(2) << "\n";
      man.add_output(p);
      break;
    }
    case Experiment::HaarAverages: {
      CsvTable tab({"qrt", "N", "N_A", "quantity", "exact", "mc_mean", "mc_std_err"});
      const SeededRng rng(c.seed, kStreamMc);
      auto vals = parallel_map<double>(c.samples, workers, [&](std::size_t i) {
        SeededRng r = rng.derive(i);
        return qrt.resource(haar_state(c.n_qubits, r));
      });
      const auto st = mean_stat(vals);
      tab.add_row({qrt.name(), std::to_string(c.n_qubits), "", "r_bar", format_number(qrt.haar_rgp()),
                   format_number(st.mean), format_number(st.std_err)});
      if (c.has_partition) {
        const Bipartition part = c.partition();
        const std::string na = std::to_string(part.n_a());
        const double rba = haar_subsystem_resource(qrt, part);
        auto sub = parallel_map<double>(c.samples, workers, [&](std::size_t i) {
          SeededRng r = rng.derive(c.samples + i);
          return qrt.subsystem_resource(haar_state(part.n_a(), r), part);
        });
        const auto ss = mean_stat(sub);
        tab.add_row({qrt.name(), std::to_string(c.n_qubits), na, "r_bar_subsystem", format_number(rba),
                     format_number(ss.mean), format_number(ss.std_err)});
        const ProtocolConstants kc = protocol_constants(qrt, part);
        ProtocolOptions opt;
        opt.workers = workers;
        const std::size_t shots = std::max<std::size_t>(c.samples, 100);
        const auto hk = estimate_rgp(qrt, UnitarySource::haar(), part, 0, shots, rng.derive(1ULL << 40), opt);
        const auto fk = estimate_rgp(qrt, DenseOperator::identity(qrt.dim()), part, 0, shots, rng.derive(1ULL << 41), opt);
        tab.add_row({qrt.name(), std::to_string(c.n_qubits), na, "k1", format_number(kc.k1), format_number(hk.moment),
                     format_number(hk.moment_std_err)});
        tab.add_row({qrt.name(), std::to_string(c.n_qubits), na, "k2", format_number(kc.k2), format_number(fk.moment),
                     format_number(fk.moment_std_err)});
      }
      csv_path = out_dir / "haar_averages.csv";
      tab.write(csv_path);
      man.add_output(csv_path);
      break;
    }
  }

  if ((want_plot || c.plot) && !csv_path.empty() && c.experiment != Experiment::HaarAverages) {
    PlotSpec spec = c.plot ? *c.plot : default_plot(c, curve ? &*curve : nullptr);
    if (spec.y.empty()) spec.y = default_plot(c, curve ? &*curve : nullptr).y;
    const auto svg = out_dir / "plot.svg";
    plot(csv_path, spec, svg);
    man.add_output(svg);
  }
  man.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  RunResult res{man, out_dir / "manifest.json"};
  man.write(res.manifest_path);
  return res;
}

// Maps library errors onto the documented exit statuses.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const SizeGuardError*>(&e)) return 3;
  if (dynamic_cast<const NumericError*>(&e)) return 4;
  if (dynamic_cast<const SchemaError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const DimensionError*>(&e))
    return 2;
  return 1;
}

}  // namespace qrtlab::expcli
