// Copyright 2026 The qrtlab Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrtlab/dynamics.hpp"

namespace qrtlab::expcli {

enum class Experiment { EstimateRgp, Thermalize, DeepThermalize, VerifyTwirl, HaarAverages };

inline std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::EstimateRgp: return "estimate-rgp";
    case Experiment::Thermalize: return "thermalize";
    case Experiment::DeepThermalize: return "deep-thermalize";
    case Experiment::VerifyTwirl: return "verify-twirl";
    case Experiment::HaarAverages: return "haar-averages";
  }
  return "unknown";
}

inline Experiment parse_experiment(const std::string& s) {
  for (auto e : {Experiment::EstimateRgp, Experiment::Thermalize, Experiment::DeepThermalize, Experiment::VerifyTwirl,
                 Experiment::HaarAverages})
    if (to_string(e) == s) return e;
  throw SchemaError("experiment: unknown value '" + s + "'");
}

struct PlotSpec {
  std::string x = "t";
  std::vector<std::string> y;
  std::string err;  // empty for none
  bool log_y = false;
  // When set, y values are replaced by |1 - y/reference| (relaxation plots).
  std::optional<double> one_minus_over;
  std::string title;
};

struct UnitarySpec {
  std::string kind = "identity";  // identity | rx_tensor_power | xx | haar | matrix_file
  std::vector<double> alpha;
  std::vector<double> c;
  std::vector<int> qubits;
  std::string path;

  std::size_t sweep_size() const { return std::max<std::size_t>({alpha.size(), c.size(), 1}); }
};

struct RunConfig {
  Experiment experiment = Experiment::EstimateRgp;
  std::uint64_t seed = 0;
  QrtId qrt = QrtId::Z2Asymmetry;
  int n_qubits = 2;
  std::vector<int> entanglement_b_qubits;  // B side of the entanglement cut
  double anticommuting_prob = 0.5;
  std::vector<int> measured_qubits;  // protocol B
  bool has_partition = false;
  UnitarySpec unitary;
  Index outcome = 0;
  std::size_t shots = 10000;
  std::size_t finite_shots = 0;
  int depth = 30;
  std::size_t realizations = 100;
  RgpPath path = RgpPath::Auto;
  std::vector<int> design_orders;
  std::size_t samples = 10000;
  std::size_t rgp_samples = 20000;
  std::optional<double> omega;
  std::optional<PlotSpec> plot;
  std::filesystem::path base_dir;
  nlohmann::json snapshot;

  QrtSpec qrt_spec() const {
    QrtSpec q = qrt == QrtId::Entanglement
                    ? QrtSpec(qrt, n_qubits, Bipartition::from_b_qubits(n_qubits, entanglement_b_qubits))
                    : QrtSpec(qrt, n_qubits);
    q.set_anticommuting_prob(anticommuting_prob);
    return q;
  }

  Bipartition partition() const { return Bipartition::from_b_qubits(n_qubits, measured_qubits); }
};

// ---------------------------------------------------------------------------
// YAML helpers. Every failure names the offending key.

namespace detail {

inline nlohmann::json to_json(const YAML::Node& n) {
  switch (n.Type()) {
    case YAML::NodeType::Map: {
      nlohmann::json j = nlohmann::json::object();
      for (const auto& kv : n) j[kv.first.as<std::string>()] = to_json(kv.second);
      return j;
    }
    case YAML::NodeType::Sequence: {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& v : n) j.push_back(to_json(v));
      return j;
    }
    case YAML::NodeType::Scalar: {
      const std::string s = n.Scalar();
      if (n.Tag() == "!") return s;  // quoted
      try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos == s.size()) return v;
      } catch (...) {
      }
      try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos == s.size()) return v;
      } catch (...) {
      }
      if (s == "true") return true;
      if (s == "false") return false;
      return s;
    }
    default: return nullptr;
  }
}

inline void check_keys(const YAML::Node& n, const std::string& where, const std::set<std::string>& allowed) {
  if (!n.IsMap()) throw SchemaError(where + ": expected a mapping");
  for (const auto& kv : n) {
    const std::string k = kv.first.as<std::string>();
    if (!allowed.count(k)) throw SchemaError((where.empty() ? "" : where + ".") + k + ": unknown key");
  }
}

template <class T>
T scalar(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw SchemaError(key + ": wrong type");
  }
}

inline long long get_int(const YAML::Node& parent, const std::string& key, const std::string& path, long long lo,
                         long long hi, std::optional<long long> dflt = std::nullopt) {
  const YAML::Node n = parent[key];
  if (!n) {
    if (dflt) return *dflt;
    throw SchemaError(path + ": missing required key");
  }
  const auto v = scalar<long long>(n, path);
  if (v < lo || v > hi)
    throw SchemaError(path + ": value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  return v;
}

inline std::vector<double> get_number_or_list(const YAML::Node& n, const std::string& path) {
  std::vector<double> out;
  if (!n) return out;
  if (n.IsSequence()) {
    for (const auto& v : n) out.push_back(scalar<double>(v, path));
    if (out.empty()) throw SchemaError(path + ": empty list");
  } else {
    out.push_back(scalar<double>(n, path));
  }
  for (double v : out)
    if (!std::isfinite(v)) throw SchemaError(path + ": non-finite value");
  return out;
}

inline std::vector<int> get_qubit_list(const YAML::Node& n, const std::string& path, int n_qubits) {
  std::vector<int> out;
  if (!n.IsSequence()) throw SchemaError(path + ": expected a list of qubit indices");
  std::set<int> seen;
  for (const auto& v : n) {
    const int q = scalar<int>(v, path);
    if (q < 0 || q >= n_qubits) throw SchemaError(path + ": qubit " + std::to_string(q) + " out of range");
    if (!seen.insert(q).second) throw SchemaError(path + ": duplicate qubit " + std::to_string(q));
    out.push_back(q);
  }
  return out;
}

inline std::vector<int> range(int lo, int hi) {
  std::vector<int> v;
  for (int i = lo; i < hi; ++i) v.push_back(i);
  return v;
}

}  // namespace detail

inline PlotSpec parse_plot(const YAML::Node& n) {
  detail::check_keys(n, "plot", {"x", "y", "err", "log_y", "one_minus_over", "title"});
  PlotSpec p;
  if (n["x"]) p.x = detail::scalar<std::string>(n["x"], "plot.x");
  if (n["y"]) {
    if (n["y"].IsSequence()) {
      for (const auto& v : n["y"]) p.y.push_back(detail::scalar<std::string>(v, "plot.y"));
    } else {
      p.y.push_back(detail::scalar<std::string>(n["y"], "plot.y"));
    }
  }
  if (n["err"]) p.err = detail::scalar<std::string>(n["err"], "plot.err");
  if (n["log_y"]) p.log_y = detail::scalar<bool>(n["log_y"], "plot.log_y");
  if (n["one_minus_over"]) p.one_minus_over = detail::scalar<double>(n["one_minus_over"], "plot.one_minus_over");
  if (n["title"]) p.title = detail::scalar<std::string>(n["title"], "plot.title");
  return p;
}

inline RunConfig parse_config(const YAML::Node& root, const std::filesystem::path& base_dir = ".") {
  using namespace detail;
  if (!root || !root.IsMap()) throw SchemaError("config: expected a mapping at top level");
  RunConfig c;
  c.base_dir = base_dir;
  c.snapshot = to_json(root);
  if (!root["experiment"]) throw SchemaError("experiment: missing required key");
  c.experiment = parse_experiment(scalar<std::string>(root["experiment"], "experiment"));

  std::set<std::string> allowed = {"experiment", "seed", "qrt", "n_qubits", "entanglement_cut", "anticommuting_prob",
                                   "plot"};
  switch (c.experiment) {
    case Experiment::EstimateRgp:
      allowed.insert({"partition", "unitary", "outcome", "shots", "finite_shots"});
      break;
    case Experiment::Thermalize:
      allowed.insert({"unitary", "depth", "realizations", "rgp_path", "omega", "rgp_samples"});
      break;
    case Experiment::DeepThermalize:
      allowed.insert({"unitary", "partition", "depth", "realizations", "design_orders", "omega", "rgp_samples"});
      break;
    case Experiment::VerifyTwirl: allowed.insert({"unitary", "samples"}); break;
    case Experiment::HaarAverages: allowed.insert({"partition", "samples"}); break;
  }
  check_keys(root, "", allowed);

  c.seed = root["seed"] ? scalar<std::uint64_t>(root["seed"], "seed") : 0;
  if (!root["qrt"]) throw SchemaError("qrt: missing required key");
  try {
    c.qrt = parse_qrt_id(scalar<std::string>(root["qrt"], "qrt"));
  } catch (const SchemaError& e) {
    throw SchemaError(std::string("qrt: ") + e.what());
  }
  // Sizes beyond the dense guard are a size-guard failure, not a schema one.
  c.n_qubits = static_cast<int>(get_int(root, "n_qubits", "n_qubits", 1, 64));
  if (c.n_qubits > guard::kMaxQubits) throw SizeGuardError("n_qubits: " + std::to_string(c.n_qubits) + " exceeds 12");
  if (root["anticommuting_prob"]) {
    c.anticommuting_prob = scalar<double>(root["anticommuting_prob"], "anticommuting_prob");
    if (!(c.anticommuting_prob >= 0.0 && c.anticommuting_prob <= 1.0))
      throw SchemaError("anticommuting_prob: must lie in [0, 1]");
  }

  if (c.qrt == QrtId::Entanglement) {
    if (root["entanglement_cut"]) {
      const YAML::Node ec = root["entanglement_cut"];
      check_keys(ec, "entanglement_cut", {"b_qubits", "n_a"});
      if (ec["b_qubits"]) {
        c.entanglement_b_qubits = get_qubit_list(ec["b_qubits"], "entanglement_cut.b_qubits", c.n_qubits);
      } else {
        const int na = static_cast<int>(get_int(ec, "n_a", "entanglement_cut.n_a", 1, c.n_qubits - 1));
        c.entanglement_b_qubits = range(na, c.n_qubits);
      }
    } else {
      c.entanglement_b_qubits = range(c.n_qubits / 2, c.n_qubits);
    }
    const int nb = static_cast<int>(c.entanglement_b_qubits.size());
    if (nb == 0 || nb == c.n_qubits) throw SchemaError("entanglement_cut: requires both sides to be non-empty");
  } else if (root["entanglement_cut"]) {
    throw SchemaError("entanglement_cut: only valid for qrt entanglement");
  }

  if (root["partition"]) {
    const YAML::Node p = root["partition"];
    check_keys(p, "partition", {"n_a", "measured_qubits"});
    if (p["measured_qubits"]) {
      c.measured_qubits = get_qubit_list(p["measured_qubits"], "partition.measured_qubits", c.n_qubits);
    } else if (p["n_a"]) {
      const long long na = scalar<long long>(p["n_a"], "partition.n_a");
      if (na <= 0 || na >= c.n_qubits)
        throw SchemaError("partition.n_a: requires 0 < N_A < N (got N_A = " + std::to_string(na) +
                          ", N = " + std::to_string(c.n_qubits) + ")");
      c.measured_qubits = range(static_cast<int>(na), c.n_qubits);
    } else {
      throw SchemaError("partition: needs n_a or measured_qubits");
    }
    const int nb = static_cast<int>(c.measured_qubits.size());
    if (nb == 0 || nb == c.n_qubits) throw SchemaError("partition: requires 0 < N_A < N");
    c.has_partition = true;
  } else if (c.experiment == Experiment::EstimateRgp || c.experiment == Experiment::DeepThermalize) {
    throw SchemaError("partition: missing required key");
  }
  if (c.qrt == QrtId::Entanglement && c.has_partition) {
    const Bipartition kept = c.qrt_spec().kept_cut(c.partition());
    if (c.experiment == Experiment::DeepThermalize && !kept.proper())
      throw SchemaError("partition: kept qubits must straddle the entanglement cut");
  }

  if (root["unitary"]) {
    const YAML::Node u = root["unitary"];
    check_keys(u, "unitary", {"kind", "alpha", "c", "qubits", "path"});
    if (!u["kind"]) throw SchemaError("unitary.kind: missing required key");
    c.unitary.kind = scalar<std::string>(u["kind"], "unitary.kind");
    const std::string& k = c.unitary.kind;
    if (k == "rx_tensor_power") {
      c.unitary.alpha = get_number_or_list(u["alpha"], "unitary.alpha");
      if (c.unitary.alpha.empty()) throw SchemaError("unitary.alpha: missing required key");
    } else if (k == "xx") {
      c.unitary.c = get_number_or_list(u["c"], "unitary.c");
      if (c.unitary.c.empty()) throw SchemaError("unitary.c: missing required key");
      c.unitary.qubits = u["qubits"] ? get_qubit_list(u["qubits"], "unitary.qubits", c.n_qubits) : std::vector<int>{0, 1};
      if (c.unitary.qubits.size() != 2) throw SchemaError("unitary.qubits: xx acts on exactly two qubits");
      if (c.n_qubits < 2) throw SchemaError("unitary.qubits: xx needs n_qubits >= 2");
    } else if (k == "matrix_file") {
      if (!u["path"]) throw SchemaError("unitary.path: missing required key");
      c.unitary.path = scalar<std::string>(u["path"], "unitary.path");
    } else if (k != "identity" && k != "haar") {
      throw SchemaError("unitary.kind: unknown value '" + k + "'");
    }
    if (c.unitary.sweep_size() > 1 && c.experiment != Experiment::EstimateRgp)
      throw SchemaError("unitary: parameter sweeps are only supported by estimate-rgp");
  } else if (c.experiment != Experiment::HaarAverages) {
    throw SchemaError("unitary: missing required key");
  }

  if (root["outcome"]) {
    const YAML::Node o = root["outcome"];
    if (o.IsScalar() && o.Scalar() == "all") {
      c.outcome = kAllOutcomes;
    } else {
      c.outcome = scalar<long long>(o, "outcome");
      const Index db = pow2(static_cast<int>(c.measured_qubits.size()));
      if (c.outcome < 0 || c.outcome >= db) throw SchemaError("outcome: must be 'all' or in [0, 2^N_B)");
    }
  }
  c.shots = static_cast<std::size_t>(get_int(root, "shots", "shots", 100, 1LL << 32, 10000));
  c.finite_shots = static_cast<std::size_t>(get_int(root, "finite_shots", "finite_shots", 0, 1LL << 32, 0));
  c.depth = static_cast<int>(get_int(root, "depth", "depth", 1, 100000, 30));
  c.realizations = static_cast<std::size_t>(get_int(root, "realizations", "realizations", 2, 1LL << 32, 100));
  c.samples = static_cast<std::size_t>(get_int(root, "samples", "samples", 20, 1LL << 32, 10000));
  c.rgp_samples = static_cast<std::size_t>(get_int(root, "rgp_samples", "rgp_samples", 2, 1LL << 32, 20000));
  if (root["rgp_path"]) {
    const auto s = scalar<std::string>(root["rgp_path"], "rgp_path");
    if (s == "auto") c.path = RgpPath::Auto;
    else if (s == "exact") c.path = RgpPath::Exact;
    else if (s == "state") c.path = RgpPath::State;
    else throw SchemaError("rgp_path: must be auto, exact or state");
  }
  if (root["design_orders"]) {
    for (const auto& v : root["design_orders"]) {
      const int t = scalar<int>(v, "design_orders");
      if (t != 2 && t != 4) throw SchemaError("design_orders: entries must be 2 or 4");
      c.design_orders.push_back(t);
    }
  }
  if (root["omega"]) c.omega = scalar<double>(root["omega"], "omega");
  if (root["plot"]) c.plot = parse_plot(root["plot"]);
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::BadFile&) {
    throw SchemaError("config: cannot read '" + path.string() + "'");
  } catch (const YAML::Exception& e) {
    throw SchemaError(std::string("config: parse error: ") + e.what());
  }
  return parse_config(root, path.parent_path());
}

// Text literal: "dim D" then D rows of D (re, im) pairs.
inline DenseOperator load_unitary_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("unitary.path: cannot read '" + path.string() + "'");
  std::string tag;
  Index d = 0;
  in >> tag >> d;
  if (tag != "dim" || d < 1) throw SchemaError("unitary.path: expected header 'dim D'");
  Mat m(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      double re = 0, im = 0;
      if (!(in >> re >> im)) throw SchemaError("unitary.path: truncated matrix data");
      m(i, j) = cplx(re, im);
    }
  if (!is_unitary(m, tol::kUnitaryLoad)) throw DomainError("unitary.path: matrix fails unitarity check (1e-8)");
  // Snap text round-off onto the nearest unitary.
  Mat u;
  if (!polar_unitary(m, u)) throw DomainError("unitary.path: matrix is singular");
  return DenseOperator::unitary(std::move(u));
}

inline void save_unitary_file(const std::filesystem::path& path, const Mat& u) {
  std::ofstream out(path);
  out << "dim " << u.rows() << "\n";
  out.precision(17);
  for (Index i = 0; i < u.rows(); ++i) {
    for (Index j = 0; j < u.cols(); ++j) out << (j ? " " : "") << u(i, j).real() << " " << u(i, j).imag();
    out << "\n";
  }
}

}  // namespace qrtlab::expcli
