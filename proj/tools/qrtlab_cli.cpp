// Copyright 2026 The qrtlab Authors.
// Licensed under the Apache License, Version 2.0.
//
// Experiment runner. Each experiment subcommand reads a YAML config and writes
// CSV/JSON artifacts plus manifest.json into --out.
//
// Exit status: 0 ok, 2 schema/validation, 3 size guard, 4 NaN in outputs.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "qrtlab/expcli/runner.hpp"

namespace {

struct RunArgs {
  std::string config;
  std::string out = "out";
  int workers = 0;
  std::optional<std::uint64_t> seed;
  bool plot = false;
};

void add_run_flags(CLI::App* sub, RunArgs& a) {
  sub->add_option("--config", a.config, "YAML run config")->required();
  sub->add_option("--out", a.out, "output directory");
  sub->add_option("--workers", a.workers, "worker threads (default: $QRTLAB_WORKERS or all cores)");
  sub->add_option("--seed", a.seed, "master seed, overrides the config");
  sub->add_flag("--plot", a.plot, "also render plot.svg");
}

int run_experiment(const std::string& name, const RunArgs& a) {
  using namespace qrtlab::expcli;
  RunConfig cfg = load_config(a.config);
  if (to_string(cfg.experiment) != name)
    throw qrtlab::SchemaError("experiment: config names '" + to_string(cfg.experiment) + "' but subcommand is '" +
                              name + "'");
  const int workers = a.workers > 0 ? a.workers : qrtlab::default_workers();
  const RunResult r = run(std::move(cfg), a.out, workers, a.seed, a.plot);
  std::cout << "wrote " << r.manifest_path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qrtlab: resource-generating power experiments"};
  app.require_subcommand(1);

  RunArgs args;
  const char* experiments[] = {"estimate-rgp", "thermalize", "deep-thermalize", "verify-twirl", "haar-averages"};
  std::vector<CLI::App*> subs;
  for (const char* e : experiments) {
    auto* s = app.add_subcommand(e, std::string("run a ") + e + " config");
    add_run_flags(s, args);
    subs.push_back(s);
  }

  std::string csv, out_svg, x = "t", err, title;
  std::vector<std::string> ys;
  bool log_y = false;
  std::optional<double> ref;
  auto* plot = app.add_subcommand("plot", "render an SVG line chart from a CSV");
  plot->add_option("--csv", csv, "input CSV")->required();
  plot->add_option("--out", out_svg, "output SVG")->required();
  plot->add_option("--x", x, "x column");
  plot->add_option("--y", ys, "y column(s)")->required();
  plot->add_option("--err", err, "error-bar column for the first series");
  plot->add_flag("--log-y", log_y, "logarithmic y axis");
  plot->add_option("--one-minus-over", ref, "plot |1 - y/REF| instead of y");
  plot->add_option("--title", title, "chart title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) return run_experiment(experiments[i], args);
    if (plot->parsed()) {
      qrtlab::expcli::PlotSpec spec;
      spec.x = x;
      spec.y = ys;
      spec.err = err;
      spec.log_y = log_y;
      spec.one_minus_over = ref;
      spec.title = title;
      qrtlab::expcli::plot(csv, spec, out_svg);
      std::cout << "wrote " << out_svg << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qrtlab::expcli::exit_code_for(e);
  }
  return 1;
}
