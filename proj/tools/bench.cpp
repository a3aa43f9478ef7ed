#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nonpsd/bench/runners.hpp"
#include "nonpsd/error.hpp"

namespace {

struct Args {
  std::string config;
  std::int64_t seed = -1;
  std::string out = ".";
  bool svg = false;
};

void add_common(CLI::App* sub, Args& args) {
  sub->add_option("--config", args.config, "key = value configuration file")->required();
  sub->add_option("--seed", args.seed, "base seed, overrides the config")->check(CLI::NonNegativeNumber);
  sub->add_option("--out", args.out, "output directory");
  sub->add_flag("--svg", args.svg, "also write SVG plots");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace nonpsd::bench;
  CLI::App app{"Benchmarks for sketched second-order methods, lp regression and bilinear sketches"};
  app.require_subcommand(1);
  Args args;
  auto* opt = app.add_subcommand("optimize", "run optimizers over schemes and seeds");
  auto* lp = app.add_subcommand("lpreg", "sketch-and-solve lp regression error vs sketch size");
  auto* vmv = app.add_subcommand("vmv", "TensorSketch bilinear-form error vs bucket count");
  auto* scores = app.add_subcommand("scores", "exact and approximate leverage scores of a dataset");
  for (auto* sub : {opt, lp, vmv, scores}) add_common(sub, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const KeyValueConfig cfg = KeyValueConfig::load(args.config);
    RunOptions ro;
    if (args.seed >= 0) ro.seed = static_cast<std::uint64_t>(args.seed);
    ro.out_dir = args.out;
    ro.svg = args.svg;
    RunOutput written;
    if (opt->parsed()) {
      written = run_optimize(cfg, ro);
    } else if (lp->parsed()) {
      written = run_lpreg(cfg, ro);
    } else if (vmv->parsed()) {
      written = run_vmv(cfg, ro);
    } else {
      written = run_scores(cfg, ro);
    }
    for (const auto& path : written) std::cout << path << '\n';
  } catch (const nonpsd::Error& e) {
    std::cerr << "error: " << nonpsd::error_code_name(e.code()) << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: E_INTERNAL: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
