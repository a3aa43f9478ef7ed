#include "nonpsd/bench/runners.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <map>
#include <mutex>
#include <thread>

#include "nonpsd/bench/csv.hpp"
#include "nonpsd/bench/svg.hpp"
#include "nonpsd/bench/synth.hpp"
#include "nonpsd/lp_regression.hpp"
#include "nonpsd/rng.hpp"
#include "nonpsd/schemes.hpp"
#include "nonpsd/sketch_sampling.hpp"
#include "nonpsd/vmv_sketch.hpp"

namespace nonpsd::bench {

namespace {

const std::set<std::string> kCommonKeys = {"seed", "seeds", "threads"};
const std::set<std::string> kDatasetKeys = {"dataset",        "format",           "delimiter",        "header",
                                            "label_column",   "positive_class",   "features",         "identity_n",
                                            "synth_n",        "synth_d",          "synth_heavy_rows", "synth_heavy_scale",
                                            "synth_seed",     "standardize"};

std::set<std::string> keys(std::initializer_list<const std::set<std::string>*> groups,
                           std::initializer_list<std::string> extra) {
  std::set<std::string> out;
  for (const auto* g : groups) out.insert(g->begin(), g->end());
  out.insert(extra.begin(), extra.end());
  return out;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create output directory '" + dir + "': " + ec.message());
}

std::vector<std::uint64_t> seed_list(const KeyValueConfig& cfg, const RunOptions& opts) {
  const std::uint64_t base = opts.seed.value_or(cfg.get_uint("seed", 0));
  const std::int64_t count = cfg.get_int("seeds", 1);
  if (count < 1) throw Error(ErrorCode::Config, "seeds must be >= 1");
  std::vector<std::uint64_t> out;
  for (std::int64_t i = 0; i < count; ++i) out.push_back(base + static_cast<std::uint64_t>(i));
  return out;
}

unsigned thread_count(const KeyValueConfig& cfg) {
  const std::int64_t t = cfg.get_int("threads", 0);
  if (t < 0) throw Error(ErrorCode::Config, "threads must be >= 0");
  if (t > 0) return static_cast<unsigned>(t);
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string file_token(std::string s) {
  for (char& c : s) {
    if (c == '(' || c == ')' || c == ' ' || c == '/') c = '_';
  }
  while (!s.empty() && s.back() == '_') s.pop_back();
  return s;
}

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size();
  return m % 2 == 1 ? xs[m / 2] : 0.5 * (xs[m / 2 - 1] + xs[m / 2]);
}

std::string scheme_label(Scheme scheme, double fraction) {
  if (scheme != Scheme::LSDet) return std::string(scheme_name(scheme));
  return "LS-Det(" + format_number(fraction) + ")";
}

}  // namespace

void parallel_for(Index count, unsigned threads, const std::function<void(Index)>& body) {
  const unsigned workers = static_cast<unsigned>(std::max<Index>(1, std::min<Index>(count, threads)));
  if (workers <= 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<Index> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mu;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const Index i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

OptimizerKind parse_optimizer(const std::string& name) {
  if (name == "newton_cg") return OptimizerKind::NewtonCg;
  if (name == "newton_mr") return OptimizerKind::NewtonMr;
  if (name == "trust_region") return OptimizerKind::TrustRegion;
  throw Error(ErrorCode::Config, "unknown optimizer '" + name + "'");
}

std::string optimizer_name(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::NewtonCg: return "newton_cg";
    case OptimizerKind::NewtonMr: return "newton_mr";
    case OptimizerKind::TrustRegion: return "trust_region";
  }
  return "?";
}

OptTrace run_optimizer(OptimizerKind kind, const FiniteSumProblem& problem, const OptConfig& config) {
  switch (kind) {
    case OptimizerKind::NewtonCg: return newton_cg(problem, config);
    case OptimizerKind::NewtonMr: return newton_mr(problem, config);
    case OptimizerKind::TrustRegion: return trust_region(problem, config);
  }
  throw Error(ErrorCode::Config, "unknown optimizer");
}

std::optional<double> calls_to_tolerance(const OptTrace& trace, double tol) {
  for (const IterRecord& rec : trace.records) {
    if (rec.grad_norm <= tol) return rec.oracle_calls;
  }
  return std::nullopt;
}

Dataset dataset_from_config(const KeyValueConfig& cfg) {
  const std::string name = cfg.get_string("dataset", "synth");
  if (name == "synth") {
    const Index n = cfg.get_int("synth_n", 1000);
    const Index d = cfg.get_int("synth_d", 10);
    return synth_planted(n, d, cfg.get_int("synth_heavy_rows", d), cfg.get_double("synth_heavy_scale", 1000.0),
                         cfg.get_uint("synth_seed", 0));
  }
  if (name == "identity") {
    const Index n = cfg.get_int("identity_n", 10);
    if (n < 1) throw Error(ErrorCode::Config, "identity_n must be >= 1");
    Dataset out;
    out.a = RMat::Identity(n, n);
    out.labels = RVec::Zero(n);
    out.description = "identity " + std::to_string(n);
    return out;
  }
  LoadOptions lo;
  const std::string fmt = cfg.get_string("format", "");
  if (fmt.empty()) {
    lo.format = format_from_path(name);
  } else if (fmt == "csv") {
    lo.format = DataFormat::Csv;
  } else if (fmt == "libsvm") {
    lo.format = DataFormat::Libsvm;
  } else {
    throw Error(ErrorCode::Config, "format must be csv or libsvm");
  }
  const std::string delim = cfg.get_string("delimiter", ",");
  if (delim == "tab" || delim == "\\t") {
    lo.delimiter = '\t';
  } else if (delim == "space") {
    lo.delimiter = ' ';
  } else if (delim.size() == 1) {
    lo.delimiter = delim[0];
  } else {
    throw Error(ErrorCode::Config, "delimiter must be a single character, 'tab' or 'space'");
  }
  lo.header = cfg.get_bool("header", false);
  lo.label_column = cfg.get_int("label_column", -1);
  lo.features = cfg.get_int("features", 0);
  lo.standardize = cfg.get_bool("standardize", true);
  if (cfg.has("positive_class")) lo.positive_class = cfg.get_double("positive_class", 0.0);
  return load_dataset(name, lo);
}

RunOutput run_optimize(const KeyValueConfig& cfg, const RunOptions& opts) {
  cfg.require_known(keys({&kCommonKeys, &kDatasetKeys},
                         {"loss", "lambda_policy", "lambda", "optimizers", "schemes", "sample_size", "sample_fraction",
                          "det_fractions", "max_outer", "max_oracle_calls", "grad_tol", "inner_cap", "inner_tol",
                          "rho", "tr_delta0", "tr_eta", "tr_gamma", "target_grad"}));
  const Dataset data = dataset_from_config(cfg);
  FiniteSumProblem problem{data.a, data.labels, parse_loss(cfg.get_string("loss", "nlls")), 0.0};
  const std::string policy = cfg.get_string("lambda_policy", "manual");
  if (policy == "manual") {
    problem.ridge_lambda = cfg.get_double("lambda", 0.0);
  } else if (policy == "convex_auto") {
    problem.ridge_lambda = convex_ridge_lambda(problem);
  } else {
    throw Error(ErrorCode::Config, "lambda_policy must be manual or convex_auto");
  }
  problem.validate();

  std::vector<OptimizerKind> optimizers;
  for (const auto& name : cfg.get_list("optimizers", {"newton_mr"})) optimizers.push_back(parse_optimizer(name));
  struct SchemeVariant {
    Scheme scheme;
    double fraction;
  };
  std::vector<SchemeVariant> variants;
  const std::vector<double> fractions = cfg.get_double_list("det_fractions", {0.0, 0.25, 0.5, 0.75, 1.0});
  for (const auto& name : cfg.get_list("schemes", {"Full"})) {
    const Scheme s = parse_scheme(name);
    if (s == Scheme::LSDet) {
      for (double f : fractions) variants.push_back({s, f});
    } else {
      variants.push_back({s, 0.0});
    }
  }

  OptConfig base;
  const Index n = problem.rows();
  if (cfg.has("sample_size")) {
    base.sample_size = cfg.get_int("sample_size", 0);
  } else {
    const double frac = cfg.get_double("sample_fraction", 0.05);
    base.sample_size = std::max<Index>(1, static_cast<Index>(std::ceil(frac * static_cast<double>(n))));
  }
  base.max_outer = cfg.get_int("max_outer", 100);
  base.max_oracle_calls = cfg.get_double("max_oracle_calls", std::numeric_limits<double>::infinity());
  base.grad_tol = cfg.get_double("grad_tol", 1e-8);
  base.inner.max_iterations = cfg.get_int("inner_cap", 100);
  base.inner.rel_tol = cfg.get_double("inner_tol", 1e-8);
  base.line_search_rho = cfg.get_double("rho", 1e-4);
  base.tr_delta0 = cfg.get_double("tr_delta0", 1.0);
  base.tr_eta = cfg.get_double("tr_eta", 0.8);
  base.tr_gamma = cfg.get_double("tr_gamma", 1.2);
  const double target = cfg.get_double("target_grad", 1e-4);
  const std::vector<std::uint64_t> seeds = seed_list(cfg, opts);

  struct Cell {
    OptimizerKind opt;
    SchemeVariant variant;
    std::uint64_t seed;
    OptTrace trace;
    std::string error;
  };
  std::vector<Cell> cells;
  for (OptimizerKind o : optimizers) {
    for (const SchemeVariant& v : variants) {
      for (std::uint64_t s : seeds) cells.push_back({o, v, s, {}, {}});
    }
  }
  // Config errors surface before any work starts.
  for (const SchemeVariant& v : variants) {
    OptConfig c = base;
    c.scheme = v.scheme;
    c.det_fraction = v.fraction;
    c.validate(n);
  }

  parallel_for(static_cast<Index>(cells.size()), thread_count(cfg), [&](Index i) {
    Cell& cell = cells[static_cast<std::size_t>(i)];
    OptConfig c = base;
    c.scheme = cell.variant.scheme;
    c.det_fraction = cell.variant.fraction;
    c.seed = cell.seed;
    try {
      cell.trace = run_optimizer(cell.opt, problem, c);
    } catch (const Error& e) {
      cell.error = std::string(error_code_name(e.code()));
    }
  });

  ensure_dir(opts.out_dir);
  RunOutput written;
  CsvTable summary({"optimizer", "scheme", "seed", "status", "iterations", "oracle_calls", "final_objective",
                    "final_grad_norm", "calls_to_target"});
  for (const Cell& cell : cells) {
    const std::string label = scheme_label(cell.variant.scheme, cell.variant.fraction);
    const std::string stem = optimizer_name(cell.opt) + "_" + file_token(label) + "_s" + std::to_string(cell.seed);
    if (!cell.error.empty()) {
      summary.add_row({optimizer_name(cell.opt), label, std::to_string(cell.seed), "error:" + cell.error, "0", "0", "0",
                       "0", "-1"});
      continue;
    }
    CsvTable trace({"iter", "oracle_calls", "objective", "grad_norm", "step_or_radius", "accepted"});
    for (const IterRecord& r : cell.trace.records) {
      trace.add_row({format_int(r.iter), format_number(r.oracle_calls), format_number(r.objective),
                     format_number(r.grad_norm), format_number(r.step_or_radius), r.accepted ? "1" : "0"});
    }
    const std::string path = join_path(opts.out_dir, "trace_" + stem + ".csv");
    write_file(path, trace.to_string());
    written.push_back(path);
    const IterRecord& last = cell.trace.records.back();
    const auto reach = calls_to_tolerance(cell.trace, target);
    summary.add_row({optimizer_name(cell.opt), label, std::to_string(cell.seed),
                     std::string(status_name(cell.trace.status)), format_int(last.iter), format_number(last.oracle_calls),
                     format_number(last.objective), format_number(last.grad_norm),
                     reach ? format_number(*reach) : "-1"});
  }
  const std::string summary_path = join_path(opts.out_dir, "summary.csv");
  write_file(summary_path, summary.to_string());
  written.push_back(summary_path);

  if (opts.svg) {
    for (OptimizerKind o : optimizers) {
      for (const auto& [column, title] : {std::pair<std::string, std::string>{"objective", "F(x)"},
                                          std::pair<std::string, std::string>{"grad_norm", "||grad F(x)||"}}) {
        std::vector<Series> series;
        for (const SchemeVariant& v : variants) {
          const std::string label = scheme_label(v.scheme, v.fraction);
          const std::string path = join_path(
              opts.out_dir, "trace_" + optimizer_name(o) + "_" + file_token(label) + "_s" + std::to_string(seeds.front()) + ".csv");
          if (!std::filesystem::exists(path)) continue;
          auto s = series_from_csv(CsvTable::load(path), "oracle_calls", column, "");
          s.front().label = label;
          series.push_back(std::move(s.front()));
        }
        const std::string svg_path = join_path(opts.out_dir, column + "_" + optimizer_name(o) + ".svg");
        write_file(svg_path, render_svg(series, {optimizer_name(o) + ", seed " + std::to_string(seeds.front()),
                                                 "oracle calls", title, true}));
        written.push_back(svg_path);
      }
    }
  }
  return written;
}

RunOutput run_lpreg(const KeyValueConfig& cfg, const RunOptions& opts) {
  cfg.require_known(keys({&kCommonKeys}, {"n", "d", "p", "values", "instance", "instance_seed", "all_heavy", "epsilon"}));
  const Index n = cfg.get_int("n", 100);
  const Index d = cfg.get_int("d", 50);
  if (n < 1 || d < 1 || d > n) throw Error(ErrorCode::Config, "lpreg needs 1 <= d <= n");
  const double p = cfg.get_double("p", 1.0);
  if (!(p >= 1.0)) throw Error(ErrorCode::Config, "p must be >= 1");
  const bool inf = std::isinf(p);
  std::vector<double> values = cfg.get_double_list(
      "values", inf ? std::vector<double>{2, 3, 4, 5, 6} : std::vector<double>{2, 4, 6, 8, 10, 20});
  for (double v : values) {
    if (v < 1 || v != std::floor(v)) throw Error(ErrorCode::Config, "values must be positive integers");
    if (inf && v > 20) throw Error(ErrorCode::Budget, "s > 20 would need more than 2^20 rows per pair");
  }
  const std::string instance = cfg.get_string("instance", "gaussian");
  if (instance != "gaussian" && instance != "zero_residual") {
    throw Error(ErrorCode::Config, "instance must be gaussian or zero_residual");
  }
  const std::uint64_t inst_seed = cfg.get_uint("instance_seed", 0);
  const CMat a = complex_gaussian(n, d, derive_seed(inst_seed, 1));
  CVec b;
  if (instance == "gaussian") {
    b = complex_gaussian(n, 1, derive_seed(inst_seed, 2)).col(0);
  } else {
    b = a * complex_gaussian(d, 1, derive_seed(inst_seed, 3)).col(0);
  }
  const LiftedRegression lifted = lift_instance(a, b);
  LpSolveOptions full_opts;
  full_opts.group_size = 2;
  const LpSolveResult star = small_lp_solve(lifted.ap, lifted.bp, p, full_opts);
  const CVec xstar = unphi(star.y);
  const double opt_obj = complex_pnorm(a * xstar - b, p);

  const std::vector<std::uint64_t> seeds = seed_list(cfg, opts);
  struct Cell {
    double value;
    std::uint64_t seed;
    double err_x = 0.0;
    double err_obj = 0.0;
  };
  std::vector<Cell> cells;
  for (double v : values) {
    for (std::uint64_t s : seeds) cells.push_back({v, s});
  }
  const bool all_heavy = cfg.get_bool("all_heavy", true);
  const double eps = cfg.get_double("epsilon", 0.5);
  parallel_for(static_cast<Index>(cells.size()), thread_count(cfg), [&](Index i) {
    Cell& cell = cells[static_cast<std::size_t>(i)];
    SketchSolveParams params;
    params.all_heavy = all_heavy;
    params.epsilon = eps;
    params.seed = cell.seed;
    if (inf) {
      params.s = static_cast<Index>(cell.value);
    } else {
      params.t = static_cast<Index>(cell.value);
    }
    const SketchSolveResult res = sketch_and_solve(a, b, p, params);
    cell.err_x = (res.xhat - xstar).norm();
    cell.err_obj = complex_pnorm(a * res.xhat - b, p) - opt_obj;
  });

  ensure_dir(opts.out_dir);
  CsvTable table({"t_or_s", "seed", "err_x", "err_obj"});
  for (const Cell& c : cells) {
    table.add_row({format_int(static_cast<std::int64_t>(c.value)), std::to_string(c.seed), format_number(c.err_x),
                   format_number(c.err_obj)});
  }
  RunOutput written;
  const std::string path = join_path(opts.out_dir, "lpreg.csv");
  write_file(path, table.to_string());
  written.push_back(path);
  if (opts.svg) {
    const CsvTable back = CsvTable::load(path);
    const auto xs = back.numeric_column("t_or_s");
    const auto errs = back.numeric_column("err_x");
    std::map<double, std::vector<double>> groups;
    for (std::size_t i = 0; i < xs.size(); ++i) groups[xs[i]].push_back(errs[i]);
    Series s{"median err_x", {}, {}};
    for (const auto& [x, es] : groups) {
      s.x.push_back(x);
      s.y.push_back(median(es));
    }
    const std::string svg_path = join_path(opts.out_dir, "lpreg.svg");
    write_file(svg_path, render_svg({s}, {inf ? "p = inf" : "p = " + format_number(p), inf ? "s" : "t",
                                          "median ||xhat - x*||", true}));
    written.push_back(svg_path);
  }
  return written;
}

RunOutput run_vmv(const KeyValueConfig& cfg, const RunOptions& opts) {
  cfg.require_known(keys({&kCommonKeys}, {"n", "d", "ks", "eps_rel", "instances", "instance_seed", "reps"}));
  const Index n = cfg.get_int("n", 50);
  const Index d = cfg.get_int("d", 5);
  if (n < 2 || d < 1) throw Error(ErrorCode::Config, "vmv needs n >= 2 and d >= 1");
  const double eps_rel = cfg.get_double("eps_rel", 0.5);
  if (!(eps_rel > 0.0)) throw Error(ErrorCode::Config, "eps_rel must be > 0");
  const Index reps = cfg.get_int("reps", 1);
  if (reps < 1) throw Error(ErrorCode::Config, "reps must be >= 1");
  const std::uint64_t inst_seed = cfg.get_uint("instance_seed", 0);
  const std::vector<std::uint64_t> seeds = seed_list(cfg, opts);

  ensure_dir(opts.out_dir);
  RunOutput written;
  for (const std::string& instance : cfg.get_list("instances", {"random", "cancellation"})) {
    CMat a, b;
    CVec u = complex_gaussian(d, 1, derive_seed(inst_seed, 13)).col(0);
    CVec v = complex_gaussian(d, 1, derive_seed(inst_seed, 14)).col(0);
    if (instance == "random") {
      a = complex_gaussian(n, d, derive_seed(inst_seed, 11));
      b = complex_gaussian(n, d, derive_seed(inst_seed, 12));
    } else if (instance == "cancellation") {
      const CVec row = 1e3 * complex_gaussian(d, 1, derive_seed(inst_seed, 15)).col(0);
      const CMat half = 1e3 * complex_gaussian(n / 2, d, derive_seed(inst_seed, 16));
      a.resize(2 * (n / 2), d);
      b.resize(2 * (n / 2), d);
      for (Index i = 0; i < n / 2; ++i) {
        a.row(i) = row.transpose();
        a.row(i + n / 2) = row.transpose();
        b.row(i) = half.row(i);
        b.row(i + n / 2) = -half.row(i);
      }
    } else if (instance == "zero") {
      a = complex_gaussian(n, d, derive_seed(inst_seed, 11));
      b = complex_gaussian(n, d, derive_seed(inst_seed, 12));
      u.setZero();
      v.setZero();
    } else {
      throw Error(ErrorCode::Config, "instances must be drawn from random, cancellation, zero");
    }
    const CMat atb = a.transpose() * b;
    const cplx exact = (u.transpose() * atb * v)(0, 0);
    // The additive target scales with the uncancelled mass so it stays meaningful when A^T B = 0.
    double mass = 0.0;
    for (Index i = 0; i < a.rows(); ++i) mass += a.row(i).norm() * b.row(i).norm();
    const double frob = atb.norm();
    const double eps = eps_rel * u.norm() * v.norm() * (frob > 0.0 ? frob : mass);
    std::vector<double> ks;
    if (cfg.has("ks")) {
      ks = cfg.get_double_list("ks", {});
    } else {
      const Index k = eps > 0.0 ? vmv_bucket_count(u.norm(), v.norm(), frob, eps) : 1;
      ks.push_back(static_cast<double>(k));
    }
    struct Cell {
      Index k;
      std::uint64_t seed;
      double err = 0.0;
    };
    std::vector<Cell> cells;
    for (double k : ks) {
      if (k < 1 || k != std::floor(k)) throw Error(ErrorCode::Config, "ks must be positive integers");
      for (std::uint64_t s : seeds) cells.push_back({static_cast<Index>(k), s});
    }
    parallel_for(static_cast<Index>(cells.size()), thread_count(cfg), [&](Index i) {
      Cell& c = cells[static_cast<std::size_t>(i)];
      c.err = std::abs(estimate_vmv(a, b, u, v, c.k, reps, c.seed) - exact);
    });
    CsvTable table({"k", "seed", "abs_err"});
    for (const Cell& c : cells) table.add_row({format_int(c.k), std::to_string(c.seed), format_number(c.err)});
    const std::string path = join_path(opts.out_dir, "vmv_" + instance + ".csv");
    write_file(path, table.to_string());
    written.push_back(path);
    if (opts.svg) {
      const CsvTable back = CsvTable::load(path);
      const auto xs = back.numeric_column("k");
      const auto errs = back.numeric_column("abs_err");
      std::map<double, std::vector<double>> groups;
      for (std::size_t i = 0; i < xs.size(); ++i) groups[xs[i]].push_back(errs[i]);
      Series s{"median abs_err", {}, {}};
      for (const auto& [x, es] : groups) {
        s.x.push_back(x);
        s.y.push_back(median(es));
      }
      const std::string svg_path = join_path(opts.out_dir, "vmv_" + instance + ".svg");
      write_file(svg_path, render_svg({s}, {"TensorSketch, " + instance, "k", "median |error|", true}));
      written.push_back(svg_path);
    }
  }
  return written;
}

RunOutput run_scores(const KeyValueConfig& cfg, const RunOptions& opts) {
  cfg.require_known(keys({&kCommonKeys, &kDatasetKeys}, {"loss", "schemes", "embed_factor", "jl_log_factor"}));
  const Dataset data = dataset_from_config(cfg);
  const FiniteSumProblem problem{data.a, data.labels, parse_loss(cfg.get_string("loss", "nlls")), 0.0};
  problem.validate();
  const std::uint64_t seed = opts.seed.value_or(cfg.get_uint("seed", 0));
  const ScoreVector exact = exact_leverage_scores(problem.a);
  ApproxLeverageOptions ao;
  ao.embed_factor = cfg.get_double("embed_factor", ao.embed_factor);
  ao.jl_log_factor = cfg.get_double("jl_log_factor", ao.jl_log_factor);
  const ScoreVector approx = approx_leverage_scores(problem.a, seed, ao);

  std::vector<Scheme> schemes;
  for (const auto& name : cfg.get_list("schemes", {"Uniform", "LS", "RN", "LS-MX", "RN-MX"})) {
    schemes.push_back(parse_scheme(name));
  }
  const RVec x0 = RVec::Zero(problem.dim());
  std::vector<RVec> probs;
  for (Scheme s : schemes) probs.push_back(scheme_probabilities(problem, x0, s).probs.values);

  std::vector<std::string> header = {"row", "exact", "approx", "ratio"};
  for (Scheme s : schemes) header.push_back("p_" + std::string(scheme_name(s)));
  CsvTable table(header);
  std::vector<Index> order(static_cast<std::size_t>(problem.rows()));
  for (Index i = 0; i < problem.rows(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](Index x, Index y) { return exact.values(x) > exact.values(y); });
  for (Index i : order) {
    const double e = exact.values(i);
    std::vector<std::string> row = {format_int(i), format_number(e), format_number(approx.values(i)),
                                    format_number(e > 0.0 ? approx.values(i) / e : 0.0)};
    for (const RVec& p : probs) row.push_back(format_number(p(i)));
    table.add_row(std::move(row));
  }
  ensure_dir(opts.out_dir);
  const std::string path = join_path(opts.out_dir, "scores.csv");
  write_file(path, table.to_string());
  RunOutput written{path};
  if (opts.svg) {
    const CsvTable back = CsvTable::load(path);
    const auto ex = back.numeric_column("exact");
    const auto ap = back.numeric_column("approx");
    Series se{"exact", {}, ex}, sa{"approx", {}, ap};
    for (std::size_t i = 0; i < ex.size(); ++i) {
      se.x.push_back(static_cast<double>(i));
      sa.x.push_back(static_cast<double>(i));
    }
    const std::string svg_path = join_path(opts.out_dir, "scores.svg");
    write_file(svg_path, render_svg({se, sa}, {"leverage scores (sorted by exact)", "rank", "score", true}));
    written.push_back(svg_path);
  }
  return written;
}

}  // namespace nonpsd::bench
