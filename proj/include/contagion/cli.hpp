#pragma once

// Command-line front end.  Every file-producing run writes a JSON manifest
// next to its output (config echo, seed, version, graph hashes), so any
// result can be reproduced byte for byte from the manifest alone.
//
// Exit codes: 0 success, 1 domain error (message on stderr), 2 usage error.

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "contagion/acceptance.hpp"
#include "contagion/distribution.hpp"
#include "contagion/dynamics.hpp"
#include "contagion/expander.hpp"
#include "contagion/experiments.hpp"
#include "contagion/graph.hpp"
#include "contagion/graphgen.hpp"
#include "contagion/jsonio.hpp"
#include "contagion/oracle.hpp"
#include "contagion/rng.hpp"

namespace contagion::cli {

inline constexpr const char* kToolVersion = "contagion-1.0";
inline constexpr uint64_t kDefaultSeed = 1;

namespace detail {

// Distribution specs: poisson:D, geometric:P, point:K, stretched:A,B[,KMIN],
// table:FILE.csv (columns k,p).
inline DegreeDistribution parse_mu(const std::string& spec) {
  auto colon = spec.find(':');
  std::string kind = spec.substr(0, colon);
  std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "table") {
    if (rest.empty()) throw std::invalid_argument("table spec needs a file path");
    return DegreeDistribution::from_table_csv(rest);
  }
  std::vector<double> args;
  size_t pos = 0;
  while (pos < rest.size()) {
    size_t comma = rest.find(',', pos);
    if (comma == std::string::npos) comma = rest.size();
    args.push_back(std::stod(rest.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  if (kind == "poisson" && args.size() == 1) return DegreeDistribution::poisson(args[0]);
  if (kind == "geometric" && args.size() == 1) return DegreeDistribution::geometric(args[0]);
  if (kind == "point" && args.size() == 1) return DegreeDistribution::point(uint32_t(args[0]));
  if (kind == "stretched" && (args.size() == 2 || args.size() == 3))
    return DegreeDistribution::stretched_exponential(args[0], args[1],
                                                     args.size() == 3 ? uint32_t(args[2]) : 0);
  throw std::invalid_argument("unknown distribution spec: " + spec);
}

// Variant specs: standard, root-added:V, root-suppressed:P,R, both-fixed:A,B,
// no-recovery:U.  Dilation comes separately via --theta.
inline Variant parse_variant(const std::string& spec) {
  auto colon = spec.find(':');
  std::string kind = spec.substr(0, colon);
  std::vector<uint32_t> args;
  if (colon != std::string::npos) {
    std::string rest = spec.substr(colon + 1);
    size_t pos = 0;
    while (pos < rest.size()) {
      size_t comma = rest.find(',', pos);
      if (comma == std::string::npos) comma = rest.size();
      args.push_back(uint32_t(std::stoul(rest.substr(pos, comma - pos))));
      pos = comma + 1;
    }
  }
  if (kind == "standard" && args.empty()) return Variant::standard();
  if (kind == "root-added" && args.size() == 1) return Variant::root_added(args[0]);
  if (kind == "root-suppressed" && args.size() == 2)
    return Variant::root_suppressed(args[0], args[1]);
  if (kind == "both-fixed" && args.size() == 2) return Variant::both_fixed(args[0], args[1]);
  if (kind == "no-recovery" && args.size() == 1) return Variant::ignoring_recovery_at(args[0]);
  throw std::invalid_argument("unknown variant spec: " + spec);
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Graph files: .json carries optional root/parent/depth fields; .bin and
// plain text carry the multigraph only.
inline GraphFile load_any_graph(const std::string& path) {
  if (ends_with(path, ".json")) return load_graph_json(path);
  GraphFile gf;
  gf.g = contagion::load_graph(path);
  if (gf.g.root) gf.root = *gf.g.root;
  return gf;
}

inline uint64_t effective_seed(const CLI::App* cmd, uint64_t parsed) {
  if (cmd->count("--seed") == 0) {
    std::fprintf(stderr, "warning: --seed not given, using default seed %" PRIu64 "\n",
                 kDefaultSeed);
    return kDefaultSeed;
  }
  return parsed;
}

inline void emit(const std::string& body, const std::string& out_path) {
  if (out_path.empty())
    std::fputs((body + "\n").c_str(), stdout);
  else
    write_text_file(out_path, body + "\n");
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
  std::string model;
  uint32_t n = 0;
  std::string mu_spec;
  std::string root_mu_spec;
  double mean_degree = 3.0;
  uint32_t depth = 0;
  uint32_t cond_depth = 0;
  uint32_t cycle = 0;
  bool with_parent_flag = false;
  uint64_t seed = kDefaultSeed;
  std::string out;
};

inline int run_gen(const GenArgs& a) {
  RandomStream rng(derive_stream(a.seed, "gen"));
  GraphFile gf;
  if (a.model == "config") {
    if (a.n == 0 || a.mu_spec.empty()) throw std::invalid_argument("config needs --n and --mu");
    gf.g = configuration_model(a.n, parse_mu(a.mu_spec), rng);
  } else if (a.model == "er") {
    if (a.n == 0) throw std::invalid_argument("er needs --n");
    gf.g = erdos_renyi(a.n, a.mean_degree, rng);
  } else if (a.model == "gw") {
    if (a.mu_spec.empty()) throw std::invalid_argument("gw needs --mu");
    auto mu = parse_mu(a.mu_spec);
    auto root_mu = a.root_mu_spec.empty() ? mu : parse_mu(a.root_mu_spec);
    RootedTree t = gw_tree(mu, root_mu, a.depth, rng);
    if (a.with_parent_flag) t = with_parent(t);
    gf.g = t.g;
    gf.root = t.rho;
    if (t.rho_plus) gf.root_parent = *t.rho_plus;
    gf.depth = t.L;
  } else if (a.model == "gwc") {
    if (a.mu_spec.empty() || a.cycle < 2)
      throw std::invalid_argument("gwc needs --mu and --cycle >= 2");
    gf.g = gwc(parse_mu(a.mu_spec), a.cycle, a.depth, rng);
    gf.root = 0;
    gf.depth = a.depth;
  } else if (a.model == "egw") {
    if (a.mu_spec.empty() || a.cycle < 2)
      throw std::invalid_argument("egw needs --mu and --cycle >= 2");
    auto mu = parse_mu(a.mu_spec);
    auto root_mu = a.root_mu_spec.empty() ? mu : parse_mu(a.root_mu_spec);
    gf.g = egw(root_mu, mu, a.cond_depth, a.cycle, a.depth, rng);
    gf.root = 0;
    gf.depth = a.depth;
  } else {
    throw std::invalid_argument("unknown model: " + a.model);
  }

  std::string hash;
  std::string body = render_graph(gf, &hash);
  if (a.out.empty()) {
    std::fputs((body + "\n").c_str(), stdout);
    return 0;
  }
  if (ends_with(a.out, ".json")) {
    write_text_file(a.out, body + "\n");
  } else if (ends_with(a.out, ".bin")) {
    write_binary(gf.g, a.out);
  } else {
    write_text(gf.g, a.out);
  }

  JsonObj man;
  man.add("format", "contagion-manifest-v1");
  man.add("version", kToolVersion);
  man.add("command", "gen");
  man.add("model", a.model);
  if (a.n) man.add("n", a.n);
  if (!a.mu_spec.empty()) man.add("mu", a.mu_spec);
  if (!a.root_mu_spec.empty()) man.add("root_mu", a.root_mu_spec);
  if (a.model == "er") man.add("mean_degree", a.mean_degree);
  if (a.depth) man.add("depth", a.depth);
  if (a.cond_depth) man.add("cond_depth", a.cond_depth);
  if (a.cycle) man.add("cycle", a.cycle);
  if (a.with_parent_flag) man.add("with_parent", true);
  man.add("seed", a.seed);
  man.add("out", a.out);
  man.add("graph_n", uint64_t(gf.g.n));
  man.add("graph_hash", hash);
  write_text_file(a.out + ".manifest.json", man.str() + "\n");
  std::printf("wrote %s (n = %u, hash %s)\n", a.out.c_str(), gf.g.n, hash.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimArgs {
  std::string graph;
  double lambda = 0.0;
  std::string variant = "standard";
  double theta = 1.0;
  std::string init = "all";
  double horizon = 1000.0;
  uint32_t reps = 100;
  uint64_t seed = kDefaultSeed;
  std::string out;
};

inline int run_simulate(const SimArgs& a) {
  GraphFile gf = load_any_graph(a.graph);
  const HalfEdgeGraph& g = gf.g;
  Variant var = parse_variant(a.variant);
  if (a.theta != 1.0) var = var.with_theta(a.theta);

  std::vector<uint32_t> fixed_init;
  if (a.init == "all") {
    for (uint32_t v = 0; v < g.n; ++v) fixed_init.push_back(v);
  } else if (a.init.rfind("vertex:", 0) == 0) {
    uint32_t v = uint32_t(std::stoul(a.init.substr(7)));
    if (v >= g.n) throw std::invalid_argument("init vertex out of range");
    fixed_init = {v};
  } else if (a.init != "random-one") {
    throw std::invalid_argument("init must be all, vertex:K, or random-one");
  }

  std::string csv = "replica,extinction_time,censored,H,events\n";
  char buf[160];
  uint64_t censored = 0;
  std::vector<double> times;
  for (uint32_t rep = 0; rep < a.reps; ++rep) {
    std::vector<uint32_t> init = fixed_init;
    if (a.init == "random-one") {
      RandomStream pick(derive_stream(a.seed, "start", rep));
      init = {uint32_t(pick.uniform_int(g.n))};
    }
    ClockStream clocks(derive_stream(a.seed, "rep", rep), a.lambda);
    auto t = simulate(g, var, init, a.horizon, clocks);
    censored += t.censored ? 1 : 0;
    times.push_back(t.extinction_time);
    std::snprintf(buf, sizeof buf, "%u,%.17g,%d,%u,%" PRIu64 "\n", rep, t.extinction_time,
                  t.censored ? 1 : 0, t.max_depth, t.event_count);
    csv += buf;
  }
  std::sort(times.begin(), times.end());

  if (a.out.empty()) {
    std::fputs(csv.c_str(), stdout);
    return 0;
  }
  write_text_file(a.out, csv);
  JsonObj man;
  man.add("format", "contagion-manifest-v1");
  man.add("version", kToolVersion);
  man.add("command", "simulate");
  man.add("graph", a.graph);
  man.add("graph_hash", std::to_string(g.hash()));
  man.add("lambda", a.lambda);
  man.add("variant", a.variant);
  man.add("theta", a.theta);
  man.add("init", a.init);
  man.add("horizon", a.horizon);
  man.add("reps", a.reps);
  man.add("seed", a.seed);
  man.add("out", a.out);
  man.add("censored_fraction", double(censored) / a.reps);
  man.add("median_extinction_time", quantile_sorted(times, 0.5));
  write_text_file(a.out + ".manifest.json", man.str() + "\n");
  std::printf("wrote %s (%u replicas, censored fraction %.17g)\n", a.out.c_str(), a.reps,
              double(censored) / a.reps);
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
  std::string spec_path;
  std::string out;
};

inline int run_sweep(const SweepArgs& a) {
  auto j = parse_json_file(a.spec_path);
  SweepSpec sp;
  sp.model = j.value("model", std::string("er"));
  if (j.contains("mu")) sp.mu = parse_mu(j["mu"].get<std::string>());
  sp.mean_degree = j.value("mean_degree", 3.0);
  if (!j.contains("lambdas") || !j.contains("ns"))
    throw std::invalid_argument("sweep spec needs lambdas and ns arrays");
  for (const auto& x : j["lambdas"]) sp.lambdas.push_back(x.get<double>());
  for (const auto& x : j["ns"]) sp.ns.push_back(x.get<uint32_t>());
  sp.reps = j.value("reps", 200u);
  sp.horizon_scale = j.value("horizon_scale", 1.0);
  sp.horizon_abs = j.value("horizon_abs", 0.0);
  sp.single_start = j.value("single_start", false);
  if (j.contains("seed")) {
    sp.seed = j["seed"].get<uint64_t>();
  } else {
    std::fprintf(stderr, "warning: sweep spec has no seed, using default seed %" PRIu64 "\n",
                 kDefaultSeed);
    sp.seed = kDefaultSeed;
  }
  std::string mode = j.value("mode", std::string("phase"));

  SweepResult res;
  if (mode == "phase")
    res = phase_sweep(sp);
  else if (mode == "subexp")
    res = subexp_long_survival(sp);
  else
    throw std::invalid_argument("sweep mode must be phase or subexp");

  std::string csv = sweep_csv(res);
  if (a.out.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    write_text_file(a.out, csv);
  }

  JsonObj man;
  man.add("format", "contagion-manifest-v1");
  man.add("version", kToolVersion);
  man.add("command", "sweep");
  man.add("spec", a.spec_path);
  man.add("csv_schema", "lambda,n,reps,horizon,median_t,censored_fraction,label");
  {
    JsonObj echo;
    echo.add("model", sp.model);
    if (j.contains("mu")) echo.add("mu", j["mu"].get<std::string>());
    echo.add("mean_degree", sp.mean_degree);
    JsonArr ls, ns;
    for (double l : sp.lambdas) ls.add(l);
    for (uint32_t n : sp.ns) ns.add(uint64_t(n));
    echo.raw("lambdas", ls.str());
    echo.raw("ns", ns.str());
    echo.add("reps", sp.reps);
    echo.add("horizon_scale", sp.horizon_scale);
    echo.add("horizon_abs", sp.horizon_abs);
    echo.add("single_start", sp.single_start);
    echo.add("seed", sp.seed);
    echo.add("mode", mode);
    man.raw("resolved_spec", echo.str());
  }
  {
    JsonArr hashes;
    for (const auto& row : res.rows) {
      JsonObj h;
      h.add("lambda", row.lambda);
      h.add("n", row.n);
      h.add("graph_hash", std::to_string(row.graph_hash));
      hashes.raw(h.str());
    }
    man.raw("graph_hashes", hashes.str());
  }
  {
    JsonArr fits;
    for (const auto& f : res.fits) {
      JsonObj o;
      o.add("lambda", f.lambda);
      o.add("label", f.label);
      o.add("loglog_slope", f.loglog_slope);
      o.add("loglog_r2", f.loglog_r2);
      o.add("semilog_slope", f.semilog_slope);
      o.add("semilog_r2", f.semilog_r2);
      fits.raw(o.str());
    }
    man.raw("fits", fits.str());
  }
  if (!a.out.empty()) {
    man.add("out", a.out);
    write_text_file(a.out + ".manifest.json", man.str() + "\n");
  }
  for (const auto& f : res.fits)
    std::printf("lambda %.17g: %s (loglog slope %.4f, semilog r2 %.4f)\n", f.lambda,
                f.label.c_str(), f.loglog_slope, f.semilog_r2);
  return 0;
}

// ---------------------------------------------------------------------------
// depth-tail

struct DepthTailArgs {
  std::string graph;
  std::string mu_spec;
  std::string root_mu_spec;
  uint32_t depth = 0;
  double lambda = 0.0;
  uint32_t reps = 100000;
  uint64_t seed = kDefaultSeed;
  std::string out;
};

inline int run_depth_tail(const DepthTailArgs& a) {
  RootedTree tree;
  if (!a.graph.empty()) {
    GraphFile gf = load_any_graph(a.graph);
    if (gf.root_parent) {
      tree = tree_instance(gf);
    } else {
      if (!gf.root) throw std::invalid_argument("depth-tail instance needs a root");
      tree.g = gf.g;
      tree.rho = *gf.root;
      tree.L = gf.depth.value_or(0);
      tree = with_parent(tree);
    }
  } else {
    if (a.mu_spec.empty() || a.depth == 0)
      throw std::invalid_argument("depth-tail needs --graph, or --mu and --depth");
    auto mu = parse_mu(a.mu_spec);
    auto root_mu = a.root_mu_spec.empty() ? mu : parse_mu(a.root_mu_spec);
    RandomStream rng(derive_stream(a.seed, "tree"));
    tree = with_parent(gw_tree(mu, root_mu, a.depth, rng));
  }

  auto d = depth_excursion(tree, a.lambda, a.reps, derive_stream(a.seed, "excursions"));

  JsonObj rep;
  rep.add("format", "contagion-depth-tail-v1");
  rep.add("version", kToolVersion);
  if (!a.graph.empty()) rep.add("graph", a.graph);
  if (!a.mu_spec.empty()) rep.add("mu", a.mu_spec);
  if (!a.root_mu_spec.empty()) rep.add("root_mu", a.root_mu_spec);
  if (a.depth) rep.add("depth", a.depth);
  rep.add("lambda", a.lambda);
  rep.add("reps", a.reps);
  rep.add("seed", a.seed);
  rep.add("tree_n", uint64_t(tree.g.n));
  rep.add("tree_hash", std::to_string(tree.g.hash()));
  JsonArr counts, tail;
  for (uint64_t c : d.count_ge) counts.add(c);
  for (double t : d.tail) tail.add(t);
  rep.raw("count_ge", counts.str());
  rep.raw("tail", tail.str());
  rep.add("slope", d.slope);
  rep.add("slope_se", d.slope_se);
  rep.add("fit_points", d.fit_points);
  rep.add("decay_ratio", std::exp(d.slope));
  emit(rep.str(), a.out);
  if (!a.out.empty())
    std::printf("wrote %s (decay ratio %.4f over %u depths)\n", a.out.c_str(), std::exp(d.slope),
                d.fit_points);
  return 0;
}

// ---------------------------------------------------------------------------
// expander

struct ExpanderArgs {
  std::string graph;
  std::string mu_spec;
  uint32_t j = 8;
  bool auto_params = false;
  uint32_t r1 = 1;
  uint32_t r = 2;
  double rfrak = 10.0;
  uint64_t m = 4;
  double alpha = 0.1;
  std::string verify_mode = "exhaustive";
  uint64_t seed = kDefaultSeed;
  std::string out;
};

inline const char* outcome_name(CertOutcome o) {
  switch (o) {
    case CertOutcome::verified:
      return "verified";
    case CertOutcome::refuted:
      return "refuted";
    default:
      return "inconclusive";
  }
}

inline int run_expander(const ExpanderArgs& a) {
  GraphFile gf = load_any_graph(a.graph);
  PipelineConfig cfg;
  cfg.j = a.j;
  cfg.auto_params = a.auto_params;
  cfg.r1 = a.r1;
  cfg.r = a.r;
  cfg.rfrak = a.rfrak;
  cfg.m = a.m;
  cfg.alpha = a.alpha;
  cfg.seed = a.seed;
  if (a.verify_mode.rfind("sampled:", 0) == 0) {
    cfg.verify_budget = 1;
    cfg.samples_per_size = std::stoull(a.verify_mode.substr(8));
  } else if (a.verify_mode != "exhaustive") {
    throw std::invalid_argument("verify mode must be exhaustive or sampled:K");
  }
  auto res = run_pipeline(gf.g, parse_mu(a.mu_spec), cfg);
  const auto& cert = res.cert;

  JsonObj o;
  o.add("format", "contagion-expander-cert-v1");
  o.add("version", kToolVersion);
  {
    JsonArr w0;
    for (uint32_t v : cert.w0) w0.add(uint64_t(v));
    o.raw("w0", w0.str());
  }
  o.add("alpha", cert.alpha);
  o.add("R", cert.radius);
  o.add("mode", cert.exhaustive ? "exhaustive" : "sampled");
  o.add("outcome", outcome_name(cert.outcome));
  if (cert.outcome == CertOutcome::refuted) {
    JsonArr w;
    for (uint32_t v : cert.witness) w.add(uint64_t(v));
    o.raw("witness", w.str());
  }
  {
    JsonObj p;
    p.add("j", cert.params.j);
    p.add("r1", cert.params.r1);
    p.add("r", cert.params.r);
    p.add("rfrak", cert.params.rfrak);
    p.add("m", cert.params.m);
    p.add("theta_core", cert.params.theta_core);
    p.add("head_display", cert.params.head_display);
    p.add("tail_display", cert.params.tail_display);
    p.add("feasible", cert.params.feasible);
    if (!cert.params.reason.empty()) p.add("reason", cert.params.reason);
    o.raw("params", p.str());
  }
  o.add("graph_hash", std::to_string(cert.graph_hash));
  o.add("checks", cert.checks);
  o.add("samples_per_size", cert.samples_per_size);
  {
    JsonObj st;
    st.add("truncated", res.stages.truncated);
    st.add("w_size", res.stages.w_size);
    st.add("fraction_full", res.stages.fraction_full);
    st.add("quotient_n", res.stages.quotient_n);
    st.add("candidate_count", res.stages.candidate_count);
    st.add("blue_pairs", res.stages.blue_pairs);
    st.add("theta", res.stages.theta);
    st.add("core_threshold", res.stages.core_threshold);
    st.add("core_size", res.stages.core_size);
    st.add("max_core_degree", res.stages.max_core_degree);
    o.raw("stages", st.str());
  }
  {
    JsonObj cfgj;
    cfgj.add("graph", a.graph);
    cfgj.add("mu", a.mu_spec);
    cfgj.add("j", a.j);
    cfgj.add("auto_params", a.auto_params);
    cfgj.add("r1", a.r1);
    cfgj.add("r", a.r);
    cfgj.add("rfrak", a.rfrak);
    cfgj.add("m", a.m);
    cfgj.add("alpha", a.alpha);
    cfgj.add("verify", a.verify_mode);
    cfgj.add("seed", a.seed);
    o.raw("config", cfgj.str());
  }
  emit(o.str(), a.out);
  if (!a.out.empty())
    std::printf("wrote %s (|w0| = %zu, outcome %s, %" PRIu64 " checks)\n", a.out.c_str(),
                cert.w0.size(), outcome_name(cert.outcome), cert.checks);
  return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  bool all = false;
  std::string identity;
  std::string instance;
  double lambda = 0.0;
  double theta = 0.0;
  std::string out;
};

inline Variant instance_variant(const GraphFile& gf) {
  if (gf.root_parent) return Variant::root_added(*gf.root_parent);
  if (gf.root) return Variant::root_added(*gf.root);
  throw std::invalid_argument("instance records no root; nothing to pin");
}

inline int run_verify(const VerifyArgs& a) {
  if (a.all) {
    bool ok = true;
    for (int id = 1; id <= acceptance::kCriterionCount; ++id) {
      auto r = acceptance::run_criterion(id);
      std::printf("[%s] %2d %-28s %8.2fs / %4.0fs  %s\n", r.pass ? "PASS" : "FAIL", r.id,
                  r.name.c_str(), r.seconds, r.budget_seconds, r.detail.c_str());
      std::fflush(stdout);
      ok = ok && r.pass;
    }
    return ok ? 0 : 1;
  }

  GraphFile gf = load_graph_json(a.instance);
  double lhs = 0.0, rhs = 0.0, err = 0.0, tol = 0.0;
  if (a.identity == "recursion") {
    auto rep = verify_recursion_tree(tree_instance(gf), a.lambda);
    lhs = rep.lhs;
    rhs = rep.rhs;
    err = rep.abs_error;
    tol = 1e-9;
  } else if (a.identity == "stationary") {
    auto rep = verify_stationary_identity(gf.g, instance_variant(gf), a.lambda);
    lhs = 1.0 / rep.pi_empty;
    rhs = 1.0 + rep.exit_rate * rep.return_mean;
    err = rep.identity_error;
    tol = 1e-10;
  } else if (a.identity == "delayed") {
    if (!(a.theta > 0.0 && a.theta < 1.0))
      throw std::invalid_argument("delayed identity needs --theta in (0,1)");
    Variant var = instance_variant(gf);
    ChainSpec plain(gf.g, var, a.lambda);
    ChainSpec slow(gf.g, var.with_theta(a.theta), a.lambda);
    auto pi = stationary(plain);
    auto nu = stationary(slow);
    double Z = 0.0;
    std::vector<double> expect(pi.size());
    for (uint64_t x = 0; x < pi.size(); ++x) {
      expect[x] = std::pow(a.theta, -double(plain.depth_r(x))) * pi[x];
      Z += expect[x];
    }
    uint64_t worst_x = 0;
    for (uint64_t x = 0; x < pi.size(); ++x) {
      double d = std::abs(expect[x] / Z - nu[x]);
      if (d > err) {
        err = d;
        worst_x = x;
      }
    }
    lhs = expect[worst_x] / Z;
    rhs = nu[worst_x];
    tol = 1e-10;
  } else {
    throw std::invalid_argument("identity must be recursion, stationary, or delayed");
  }

  bool pass = err <= tol;
  JsonObj o;
  o.add("format", "contagion-verify-v1");
  o.add("version", kToolVersion);
  o.add("identity", a.identity);
  o.add("instance", a.instance);
  o.add("lambda", a.lambda);
  if (a.identity == "delayed") o.add("theta", a.theta);
  o.add("lhs", lhs);
  o.add("rhs", rhs);
  o.add("abs_error", err);
  o.add("tolerance", tol);
  o.add("pass", pass);
  o.add("graph_hash", std::to_string(gf.g.hash()));
  emit(o.str(), a.out);
  if (!a.out.empty()) std::printf("%s (|lhs-rhs| = %.3g)\n", pass ? "pass" : "FAIL", err);
  return pass ? 0 : 1;
}

}  // namespace detail

inline int dispatch(int argc, const char* const* argv) {
  CLI::App app{"contact-process simulation and exact verification toolkit"};
  app.require_subcommand(1);
  app.footer("Environment: CONTAGION_THREADS caps the worker pool.\n"
             "All floating-point output carries 17 significant digits.");
  int rc = 0;

  auto ga = std::make_shared<detail::GenArgs>();
  auto* gen = app.add_subcommand("gen", "Generate a random graph or tree");
  gen->add_option("--model", ga->model, "config | er | gw | gwc | egw")->required();
  gen->add_option("--n", ga->n, "vertex count (config, er)");
  gen->add_option("--mu", ga->mu_spec, "degree/offspring law, e.g. poisson:3 or point:1");
  gen->add_option("--root-mu", ga->root_mu_spec, "root law override (gw, egw)");
  gen->add_option("--d", ga->mean_degree, "mean degree (er)");
  gen->add_option("--depth", ga->depth, "tree depth L (gw, gwc, egw)");
  gen->add_option("--cond-depth", ga->cond_depth, "survival-conditioning depth l (egw)");
  gen->add_option("--cycle", ga->cycle, "cycle length s (gwc, egw)");
  gen->add_flag("--with-parent", ga->with_parent_flag, "pin a parent above the root (gw)");
  gen->add_option("--seed", ga->seed, "master seed");
  gen->add_option("--out", ga->out, "output file (.json, .bin, or text edge list)");
  gen->callback([ga, gen, &rc]() {
    ga->seed = detail::effective_seed(gen, ga->seed);
    rc = detail::run_gen(*ga);
  });

  auto sa = std::make_shared<detail::SimArgs>();
  auto* sim = app.add_subcommand("simulate", "Run infection replicas on a graph");
  sim->add_option("--graph", sa->graph, "graph file")->required();
  sim->add_option("--lambda", sa->lambda, "infection rate")->required();
  sim->add_option("--variant", sa->variant,
                  "standard | root-added:V | root-suppressed:P,R | both-fixed:A,B | no-recovery:U");
  sim->add_option("--theta", sa->theta, "dilation parameter in (0,1]");
  sim->add_option("--init", sa->init, "all | vertex:K | random-one");
  sim->add_option("--horizon", sa->horizon, "censoring horizon");
  sim->add_option("--reps", sa->reps, "replica count");
  sim->add_option("--seed", sa->seed, "master seed");
  sim->add_option("--out", sa->out, "trajectory CSV path (stdout if absent)");
  sim->callback([sa, sim, &rc]() {
    sa->seed = detail::effective_seed(sim, sa->seed);
    rc = detail::run_simulate(*sa);
  });

  auto wa = std::make_shared<detail::SweepArgs>();
  auto* sweep = app.add_subcommand("sweep", "Phase sweep over a (lambda, n) grid");
  sweep->add_option("--spec", wa->spec_path, "sweep spec JSON")->required();
  sweep->add_option("--out", wa->out, "results CSV path (stdout if absent)");
  sweep->callback([wa, &rc]() { rc = detail::run_sweep(*wa); });

  auto da = std::make_shared<detail::DepthTailArgs>();
  auto* dt = app.add_subcommand("depth-tail", "Excursion depth tail on a rooted tree");
  dt->add_option("--graph", da->graph, "tree instance JSON (else generated from --mu)");
  dt->add_option("--mu", da->mu_spec, "offspring law");
  dt->add_option("--root-mu", da->root_mu_spec, "root law override");
  dt->add_option("--depth", da->depth, "tree depth L");
  dt->add_option("--lambda", da->lambda, "infection rate")->required();
  dt->add_option("--reps", da->reps, "excursion count");
  dt->add_option("--seed", da->seed, "master seed");
  dt->add_option("--out", da->out, "report JSON path (stdout if absent)");
  dt->callback([da, dt, &rc]() {
    da->seed = detail::effective_seed(dt, da->seed);
    rc = detail::run_depth_tail(*da);
  });

  auto ea = std::make_shared<detail::ExpanderArgs>();
  auto* ex = app.add_subcommand("expander", "Certify an embedded expander");
  ex->add_option("--graph", ea->graph, "graph file")->required();
  ex->add_option("--mu", ea->mu_spec, "degree law the graph was drawn from")->required();
  ex->add_option("--j", ea->j, "degree truncation threshold");
  ex->add_flag("--auto-params", ea->auto_params, "derive stage parameters from the degree law");
  ex->add_option("--r1", ea->r1, "candidate ball radius");
  ex->add_option("--r", ea->r, "exploration ball radius");
  ex->add_option("--rfrak", ea->rfrak, "intersection budget");
  ex->add_option("--m", ea->m, "blue marks per candidate");
  ex->add_option("--alpha", ea->alpha, "expansion fraction");
  ex->add_option("--verify", ea->verify_mode, "exhaustive | sampled:K");
  ex->add_option("--seed", ea->seed, "master seed");
  ex->add_option("--out", ea->out, "certificate JSON path (stdout if absent)");
  ex->callback([ea, ex, &rc]() {
    ea->seed = detail::effective_seed(ex, ea->seed);
    rc = detail::run_expander(*ea);
  });

  auto va = std::make_shared<detail::VerifyArgs>();
  auto* ver = app.add_subcommand("verify", "Exact identities and the release gate");
  ver->add_flag("--all", va->all, "run the full release gate");
  ver->add_option("--identity", va->identity, "recursion | stationary | delayed");
  ver->add_option("--instance", va->instance, "instance JSON");
  ver->add_option("--lambda", va->lambda, "infection rate");
  ver->add_option("--theta", va->theta, "dilation parameter (delayed)");
  ver->add_option("--out", va->out, "report JSON path (stdout always gets the report)");
  ver->callback([va, &rc]() {
    if (!va->all && (va->identity.empty() || va->instance.empty()))
      throw CLI::ValidationError("verify", "needs --all, or --identity with --instance");
    if (!va->all && va->identity == "delayed" && !(va->theta > 0.0 && va->theta < 1.0))
      throw CLI::ValidationError("verify", "delayed identity needs --theta in (0,1)");
    rc = detail::run_verify(*va);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}

}  // namespace contagion::cli
