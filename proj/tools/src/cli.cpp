#include "blindid/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "blindid/bounds.hpp"
#include "blindid/ensembles.hpp"
#include "blindid/lifting.hpp"
#include "blindid/mc.hpp"
#include "blindid/report.hpp"

namespace blindid::cli {
namespace {

using nlohmann::json;

const std::vector<std::string> kSubcommands = {"gen",       "recover",    "certify",  "bounds",
                                               "smallball", "transition", "stability"};

bool needs_n(const std::string& sub) {
  return sub == "gen" || sub == "certify" || sub == "bounds" || sub == "stability";
}

bool seed_on_command_line(const std::vector<std::string>& args) {
  return std::any_of(args.begin(), args.end(), [](const std::string& a) {
    return a == "--seed" || a.rfind("--seed=", 0) == 0;
  });
}

std::uint64_t parse_seed(const std::string& text) {
  std::size_t used = 0;
  std::uint64_t value = 0;
  try {
    value = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.front() == '-')
    throw CliError(kExitInvalid, "BLINDID_SEED must be a nonnegative integer, got '" + text + "'");
  return value;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

json vector_json(const CVector& v) {
  json re = json::array();
  json im = json::array();
  for (Index i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  return {{"re", re}, {"im", im}};
}

CVector vector_from_json(const json& doc) {
  const auto re = doc.at("re").get<std::vector<double>>();
  const auto im = doc.at("im").get<std::vector<double>>();
  if (re.size() != im.size()) throw std::invalid_argument("re/im length mismatch");
  CVector v(static_cast<Index>(re.size()));
  for (std::size_t i = 0; i < re.size(); ++i) v(static_cast<Index>(i)) = Complex(re[i], im[i]);
  return v;
}

EnsembleTag tag_from_config(const RunConfig& cfg, const ConstraintScenario& sc) {
  EnsembleTag tag;
  tag.kind = parse_ensemble_kind(cfg.ensemble);
  if (tag.uniform_ball()) tag.radius = cfg.R.value_or(mean_isometry_radius(sc.n, sc.m1, sc.m2));
  return tag;
}

StabilityMode mode_from_config(const RunConfig& cfg) {
  if (cfg.mode == "single_point") return StabilityMode::SinglePoint;
  if (cfg.mode == "uniform") return StabilityMode::Uniform;
  throw CliError(kExitInvalid, "mode must be single_point or uniform");
}

// Unit-norm planted pair drawn in the constraint set.
LiftedMatrix draw_truth(const ConstraintScenario& sc, Field field, Rng& rng) {
  const auto draw = [&](int m, int s) {
    CVector v = CVector::Zero(m);
    std::vector<int> idx(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < s; ++i) {
      const auto j = static_cast<std::size_t>(i) +
                     static_cast<std::size_t>(rng.next_u64() % static_cast<std::uint64_t>(m - i));
      std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
    }
    for (int i = 0; i < s; ++i) {
      const int k = idx[static_cast<std::size_t>(i)];
      v(k) = field == Field::Real ? Complex(rng.normal(), 0.0) : rng.complex_normal();
    }
    return v;
  };
  const CVector x = draw(sc.m1, sc.x_support_size());
  const CVector y = draw(sc.m2, sc.y_support_size());
  return LiftedMatrix::rank_one(x / x.norm(), y / y.norm());
}

TrialPlan plan_from_config(const RunConfig& cfg, const ConstraintScenario& sc) {
  TrialPlan plan;
  plan.scenario = sc;
  plan.tag = EnsembleTag{parse_ensemble_kind(cfg.ensemble), cfg.R};
  plan.trials = cfg.trials;
  plan.restarts = cfg.restarts;
  plan.noise_level = cfg.noise;
  plan.master_seed = cfg.seed;
  plan.sweep = cfg.sweep;
  plan.mode = mode_from_config(cfg);
  plan.threads = cfg.threads;
  plan.solver = cfg.solver;
  return plan;
}

std::string sweep_json(const std::vector<SweepRow>& rows, bool stability) {
  json arr = json::array();
  for (const auto& r : rows) {
    json row = {{stability ? "delta" : "n", r.value},
                {"trials", r.trials},
                {"mean_lifted_error", r.mean_lifted_error},
                {"max_lifted_error", r.max_lifted_error}};
    if (stability) {
      row["violations"] = r.trials - r.successes;
      row["epsilon"] = std::isfinite(r.reference) ? json(r.reference) : json(nullptr);
      row["failure_bound"] = r.reference_aux;
    } else {
      row["successes"] = r.successes;
      row["rate"] = r.rate;
      row["d"] = r.reference;
      row["two_d"] = r.reference_aux;
    }
    arr.push_back(std::move(row));
  }
  return dump(json{{"rows", arr}});
}

void write_manifest(const RunConfig& cfg, const TrialPlan& plan) {
  if (!cfg.manifest.empty()) emit_report(dump(run_manifest(plan, cfg.subcommand)), cfg.manifest, std::cout);
}

std::string cmd_gen(const RunConfig& cfg) {
  const ConstraintScenario sc = scenario_from_config(cfg);
  const Ensemble ens = build_ensemble(sc, tag_from_config(cfg, sc), cfg.seed);
  Rng rng(mix_seed(cfg.seed, 1));
  const LiftedMatrix truth = draw_truth(sc, ens.field(), rng);
  std::optional<CVector> noise;
  if (cfg.noise > 0.0) noise = sample_complex_sphere(sc.n, cfg.noise, rng);
  const MeasurementRecord rec = measure(ens, truth.matrix(), noise);
  json doc = {{"ensemble", ensemble_document(ens)},
              {"x", vector_json(truth.x())},
              {"y", vector_json(truth.y())},
              {"z", vector_json(rec.z)},
              {"z_tilde", vector_json(rec.z_tilde)},
              {"noise_level", cfg.noise}};
  return dump(doc);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw CliError(kExitInvalid, "malformed instance document " + path + ": " + e.what());
  }
}

std::string cmd_recover(const RunConfig& cfg) {
  if (cfg.input.empty()) throw CliError(kExitInvalid, "recover requires --input");
  const json doc = read_json_file(cfg.input);
  try {
    const Ensemble ens = ensemble_from_document(doc.at("ensemble"));
    const CVector z_tilde = vector_from_json(doc.at("z_tilde"));
    if (z_tilde.size() != ens.n()) throw CliError(kExitInvalid, "z_tilde length must equal n");
    Rng rng(cfg.seed);
    RecoveryResult res = solve(ens, z_tilde, ens.scenario, cfg.restarts, rng, cfg.solver);
    if (doc.contains("x") && doc.contains("y")) {
      const LiftedMatrix truth =
          LiftedMatrix::rank_one(vector_from_json(doc["x"]), vector_from_json(doc["y"]));
      res.lifted_error = align_and_distance(res.estimate, truth);
    }
    return dump(to_json(res));
  } catch (const json::exception& e) {
    throw CliError(kExitInvalid, std::string("malformed instance document: ") + e.what());
  }
}

std::string cmd_certify(const RunConfig& cfg) {
  const ConstraintScenario sc = scenario_from_config(cfg);
  const Ensemble ens = build_ensemble(sc, tag_from_config(cfg, sc), cfg.seed);
  Rng rng(mix_seed(cfg.seed, 2));
  IdentifiabilityVerdict verdict;
  if (cfg.strength == "weak") {
    const LiftedMatrix truth = draw_truth(sc, ens.field(), rng);
    verdict = certify_weak(ens, truth, sc, cfg.budget, cfg.tol, rng, cfg.solver);
  } else if (cfg.strength == "strong") {
    verdict = certify_strong(ens, sc, cfg.budget, cfg.tol, rng, cfg.solver);
  } else {
    throw CliError(kExitInvalid, "strength must be weak or strong");
  }
  return dump(to_json(verdict, ens));
}

std::string cmd_bounds(const RunConfig& cfg) {
  BoundQuery q;
  q.scenario = scenario_from_config(cfg);
  q.delta = cfg.delta;
  q.epsilon = cfg.epsilon;
  q.R = cfg.R.value_or(1.0);
  q.rho = cfg.rho;
  q.ell = cfg.ell;
  q.L = cfg.L;
  q.sigma = cfg.sigma;
  return dump(to_json(evaluate_bounds(q)));
}

std::string cmd_smallball(const RunConfig& cfg) {
  if (!cfg.m1 || !cfg.m2) throw CliError(kExitInvalid, "smallball requires --m1 and --m2");
  if (*cfg.m1 < 1 || *cfg.m2 < 1) throw CliError(kExitInvalid, "m1 and m2 must be >= 1");
  CMatrix M;
  if (cfg.matrix == "ones") {
    M = CMatrix::Ones(*cfg.m1, *cfg.m2);
  } else if (cfg.matrix == "random") {
    Rng rng(mix_seed(cfg.seed, 3));
    M.resize(*cfg.m1, *cfg.m2);
    for (Index k = 0; k < M.cols(); ++k)
      for (Index i = 0; i < M.rows(); ++i) M(i, k) = rng.complex_normal();
  } else {
    throw CliError(kExitInvalid, "matrix must be random or ones");
  }
  const double R = cfg.R.value_or(1.0);
  if (cfg.trials < 0) throw CliError(kExitInvalid, "trials must be >= 0");
  const auto rows = run_small_ball_sweep(M, R, cfg.sweep, static_cast<std::size_t>(cfg.trials),
                                         cfg.seed, cfg.threads);
  TrialPlan plan;
  plan.scenario = ConstraintScenario::subspace(1, *cfg.m1, *cfg.m2);
  plan.tag = EnsembleTag::complex_uniform_ball(R);
  plan.trials = cfg.trials;
  plan.master_seed = cfg.seed;
  plan.sweep = cfg.sweep;
  plan.threads = cfg.threads;
  write_manifest(cfg, plan);
  if (cfg.format == "json") {
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"rho", r.rho},
                     {"trials", r.estimate.trials},
                     {"hits", r.estimate.hits},
                     {"p_hat", r.estimate.p_hat},
                     {"std_err", r.estimate.std_err},
                     {"bound", r.bound}});
    return dump(json{{"rows", arr}});
  }
  std::ostringstream out;
  write_small_ball_csv(out, rows);
  return out.str();
}

std::string cmd_transition(const RunConfig& cfg) {
  RunConfig local = cfg;
  if (local.sweep.empty() && local.n) local.sweep = {static_cast<double>(*local.n)};
  if (!local.n) local.n = 1;
  ConstraintScenario sc = scenario_from_config(local);
  const TrialPlan plan = plan_from_config(local, sc);
  const auto rows = run_phase_transition(plan);
  write_manifest(cfg, plan);
  if (cfg.format == "json") return sweep_json(rows, false);
  std::ostringstream out;
  write_transition_csv(out, rows);
  return out.str();
}

std::string cmd_stability(const RunConfig& cfg) {
  RunConfig local = cfg;
  if (local.ensemble == "complex_generic") local.ensemble = "complex_ball";
  const ConstraintScenario sc = scenario_from_config(local);
  const TrialPlan plan = plan_from_config(local, sc);
  const auto rows = run_stability_sweep(plan);
  write_manifest(cfg, plan);
  if (cfg.format == "json") return sweep_json(rows, true);
  std::ostringstream out;
  write_stability_csv(out, rows);
  return out.str();
}

}  // namespace

RunConfig parse_config(const std::vector<std::string>& args, std::optional<std::string> env_seed) {
  RunConfig cfg;
  CLI::App app{"blindid: lifted blind-deconvolution identifiability lab", "blindid"};
  app.set_config("--config", "", "flat key=value file; keys are long option names");
  app.allow_config_extras(CLI::config_extras_mode::error);

  app.add_option("subcommand", cfg.subcommand, "gen|recover|certify|bounds|smallball|transition|stability")
      ->required()
      ->check(CLI::IsMember(kSubcommands));
  app.add_option("--kind", cfg.kind, "subspace|mixed|sparsity");
  app.add_option("--n", cfg.n, "signal length");
  app.add_option("--m1", cfg.m1, "dimension of x");
  app.add_option("--m2", cfg.m2, "dimension of y");
  app.add_option("--s1", cfg.s1, "sparsity of x");
  app.add_option("--s2", cfg.s2, "sparsity of y");
  app.add_option("--seed", cfg.seed, "master seed (also BLINDID_SEED)");
  app.add_option("--output", cfg.output, "report path (default stdout)");
  app.add_option("--manifest", cfg.manifest, "run-manifest path for sweeps");
  app.add_option("--format", cfg.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--input", cfg.input, "instance document produced by gen");
  app.add_option("--ensemble", cfg.ensemble, "complex_generic|complex_ball|real_generic|real_ball");
  app.add_option("--R", cfg.R, "ball radius");
  app.add_option("--trials", cfg.trials, "Monte-Carlo trials per sweep point");
  app.add_option("--restarts", cfg.restarts, "random restarts per solve");
  app.add_option("--noise", cfg.noise, "time-domain noise norm");
  app.add_option("--sweep", cfg.sweep, "comma-separated n, delta or rho values")->delimiter(',');
  app.add_option("--mode", cfg.mode, "single_point|uniform");
  app.add_option("--threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--delta", cfg.delta, "measurement-domain radius");
  app.add_option("--epsilon", cfg.epsilon, "reconstruction radius");
  app.add_option("--rho", cfg.rho, "small-ball radius");
  app.add_option("--ell", cfg.ell, "lower norm bound on M");
  app.add_option("--L", cfg.L, "upper norm bound on M");
  app.add_option("--sigma", cfg.sigma, "norm scale of the constraint ball");
  app.add_option("--budget", cfg.budget, "certifier search budget");
  app.add_option("--tol", cfg.tol, "certifier residual tolerance");
  app.add_option("--strength", cfg.strength, "weak|strong");
  app.add_option("--matrix", cfg.matrix, "random|ones (smallball)");
  app.add_flag("--allow-undersampled", cfg.allow_undersampled,
               "accept m1 or m2 >= n for subspace factors");
  app.add_option("--max-iterations", cfg.solver.max_iterations, "alternating-minimization sweeps");
  app.add_option("--rel-tol", cfg.solver.relative_tolerance, "alternating-minimization tolerance");
  app.add_option("--enum-cap", cfg.solver.enumeration_cap, "support enumeration cap");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw CliError(kExitOk, app.help());
  } catch (const CLI::FileError& e) {
    throw CliError(kExitIo, e.what());
  } catch (const CLI::ParseError& e) {
    throw CliError(kExitInvalid, e.what());
  }
  if (env_seed && !env_seed->empty() && !seed_on_command_line(args)) cfg.seed = parse_seed(*env_seed);
  if (needs_n(cfg.subcommand) && !cfg.n) throw CliError(kExitInvalid, "--n is required for " + cfg.subcommand);
  if (cfg.format.empty())
    cfg.format = cfg.subcommand == "transition" || cfg.subcommand == "stability" ||
                         cfg.subcommand == "smallball"
                     ? "csv"
                     : "json";
  if (cfg.format == "csv" && !(cfg.subcommand == "transition" || cfg.subcommand == "stability" ||
                               cfg.subcommand == "smallball"))
    throw CliError(kExitInvalid, cfg.subcommand + " only emits json");
  return cfg;
}

ConstraintScenario scenario_from_config(const RunConfig& cfg) {
  if (!cfg.n) throw CliError(kExitInvalid, "--n is required");
  if (!cfg.m1 || !cfg.m2) throw CliError(kExitInvalid, "--m1 and --m2 are required");
  ConstraintScenario sc;
  sc.kind = parse_scenario_kind(cfg.kind);
  sc.n = *cfg.n;
  sc.m1 = *cfg.m1;
  sc.m2 = *cfg.m2;
  sc.s1 = cfg.s1;
  sc.s2 = cfg.s2;
  const bool structural = cfg.allow_undersampled || cfg.subcommand == "transition";
  sc.validate(structural ? Validation::Structural : Validation::Strict);
  return sc;
}

void emit_report(std::string_view text, const std::string& path, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    fallback.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        std::optional<std::string> env_seed) {
  try {
    const RunConfig cfg = parse_config(args, std::move(env_seed));
    std::string text;
    if (cfg.subcommand == "gen") text = cmd_gen(cfg);
    else if (cfg.subcommand == "recover") text = cmd_recover(cfg);
    else if (cfg.subcommand == "certify") text = cmd_certify(cfg);
    else if (cfg.subcommand == "bounds") text = cmd_bounds(cfg);
    else if (cfg.subcommand == "smallball") text = cmd_smallball(cfg);
    else if (cfg.subcommand == "transition") text = cmd_transition(cfg);
    else text = cmd_stability(cfg);
    emit_report(text, cfg.output, out);
    return kExitOk;
  } catch (const CliError& e) {
    (e.code() == kExitOk ? out : err) << e.what() << (e.code() == kExitOk ? "" : "\n");
    return e.code();
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ScenarioError& e) {
    err << "invalid scenario: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::length_error& e) {
    err << "enumeration cap exceeded: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace blindid::cli
