#include "blindid/report.hpp"

#include <openssl/sha.h>

#include <array>
#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace blindid {
namespace {

using nlohmann::json;

json number(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

json optional_number(const std::optional<double>& value) {
  return value ? number(*value) : json(nullptr);
}

json matrix_json(const CMatrix& M) {
  json re = json::array();
  json im = json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    json rr = json::array();
    json ri = json::array();
    for (Index k = 0; k < M.cols(); ++k) {
      rr.push_back(number(M(i, k).real()));
      ri.push_back(number(M(i, k).imag()));
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return {{"re", std::move(re)}, {"im", std::move(im)}};
}

json vector_json(const CVector& v) {
  json re = json::array();
  json im = json::array();
  for (Index i = 0; i < v.size(); ++i) {
    re.push_back(number(v(i).real()));
    im.push_back(number(v(i).imag()));
  }
  return {{"re", std::move(re)}, {"im", std::move(im)}};
}

json lifted_json(const LiftedMatrix& M) {
  json out = {{"matrix", matrix_json(M.matrix())}, {"frobenius_norm", number(M.norm())}};
  if (M.has_factors()) {
    out["x"] = vector_json(M.x());
    out["y"] = vector_json(M.y());
  }
  return out;
}

json failure_json(const FailureBound& fb) {
  return {{"raw", number(fb.raw)}, {"clamped", number(fb.clamped)}, {"log_raw", number(fb.log_raw)}};
}

json tag_json(const EnsembleTag& tag) {
  return {{"kind", std::string(to_string(tag.kind))},
          {"R", tag.radius ? json(*tag.radius) : json(nullptr)}};
}

void csv_line(std::ostream& out, std::initializer_list<std::string> fields) {
  bool first = true;
  for (const auto& f : fields) {
    if (!first) out << ',';
    out << f;
    first = false;
  }
  out << '\n';
}

std::string str(int v) { return std::to_string(v); }
std::string str(std::size_t v) { return std::to_string(v); }

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

void write_transition_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kTransitionCsvHeader << '\n';
  for (const auto& r : rows)
    csv_line(out, {format_double(r.value), str(r.trials), str(r.successes), format_double(r.rate),
                   format_double(r.reference), format_double(r.reference_aux),
                   format_double(r.mean_lifted_error)});
}

void write_stability_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kStabilityCsvHeader << '\n';
  for (const auto& r : rows) {
    const int violations = r.trials - r.successes;
    csv_line(out, {format_double(r.value), str(r.trials), str(violations),
                   format_double(static_cast<double>(violations) / r.trials),
                   format_double(r.reference), format_double(r.reference_aux),
                   format_double(r.mean_lifted_error), format_double(r.max_lifted_error)});
  }
}

void write_small_ball_csv(std::ostream& out, const std::vector<SmallBallRow>& rows) {
  out << kSmallBallCsvHeader << '\n';
  for (const auto& r : rows)
    csv_line(out, {format_double(r.rho), str(r.estimate.trials), str(r.estimate.hits),
                   format_double(r.estimate.p_hat), format_double(r.estimate.std_err),
                   format_double(r.bound)});
}

void write_mean_isometry_csv(std::ostream& out, int n, int m1, int m2,
                             const MeanIsometryResult& result) {
  out << kMeanIsometryCsvHeader << '\n';
  csv_line(out, {str(n), str(m1), str(m2), format_double(result.radius), str(result.trials),
                 format_double(result.relative_error)});
}

json to_json(const ConstraintScenario& sc) {
  json out = {{"kind", std::string(to_string(sc.kind))}, {"n", sc.n}, {"m1", sc.m1}, {"m2", sc.m2}};
  out["s1"] = sc.s1 ? json(*sc.s1) : json(nullptr);
  out["s2"] = sc.s2 ? json(*sc.s2) : json(nullptr);
  return out;
}

ConstraintScenario scenario_from_json(const json& doc) {
  try {
    ConstraintScenario sc;
    sc.kind = parse_scenario_kind(doc.at("kind").get<std::string>());
    sc.n = doc.at("n").get<int>();
    sc.m1 = doc.at("m1").get<int>();
    sc.m2 = doc.at("m2").get<int>();
    if (doc.contains("s1") && !doc["s1"].is_null()) sc.s1 = doc["s1"].get<int>();
    if (doc.contains("s2") && !doc["s2"].is_null()) sc.s2 = doc["s2"].get<int>();
    sc.validate(Validation::Structural);
    return sc;
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("malformed scenario document: ") + e.what());
  }
}

json to_json(const BoundReport& r) {
  json out;
  out["d"] = r.d;
  out["minkowski_dim_upper"] = r.minkowski_dim_upper;
  out["C"] = number(r.C);
  out["C_prime"] = number(r.C_prime);
  out["log_C_prime"] = number(r.log_C_prime);
  out["C_dblprime"] = optional_number(r.C_dblprime);
  out["log_C_dblprime"] = optional_number(r.log_C_dblprime);
  out["alpha"] = number(r.alpha);
  out["beta"] = optional_number(r.beta);
  out["weak_failure_bound"] = r.weak_failure_bound ? failure_json(*r.weak_failure_bound) : json(nullptr);
  out["uniform_failure_bound"] =
      r.uniform_failure_bound ? failure_json(*r.uniform_failure_bound) : json(nullptr);
  out["epsilon_single_point"] = optional_number(r.epsilon_single_point);
  out["epsilon_uniform"] = optional_number(r.epsilon_uniform);
  out["epsilon_single_point_scaled"] = optional_number(r.epsilon_single_point_scaled);
  out["small_ball_complex"] = number(r.small_ball_complex);
  out["small_ball_real"] = number(r.small_ball_real);
  out["covering_x"] = number(r.covering_x);
  out["covering_y"] = number(r.covering_y);
  out["volume_complex_m1"] = number(r.volume_complex_m1);
  out["volume_complex_m2"] = number(r.volume_complex_m2);
  return out;
}

json ensemble_document(const Ensemble& ens) {
  return {{"scenario", to_json(ens.scenario)},
          {"seed", ens.seed},
          {"tag", std::string(to_string(ens.tag.kind))},
          {"R", ens.tag.radius ? json(*ens.tag.radius) : json(nullptr)}};
}

Ensemble ensemble_from_document(const json& doc) {
  const ConstraintScenario sc = scenario_from_json(doc.at("scenario"));
  try {
    EnsembleTag tag;
    tag.kind = parse_ensemble_kind(doc.at("tag").get<std::string>());
    if (doc.contains("R") && !doc["R"].is_null()) tag.radius = doc["R"].get<double>();
    return build_ensemble(sc, tag, doc.at("seed").get<std::uint64_t>());
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("malformed ensemble document: ") + e.what());
  }
}

json to_json(const RecoveryResult& result) {
  json out = {{"estimate", lifted_json(result.estimate)},
              {"residual", number(result.residual)},
              {"restarts_used", result.restarts_used}};
  out["lifted_error"] = optional_number(result.lifted_error);
  if (result.support)
    out["support"] = {{"rows", result.support->rows}, {"cols", result.support->cols}};
  else
    out["support"] = nullptr;
  return out;
}

json to_json(const IdentifiabilityVerdict& verdict, const Ensemble& ens) {
  json out = {{"status", std::string(to_string(verdict.status))},
              {"search_budget", verdict.search_budget},
              {"tolerance", number(verdict.tolerance)},
              {"operators_checked", verdict.operators_checked},
              {"min_singular_value", number(verdict.min_singular_value)},
              {"ensemble", ensemble_document(ens)},
              {"witness_valid", witness_is_valid(ens, verdict)}};
  out["witness"] = verdict.witness ? lifted_json(*verdict.witness) : json(nullptr);
  out["reference"] = verdict.reference ? lifted_json(*verdict.reference) : json(nullptr);
  return out;
}

json run_manifest(const TrialPlan& plan, std::string_view subcommand) {
  json config = {{"subcommand", std::string(subcommand)},
                 {"scenario", to_json(plan.scenario)},
                 {"tag", tag_json(plan.tag)},
                 {"trials", plan.trials},
                 {"restarts", plan.restarts},
                 {"noise_level", plan.noise_level},
                 {"master_seed", plan.master_seed},
                 {"sweep", plan.sweep},
                 {"mode", plan.mode == StabilityMode::SinglePoint ? "single_point" : "uniform"},
                 {"solver",
                  {{"max_iterations", plan.solver.max_iterations},
                   {"relative_tolerance", plan.solver.relative_tolerance},
                   {"enumeration_cap", plan.solver.enumeration_cap}}}};
  // Worker count does not change results and is kept out of the hash.
  const std::string hash = git_blob_hash(config.dump());
  return {{"config", config}, {"config_hash", hash}, {"threads", plan.threads}};
}

std::string git_blob_hash(std::string_view content) {
  const std::string data = "blob " + std::to_string(content.size()) + '\0' + std::string(content);
  std::array<unsigned char, SHA_DIGEST_LENGTH> digest{};
  SHA1(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest.data());
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned char c : digest) {
    out.push_back(kHex[c >> 4]);
    out.push_back(kHex[c & 0xF]);
  }
  return out;
}

}  // namespace blindid
