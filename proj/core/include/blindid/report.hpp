#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "blindid/bounds.hpp"
#include "blindid/ensembles.hpp"
#include "blindid/mc.hpp"
#include "blindid/recovery.hpp"

namespace blindid {

/// Shortest decimal that round-trips to the same double ("nan", "inf", "-inf"
/// for non-finite values).
std::string format_double(double value);

// CSV writers. Each writes its fixed header line even when `rows` is empty.
inline constexpr std::string_view kTransitionCsvHeader =
    "n,trials,successes,rate,d,two_d,mean_lifted_error";
inline constexpr std::string_view kStabilityCsvHeader =
    "delta,trials,violations,violation_rate,epsilon,failure_bound,mean_max_error,max_error";
inline constexpr std::string_view kSmallBallCsvHeader = "rho,trials,hits,p_hat,std_err,bound";
inline constexpr std::string_view kMeanIsometryCsvHeader = "n,m1,m2,radius,trials,relative_error";

void write_transition_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_stability_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_small_ball_csv(std::ostream& out, const std::vector<SmallBallRow>& rows);
void write_mean_isometry_csv(std::ostream& out, int n, int m1, int m2,
                             const MeanIsometryResult& result);

nlohmann::json to_json(const ConstraintScenario& sc);
/// Throws ScenarioError on missing/invalid fields.
ConstraintScenario scenario_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const BoundReport& report);

/// {scenario, seed, tag, R}; matrices are re-derived from the seed.
nlohmann::json ensemble_document(const Ensemble& ens);
Ensemble ensemble_from_document(const nlohmann::json& doc);

nlohmann::json to_json(const RecoveryResult& result);
nlohmann::json to_json(const IdentifiabilityVerdict& verdict, const Ensemble& ens);

/// Echo of a plan plus `config_hash`, the git blob id (SHA-1 of
/// "blob <len>\0<canonical plan json>").
nlohmann::json run_manifest(const TrialPlan& plan, std::string_view subcommand);

/// SHA-1 of "blob <size>\0" + content, lowercase hex.
std::string git_blob_hash(std::string_view content);

}  // namespace blindid
