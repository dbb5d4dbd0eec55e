#pragma once

#include <string>

#include <json.hpp>

#include "jacobiwvn/band_structure.hpp"
#include "jacobiwvn/potential.hpp"
#include "jacobiwvn/resonance.hpp"
#include "jacobiwvn/simulate.hpp"

namespace jacobiwvn {

using json = nlohmann::json;

// Operator: {"period": T, "a": [...], "b": [...]}; validation failures carry the
// offending field name.
PeriodicOperator operator_from_json(const json& j);
json operator_to_json(const PeriodicOperator& op);

// Bands: [{"index", "lo", "hi", "theta_direction": "inc"|"dec"}].
json bands_to_json(const std::vector<Band>& bands);
std::vector<Band> bands_from_json(const json& j);
std::string bands_to_csv(const std::vector<Band>& bands);

// Plan: {"lambda","theta","case","k","omega","phi","E_re","E_im",
//        "exponent_per_c","c_threshold"} with "case" in {"case1","case2","case3"}.
json plan_to_json(const ResonancePlan& plan);
ResonancePlan plan_from_json(const json& j);

// Potential: {"terms": [{"c","omega","phi"}], "overrides": {"1": q1, ...}, "r": r}.
json potential_to_json(const WvnPotential& p);
WvnPotential potential_from_json(const json& j);

json fit_to_json(const FitResult& fit, TraceVerdict verdict);
std::string trace_to_csv(const SolutionTrace& trace);
std::string window_norms_to_csv(const SolutionTrace& trace);

std::string verdict_name(TraceVerdict v);
std::string point_class_name(PointClass c);

// 17 significant digits (round-trip exact for doubles).
std::string format_double(double v);

// File helpers shared by the CLI.
void write_text_file(const std::string& path, const std::string& content);
json read_json_file(const std::string& path);

}  // namespace jacobiwvn
