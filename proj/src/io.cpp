#include "jacobiwvn/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "jacobiwvn/errors.hpp"

namespace jacobiwvn {

namespace {

double require_number(const json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_number())
        throw ValidationError("\"" + key + "\" must be a number");
    return j[key].get<double>();
}

std::vector<double> require_array(const json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_array())
        throw ValidationError("\"" + key + "\" must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j[key]) {
        if (!v.is_number())
            throw ValidationError("\"" + key + "\" must be an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

PeriodicOperator operator_from_json(const json& j) {
    const std::vector<double> a = require_array(j, "a");
    const std::vector<double> b = require_array(j, "b");
    if (j.contains("period")) {
        const auto t = static_cast<std::size_t>(require_number(j, "period"));
        if (t != a.size())
            throw ValidationError("\"period\" disagrees with the length of \"a\"");
    }
    return PeriodicOperator(a, b);
}

json operator_to_json(const PeriodicOperator& op) {
    return json{{"period", op.period()}, {"a", op.a_values()}, {"b", op.b_values()}};
}

json bands_to_json(const std::vector<Band>& bands) {
    json arr = json::array();
    for (const Band& b : bands)
        arr.push_back({{"index", b.index},
                       {"lo", b.lo},
                       {"hi", b.hi},
                       {"theta_direction",
                        b.theta_direction == ThetaDirection::Increasing ? "inc" : "dec"}});
    return arr;
}

std::vector<Band> bands_from_json(const json& j) {
    if (!j.is_array()) throw ValidationError("bands document must be an array");
    std::vector<Band> out;
    for (const auto& e : j) {
        Band b;
        b.index = static_cast<int>(require_number(e, "index"));
        b.lo = require_number(e, "lo");
        b.hi = require_number(e, "hi");
        const std::string dir = e.value("theta_direction", "");
        if (dir != "inc" && dir != "dec")
            throw ValidationError("\"theta_direction\" must be \"inc\" or \"dec\"");
        b.theta_direction =
            dir == "inc" ? ThetaDirection::Increasing : ThetaDirection::Decreasing;
        out.push_back(b);
    }
    return out;
}

std::string bands_to_csv(const std::vector<Band>& bands) {
    std::ostringstream os;
    os << "index,lo,hi,theta_direction\n";
    for (const Band& b : bands)
        os << b.index << ',' << format_double(b.lo) << ',' << format_double(b.hi) << ','
           << (b.theta_direction == ThetaDirection::Increasing ? "inc" : "dec") << '\n';
    return os.str();
}

json plan_to_json(const ResonancePlan& plan) {
    const char* name = plan.case_id == ResonanceCase::Case1   ? "case1"
                       : plan.case_id == ResonanceCase::Case2 ? "case2"
                                                              : "case3";
    return json{{"lambda", plan.lambda},
                {"theta", plan.theta},
                {"case", name},
                {"k", plan.k},
                {"omega", plan.omega},
                {"phi", plan.phi},
                {"E_re", plan.E_value.real()},
                {"E_im", plan.E_value.imag()},
                {"exponent_per_c", plan.decay_exponent_per_unit_c},
                {"c_threshold", plan.c_threshold_l2}};
}

ResonancePlan plan_from_json(const json& j) {
    ResonancePlan plan;
    plan.lambda = require_number(j, "lambda");
    plan.theta = require_number(j, "theta");
    const std::string name = j.value("case", "");
    if (name == "case1")
        plan.case_id = ResonanceCase::Case1;
    else if (name == "case2")
        plan.case_id = ResonanceCase::Case2;
    else if (name == "case3")
        plan.case_id = ResonanceCase::Case3;
    else
        throw ValidationError("\"case\" must be \"case1\", \"case2\" or \"case3\"");
    plan.k = static_cast<int>(require_number(j, "k"));
    plan.omega = require_number(j, "omega");
    plan.phi = require_number(j, "phi");
    plan.E_value = cplx(require_number(j, "E_re"), require_number(j, "E_im"));
    plan.decay_exponent_per_unit_c = require_number(j, "exponent_per_c");
    plan.c_threshold_l2 = require_number(j, "c_threshold");
    return plan;
}

json potential_to_json(const WvnPotential& p) {
    json terms = json::array();
    for (const WvnTerm& t : p.terms())
        terms.push_back({{"c", t.c}, {"omega", t.omega}, {"phi", t.phi}});
    json overrides = json::object();
    for (const auto& [n, v] : p.overrides()) overrides[std::to_string(n)] = v;
    return json{{"terms", terms}, {"overrides", overrides}, {"r", p.r()}};
}

WvnPotential potential_from_json(const json& j) {
    if (!j.contains("terms") || !j["terms"].is_array())
        throw ValidationError("\"terms\" must be an array");
    std::vector<WvnTerm> terms;
    for (const auto& e : j["terms"])
        terms.push_back({require_number(e, "c"), require_number(e, "omega"),
                         require_number(e, "phi")});
    std::map<std::int64_t, double> overrides;
    if (j.contains("overrides")) {
        if (!j["overrides"].is_object())
            throw ValidationError("\"overrides\" must be an object keyed by n");
        for (const auto& [key, v] : j["overrides"].items()) {
            if (!v.is_number())
                throw ValidationError("\"overrides\" values must be numbers");
            try {
                overrides[std::stoll(key)] = v.get<double>();
            } catch (const std::exception&) {
                throw ValidationError("\"overrides\" keys must be integers (got \"" +
                                      key + "\")");
            }
        }
    }
    const double r = j.contains("r") ? require_number(j, "r") : 0.0;
    return WvnPotential(std::move(terms), std::move(overrides), r);
}

json fit_to_json(const FitResult& fit, TraceVerdict verdict) {
    return json{{"gamma", fit.gamma},
                {"stderr", fit.stderr_},
                {"window", json::array({fit.window.first, fit.window.second})},
                {"verdict", verdict_name(verdict)}};
}

std::string trace_to_csv(const SolutionTrace& trace) {
    std::ostringstream os;
    os << "n,u\n";
    for (const auto& [n, v] : trace.samples)
        os << n << ',' << format_double(v) << '\n';
    return os.str();
}

std::string window_norms_to_csv(const SolutionTrace& trace) {
    std::ostringstream os;
    os << "n,log_norm\n";
    for (const auto& [n, v] : trace.window_log_norms)
        os << n << ',' << format_double(v) << '\n';
    return os.str();
}

std::string verdict_name(TraceVerdict v) {
    switch (v) {
        case TraceVerdict::Decaying: return "Decaying";
        case TraceVerdict::Bounded: return "Bounded";
        case TraceVerdict::Growing: return "Growing";
        case TraceVerdict::Undetermined: return "Undetermined";
    }
    return "Undetermined";
}

std::string point_class_name(PointClass c) {
    switch (c) {
        case PointClass::Hyperbolic: return "Hyperbolic";
        case PointClass::Elliptic: return "Elliptic";
        case PointClass::Parabolic: return "Parabolic";
    }
    return "Hyperbolic";
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open \"" + path + "\" for writing");
    out << content;
    if (!out) throw ValidationError("failed writing \"" + path + "\"");
}

json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open \"" + path + "\"");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ValidationError("invalid JSON in \"" + path + "\": " + e.what());
    }
    return j;
}

}  // namespace jacobiwvn
