#include "cli_commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>

#include "jacobiwvn/band_structure.hpp"
#include "jacobiwvn/errors.hpp"
#include "jacobiwvn/io.hpp"
#include "jacobiwvn/operator_core.hpp"
#include "jacobiwvn/parallel.hpp"
#include "jacobiwvn/potential.hpp"
#include "jacobiwvn/resonance.hpp"
#include "jacobiwvn/simulate.hpp"

namespace jacobiwvn::cli {

namespace {

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json load_config(const Options& opt) {
    if (opt.config_path.empty())
        throw ValidationError("\"--config\" is required for this command");
    return read_json_file(opt.config_path);
}

PeriodicOperator operator_from_config(const json& cfg) {
    if (!cfg.contains("operator"))
        throw ValidationError("\"operator\" section missing from the config");
    return operator_from_json(cfg["operator"]);
}

void write_artifact(const Options& opt, const std::string& name, json j) {
    std::filesystem::create_directories(opt.out_dir);
    j["timestamp"] = timestamp_utc();
    write_text_file(opt.out_dir + "/" + name, j.dump(2) + "\n");
}

void write_csv(const Options& opt, const std::string& name, const std::string& body) {
    std::filesystem::create_directories(opt.out_dir);
    write_text_file(opt.out_dir + "/" + name, body);
}

ResonanceCase case_from_name(const std::string& name) {
    if (name == "case1") return ResonanceCase::Case1;
    if (name == "case2") return ResonanceCase::Case2;
    if (name == "case3") return ResonanceCase::Case3;
    throw ValidationError("\"case\" must be \"case1\", \"case2\" or \"case3\" (got \"" +
                          name + "\")");
}

CaseRequest request_from_config(const json& cfg) {
    const ResonanceCase c = case_from_name(cfg.value("case", "case1"));
    CaseRequest req{c, std::nullopt};
    if (cfg.contains("k")) req.k = cfg["k"].get<int>();
    return req;
}

// ---------------------------------------------------------------------------

int cmd_bands(const Options& opt) {
    const json cfg = load_config(opt);
    const PeriodicOperator op = operator_from_config(cfg);
    const int grid = cfg.value("grid", 4096);
    const std::vector<Band> bands =
        cfg.contains("lo") && cfg.contains("hi")
            ? find_bands(op, cfg["lo"].get<double>(), cfg["hi"].get<double>(), grid)
            : find_bands(op, grid);

    write_artifact(opt, "bands.json",
                   json{{"operator", operator_to_json(op)}, {"bands", bands_to_json(bands)}});
    write_csv(opt, "bands.csv", bands_to_csv(bands));

    const int points = cfg.value("theta_points", 33);
    std::ostringstream table;
    table << "band_index,lambda,theta\n";
    for (const Band& b : bands)
        for (int i = 0; i < points; ++i) {
            const double l = b.lo + (b.hi - b.lo) * (i + 0.5) / points;
            table << b.index << ',' << format_double(l) << ','
                  << format_double(quasi_momentum(op, l)) << '\n';
        }
    write_csv(opt, "theta_table.csv", table.str());

    std::cout << "bands: " << bands.size() << " band(s) for period " << op.period()
              << " operator\n";
    for (const Band& b : bands)
        std::cout << "  band " << b.index << ": [" << format_double(b.lo) << ", "
                  << format_double(b.hi) << "] theta "
                  << (b.theta_direction == ThetaDirection::Increasing ? "inc" : "dec")
                  << "\n";
    return 0;
}

int cmd_classify(const Options& opt) {
    const json cfg = load_config(opt);
    const PeriodicOperator op = operator_from_config(cfg);
    std::vector<double> lambdas;
    if (!cfg.contains("lambda"))
        throw ValidationError("\"lambda\" missing from the config");
    if (cfg["lambda"].is_array())
        for (const auto& v : cfg["lambda"]) lambdas.push_back(v.get<double>());
    else
        lambdas.push_back(cfg["lambda"].get<double>());
    const double tol = cfg.value("tol", 1e-10);

    json points = json::array();
    for (const double l : lambdas) {
        const SpectralPoint pt = classify(op, l, tol);
        json rec{{"lambda", pt.lambda},
                 {"class", point_class_name(pt.cls)},
                 {"trace", pt.trace}};
        if (pt.theta) rec["theta"] = *pt.theta;
        if (pt.mu) {
            rec["mu_re"] = pt.mu->real();
            rec["mu_im"] = pt.mu->imag();
        }
        points.push_back(rec);
        std::cout << "lambda=" << format_double(l) << " class=" << point_class_name(pt.cls)
                  << (pt.theta ? " theta=" + format_double(*pt.theta) : "") << "\n";
    }
    write_artifact(opt, "classify.json",
                   json{{"operator", operator_to_json(op)}, {"points", points}});
    return 0;
}

int cmd_resonance(const Options& opt) {
    const json cfg = load_config(opt);
    const PeriodicOperator op = operator_from_config(cfg);
    if (!cfg.contains("lambda"))
        throw ValidationError("\"lambda\" missing from the config");
    const double lambda = cfg["lambda"].get<double>();
    const double phi = cfg.value("phi", 0.0);
    const CaseRequest req = request_from_config(cfg);

    const SpectralPoint pt = classify(op, lambda);
    const ResonancePlan plan = plan_resonance(op, pt, req, phi);
    json artifact{{"operator", operator_to_json(op)}, {"plan", plan_to_json(plan)}};

    if (cfg.contains("sweep")) {
        const json& sw = cfg["sweep"];
        const int band_index = sw.value("band_index", 0);
        const int points = sw.value("points", 101);
        const std::vector<Band> bands = find_bands(op);
        if (band_index < 0 || band_index >= static_cast<int>(bands.size()))
            throw ValidationError("\"band_index\" out of range (have " +
                                  std::to_string(bands.size()) + " bands)");
        const Band& band = bands[static_cast<std::size_t>(band_index)];
        std::vector<std::optional<ResonancePlan>> rows(points);
        parallel_for(points, [&](std::int64_t i) {
            const double l = band.lo + (band.hi - band.lo) * (double(i) + 0.5) / points;
            try {
                rows[i] = plan_resonance(op, classify(op, l), req, phi);
            } catch (const DomainError&) {
                rows[i] = std::nullopt;  // parabolic touch, theta = pi/2, vanishing E
            }
        });
        std::ostringstream csv;
        csv << "lambda,abs_E,exponent_per_c,c_threshold\n";
        for (const auto& row : rows)
            if (row)
                csv << format_double(row->lambda) << ',' << format_double(std::abs(row->E_value))
                    << ',' << format_double(row->decay_exponent_per_unit_c) << ','
                    << format_double(row->c_threshold_l2) << '\n';
        write_csv(opt, "resonance_sweep.csv", csv.str());
    }

    if (cfg.value("oracle_check", false)) {
        const int t = op.period();
        const bool zero_diag_t2 = t == 2 && op.b(1) == 0.0 && op.b(2) == 0.0;
        if (t != 1 && !zero_diag_t2)
            throw ValidationError("\"oracle_check\" supports period 1 or the "
                                  "zero-diagonal period-2 family");
        const std::vector<Band> bands = find_bands(op);
        double max_dev = 0.0;
        for (const Band& band : bands)
            for (int i = 0; i < 200; ++i) {
                const double l = band.lo + (band.hi - band.lo) * (i + 0.5) / 200.0;
                const SpectralPoint p = classify(op, l);
                if (p.cls != PointClass::Elliptic) continue;
                if (std::abs(*p.theta - M_PI / 2.0) < 1e-3) continue;
                try {
                    if (t == 1) {
                        const cplx got =
                            plan_resonance(op, p, CaseRequest::case1(1), phi).E_value;
                        const cplx want = closed_form_E_oracle(op, p, ClosedFormOracle::T1, phi);
                        max_dev = std::max(max_dev, std::abs(got - want) / std::abs(want));
                    } else {
                        const cplx got2 =
                            plan_resonance(op, p, CaseRequest::case1(2), phi).E_value;
                        const cplx want2 =
                            closed_form_E_oracle(op, p, ClosedFormOracle::T2A, phi);
                        const cplx got1 =
                            plan_resonance(op, p, CaseRequest::case1(1), phi).E_value;
                        const cplx want1 =
                            closed_form_E_oracle(op, p, ClosedFormOracle::T2B, phi);
                        max_dev = std::max(max_dev, std::abs(got2 - want2) /
                                                        std::max(1e-300, std::abs(want2)));
                        max_dev = std::max(max_dev, std::abs(got1 - want1) /
                                                        std::max(1e-300, std::abs(want1)));
                    }
                } catch (const DomainError&) {
                    continue;  // oracle roots: E itself vanishes there
                }
            }
        artifact["oracle_max_rel_dev"] = max_dev;
        std::cout << "oracle check: max relative deviation " << format_double(max_dev)
                  << "\n";
    }

    write_artifact(opt, "resonance.json", artifact);
    std::cout << "resonance plan: lambda=" << format_double(plan.lambda)
              << " omega=" << format_double(plan.omega)
              << " |E|=" << format_double(std::abs(plan.E_value))
              << " c_threshold=" << format_double(plan.c_threshold_l2) << "\n";
    return 0;
}

int cmd_simulate(const Options& opt) {
    const json cfg = load_config(opt);
    const PeriodicOperator op = operator_from_config(cfg);
    if (!cfg.contains("lambda"))
        throw ValidationError("\"lambda\" missing from the config");
    const double lambda = cfg["lambda"].get<double>();
    const std::int64_t N =
        opt.n_override > 0 ? opt.n_override : cfg.value("N", std::int64_t{1'000'000});

    if (cfg.contains("potential") && cfg.contains("plan"))
        throw ValidationError("give either \"potential\" or \"plan\", not both");
    WvnPotential pot;
    std::optional<double> predicted_gamma;
    if (cfg.contains("potential")) {
        pot = potential_from_json(cfg["potential"]);
    } else if (cfg.contains("plan")) {
        const ResonancePlan plan = plan_from_json(cfg["plan"]);
        const double c = cfg.value("c", 2.0 * plan.c_threshold_l2);
        pot = WvnPotential({{c, plan.omega, plan.phi}});
        predicted_gamma = c * plan.decay_exponent_per_unit_c;
    }

    const bool rescale = cfg.value("rescale", true);
    std::optional<std::array<double, 2>> head;
    if (cfg.contains("head")) {
        const auto h = cfg["head"].get<std::vector<double>>();
        if (h.size() != 2) throw ValidationError("\"head\" must be [u1, u2]");
        head = {h[0], h[1]};
    }
    const SpectralPoint pt = classify(op, lambda);
    const bool want_sub =
        cfg.value("subordination", pt.cls == PointClass::Elliptic && !head);
    if (want_sub && head)
        throw ValidationError("\"head\" and \"subordination\" are mutually exclusive");

    json artifact{{"operator", operator_to_json(op)},
                  {"lambda", lambda},
                  {"class", point_class_name(pt.cls)},
                  {"N", N}};
    if (predicted_gamma) artifact["predicted_gamma"] = *predicted_gamma;

    SolutionTrace trace;
    TraceVerdict verdict = TraceVerdict::Undetermined;
    if (want_sub) {
        const SubordinationResult sres =
            subordination_search(op, pot, lambda, N, cfg.value("psi_grid", 720));
        trace = sres.trace_sub;
        json dyadic = json::array();
        for (const auto& [n, r] : sres.ratio_dyadic) dyadic.push_back({{"n", n}, {"ratio", r}});
        artifact["subordination"] = json{
            {"psi", sres.psi},
            {"final_ratio", sres.final_ratio},
            {"verdict", sres.verdict == SubordinationVerdict::Subordinate ? "Subordinate"
                        : sres.verdict == SubordinationVerdict::NoSubordinate
                            ? "NoSubordinate"
                            : "Inconclusive"},
            {"ratio_dyadic", dyadic}};
        if (sres.verdict == SubordinationVerdict::Subordinate)
            verdict = TraceVerdict::Decaying;
        else if (sres.trace_generic.n_max >= 100'000)
            verdict = boundedness_check(sres.trace_generic).verdict;
    } else {
        trace = iterate(op, pot, lambda, head.value_or(std::array<double, 2>{1.0, 1.0}),
                        N, cfg.value("stride", std::int64_t{0}), rescale);
        if (trace.n_max >= 100'000) verdict = boundedness_check(trace).verdict;
    }

    std::int64_t fit_lo = cfg.value("fit_lo", std::int64_t{10'000});
    std::int64_t fit_hi = cfg.value("fit_hi", std::min<std::int64_t>(N, 1'000'000));
    if (fit_hi > N) fit_hi = N;
    std::optional<FitResult> fit;
    if (fit_hi >= 4 * fit_lo) fit = fit_decay_exponent(trace, fit_lo, fit_hi);

    write_csv(opt, "trace.csv", trace_to_csv(trace));
    write_csv(opt, "window_norms.csv", window_norms_to_csv(trace));
    if (fit) {
        write_artifact(opt, "fit.json", fit_to_json(*fit, verdict));
        artifact["fit"] = fit_to_json(*fit, verdict);
    }
    artifact["verdict"] = verdict_name(verdict);
    write_artifact(opt, "simulate.json", artifact);

    std::cout << "simulate: lambda=" << format_double(lambda) << " N=" << N
              << " verdict=" << verdict_name(verdict);
    if (fit) std::cout << " gamma=" << format_double(fit->gamma);
    if (predicted_gamma)
        std::cout << " predicted=" << format_double(*predicted_gamma);
    std::cout << "\n";
    return 0;
}

int cmd_embed(const Options& opt) {
    const json cfg = load_config(opt);
    const PeriodicOperator op = operator_from_config(cfg);
    const std::string mode = cfg.value("mode", "single");
    const std::int64_t N =
        opt.n_override > 0 ? opt.n_override : cfg.value("N", std::int64_t{1} << 20);
    const std::int64_t residual_N = cfg.value("residual_N", std::int64_t{10'000});

    EmbeddingResult emb;
    std::vector<double> residuals;
    json plans_json = json::array();
    if (mode == "single") {
        if (!cfg.contains("lambda"))
            throw ValidationError("\"lambda\" missing from the config");
        const double lambda = cfg["lambda"].get<double>();
        const double phi = cfg.value("phi", 0.0);
        const ResonancePlan plan =
            plan_resonance(op, classify(op, lambda), request_from_config(cfg), phi);
        const double c = cfg.value("c", 2.0 * plan.c_threshold_l2);
        plans_json.push_back(plan_to_json(plan));

        const WvnPotential base({{c, plan.omega, plan.phi}});
        const SubordinationResult sres = subordination_search(op, base, lambda, N);
        std::optional<double> q1, q2_free;
        if (cfg.contains("q1")) q1 = cfg["q1"].get<double>();
        if (cfg.contains("q2_free")) q2_free = cfg["q2_free"].get<double>();
        emb = embed_single(op, plan, c, sres.trace_sub, q1, q2_free);
    } else if (mode == "pair") {
        if (!cfg.contains("lambda") || !cfg["lambda"].is_array() ||
            cfg["lambda"].size() != 2)
            throw ValidationError("pair mode needs \"lambda\": [lambda1, lambda2]");
        const double l1 = cfg["lambda"][0].get<double>();
        const double l2 = cfg["lambda"][1].get<double>();
        std::array<double, 2> phis{0.0, 0.0};
        if (cfg.contains("phi")) {
            const auto p = cfg["phi"].get<std::vector<double>>();
            if (p.size() != 2) throw ValidationError("pair mode needs \"phi\": [phi1, phi2]");
            phis = {p[0], p[1]};
        }
        const ResonancePlan plan1 =
            plan_resonance(op, classify(op, l1), CaseRequest::auto_case1(), phis[0]);
        const ResonancePlan plan2 =
            plan_resonance(op, classify(op, l2), CaseRequest::auto_case1(), phis[1]);
        const double c =
            cfg.value("c", 2.0 * std::max(plan1.c_threshold_l2, plan2.c_threshold_l2));
        plans_json.push_back(plan_to_json(plan1));
        plans_json.push_back(plan_to_json(plan2));

        const WvnPotential base(
            {{c, plan1.omega, plan1.phi}, {c, plan2.omega, plan2.phi}});
        const SubordinationResult s1 = subordination_search(op, base, l1, N);
        const SubordinationResult s2 = subordination_search(op, base, l2, N);
        emb = embed_pair(op, {plan1, plan2}, c, {&s1.trace_sub, &s2.trace_sub});
    } else {
        throw ValidationError("\"mode\" must be \"single\" or \"pair\"");
    }

    json heads = json::array();
    json tail_gammas = json::array();
    for (const EmbeddingHead& h : emb.heads) {
        heads.push_back({{"lambda", h.lambda}, {"u", h.u}});
        const std::array<double, 2> head{h.u[0], h.u[1]};
        residuals.push_back(eigen_residual(op, emb.potential, h.lambda, head, residual_N));
        const SolutionTrace tr = iterate(op, emb.potential, h.lambda, head, N);
        const FitResult fit =
            fit_decay_exponent(tr, 10'000, std::min<std::int64_t>(N, 1'000'000));
        tail_gammas.push_back(fit.gamma);
    }

    json artifact{{"operator", operator_to_json(op)},
                  {"mode", mode},
                  {"plans", plans_json},
                  {"potential", potential_to_json(emb.potential)},
                  {"heads", heads},
                  {"branch", emb.branch},
                  {"free_parameters", emb.free_parameters},
                  {"residuals", residuals},
                  {"residual_N", residual_N},
                  {"tail_gamma", tail_gammas}};
    write_artifact(opt, "embed.json", artifact);

    std::cout << "embed: branch=" << emb.branch;
    for (std::size_t i = 0; i < residuals.size(); ++i)
        std::cout << " residual" << i + 1 << "=" << format_double(residuals[i]);
    std::cout << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    }
    int uniform_int(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(gen);
    }
};

PeriodicOperator random_operator(Rng& rng, int max_period) {
    const int t = rng.uniform_int(1, max_period);
    std::vector<double> a(t), b(t);
    for (int i = 0; i < t; ++i) {
        a[i] = rng.uniform(0.3, 2.5);
        b[i] = rng.uniform(-1.5, 1.5);
    }
    return PeriodicOperator(a, b);
}

struct SuiteResult {
    std::string name;
    std::int64_t checks{};
    std::int64_t failures{};
    std::string first_failure;
};

SuiteResult suite_det_monodromy(std::uint64_t seed) {
    SuiteResult res{"det_monodromy", 0, 0, ""};
    std::atomic<std::int64_t> failures{0};
    std::mutex mu;
    parallel_for(200, [&](std::int64_t i) {
        Rng rng(seed ^ (0x9E3779B97F4A7C15ull * (i + 1)));
        const PeriodicOperator op = random_operator(rng, 8);
        const double lo = op.min_b() - 1.0 - 2.0 * op.max_a();
        const double hi = op.max_b() + 1.0 + 2.0 * op.max_a();
        for (int j = 0; j < 1000; ++j) {
            const double l = rng.uniform(lo, hi);
            const cplx det = monodromy(op, l).m.det();
            // Rounding in the factor chain amplifies like the product of the
            // factor norms (squared, since the det multiplies two entries);
            // deep in the hyperbolic region that dwarfs the unit result.
            double growth = 1.0;
            for (int f = 1; f <= op.period(); ++f)
                growth *= std::max(1.0, transfer_matrix(op, f, l).norm());
            const double scale =
                std::max(1.0, 8.0 * op.period() * growth * growth);
            if (std::abs(det - 1.0) > 1e-12 * scale) {
                failures.fetch_add(1);
                std::lock_guard<std::mutex> lk(mu);
                if (res.first_failure.empty())
                    res.first_failure = "|det - 1| = " + format_double(std::abs(det - 1.0)) +
                                        " at lambda = " + format_double(l);
            }
        }
    });
    res.checks = 200 * 1000;
    res.failures = failures.load();
    return res;
}

SuiteResult suite_oracle_equivalence(std::uint64_t seed) {
    SuiteResult res{"oracle_equivalence", 0, 0, ""};
    Rng rng(seed + 1);
    for (int rep = 0; rep < 200; ++rep) {
        // Period one: every elliptic point has the printed closed form.
        const double a1 = rng.uniform(0.3, 2.5), b1 = rng.uniform(-1.5, 1.5);
        const PeriodicOperator op1({a1}, {b1});
        double theta = 0.0;
        do {
            theta = rng.uniform(0.05, M_PI - 0.05);
        } while (std::abs(theta - M_PI / 2.0) < 1e-3);
        const double phi = rng.uniform(0.0, 2.0 * M_PI);
        const double l1 = b1 + 2.0 * a1 * std::cos(theta);
        ++res.checks;
        const cplx got1 =
            plan_resonance(op1, classify(op1, l1), CaseRequest::case1(1), phi).E_value;
        const cplx want1 = closed_form_E_oracle(op1, classify(op1, l1), ClosedFormOracle::T1, phi);
        if (std::abs(got1 - want1) > 1e-10 * std::abs(want1)) {
            ++res.failures;
            if (res.first_failure.empty())
                res.first_failure = "T=1 deviation at lambda = " + format_double(l1);
        }

        // Zero-diagonal period two, both printed branches.
        double a21 = rng.uniform(0.3, 2.5), a22 = rng.uniform(0.3, 2.5);
        if (std::abs(a21 - a22) < 0.05) a22 += 0.1;
        const PeriodicOperator op2({a21, a22}, {0.0, 0.0});
        const double blo = std::abs(a21 - a22), bhi = a21 + a22;
        double l2 = 0.0;
        SpectralPoint p2;
        for (int tries = 0; tries < 100; ++tries) {
            const double sign = rng.uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
            l2 = sign * rng.uniform(blo + 0.02 * (bhi - blo), bhi - 0.02 * (bhi - blo));
            p2 = classify(op2, l2);
            if (p2.cls == PointClass::Elliptic && std::abs(*p2.theta - M_PI / 2.0) > 1e-3)
                break;
        }
        if (p2.cls != PointClass::Elliptic) continue;
        for (const auto& [k, which] :
             {std::pair{2, ClosedFormOracle::T2A}, std::pair{1, ClosedFormOracle::T2B}}) {
            ++res.checks;
            try {
                const cplx got =
                    plan_resonance(op2, p2, CaseRequest::case1(k), phi).E_value;
                const cplx want = closed_form_E_oracle(op2, p2, which, phi);
                if (std::abs(got - want) > 1e-10 * std::max(1e-300, std::abs(want))) {
                    ++res.failures;
                    if (res.first_failure.empty())
                        res.first_failure =
                            "T=2 k=" + std::to_string(k) + " deviation at lambda = " +
                            format_double(l2);
                }
            } catch (const DomainError&) {
                // lambda drew a root of the closed form; nothing to compare
            }
        }
    }
    return res;
}

SuiteResult suite_zygmund(std::uint64_t seed) {
    SuiteResult res{"zygmund_bound", 0, 0, ""};
    Rng rng(seed + 2);
    for (int i = 0; i < 100; ++i) {
        double alpha = 0.0;
        do {
            alpha = rng.uniform(0.0, 2.0 * M_PI);
        } while (std::abs(std::sin(alpha / 2.0)) < 1e-3);
        const auto n =
            static_cast<std::int64_t>(std::llround(std::exp(rng.uniform(0.0, std::log(1e6)))));
        ++res.checks;
        const ZygmundCheck chk = zygmund_tail_bound_check(alpha, std::max<std::int64_t>(1, n));
        if (!chk.ok) {
            ++res.failures;
            if (res.first_failure.empty())
                res.first_failure = "bound violated at alpha = " + format_double(alpha) +
                                    ", n = " + std::to_string(chk.n);
        }
    }
    return res;
}

SuiteResult suite_partition(std::uint64_t seed) {
    SuiteResult res{"resonance_partition", 0, 0, ""};
    Rng rng(seed + 3);
    for (int set = 0; set < 50; ++set) {
        const PeriodicOperator op = random_operator(rng, 4);
        std::vector<Band> bands;
        try {
            bands = find_bands(op);
        } catch (const NumericalError&) {
            continue;
        }
        std::vector<double> lambdas;
        const int want = rng.uniform_int(3, 8);
        for (int i = 0; i < want * 4 && static_cast<int>(lambdas.size()) < want; ++i) {
            const Band& b = bands[static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<int>(bands.size()) - 1))];
            const double l = rng.uniform(b.lo + 0.05 * (b.hi - b.lo),
                                         b.hi - 0.05 * (b.hi - b.lo));
            if (classify(op, l).cls == PointClass::Elliptic) lambdas.push_back(l);
        }
        if (lambdas.size() < 2) continue;
        // Force one deliberate resonant partner when a band admits it.
        const double theta0 = *classify(op, lambdas[0]).theta;
        for (const Band& b : bands) {
            try {
                lambdas.push_back(invert_theta(op, b, M_PI - theta0));
                break;
            } catch (const DomainError&) {
            }
        }

        ++res.checks;
        const ResonanceClasses classes = partition_resonance_classes(op, lambdas);
        std::vector<int> class_of(lambdas.size(), -1);
        for (std::size_t ci = 0; ci < classes.classes.size(); ++ci)
            for (const int m : classes.classes[ci]) class_of[m] = static_cast<int>(ci);
        bool ok = true;
        for (std::size_t i = 0; i < lambdas.size() && ok; ++i)
            for (std::size_t j = i + 1; j < lambdas.size() && ok; ++j) {
                const bool related =
                    std::abs(classes.thetas[i] - classes.thetas[j]) < 1e-9 ||
                    std::abs(classes.thetas[i] + classes.thetas[j] - M_PI) < 1e-9;
                if (related && class_of[i] != class_of[j]) ok = false;
            }
        for (const auto& cls : classes.classes)
            if (static_cast<int>(cls.size()) > 2 * op.period()) ok = false;
        if (!ok) {
            ++res.failures;
            if (res.first_failure.empty())
                res.first_failure = "partition violated on set " + std::to_string(set);
        }
    }
    return res;
}

SuiteResult suite_exponent_regression(std::uint64_t seed, bool quick,
                                      std::int64_t n_override) {
    (void)seed;
    SuiteResult res{"exponent_regression", 0, 0, ""};
    const PeriodicOperator op({1.0}, {0.0});
    const double lambda = 0.5;
    const ResonancePlan plan =
        plan_resonance(op, classify(op, lambda), CaseRequest::auto_case1());
    const double c = 2.0 * plan.c_threshold_l2;  // predicted exponent exactly 1
    const WvnPotential pot({{c, plan.omega, plan.phi}});
    const std::int64_t N =
        n_override > 0 ? n_override : (quick ? 100'000 : 1'000'000);
    const double tol = quick ? 0.08 : 0.05;

    const SubordinationResult sres = subordination_search(op, pot, lambda, N);
    ++res.checks;
    if (sres.verdict != SubordinationVerdict::Subordinate) {
        ++res.failures;
        res.first_failure = "no subordinate direction found";
        return res;
    }
    const std::int64_t fit_lo = std::max<std::int64_t>(1000, N / 100);
    const FitResult fit = fit_decay_exponent(sres.trace_sub, fit_lo, N);
    ++res.checks;
    const double predicted = c * plan.decay_exponent_per_unit_c;
    if (std::abs(fit.gamma - predicted) > tol * predicted) {
        ++res.failures;
        res.first_failure = "gamma = " + format_double(fit.gamma) + " vs predicted " +
                            format_double(predicted);
    }
    return res;
}

int cmd_verify(const Options& opt) {
    std::vector<SuiteResult> suites;
    suites.push_back(suite_det_monodromy(opt.seed));
    suites.push_back(suite_oracle_equivalence(opt.seed));
    suites.push_back(suite_zygmund(opt.seed));
    suites.push_back(suite_partition(opt.seed));
    suites.push_back(suite_exponent_regression(opt.seed, opt.quick, opt.n_override));

    bool ok = true;
    json arr = json::array();
    for (const SuiteResult& s : suites) {
        const bool pass = s.failures == 0;
        ok = ok && pass;
        json rec{{"name", s.name}, {"checks", s.checks}, {"failures", s.failures},
                 {"pass", pass}};
        if (!pass) rec["first_failure"] = s.first_failure;
        arr.push_back(rec);
        std::cout << "suite " << s.name << ": " << (pass ? "PASS" : "FAIL") << " ("
                  << s.checks << " checks";
        if (!pass) std::cout << ", " << s.failures << " failures: " << s.first_failure;
        std::cout << ")\n";
    }
    write_artifact(opt, "verify.json",
                   json{{"suites", arr},
                        {"ok", ok},
                        {"quick", opt.quick},
                        {"seed", opt.seed}});
    return ok ? 0 : 1;
}

}  // namespace

int run_command(const Options& opt) {
    if (opt.command == "bands") return cmd_bands(opt);
    if (opt.command == "classify") return cmd_classify(opt);
    if (opt.command == "resonance") return cmd_resonance(opt);
    if (opt.command == "simulate") return cmd_simulate(opt);
    if (opt.command == "embed") return cmd_embed(opt);
    if (opt.command == "verify") return cmd_verify(opt);
    throw ValidationError("unknown command \"" + opt.command + "\"");
}

int dispatch(const Options& opt) {
    try {
        return run_command(opt);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const DegeneracyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace jacobiwvn::cli
