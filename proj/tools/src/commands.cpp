#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mcdlab/constructions.hpp"
#include "mcdlab/digest.hpp"
#include "mcdlab/minerr.hpp"
#include "mcdlab/random.hpp"
#include "mcdlab/version.hpp"

namespace mcdlab::tool {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json input_json(const std::string& path) {
    return json{{"path", path}, {"sha256", sha256_hex(read_bytes(path))}};
}

json dims_json(const DimVector& dims) {
    json a = json::array();
    for (int d : dims.as_vector()) a.push_back(d);
    return a;
}

std::string dims_human(const DimVector& dims) {
    std::string s;
    for (int k = 0; k < dims.factors(); ++k) {
        if (k) s += "x";
        s += std::to_string(dims.dim(k));
    }
    return s;
}

json tool_json() {
    return json{{"name", "mcdlab"}, {"version", version_string}};
}

ConfidenceOptions make_options(double tol, std::uint64_t seed) {
    ConfidenceOptions o;
    o.tol = tol;
    o.seed = seed;
    o.seesaw.seed = seed;
    return o;
}

json sigma_json(const SigmaCertificate& s) {
    return json{{"witness_expectation", sig12(s.witness_expectation)},
                {"rho0_overlap", sig12(s.rho0_overlap)},
                {"separability", to_string(s.separability)},
                {"matrix", matrix_json(s.sigma)}};
}

json decomposition_json(const WitnessDecomposition& d) {
    json parts = json::array();
    for (const auto& [part, cut] : d.transposed_parts)
        parts.push_back(json{{"cut", cut}, {"matrix", matrix_json(part)}});
    return json{{"residual", sig12(d.residual)},
                {"psd_part", matrix_json(d.psd_part)},
                {"transposed_parts", parts}};
}

json product_json(const ProductVectorCert& p) {
    json factors = json::array();
    for (const VectorXcd& f : p.factors) factors.push_back(vector_json(f));
    return json{{"value", sig12(p.value)}, {"factors", factors}};
}

json separable_ceiling_json(const SeparableCeilingCheck& p) {
    json flags = json::array();
    for (std::size_t i = 0; i < p.difference_verdicts.size(); ++i)
        flags.push_back(json{{"block_positive", to_string(p.difference_verdicts[i].status)},
                             {"psd", static_cast<bool>(p.difference_psd[i])}});
    return json{{"p_sep_status", to_string(p.p_sep_status)},
                {"ew_exists", to_string(p.ew_exists)},
                {"exact", p.exact},
                {"differences", flags}};
}

json crosscheck_json(const CrosscheckResult& c) {
    json o{{"status", to_string(c.status)}, {"reason", c.reason}};
    if (c.status != CrosscheckStatus::skipped) {
        o["q"] = sig12(c.q);
        o["r"] = sig12(c.r);
        o["p_g"] = sig12(c.p_g);
        o["solver_status"] = to_string(c.p_g_status);
        o["q_back"] = sig12(c.q_back);
        o["reverse_ok"] = c.reverse_ok;
        o["separable_ceiling"] = separable_ceiling_json(c.separable_ceiling);
    }
    return o;
}

json outcome_json(const ConfidenceReport& rep, const CrosscheckResult& cx) {
    json gap_probes = json::array();
    for (const auto& [q, verdict] : rep.gap.probe_points)
        gap_probes.push_back(json{{"q", sig12(q)}, {"witness", verdict_json(verdict)}});

    json o;
    o["j"] = rep.j + 1; // outcomes are 1-based at the interface
    o["confidence"] = json{{"value", sig12(rep.c_value)},
                           {"bisection", sig12(rep.c_bisection)},
                           {"support_rank", rep.support_rank}};
    o["separable"] = json{{"q_lower", sig12(rep.q_lower)},
                          {"q_upper", sig12(rep.q_upper)},
                          {"exact", rep.exact},
                          {"solver_status", to_string(rep.locc_status)}};
    o["gap"] = json{{"value", sig12(rep.gap.gap)},
                    {"nonlocal", to_string(rep.nonlocal)},
                    {"probes", gap_probes}};
    o["sigma"] = rep.sigma ? sigma_json(*rep.sigma) : json(nullptr);
    o["mc_operator"] = rep.mc_operator ? matrix_json(*rep.mc_operator) : json(nullptr);
    o["locc_optimizer"] =
        rep.locc_optimizer ? matrix_json(*rep.locc_optimizer) : json(nullptr);
    o["witness_decomposition"] =
        rep.locc_decomposition ? decomposition_json(*rep.locc_decomposition) : json(nullptr);
    o["minerr"] = crosscheck_json(cx);
    return o;
}

void human_outcome(std::ostringstream& out, const ConfidenceReport& rep,
                   const CrosscheckResult& cx) {
    out << "j=" << rep.j + 1 << ": C = " << format12(rep.c_value) << "  Q in ["
        << format12(rep.q_lower) << ", " << format12(rep.q_upper) << "]  gap = "
        << format12(rep.gap.gap) << "  nonlocal: " << to_string(rep.nonlocal) << "\n";
    if (rep.sigma)
        out << "     touching state: overlap " << format12(rep.sigma->rho0_overlap)
            << ", separability " << to_string(rep.sigma->separability) << "\n";
    out << "     min-error bridge: " << to_string(cx.status);
    if (cx.status == CrosscheckStatus::certified)
        out << " (r = " << format12(cx.r) << ", p_G = " << format12(cx.p_g)
            << ", reverse " << (cx.reverse_ok ? "ok" : "failed") << ")";
    else
        out << " (" << cx.reason << ")";
    out << "\n";
}

bool outcome_stalled(const ConfidenceReport& rep, const CrosscheckResult& cx) {
    return rep.locc_status == SdpStatus::stalled ||
           (cx.status != CrosscheckStatus::skipped && cx.p_g_status == SdpStatus::stalled);
}

} // namespace

double sig12(double x) {
    if (!std::isfinite(x)) return x;
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.11e", x);
    return std::strtod(buf, nullptr);
}

std::string format12(double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", sig12(x));
    return buf;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& cli_seed) {
    if (cli_seed) return *cli_seed;
    if (const char* env = std::getenv("MCDLAB_SEED")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && end != env) return v;
        throw std::invalid_argument("MCDLAB_SEED must be a nonnegative integer");
    }
    return 0;
}

json matrix_json(const HermitianOperator& h) {
    const MatrixXcd& m = h.matrix();
    json re = json::array(), im = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json rr = json::array(), ri = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            rr.push_back(sig12(m(r, c).real()));
            ri.push_back(sig12(m(r, c).imag()));
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ri));
    }
    return json{{"dims", dims_json(h.dims())}, {"re", re}, {"im", im}};
}

json vector_json(const VectorXcd& v) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        re.push_back(sig12(v(i).real()));
        im.push_back(sig12(v(i).imag()));
    }
    return json{{"re", re}, {"im", im}};
}

json verdict_json(const ConeVerdict& v) {
    json o{{"status", to_string(v.status)}, {"exact", v.exact}};
    if (v.negative_eigenvector)
        o["negative_eigenvector"] = json{{"value", sig12(v.negative_eigenvector->value)},
                                         {"vector", vector_json(v.negative_eigenvector->vec)}};
    if (v.product_vector) o["product_vector"] = product_json(*v.product_vector);
    if (v.decomposition)
        o["decomposition"] = json{{"cut", v.decomposition->cut},
                                  {"psd_part", matrix_json(v.decomposition->psd_part)},
                                  {"ppt_part", matrix_json(v.decomposition->ppt_part)}};
    if (v.separable_state)
        o["separable_state"] = json{{"expectation", sig12(v.separable_state->expectation)},
                                    {"sigma", matrix_json(v.separable_state->sigma)}};
    return o;
}

CommandResult run_analyze(const std::string& path, std::optional<int> j_one_based, double tol,
                          std::uint64_t seed, bool timings) {
    Clock::time_point t0 = Clock::now();
    json input = input_json(path);
    std::vector<std::string> warnings;
    Ensemble e = load_ensemble(path, &warnings);

    std::vector<int> outcomes;
    if (j_one_based) {
        if (*j_one_based < 1 || *j_one_based > e.size())
            throw std::invalid_argument("--j must be between 1 and " +
                                        std::to_string(e.size()));
        outcomes.push_back(*j_one_based - 1);
    } else {
        for (int j = 0; j < e.size(); ++j) outcomes.push_back(j);
    }

    ConfidenceOptions opts = make_options(tol, seed);
    ExactnessScope scope = exactness_scope(e.dims());

    json report;
    report["schema_version"] = 1;
    report["tool"] = tool_json();
    report["seed"] = seed;
    report["input"] = input;
    report["dims"] = dims_json(e.dims());
    report["states"] = e.size();
    report["exact"] = scope.is_exact;
    report["exactness_reason"] = scope.reason;
    report["warnings"] = warnings;

    std::ostringstream human;
    human << "ensemble: " << path << "\n"
          << "dims: " << dims_human(e.dims()) << "  states: " << e.size()
          << "  exact: " << (scope.is_exact ? "yes" : "no") << "  seed: " << seed << "\n";

    bool stalled = false;
    json outs = json::array();
    json stage_ms = json::object();
    double load_ms = ms_since(t0);
    for (int j : outcomes) {
        Clock::time_point tj = Clock::now();
        ConfidenceReport rep = confidence_report(e, j, opts);
        CrosscheckResult cx = crosscheck_minerr_gap(e, j, opts);
        stalled = stalled || outcome_stalled(rep, cx);
        outs.push_back(outcome_json(rep, cx));
        human_outcome(human, rep, cx);
        stage_ms["j" + std::to_string(j + 1)] = sig12(ms_since(tj));
    }
    report["outcomes"] = outs;
    if (timings) {
        stage_ms["load"] = sig12(load_ms);
        stage_ms["total"] = sig12(ms_since(t0));
        report["timings_ms"] = stage_ms;
    }

    CommandResult r;
    r.exit_code = stalled ? kExitStall : kExitOk;
    r.report = std::move(report);
    r.human = human.str();
    return r;
}

CommandResult run_construct(const std::vector<std::string>& witness_paths,
                            const std::string& mode, const std::string& out_path,
                            std::uint64_t seed) {
    if (witness_paths.empty())
        throw std::invalid_argument("construct: at least one witness file required");

    json inputs = json::array();
    std::vector<HermitianOperator> ws;
    for (const std::string& p : witness_paths) {
        inputs.push_back(input_json(p));
        ws.push_back(load_operator(p));
    }

    ConfidenceOptions opts = make_options(1e-9, seed);
    json report;
    report["schema_version"] = 1;
    report["tool"] = tool_json();
    report["seed"] = seed;
    report["mode"] = mode;
    report["inputs"] = inputs;

    std::ostringstream human;
    std::vector<std::string> warnings;
    bool verified = true;
    bool stalled = false;

    if (mode == "single") {
        if (ws.size() != 1)
            throw std::invalid_argument("construct --mode single takes exactly one witness");
        Ensemble e = ensemble_from_witness(ws[0], opts.seesaw, opts.sdp);
        save_ensemble(e, out_path);

        MaxConfidenceResult mc = max_confidence(e, 0, opts);
        LoccConfidenceResult locc = locc_confidence(e, 0, opts);
        stalled = locc.solver_status == SdpStatus::stalled;
        bool c_ok = std::abs(mc.value - 1.0) <= 1e-9;
        bool q_ok = locc.q_upper <= 0.5 + 1e-6;
        if (!c_ok)
            warnings.push_back("global confidence of outcome 1 is " + format12(mc.value) +
                               ", expected 1");
        if (!q_ok)
            warnings.push_back("separable bound of outcome 1 is " + format12(locc.q_upper) +
                               ", expected at most 0.5");
        if (stalled) warnings.push_back("separable-bound solve stalled; guarantee unverified");
        verified = c_ok && q_ok && !stalled;

        report["predicted"] = json{{"c", 1.0}, {"q_bound", 0.5}};
        report["measured"] = json::array(
            {json{{"j", 1},
                  {"c", sig12(mc.value)},
                  {"q_upper", sig12(locc.q_upper)},
                  {"solver_status", to_string(locc.solver_status)}}});
        human << "constructed two-state ensemble on " << dims_human(e.dims()) << " -> "
              << out_path << "\n"
              << "priors: " << format12(e.prior(0)) << ", " << format12(e.prior(1)) << "\n"
              << "j=1: C = " << format12(mc.value) << " (predicted 1), Q <= "
              << format12(locc.q_upper) << " (predicted <= 0.5)\n";
    } else if (mode == "family") {
        WitnessFamily fam = witness_family(ws, opts.seesaw, opts.sdp);
        Ensemble e = ensemble_from_family(fam); // throws std::domain_error when eps <= 0
        save_ensemble(e, out_path);

        json lam = json::array(), del = json::array();
        for (double v : fam.lambda) lam.push_back(sig12(v));
        for (double v : fam.delta) del.push_back(sig12(v));
        report["family"] = json{{"epsilon", sig12(fam.epsilon)},
                                {"lambda", lam},
                                {"lambda_sum", sig12(fam.lambda_sum)},
                                {"delta", del}};

        human << "constructed " << e.size() << "-state ensemble on " << dims_human(e.dims())
              << " -> " << out_path << "\n"
              << "epsilon = " << format12(fam.epsilon) << ", lambda sum = "
              << format12(fam.lambda_sum) << "\n";

        json measured = json::array();
        for (int j = 0; j < e.size(); ++j) {
            double pc = predicted_max_confidence(fam, j);
            double bound = separable_confidence_bound(fam, j);
            std::optional<double> pq = predicted_Q(fam, j, opts.seesaw, opts.sdp);
            MaxConfidenceResult mc = max_confidence(e, j, opts);
            LoccConfidenceResult locc = locc_confidence(e, j, opts);
            NonlocalityGap gap = nonlocality_gap(e, j, opts);
            stalled = stalled || locc.solver_status == SdpStatus::stalled;

            bool c_ok = std::abs(mc.value - pc) <= 1e-8;
            bool q_ok = locc.q_upper <= bound + 1e-6;
            bool pq_ok = !pq || std::abs(locc.q_upper - *pq) <= 1e-6;
            bool nl_ok = gap.nonlocal == Trilean::yes;
            if (!c_ok)
                warnings.push_back("outcome " + std::to_string(j + 1) +
                                   ": confidence deviates from the closed form");
            if (!q_ok)
                warnings.push_back("outcome " + std::to_string(j + 1) +
                                   ": separable bound exceeded");
            if (!pq_ok)
                warnings.push_back("outcome " + std::to_string(j + 1) +
                                   ": separable optimum misses the prediction");
            if (!nl_ok)
                warnings.push_back("outcome " + std::to_string(j + 1) +
                                   ": nonlocality not certified");
            verified = verified && c_ok && q_ok && pq_ok && nl_ok;

            json m{{"j", j + 1},
                   {"predicted_c", sig12(pc)},
                   {"c", sig12(mc.value)},
                   {"q_bound", sig12(bound)},
                   {"q_upper", sig12(locc.q_upper)},
                   {"nonlocal", to_string(gap.nonlocal)},
                   {"solver_status", to_string(locc.solver_status)}};
            m["predicted_q"] = pq ? json(sig12(*pq)) : json(nullptr);
            measured.push_back(std::move(m));
            human << "j=" << j + 1 << ": C = " << format12(mc.value) << " (predicted "
                  << format12(pc) << "), Q = " << format12(locc.q_upper) << " (bound "
                  << format12(bound) << (pq ? ", predicted " + format12(*pq) : "")
                  << "), nonlocal: " << to_string(gap.nonlocal) << "\n";
        }
        report["measured"] = measured;
        if (stalled) warnings.push_back("a separable-bound solve stalled; guarantees unverified");
        verified = verified && !stalled;
    } else {
        throw std::invalid_argument("construct: mode must be single or family");
    }

    report["output"] = json{{"path", out_path}};
    report["guarantees_verified"] = verified;
    report["warnings"] = warnings;
    for (const std::string& w : warnings) human << "warning: " << w << "\n";
    human << (verified ? "guarantees verified" : "guarantees NOT verified (file written)")
          << "\n";

    CommandResult r;
    r.exit_code = stalled ? kExitStall : kExitOk;
    r.report = std::move(report);
    r.human = human.str();
    return r;
}

CommandResult run_crosscheck(const std::string& path, int j_one_based, std::uint64_t seed) {
    json input = input_json(path);
    Ensemble e = load_ensemble(path);
    if (j_one_based < 1 || j_one_based > e.size())
        throw std::invalid_argument("--j must be between 1 and " + std::to_string(e.size()));

    ConfidenceOptions opts = make_options(1e-9, seed);
    CrosscheckResult cx = crosscheck_minerr_gap(e, j_one_based - 1, opts);

    json report;
    report["schema_version"] = 1;
    report["tool"] = tool_json();
    report["seed"] = seed;
    report["input"] = input;
    report["dims"] = dims_json(e.dims());
    report["j"] = j_one_based;
    report["crosscheck"] = crosscheck_json(cx);

    std::ostringstream human;
    human << "crosscheck j=" << j_one_based << ": " << to_string(cx.status) << "\n";
    if (cx.status == CrosscheckStatus::skipped) {
        human << "reason: " << cx.reason << "\n";
    } else {
        human << "q = " << format12(cx.q) << "  r = " << format12(cx.r)
              << "  p_G = " << format12(cx.p_g) << "\n"
              << "separable ceiling: " << to_string(cx.separable_ceiling.p_sep_status)
              << "  witness among differences: " << to_string(cx.separable_ceiling.ew_exists) << "\n"
              << "reverse map q = " << format12(cx.q_back) << ": "
              << (cx.reverse_ok ? "witness re-certified" : "not re-certified") << "\n";
    }

    CommandResult r;
    r.exit_code = (cx.status != CrosscheckStatus::skipped &&
                   cx.p_g_status == SdpStatus::stalled)
                      ? kExitStall
                      : kExitOk;
    r.report = std::move(report);
    r.human = human.str();
    return r;
}

CommandResult run_sweep(const std::string& config_path, const std::string& out_csv,
                        std::optional<std::uint64_t> cli_seed, bool timings) {
    json config = json::parse(read_bytes(config_path));
    if (!config.is_object()) throw std::invalid_argument("sweep config must be a JSON object");
    if (!config.contains("dims") || !config["dims"].is_array() || config["dims"].empty())
        throw std::invalid_argument("sweep config needs a dims array");
    if (!config.contains("samples") || !config["samples"].is_number_integer() ||
        config["samples"].get<int>() < 1)
        throw std::invalid_argument("sweep config needs a positive integer sample count");

    std::vector<int> dv;
    for (const json& d : config["dims"]) {
        if (!d.is_number_integer() || d.get<int>() < 1)
            throw std::invalid_argument("sweep config dims must be positive integers");
        dv.push_back(d.get<int>());
    }
    DimVector dims(dv);
    const int samples = config["samples"].get<int>();
    const int states = config.value("states", 2);
    if (states < 1) throw std::invalid_argument("sweep config states must be positive");
    const std::string law = config.value("law", "pure");
    if (law != "pure" && law != "mixed")
        throw std::invalid_argument("sweep config law must be \"pure\" or \"mixed\"");
    const double tol = config.value("tol", 1e-9);

    std::uint64_t seed;
    if (cli_seed)
        seed = *cli_seed;
    else if (config.contains("seed"))
        seed = config["seed"].get<std::uint64_t>();
    else
        seed = resolve_seed(std::nullopt);

    std::ofstream csv(out_csv, std::ios::binary);
    if (!csv) throw std::invalid_argument("cannot open output file: " + out_csv);
    csv << "sample,j,c,q_lower,q_upper,gap,exact,nonlocal,solver_status";
    if (timings) csv << ",ms";
    csv << "\n";

    bool stalled = false;
    int rows = 0, nonlocal_rows = 0;
    for (int s = 0; s < samples; ++s) {
        Rng rng(mix_seed(seed, 2 * static_cast<std::uint64_t>(s)));
        std::vector<EnsembleItem> items;
        for (int i = 0; i < states; ++i) {
            HermitianOperator st = law == "pure"
                                       ? random_pure_state(dims, rng)
                                       : random_mixed_state(dims, dims.total(), rng);
            items.push_back({1.0 / states, std::move(st)});
        }
        Ensemble e(dims, std::move(items));
        ConfidenceOptions opts = make_options(tol, mix_seed(seed, 2 * static_cast<std::uint64_t>(s) + 1));

        for (int j = 0; j < states; ++j) {
            Clock::time_point tj = Clock::now();
            MaxConfidenceResult mc = max_confidence(e, j, opts);
            LoccConfidenceResult locc = locc_confidence(e, j, opts);
            NonlocalityGap gap = nonlocality_gap(e, j, opts);
            stalled = stalled || locc.solver_status == SdpStatus::stalled;
            if (gap.nonlocal == Trilean::yes) ++nonlocal_rows;
            csv << s << "," << j + 1 << "," << format12(mc.value) << ","
                << format12(locc.q_lower) << "," << format12(locc.q_upper) << ","
                << format12(mc.value - locc.q_upper) << "," << (locc.exact ? 1 : 0) << ","
                << to_string(gap.nonlocal) << "," << to_string(locc.solver_status);
            if (timings) csv << "," << format12(ms_since(tj));
            csv << "\n";
            ++rows;
        }
    }
    csv.close();

    json report;
    report["schema_version"] = 1;
    report["tool"] = tool_json();
    report["seed"] = seed;
    report["config"] = input_json(config_path);
    report["output"] = json{{"path", out_csv}, {"rows", rows}};
    report["nonlocal_rows"] = nonlocal_rows;

    std::ostringstream human;
    human << "swept " << samples << " ensembles (" << states << " states, " << law
          << ", dims " << dims_human(dims) << ") -> " << rows << " rows in " << out_csv
          << "\n"
          << "nonlocal rows: " << nonlocal_rows << "  seed: " << seed << "\n";

    CommandResult r;
    r.exit_code = stalled ? kExitStall : kExitOk;
    r.report = std::move(report);
    r.human = human.str();
    return r;
}

CommandResult error_result(const std::exception& e) {
    const char* kind = "internal";
    int code = kExitInternal;
    if (dynamic_cast<const EnsembleError*>(&e) ||
        dynamic_cast<const nlohmann::json::exception*>(&e) ||
        dynamic_cast<const std::invalid_argument*>(&e) ||
        dynamic_cast<const std::domain_error*>(&e) ||
        dynamic_cast<const std::out_of_range*>(&e) ||
        dynamic_cast<const std::ios_base::failure*>(&e)) {
        kind = "validation";
        code = kExitValidation;
    }
    CommandResult r;
    r.exit_code = code;
    r.report = json{{"error", json{{"kind", kind}, {"message", e.what()}}}};
    r.human = std::string("error (") + kind + "): " + e.what() + "\n";
    return r;
}

} // namespace mcdlab::tool
