#include "cli/cli.hpp"

#include "cli/manifest.hpp"
#include "cli/output.hpp"

#include "ergobound/bounds.hpp"
#include "ergobound/errors.hpp"
#include "ergobound/ergodicity.hpp"
#include "ergobound/format.hpp"
#include "ergobound/mc.hpp"
#include "ergobound/model_io.hpp"
#include "ergobound/models.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

namespace ergobound::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 12345;

struct GlobalArgs {
    std::uint64_t seed = kDefaultSeed;
    std::string out;
    std::string manifest;
    std::string format;
    unsigned threads = 1;
};

struct ModelArgs {
    std::string name = "jacobi";
    std::string file;
    std::optional<double> a, b, sigma2, rho, gamma;
};

struct ObservableArgs {
    std::string kind;
    double c = 1.0;
    std::optional<double> lo, hi, u;
};

struct SimArgs {
    double dt = 1e-3;
    std::uint64_t paths = 10000;
    std::optional<double> x0;
    std::optional<double> clamp;
};

void add_model_options(CLI::App* sub, ModelArgs& m) {
    sub->add_option("--model", m.name, "jacobi | tanou | maoclass")
        ->check(CLI::IsMember({"jacobi", "tanou", "maoclass"}));
    sub->add_option("--model-file", m.file, "Model JSON file (overrides --model)");
    sub->add_option("--a", m.a, "Jacobi a (default 1)");
    sub->add_option("--b", m.b, "Jacobi b (default 2)");
    sub->add_option("--sigma2", m.sigma2, "Jacobi sigma^2 (default 2)");
    sub->add_option("--rho", m.rho, "tan-OU rho (default 0.5)");
    sub->add_option("--gamma", m.gamma, "Mao-class gamma (default 3)");
}

void add_observable_options(CLI::App* sub, ObservableArgs& f) {
    sub->add_option("--f", f.kind, "const | indicator | exp | identity | sin")
        ->check(CLI::IsMember({"const", "indicator", "exp", "identity", "sin"}));
    sub->add_option("--c", f.c, "Value of the constant observable");
    sub->add_option("--lo", f.lo, "Indicator lower end");
    sub->add_option("--hi", f.hi, "Indicator upper end");
    sub->add_option("--u", f.u, "Exponent of exp(u x)");
}

void add_sim_options(CLI::App* sub, SimArgs& s) {
    sub->add_option("--dt", s.dt, "Euler-Maruyama step");
    sub->add_option("--paths", s.paths, "Number of paths");
    sub->add_option("--x0", s.x0, "Start point (default: interval midpoint)");
    sub->add_option("--clamp", s.clamp, "Project onto [l + delta, u - delta] instead of reflecting");
}

DiffusionSpec build_model(const ModelArgs& m) {
    if (!m.file.empty()) return load_model_file(m.file);
    if (m.name == "tanou") return DiffusionSpec::tan_ou(m.rho.value_or(0.5));
    if (m.name == "maoclass") return DiffusionSpec::mao_class(m.gamma.value_or(3.0));
    return DiffusionSpec::jacobi(m.a.value_or(1.0), m.b.value_or(2.0), m.sigma2.value_or(2.0));
}

// Defaults: 1_(0,1/2) for Jacobi, exp(x) for tan-OU; other models need --f.
Observable build_observable(const ObservableArgs& a, const DiffusionSpec& spec) {
    std::string kind = a.kind;
    if (kind.empty()) {
        if (std::holds_alternative<JacobiParams>(spec.closed_form())) {
            kind = "indicator";
        } else if (std::holds_alternative<TanOUParams>(spec.closed_form())) {
            kind = "exp";
        } else {
            throw DomainError("--f is required for this model");
        }
    }
    const StateInterval& iv = spec.interval();
    Observable f;
    if (kind == "const") {
        f = Observable::constant(a.c);
    } else if (kind == "indicator") {
        f = Observable::indicator(a.lo.value_or(iv.lower), a.hi.value_or(0.5 * (iv.lower + iv.upper)));
    } else if (kind == "exp") {
        f = Observable::exponential(a.u.value_or(1.0), iv);
    } else if (kind == "identity") {
        f = Observable::identity(iv);
    } else {
        f = Observable::sine();
    }
    validate_observable(spec, f);
    return f;
}

SimConfig build_sim(const SimArgs& s, const GlobalArgs& g, double horizon) {
    SimConfig cfg;
    cfg.dt = s.dt;
    cfg.t_horizon = horizon;
    cfg.n_paths = s.paths;
    cfg.seed = g.seed;
    cfg.x0 = s.x0;
    cfg.boundary = s.clamp ? BoundaryPolicy::clamp(*s.clamp) : BoundaryPolicy::reflect();
    cfg.threads = g.threads;
    return cfg;
}

std::vector<double> parse_grid(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw DomainError(std::string("malformed ") + what + " entry '" + item + "'");
        }
    }
    if (out.empty()) throw DomainError(std::string(what) + " is empty");
    for (double v : out) {
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " entries must be positive");
    }
    return out;
}

// A finished command: the payload text plus its exit code.
struct Outcome {
    std::string payload;
    int code = kOk;
    std::string diagnostic;
};

Outcome single_result(const nlohmann::json& body, const GlobalArgs& g, int code = kOk) {
    if (g.format == "csv") return {render_csv(object_to_table(body), g.seed), code, {}};
    nlohmann::json j = nlohmann::json::object();
    j["schema_version"] = kSchemaVersion;
    j["seed"] = g.seed;
    j.update(body);
    return {render_json(j), code, {}};
}

nlohmann::json exp_bound_json(const ExpFunctionalBound& r, ConstantMode mode) {
    nlohmann::json j = to_json(r.result);
    j["t_av"] = r.t_av;
    j["f_norm"] = r.f_norm;
    j["centering_rate"] = r.centering_rate;
    j["centering"] = r.centering;
    j["constants"] = mode == ConstantMode::literal ? "literal" : "corrected";
    return j;
}

// ---- verify ---------------------------------------------------------------

struct VerifyArgs {
    std::string t_grid = "100,200,400";
    std::string eps_grid = "0.05,0.1,0.2";
    double bound_scale = 1.0;
    bool paper_constant = false;
    double confidence_delta = kDefaultConfidenceDelta;
};

struct CenteredBound {
    std::function<BoundResult(double t, double eps)> bound;
    double pi_f = 0.0;
    std::string label;
};

CenteredBound choose_bound(const DiffusionSpec& spec, const Observable& f, const ObservableArgs& fa,
                           bool paper_constant) {
    CenteredBound cb;
    const auto* tan = std::get_if<TanOUParams>(&spec.closed_form());
    const bool exp_obs = fa.kind == "exp" || (fa.kind.empty() && tan);
    if (tan && tan->rho == 0.5 && exp_obs) {
        const double u = fa.u.value_or(1.0);
        const ConstantMode mode = paper_constant ? ConstantMode::literal : ConstantMode::corrected;
        cb.pi_f = tanou_expfunc_bound(1.0, 1.0, u, mode).centering_rate;
        cb.bound = [u, mode](double t, double eps) { return tanou_expfunc_bound(t, eps, u, mode).result; };
        cb.label = paper_constant ? "tanou-exp(paper constants)" : "tanou-exp";
        return cb;
    }
    if (paper_constant) throw DomainError("--paper-constant applies only to tan-OU(rho=0.5) with --f exp");

    const auto seq = eigen_sequence_for(spec);
    if (!seq) throw DomainError("verify needs a model with a known spectrum (jacobi or tanou)");
    const double t_av = eigentime(*seq).value;
    cb.pi_f = pi_integral(spec, f);
    if (std::holds_alternative<JacobiParams>(spec.closed_form()) && f.sup_norm == 1.0) {
        cb.bound = [t_av](double t, double eps) { return jacobi_occupation_bound(t, eps, t_av); };
        cb.label = "jacobi-occupation";
    } else {
        const double f_norm = f.sup_norm;
        const double q_norm = q_sharp_norm_bound(t_av);
        cb.bound = [f_norm, q_norm](double t, double eps) { return hoeffding_bound({t, eps, f_norm, q_norm}); };
        cb.label = "hoeffding";
    }
    return cb;
}

Outcome cmd_verify(const DiffusionSpec& spec, const ObservableArgs& fa, const SimArgs& sa, const VerifyArgs& va,
                   const GlobalArgs& g) {
    if (!(va.bound_scale > 0.0)) throw DomainError("--bound-scale must be positive");
    if (!(va.confidence_delta > 0.0 && va.confidence_delta < 1.0)) {
        throw DomainError("--confidence-delta must lie in (0, 1)");
    }
    const Observable f = build_observable(fa, spec);
    std::vector<double> ts = parse_grid(va.t_grid, "--t-grid");
    const std::vector<double> epss = parse_grid(va.eps_grid, "--eps-grid");
    const CenteredBound cb = choose_bound(spec, f, fa, va.paper_constant);

    std::vector<double> checkpoints = ts;
    std::sort(checkpoints.begin(), checkpoints.end());
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
    const SimConfig cfg = build_sim(sa, g, checkpoints.back());

    std::vector<std::vector<double>> ensemble;
    try {
        ensemble = simulate_ensemble(spec, f, cfg, checkpoints);
    } catch (const NumericalError& e) {
        return {{}, kSimulationFailed, std::string("simulation failed: ") + e.what()};
    }

    Table table;
    table.header = {"t", "eps", "threshold", "bound", "k", "n", "p_hat", "ci_upper", "dominated"};
    std::size_t violations = 0;
    for (double t : ts) {
        const std::size_t c = static_cast<std::size_t>(
            std::lower_bound(checkpoints.begin(), checkpoints.end(), t) - checkpoints.begin());
        for (double eps : epss) {
            std::uint64_t k = 0;
            for (const auto& path : ensemble) k += path[c] - cb.pi_f >= eps ? 1 : 0;
            const TailEstimate est = make_tail_estimate(k, cfg.n_paths, eps, cb.pi_f, va.confidence_delta);
            const BoundResult br = cb.bound(t, eps);

            std::string bound_cell = "vacuous";
            bool dominated = true;
            if (br.valid) {
                const double scaled = std::min(*br.bound * va.bound_scale, 1.0);
                bound_cell = format_double(scaled);
                dominated = scaled >= 1.0 || est.ci_upper <= scaled;
            }
            if (!dominated) ++violations;
            table.rows.push_back({format_double(t), format_double(eps), format_double(br.threshold), bound_cell,
                                  std::to_string(est.k), std::to_string(est.n), format_double(est.p_hat),
                                  format_double(est.ci_upper), dominated ? "true" : "false"});
        }
    }

    Outcome o;
    const std::vector<std::string> comments = {
        "model=" + spec.name(), "observable=" + f.label, "bound=" + cb.label, "pi_f=" + format_double(cb.pi_f),
        "dt=" + format_double(cfg.dt), "confidence_delta=" + format_double(va.confidence_delta),
        "bound_scale=" + format_double(va.bound_scale)};
    if (g.format == "json") {
        nlohmann::json j;
        j["schema_version"] = kSchemaVersion;
        j["seed"] = g.seed;
        j["model"] = spec.name();
        j["observable"] = f.label;
        j["bound"] = cb.label;
        j["pi_f"] = cb.pi_f;
        j["dt"] = cfg.dt;
        j["confidence_delta"] = va.confidence_delta;
        j["bound_scale"] = va.bound_scale;
        j["rows"] = table_to_json(table);
        o.payload = render_json(j);
    } else {
        o.payload = render_csv(table, g.seed, comments);
    }
    if (violations > 0) {
        o.code = kNotDominated;
        o.diagnostic = std::to_string(violations) + " valid cell(s) not dominated by the bound";
    }
    return o;
}

// ---- simulate -------------------------------------------------------------

Outcome cmd_simulate(const DiffusionSpec& spec, const ObservableArgs& fa, const SimArgs& sa, double t,
                     const GlobalArgs& g) {
    const Observable f = build_observable(fa, spec);
    const SimConfig cfg = build_sim(sa, g, t);
    const double checkpoint[] = {t};
    std::vector<std::vector<double>> ensemble;
    try {
        ensemble = simulate_ensemble(spec, f, cfg, checkpoint);
    } catch (const NumericalError& e) {
        return {{}, kSimulationFailed, std::string("simulation failed: ") + e.what()};
    }
    double sum = 0.0;
    for (const auto& v : ensemble) sum += v[0];
    const double n = static_cast<double>(ensemble.size());
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& v : ensemble) ss += (v[0] - mean) * (v[0] - mean);
    const double se = ensemble.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;

    if (g.format == "csv") {
        Table table;
        table.header = {"path", "time_average"};
        for (std::size_t i = 0; i < ensemble.size(); ++i) {
            table.rows.push_back({std::to_string(i), format_double(ensemble[i][0])});
        }
        return {render_csv(table, g.seed, {"model=" + spec.name(), "observable=" + f.label,
                                           "t=" + format_double(t), "dt=" + format_double(cfg.dt)}),
                kOk,
                {}};
    }
    nlohmann::json j;
    j["model"] = spec.name();
    j["observable"] = f.label;
    j["t"] = t;
    j["dt"] = cfg.dt;
    j["n_paths"] = cfg.n_paths;
    j["x0"] = start_point(cfg, spec);
    j["mean"] = mean;
    j["std_error"] = se;
    return single_result(j, g);
}

// ---- dispatch ---------------------------------------------------------------

void collect_flags(const CLI::App* app, std::map<std::string, std::string>& flags) {
    for (const CLI::Option* opt : app->get_options()) {
        if (opt->count() == 0) continue;
        std::string name = opt->get_name(false, true);
        if (name.empty() || name == "--help" || name == "--out" || name == "--manifest") continue;
        std::string joined;
        for (const auto& r : opt->results()) joined += (joined.empty() ? "" : ",") + r;
        flags[name] = joined;
    }
}

int finish(const Outcome& o, const GlobalArgs& g, const RunManifest& base, std::ostream& out, std::ostream& err) {
    if (!o.payload.empty()) {
        if (g.out.empty()) {
            out << o.payload;
        } else {
            std::ofstream os(g.out, std::ios::binary);
            if (!os) {
                err << "error: cannot write " << g.out << '\n';
                return kBadFlags;
            }
            os << o.payload;
        }
    }
    const std::string manifest_path = !g.manifest.empty() ? g.manifest : g.out.empty() ? "" : g.out + ".manifest.json";
    if (!manifest_path.empty()) {
        RunManifest m = base;
        if (!g.out.empty()) m.outputs.push_back(g.out);
        write_manifest(manifest_path, m);
    }
    if (!o.diagnostic.empty()) err << o.diagnostic << '\n';
    return o.code;
}

int run_impl(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth) {
    CLI::App app{"Concentration bounds for time averages of ergodic one-dimensional diffusions", "ergobound"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalArgs g;
    app.add_option("--seed", g.seed, "RNG seed");
    app.add_option("--out", g.out, "Write the payload here (and a manifest next to it)");
    app.add_option("--manifest", g.manifest, "Manifest path (default: <out>.manifest.json)");
    app.add_option("--format", g.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--threads", g.threads, "Worker threads for path simulation")->check(CLI::Range(1u, 1024u));

    // bound
    BoundQuery bq{};
    auto* bound = app.add_subcommand("bound", "Tail bound from explicit norms");
    bound->add_option("--t", bq.t, "Horizon")->required();
    bound->add_option("--eps", bq.eps, "Deviation")->required();
    bound->add_option("--f-norm", bq.f_norm, "sup |f|")->required();
    bound->add_option("--q-norm", bq.q_norm, "Norm of the deviation kernel")->required();

    // jacobi-bound
    double jt = 0.0, jeps = 0.0;
    std::optional<double> jtav, jb, jsigma2;
    auto* jbound = app.add_subcommand("jacobi-bound", "Occupation-time bound for the Jacobi process");
    jbound->add_option("--t", jt, "Horizon")->required();
    jbound->add_option("--eps", jeps, "Deviation")->required();
    auto* jtav_opt = jbound->add_option("--t-av", jtav, "Eigentime (skips the spectral sum)");
    auto* jb_opt = jbound->add_option("--b", jb, "Jacobi b");
    auto* js_opt = jbound->add_option("--sigma2", jsigma2, "Jacobi sigma^2");
    jtav_opt->excludes(jb_opt)->excludes(js_opt);
    jb_opt->needs(js_opt);
    js_opt->needs(jb_opt);

    // tanou-bound
    double tt = 0.0, teps = 0.0, tu = 0.0;
    bool tliteral = false;
    auto* tbound = app.add_subcommand("tanou-bound", "Exponential-functional bound for tan-OU(rho=1/2)");
    tbound->add_option("--t", tt, "Horizon")->required();
    tbound->add_option("--eps", teps, "Deviation")->required();
    tbound->add_option("--u", tu, "Exponent u of exp(u x)")->required();
    tbound->add_flag("--paper-constant", tliteral, "Use the printed constants verbatim");

    // check / tav / pi
    ModelArgs check_m, tav_m, pi_m, sim_m, ver_m;
    double tav_tol = kDefaultEigentimeTol;
    auto* check = app.add_subcommand("check", "Uniform-ergodicity criteria");
    add_model_options(check, check_m);
    auto* tav = app.add_subcommand("tav", "Eigentime t_av and the derived norm bound");
    add_model_options(tav, tav_m);
    tav->add_option("--tol", tav_tol, "Truncation tolerance");
    ObservableArgs pi_f, sim_f, ver_f;
    auto* pi = app.add_subcommand("pi", "Stationary mean pi(f)");
    add_model_options(pi, pi_m);
    add_observable_options(pi, pi_f);

    // simulate
    SimArgs sim_s;
    double sim_t = 1.0;
    auto* simulate = app.add_subcommand("simulate", "Ensemble of time averages");
    add_model_options(simulate, sim_m);
    add_observable_options(simulate, sim_f);
    add_sim_options(simulate, sim_s);
    simulate->add_option("--t", sim_t, "Horizon")->required();
    sim_s.paths = 1000;

    // verify
    SimArgs ver_s;
    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Monte Carlo check that the bound dominates empirical tails");
    add_model_options(verify, ver_m);
    add_observable_options(verify, ver_f);
    add_sim_options(verify, ver_s);
    verify->add_option("--t-grid", va.t_grid, "Comma-separated horizons");
    verify->add_option("--eps-grid", va.eps_grid, "Comma-separated deviations");
    verify->add_option("--bound-scale", va.bound_scale, "Multiply the bound (harness self-test)");
    verify->add_option("--confidence-delta", va.confidence_delta, "Clopper-Pearson level is 1 - delta");
    verify->add_flag("--paper-constant", va.paper_constant, "tan-OU: printed constants verbatim");

    // replay
    std::string replay_path;
    auto* replay = app.add_subcommand("replay", "Re-run a manifest");
    replay->add_option("manifest", replay_path, "Manifest file")->required();

    std::vector<const char*> argv{"ergobound"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, e2;
        const int code = app.exit(e, o, e2);
        out << o.str();
        err << e2.str();
        return code == 0 ? kOk : kBadFlags;
    }

    CLI::App* sub = app.get_subcommands().front();
    RunManifest base;
    base.command = sub->get_name();
    base.seed = g.seed;
    base.args = strip_output_args(args);
    collect_flags(&app, base.flags);
    collect_flags(sub, base.flags);

    try {
        if (sub == replay) {
            if (depth > 0) throw DomainError("a manifest cannot replay another manifest");
            const RunManifest m = read_manifest(replay_path);
            std::vector<std::string> again = m.args;
            if (!g.out.empty()) {
                again.push_back("--out");
                again.push_back(g.out);
            } else if (!m.outputs.empty()) {
                again.push_back("--out");
                again.push_back(m.outputs.front());
            }
            if (!g.manifest.empty()) {
                again.push_back("--manifest");
                again.push_back(g.manifest);
            }
            return run_impl(again, out, err, depth + 1);
        }

        if (g.format.empty()) g.format = sub == verify ? "csv" : "json";

        Outcome o;
        if (sub == bound) {
            const BoundResult r = hoeffding_bound(bq);
            o = single_result(to_json(r), g, r.valid ? kOk : kBelowThreshold);
        } else if (sub == jbound) {
            double t_av = 0.0;
            if (jtav) {
                t_av = *jtav;
            } else if (jb) {
                t_av = eigentime(EigenSequence::jacobi(*jb, *jsigma2)).value;
            } else {
                throw DomainError("jacobi-bound needs --t-av or both --b and --sigma2");
            }
            const BoundResult r = jacobi_occupation_bound(jt, jeps, t_av);
            nlohmann::json j = to_json(r);
            j["t_av"] = t_av;
            o = single_result(j, g, r.valid ? kOk : kBelowThreshold);
        } else if (sub == tbound) {
            const ConstantMode mode = tliteral ? ConstantMode::literal : ConstantMode::corrected;
            const ExpFunctionalBound r = tanou_expfunc_bound(tt, teps, tu, mode);
            o = single_result(exp_bound_json(r, mode), g, r.result.valid ? kOk : kBelowThreshold);
        } else if (sub == check) {
            const DiffusionSpec spec = build_model(check_m);
            nlohmann::json j = to_json(assess(spec, eigen_sequence_for(spec)));
            j["model"] = spec.name();
            o = single_result(j, g);
        } else if (sub == tav) {
            const DiffusionSpec spec = build_model(tav_m);
            const auto seq = eigen_sequence_for(spec);
            if (!seq) throw DomainError("no known eigenvalue sequence for " + spec.name());
            const EigentimeResult r = eigentime(*seq, tav_tol);
            nlohmann::json j;
            j["model"] = spec.name();
            j["t_av"] = r.value;
            j["uncertainty"] = r.uncertainty;
            j["terms"] = r.terms;
            j["q_sharp_norm_bound"] = q_sharp_norm_bound(r.value);
            o = single_result(j, g);
        } else if (sub == pi) {
            const DiffusionSpec spec = build_model(pi_m);
            const Observable f = build_observable(pi_f, spec);
            nlohmann::json j;
            j["model"] = spec.name();
            j["observable"] = f.label;
            j["pi_f"] = pi_integral(spec, f);
            o = single_result(j, g);
        } else if (sub == simulate) {
            o = cmd_simulate(build_model(sim_m), sim_f, sim_s, sim_t, g);
        } else if (sub == verify) {
            o = cmd_verify(build_model(ver_m), ver_f, ver_s, va, g);
        }
        for (const ModelArgs* m : {&check_m, &tav_m, &pi_m, &sim_m, &ver_m}) {
            if (!m->file.empty()) base.model_file = m->file;
        }
        return finish(o, g, base, out, err);
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kBadFlags;
    } catch (const InapplicableError& e) {
        err << "error: " << e.what() << '\n';
        return kBadFlags;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kSimulationFailed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kBadFlags;
    }
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    return run_impl(args, out, err, 0);
}

} // namespace ergobound::cli
