#include "qcons/cli.hpp"

#include "qcons/bloch.hpp"
#include "qcons/errors.hpp"
#include "qcons/integrator.hpp"
#include "qcons/io.hpp"
#include "qcons/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace qcons::cli {

namespace {

using nlohmann::json;

// Input problems that map to exit code 2.
class BadInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

double parse_number(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw BadInput("not a finite number: '" + std::string(s) + "'");
    }
    return v;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::string_view rest = s;
    while (true) {
        const auto comma = rest.find(',');
        out.push_back(parse_number(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

// Raw option strings, as given on the command line.
struct Flags {
    std::string config, model, energies, omega, q0, p0, t_end, dt, scheme, projection, out, format,
        tolerance, drift_tol, fix, resolution;
};

void add_run_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "JSON config file; explicit flags override it");
    cmd->add_option("--model", f.model,
                    "two-spin-product | three-spin-product | two-spin-disentangled | unconstrained");
    cmd->add_option("--energies", f.energies, "energy levels E1,...,En");
    cmd->add_option("--omega", f.omega, "frequencies w1,...,w_{n-1} (w_i = E_i - E_n)");
    cmd->add_option("--out", f.out, "output path (default: stdout)");
    cmd->add_option("--format", f.format, "csv | json");
}

void add_integration_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--q0", f.q0, "initial phases q1,...,q_{n-1} (radians)");
    cmd->add_option("--p0", f.p0, "initial populations p1,...,p_{n-1}");
    cmd->add_option("--t-end", f.t_end, "integration horizon");
    cmd->add_option("--dt", f.dt, "step (RK4) or initial step (RK45)");
    cmd->add_option("--scheme", f.scheme, "rk4 | rk45");
    cmd->add_option("--projection", f.projection, "off | every-step | threshold[=eps]");
    cmd->add_option("--tolerance", f.tolerance, "RK45 local error tolerance");
    cmd->add_option("--drift-tol", f.drift_tol, "admissible initial residual / drift scale");
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw BadInput("cannot open config file " + path);
    try {
        json j = json::parse(in);
        if (!j.is_object()) throw BadInput("config file must contain a JSON object");
        return j;
    } catch (const json::exception& e) {
        throw BadInput(std::string("invalid config file: ") + e.what());
    }
}

// Merges explicit flags over the config file into one resolved JSON object.
json resolve(const Flags& f) {
    json cfg = load_config(f.config);
    auto list = [](const std::string& s) { return json(parse_list(s)); };
    if (!f.model.empty()) cfg["model"] = f.model;
    if (!f.energies.empty()) {
        cfg["energies"] = list(f.energies);
        cfg.erase("omega");
    }
    if (!f.omega.empty()) {
        cfg["omega"] = list(f.omega);
        if (f.energies.empty()) cfg.erase("energies");
    }
    if (!f.q0.empty()) cfg["q0"] = list(f.q0);
    if (!f.p0.empty()) cfg["p0"] = list(f.p0);
    if (!f.t_end.empty()) cfg["t_end"] = parse_number(f.t_end);
    if (!f.dt.empty()) cfg["dt"] = parse_number(f.dt);
    if (!f.tolerance.empty()) cfg["tolerance"] = parse_number(f.tolerance);
    if (!f.drift_tol.empty()) cfg["drift_tol"] = parse_number(f.drift_tol);
    if (!f.scheme.empty()) cfg["scheme"] = f.scheme;
    if (!f.projection.empty()) cfg["projection"] = f.projection;
    if (!f.out.empty()) cfg["out"] = f.out;
    if (!f.format.empty()) cfg["format"] = f.format;
    if (!f.fix.empty()) cfg["fix"] = f.fix;
    if (!f.resolution.empty()) cfg["resolution"] = f.resolution;
    if (!cfg.contains("format")) cfg["format"] = "csv";
    return cfg;
}

std::vector<double> numbers(const json& cfg, const char* key) {
    try {
        return cfg.at(key).get<std::vector<double>>();
    } catch (const json::exception&) {
        throw BadInput(std::string("missing or malformed '") + key + "'");
    }
}

double number_or(const json& cfg, const char* key, double fallback) {
    if (!cfg.contains(key)) return fallback;
    if (!cfg[key].is_number()) throw BadInput(std::string("'") + key + "' must be a number");
    return cfg[key].get<double>();
}

ModelId model_of(const json& cfg) {
    if (!cfg.contains("model") || !cfg["model"].is_string()) throw BadInput("--model is required");
    const auto m = parse_model(cfg["model"].get<std::string>());
    if (!m) throw BadInput("unknown model '" + cfg["model"].get<std::string>() + "'");
    return *m;
}

EnergySpectrum spectrum_of(const json& cfg, ModelId model) {
    const bool has_e = cfg.contains("energies");
    const bool has_w = cfg.contains("omega");
    if (has_e == has_w) throw BadInput("give exactly one of --energies or --omega");
    try {
        EnergySpectrum spec = has_e ? EnergySpectrum::from_levels(numbers(cfg, "energies"))
                                    : EnergySpectrum::from_frequencies(numbers(cfg, "omega"));
        if (auto n = model_levels(model); n && *n != spec.n_levels()) {
            throw BadInput(std::string(model_name(model)) + " needs " + std::to_string(*n) +
                           " levels, got " + std::to_string(spec.n_levels()));
        }
        return spec;
    } catch (const Error& e) {
        throw BadInput(e.what());
    }
}

PhasePoint initial_point(const json& cfg, int n) {
    const auto q = numbers(cfg, "q0");
    const auto p = numbers(cfg, "p0");
    if (static_cast<int>(q.size()) != n - 1 || static_cast<int>(p.size()) != n - 1) {
        throw BadInput("--q0 and --p0 need " + std::to_string(n - 1) + " entries each");
    }
    PhasePoint pt{Eigen::Map<const Vec>(q.data(), n - 1), Eigen::Map<const Vec>(p.data(), n - 1)};
    try {
        validate(pt, n);
    } catch (const Error& e) {
        throw BadInput(std::string("initial point: ") + e.what());
    }
    return pt;
}

IntegratorConfig integrator_of(json& cfg, ModelId model) {
    IntegratorConfig ic;
    ic.dt = number_or(cfg, "dt", ic.dt);
    ic.t_end = number_or(cfg, "t_end", ic.t_end);
    ic.tolerance = number_or(cfg, "tolerance", ic.tolerance);
    ic.drift_tol = number_or(cfg, "drift_tol", ic.drift_tol);
    const std::string scheme = cfg.value("scheme", std::string("rk4"));
    if (scheme == "rk4") ic.scheme = Scheme::RK4;
    else if (scheme == "rk45") ic.scheme = Scheme::RK45;
    else throw BadInput("unknown scheme '" + scheme + "'");
    if (!cfg.contains("projection")) {
        cfg["projection"] = model == ModelId::TwoSpinDisentangled ? "threshold" : "off";
    }
    const std::string proj = cfg.value("projection", std::string("off"));
    if (proj == "off") {
        ic.projection = ProjectionMode::Off;
    } else if (proj == "every-step") {
        ic.projection = ProjectionMode::EveryStep;
    } else if (proj.rfind("threshold", 0) == 0) {
        ic.projection = ProjectionMode::Threshold;
        if (proj.size() > 9) {
            if (proj[9] != '=') throw BadInput("projection must be threshold or threshold=<eps>");
            ic.projection_threshold = parse_number(proj.substr(10));
        }
    } else {
        throw BadInput("unknown projection mode '" + proj + "'");
    }
    try {
        ic.validate();
    } catch (const Error& e) {
        throw BadInput(e.what());
    }
    return ic;
}

std::string format_of(const json& cfg) {
    const std::string f = cfg.value("format", std::string("csv"));
    if (f != "csv" && f != "json") throw BadInput("format must be csv or json");
    return f;
}

// Writes through a callback to the configured path or to out.
template <typename Writer>
void emit(const json& cfg, std::ostream& out, Writer&& write) {
    const std::string path = cfg.value("out", std::string());
    if (path.empty() || path == "-") {
        write(out);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw BadInput("cannot open output file " + path);
    write(file);
}

std::ostream& summary_stream(const json& cfg, std::ostream& out, std::ostream& err) {
    const std::string path = cfg.value("out", std::string());
    return (path.empty() || path == "-") ? err : out;
}

int cmd_simulate(const Flags& flags, std::ostream& out, std::ostream& err) {
    json cfg = resolve(flags);
    const ModelId model = model_of(cfg);
    const EnergySpectrum spec = spectrum_of(cfg, model);
    const PhasePoint pt0 = initial_point(cfg, spec.n_levels());
    const IntegratorConfig ic = integrator_of(cfg, model);
    const std::string format = format_of(cfg);
    const ConstraintSet cs = model_constraints(model, spec.n_levels(), ic.singularity_floor);

    double r0 = 0.0;
    try {
        r0 = cs.max_residual(to_coords(pt0));
    } catch (const ChartSingularity& e) {
        throw BadInput(std::string("initial point: ") + e.what());
    }
    if (r0 > ic.drift_tol) {
        std::ostringstream msg;
        msg << "initial point is off the " << model_name(model) << " surface: max |Phi| = "
            << format_double(r0) << " > drift_tol " << format_double(ic.drift_tol);
        const Vec phi = cs.values(pt0);
        for (int a = 0; a < cs.size(); ++a) msg << "\n  " << cs.labels()[a] << " = " << format_double(phi[a]);
        throw BadInput(msg.str());
    }

    Trajectory traj;
    try {
        traj = integrate(cs, spec, pt0, ic);
    } catch (const SingularOmega& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeSingularity;
    } catch (const ChartSingularity& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeSingularity;
    }

    emit(cfg, out, [&](std::ostream& os) {
        if (format == "json") {
            os << trajectory_to_json(traj, cfg).dump(1) << '\n';
        } else {
            write_trajectory_csv(os, traj, cfg);
        }
    });

    double e_drift = 0.0, p_drift = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        e_drift = std::max(e_drift, std::abs(traj.energies[k] - traj.energies.front()));
        p_drift = std::max(p_drift, (traj.points[k].p - pt0.p).cwiseAbs().maxCoeff());
    }
    std::ostream& s = summary_stream(cfg, out, err);
    s << "status: " << status_name(traj.status) << '\n'
      << "steps: " << traj.size() - 1 << '\n'
      << "final_time: " << format_double(traj.times.back()) << '\n'
      << "final_residual: " << format_double(traj.residuals.back()) << '\n'
      << "energy_drift: " << format_double(e_drift) << '\n'
      << "max_population_drift: " << format_double(p_drift) << '\n'
      << "quasi_unitary: " << (p_drift < 1e-8 ? "true" : "false") << '\n';
    if (!traj.completed()) {
        err << "error: " << traj.message << '\n';
        return kRuntimeSingularity;
    }
    return kOk;
}

FixedAngles parse_fix(const std::string& s) {
    FixedAngles fx;
    bool have_theta = false;
    std::string_view rest = s;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view item = rest.substr(0, comma);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) throw BadInput("--fix expects name=value pairs");
        const std::string_view key = item.substr(0, eq);
        const double v = parse_number(item.substr(eq + 1));
        if (key == "theta2") {
            fx.theta2 = v;
            have_theta = true;
        } else if (key == "phi2") {
            fx.phi2 = v;
        } else {
            throw BadInput("unknown fixed angle '" + std::string(key) + "'");
        }
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    if (!have_theta) throw BadInput("--fix must set theta2");
    return fx;
}

std::pair<int, int> parse_resolution(const std::string& s) {
    const auto x = s.find('x');
    if (x == std::string::npos) throw BadInput("--resolution expects <n_theta>x<n_phi>");
    int a = 0, b = 0;
    const auto ra = std::from_chars(s.data(), s.data() + x, a);
    const auto rb = std::from_chars(s.data() + x + 1, s.data() + s.size(), b);
    if (ra.ec != std::errc() || ra.ptr != s.data() + x || rb.ec != std::errc() ||
        rb.ptr != s.data() + s.size()) {
        throw BadInput("--resolution expects <n_theta>x<n_phi>");
    }
    if (a < 2 || b < 2) throw BadInput("--resolution must be at least 2x2");
    return {a, b};
}

int cmd_field(const Flags& flags, std::ostream& out, std::ostream& err) {
    const json cfg = resolve(flags);
    const ModelId model = model_of(cfg);
    if (model != ModelId::TwoSpinProduct && model != ModelId::TwoSpinDisentangled) {
        throw BadInput("field snapshots exist for two-spin-product and two-spin-disentangled only");
    }
    const EnergySpectrum spec = spectrum_of(cfg, model);
    const FixedAngles fixed = parse_fix(cfg.value("fix", std::string()));
    const auto [nt, np] = parse_resolution(cfg.value("resolution", std::string("32x64")));
    const std::string format = format_of(cfg);
    FieldGrid grid;
    try {
        grid = field_grid(model, spec, fixed, nt, np);
    } catch (const DomainError& e) {
        throw BadInput(e.what());
    }
    emit(cfg, out, [&](std::ostream& os) {
        if (format == "json") {
            os << field_to_json(grid, cfg).dump(1) << '\n';
        } else {
            write_field_csv(os, grid, cfg);
        }
    });
    const auto flagged = std::count_if(grid.samples.begin(), grid.samples.end(),
                                       [](const FieldSample& s) { return s.flag != SampleFlag::Ok; });
    summary_stream(cfg, out, err) << "samples: " << grid.samples.size() << '\n'
                                  << "flagged: " << flagged << '\n';
    return kOk;
}

int cmd_verify(const std::string& target, std::ostream& out) {
    std::vector<CheckResult> results;
    if (target == "all") {
        results = verify_all();
    } else if (const auto m = parse_model(target)) {
        results = verify_model(*m);
    } else {
        throw BadInput("unknown verification target '" + target + "'");
    }
    int failed = 0;
    for (const CheckResult& r : results) {
        json line = {{"suite", r.suite},
                     {"check", r.name},
                     {"passed", r.passed},
                     {"measured", r.measured},
                     {"tolerance", r.tolerance}};
        if (!r.detail.empty()) line["detail"] = r.detail;
        out << line.dump() << '\n';
        failed += r.passed ? 0 : 1;
    }
    out << json{{"total", results.size()}, {"failed", failed}}.dump() << '\n';
    return failed == 0 ? kOk : kVerifyFailed;
}

int cmd_compare(const Flags& flags, std::ostream& out, std::ostream& err) {
    json cfg = resolve(flags);
    const ModelId model = model_of(cfg);
    const EnergySpectrum spec = spectrum_of(cfg, model);
    const PhasePoint pt0 = initial_point(cfg, spec.n_levels());
    const IntegratorConfig ic = integrator_of(cfg, model);
    const std::string format = format_of(cfg);
    const ConstraintSet cs = model_constraints(model, spec.n_levels(), ic.singularity_floor);
    if (const double r0 = cs.max_residual(to_coords(pt0)); r0 > ic.drift_tol) {
        throw BadInput("initial point is off the surface: max |Phi| = " + format_double(r0));
    }

    FlowComparison cmp;
    try {
        cmp = compare_flows(model, spec, pt0, ic);
    } catch (const SingularOmega& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeSingularity;
    } catch (const ChartSingularity& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeSingularity;
    }
    constexpr double kZero = 1e-10;
    const bool observed_zero = cmp.max_divergence < kZero;
    emit(cfg, out, [&](std::ostream& os) {
        if (format == "json") {
            json j = {{"config", cfg},
                      {"status", std::string(status_name(cmp.status))},
                      {"spectrum_condition", cmp.condition_holds},
                      {"predicted_zero_divergence", cmp.predicted_zero},
                      {"observed_zero_divergence", observed_zero},
                      {"prediction_correct", cmp.predicted_zero == observed_zero},
                      {"max_divergence", cmp.max_divergence},
                      {"initial_rate", cmp.initial_rate},
                      {"observed_rate", cmp.observed_rate},
                      {"t", cmp.times},
                      {"divergence", cmp.divergence}};
            os << j.dump(1) << '\n';
        } else {
            os << "# config: " << cfg.dump() << '\n'
               << "# status: " << status_name(cmp.status) << '\n'
               << "# spectrum_condition: " << (cmp.condition_holds ? "true" : "false") << '\n'
               << "# predicted_zero_divergence: " << (cmp.predicted_zero ? "true" : "false") << '\n'
               << "# observed_zero_divergence: " << (observed_zero ? "true" : "false") << '\n'
               << "# max_divergence: " << format_double(cmp.max_divergence) << '\n'
               << "# initial_rate: " << format_double(cmp.initial_rate) << '\n'
               << "# observed_rate: " << format_double(cmp.observed_rate) << '\n'
               << "t,divergence\n";
            for (std::size_t k = 0; k < cmp.times.size(); ++k)
                os << format_double(cmp.times[k]) << ',' << format_double(cmp.divergence[k]) << '\n';
        }
    });
    summary_stream(cfg, out, err)
        << "spectrum_condition: " << (cmp.condition_holds ? "true" : "false") << '\n'
        << "max_divergence: " << format_double(cmp.max_divergence) << '\n'
        << "initial_rate: " << format_double(cmp.initial_rate) << '\n'
        << "prediction_correct: " << (cmp.predicted_zero == observed_zero ? "true" : "false") << '\n';
    return cmp.status == RunStatus::Completed ? kOk : kRuntimeSingularity;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Constrained unitary motion on projective Hilbert space", "qcons"};
    app.require_subcommand(1);

    Flags sim_flags, field_flags, cmp_flags;
    std::string verify_target;

    auto* sim = app.add_subcommand("simulate", "integrate the constrained flow and write a trajectory");
    add_run_flags(sim, sim_flags);
    add_integration_flags(sim, sim_flags);

    auto* field = app.add_subcommand("field", "sample the sphere-form vector field on a grid");
    add_run_flags(field, field_flags);
    field->add_option("--fix", field_flags.fix, "fixed second-sphere angles, e.g. theta2=1.5707963,phi2=0");
    field->add_option("--resolution", field_flags.resolution, "grid size <n_theta>x<n_phi> (default 32x64)");

    auto* verify = app.add_subcommand("verify", "run the built-in invariant checks");
    verify->add_option("target", verify_target, "all or a model name")->required();

    auto* compare = app.add_subcommand("compare", "compare constrained and unitary flows");
    add_run_flags(compare, cmp_flags);
    add_integration_flags(compare, cmp_flags);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_flags, out, err);
        if (field->parsed()) return cmd_field(field_flags, out, err);
        if (verify->parsed()) return cmd_verify(verify_target, out);
        if (compare->parsed()) return cmd_compare(cmp_flags, out, err);
    } catch (const BadInput& e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    }
    return kBadInput;
}

}  // namespace qcons::cli
