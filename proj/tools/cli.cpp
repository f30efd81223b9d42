#include "crane/cli.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "crane/error.hpp"
#include "crane/harness.hpp"
#include "crane/ident.hpp"

namespace crane {

using nlohmann::json;

namespace {

int exit_for(ErrorKind k)
{
    switch (k) {
    case ErrorKind::Config:
    case ErrorKind::InvalidParameter: return ExitConfig;
    case ErrorKind::Io: return ExitIo;
    default: return ExitSimulation;
    }
}

AxisKind parse_axis(const std::string& s)
{
    if (s == "x" || s == "traveling")
        return AxisKind::Traveling;
    if (s == "y" || s == "traversing")
        return AxisKind::Traversing;
    if (s == "l" || s == "hoisting")
        return AxisKind::Hoisting;
    throw Error(ErrorKind::Config, "axis must be x, y or l");
}

AxisData read_axis_csv(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw Error(ErrorKind::Io, "cannot read " + path);
    std::string line;
    std::getline(is, line);
    if (line != "voltage,position")
        throw Error(ErrorKind::Io, "identification CSV must have header voltage,position");
    AxisData d;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw Error(ErrorKind::Io, "malformed row: " + line);
        d.voltage.push_back(std::stod(line.substr(0, comma)));
        d.position.push_back(std::stod(line.substr(comma + 1)));
    }
    return d;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw Error(ErrorKind::Io, "cannot open " + path);
    return os;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out)
{
    if (path.empty() || path == "-") {
        out << text << '\n';
        return;
    }
    auto os = open_out(path);
    os << text << '\n';
    if (!os)
        throw Error(ErrorKind::Io, "write failed for " + path);
}

json audit_json(const ScenarioConfig& cfg)
{
    const DiscretePlantModel m = model_from_params(CraneParameters::laboratory(cfg.m), cfg.Ts);
    const StabilityAudit a = stability_audit(m, cfg.sfb.K, cfg.sfb.L);
    json j;
    json K = json::array(), L = json::array();
    for (int i = 0; i < 3; ++i) {
        K.push_back({cfg.sfb.K(i, 2 * i), cfg.sfb.K(i, 2 * i + 1)});
        L.push_back({cfg.sfb.L(2 * i, i), cfg.sfb.L(2 * i + 1, i)});
    }
    j["K"] = K;
    j["L"] = L;
    j["rho_feedback"] = a.rho_feedback;
    j["rho_observer"] = a.rho_observer;
    j["rho_combined"] = a.rho_combined;
    json dob = json::array();
    bool dob_pass = true;
    for (int i = 0; i < 3; ++i) {
        const DobAudit d = dob_pole_audit(m.axes[i], cfg.sfb.L.block<2, 1>(2 * i, i), cfg.sfb.Lw[i]);
        json roots = json::array();
        for (const auto& r : d.roots)
            roots.push_back({r.real(), r.imag()});
        dob.push_back({{"lw", cfg.sfb.Lw[i]}, {"roots", roots}, {"max_modulus", d.max_modulus}, {"pass", d.pass}});
        dob_pass = dob_pass && d.pass;
    }
    j["dob"] = dob;
    j["swing_observer_radius"] = cfg.swing_observer.spectral_radius();
    j["swing_gains_valid"] = cfg.swing.gains_valid();
    j["pass"] = a.pass && dob_pass && cfg.swing_observer.stable();
    return j;
}

struct ScenarioFlags {
    std::string config, preset = "slow", controller = "sfb";
    int scenario = 3;
    double mass = 0.8;
};

ScenarioConfig scenario_from(const ScenarioFlags& f)
{
    if (!f.config.empty())
        return load_config(f.config);
    if (f.controller != "mpc" && f.controller != "sfb")
        throw Error(ErrorKind::Config, "controller must be mpc or sfb");
    ScenarioConfig c = ScenarioConfig::canonical(
        f.scenario, f.controller == "mpc" ? ControllerKind::Mpc : ControllerKind::Sfb, f.preset, f.mass);
    c.validate();
    return c;
}

void add_scenario_flags(CLI::App* sub, ScenarioFlags& f)
{
    sub->add_option("-c,--config", f.config, "scenario config (JSON)");
    sub->add_option("--preset", f.preset, "slow or fast");
    sub->add_option("--controller", f.controller, "mpc or sfb");
    sub->add_option("--scenario", f.scenario, "1, 2 or 3");
    sub->add_option("--mass", f.mass, "load mass (kg)");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"overhead crane simulation and control toolkit", "crane"};
    app.require_subcommand(1);

    ScenarioFlags flags;
    std::string log_path, metrics_path, out_path, csv_path, axis_name = "x";
    double Ts = 0.01, duration = 20.0, amplitude = 12.0;
    std::uint64_t seed = 3;

    auto* identify = app.add_subcommand("identify", "RLS identification from a CSV or a simulated experiment");
    identify->add_option("--csv", csv_path, "CSV with header voltage,position");
    identify->add_option("--axis", axis_name, "x, y or l");
    identify->add_option("--mass", flags.mass, "known load mass (kg)");
    identify->add_option("--Ts", Ts, "sample time (s)");
    identify->add_option("--duration", duration, "simulated experiment length (s)");
    identify->add_option("--amplitude", amplitude, "excitation peak voltage");
    identify->add_option("--seed", seed, "excitation seed");
    identify->add_option("-o,--out", out_path, "JSON output (default stdout)");

    auto* plan = app.add_subcommand("plan", "emit the reference profiles of one transition as CSV");
    add_scenario_flags(plan, flags);
    plan->add_option("-o,--out", out_path, "CSV output (default stdout)");

    auto* simulate = app.add_subcommand("simulate", "run a closed-loop scenario");
    add_scenario_flags(simulate, flags);
    simulate->add_option("--log", log_path, "CSV log output");
    simulate->add_option("--metrics", metrics_path, "JSON metrics output (default stdout)");

    auto* audit = app.add_subcommand("audit", "stability, disturbance observer and swing observer audits");
    add_scenario_flags(audit, flags);
    audit->add_option("-o,--out", out_path, "JSON output (default stdout)");

    auto* metrics = app.add_subcommand("metrics", "recompute metrics from a CSV log");
    add_scenario_flags(metrics, flags);
    metrics->add_option("--log", log_path, "CSV log input")->required();
    metrics->add_option("-o,--out", out_path, "JSON output (default stdout)");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return ExitConfig;
    }

    try {
        if (identify->parsed()) {
            const AxisKind kind = parse_axis(axis_name);
            const CraneParameters p = CraneParameters::laboratory(flags.mass);
            const AxisKnowns kn = knowns_for(p, kind, Ts);
            AxisData data;
            if (!csv_path.empty()) {
                data = read_axis_csv(csv_path);
            } else {
                data = plant_experiment(p, kind, generate_excitation(duration, Ts, amplitude, seed), Ts);
            }
            const IdentResult r = identify_axis(data, kind, kn);
            const ValidationMse mse = validate_model(r.axis, data, kind, kn);
            json j = {{"axis", axis_name}, {"J", r.axis.J},   {"B", r.axis.B},
                      {"a1", r.axis.a1},   {"a2", r.axis.a2}, {"mse_position", mse.position},
                      {"mse_velocity", mse.velocity}};
            write_text(out_path, j.dump(2), out);
        } else if (plan->parsed()) {
            const ScenarioConfig cfg = scenario_from(flags);
            ReferenceGenerator gen(cfg.transition(), cfg.Ts, cfg.limits, cfg.rest, cfg.mode);
            SwingControlConfig off;
            off.enabled = false;
            std::ostringstream ss;
            ss << "t,x,vx,ax,y,vy,ay,l,vl,al\n" << std::setprecision(12);
            while (!gen.finished()) {
                const ReferenceSample& s = gen.command({}, off, cfg.mode);
                ss << gen.step_index() * cfg.Ts << ',' << s.x_rm[0] << ',' << s.x_rm[1] << ',' << s.u_c[0] << ','
                   << s.x_rm[2] << ',' << s.x_rm[3] << ',' << s.u_c[1] << ',' << s.x_rm[4] << ',' << s.x_rm[5] << ','
                   << s.u_c[2] << '\n';
                gen.advance();
            }
            std::string text = ss.str();
            text.pop_back();
            write_text(out_path, text, out);
        } else if (simulate->parsed()) {
            const ScenarioConfig cfg = scenario_from(flags);
            const ScenarioResult r = run_scenario(cfg);
            if (!log_path.empty())
                export_log(r.log, r.metrics, "csv", log_path);
            write_text(metrics_path, metrics_json(r.metrics, &cfg), out);
        } else if (audit->parsed()) {
            write_text(out_path, audit_json(scenario_from(flags)).dump(2), out);
        } else if (metrics->parsed()) {
            const ScenarioConfig cfg = scenario_from(flags);
            std::ifstream is(log_path);
            if (!is)
                throw Error(ErrorKind::Io, "cannot read " + log_path);
            const SimulationLog log = read_csv(is, cfg.Ts);
            write_text(out_path, metrics_json(compute_metrics(log, cfg)), out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return ExitSimulation;
    }
    return ExitOk;
}

}  // namespace crane
