#include "crane/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"

#include "crane/error.hpp"

namespace crane {

using nlohmann::json;

const char* to_string(ControllerKind c)
{
    return c == ControllerKind::Mpc ? "mpc" : "sfb";
}

ScenarioConfig ScenarioConfig::canonical(int scenario, ControllerKind controller, const std::string& trajectory,
                                         double m)
{
    if (scenario < 1 || scenario > 3)
        throw Error(ErrorKind::Config, "scenario must be 1, 2 or 3");
    ScenarioConfig c;
    c.controller = controller;
    c.trajectory = trajectory;
    c.m = m;
    c.feedforward = scenario == 1 ? DisturbanceSource::None : DisturbanceSource::ComputedTorque;
    c.swing_control = scenario == 3;
    return c;
}

TransitionSpec ScenarioConfig::transition() const
{
    if (trajectory == "custom")
        return custom;
    return preset_transition(trajectory);
}

void ScenarioConfig::validate() const
{
    if (!(Ts > 0) || substeps < 1 || repetitions < 1 || !(rest >= 0) || !(m >= 0) || !(mismatch > 0))
        throw Error(ErrorKind::Config, "Ts, substeps, repetitions, rest, mass or mismatch out of range");
    if (trajectory != "slow" && trajectory != "fast" && trajectory != "custom")
        throw Error(ErrorKind::Config, "trajectory must be slow, fast or custom");
    if (swing_control && !swing.gains_valid())
        throw Error(ErrorKind::Config, "swing gains below 1.5 v_l_max");
    if (!swing_observer.stable())
        throw Error(ErrorKind::Config, "swing observer gains not stable");
    try {
        mpc.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::Config, e.what());
    }
    const TransitionSpec t = transition();
    for (const auto* s : {&t.x, &t.y}) {
        if (mode == Mode::TwoD && s == &t.y)
            continue;
        const auto issues = validate_spec(*s, limits.v_max[0], limits.a_max[0], Ts);
        if (!issues.empty())
            throw Error(ErrorKind::Config, "trajectory spec: " + issues.front());
    }
    if (!(t.l_rest > 0) || !(t.l_travel > 0))
        throw Error(ErrorKind::Config, "rope lengths must be positive");
}

double distance_error(const LoadPosition& load, const Eigen::Vector3d& r)
{
    const double dx = load.x - r[0], dy = load.y - r[1], dz = load.z + r[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

namespace {

struct TransitionInfo {
    int begin = 0;
    int end = 0;
    int tf_index = 0;
    ReplanResult replan;
};

double quantize(double q, double Rp)
{
    const double res = 2 * std::numbers::pi * Rp / 4096.0;
    return std::round(q / res) * res;
}

CraneParameters true_plant(const ScenarioConfig& cfg)
{
    CraneParameters p = CraneParameters::laboratory(cfg.m);
    for (auto& a : p.axes) {
        a.J *= cfg.mismatch;
        a.B *= cfg.mismatch;
    }
    return p;
}

TransitionSpec transition_for(const ScenarioConfig& cfg, int j)
{
    const TransitionSpec base = cfg.transition();
    if (j % 2 == 0)
        return base;
    TransitionSpec t = base;
    t.x = base.x.reversed();
    if (cfg.mode == Mode::ThreeD)
        t.y = base.y.reversed();
    return t;
}

Metrics metrics_with_bounds(const SimulationLog& log, const ScenarioConfig& cfg,
                            const std::vector<TransitionInfo>& bounds)
{
    Metrics m;
    const auto& R = log.records;
    m.tracking_error.assign(R.size(), Eigen::Vector3d::Zero());
    m.eq_series.assign(R.size(), 0.0);
    double eq_sum = 0;
    for (std::size_t j = 0; j < bounds.size(); ++j) {
        const auto& b = bounds[j];
        const TransitionSpec spec = transition_for(cfg, static_cast<int>(j));
        const ReferenceGenerator gen(spec, cfg.Ts, cfg.limits, cfg.rest, cfg.mode);
        const Eigen::Vector3d fin = gen.final_point();
        TransitionMetrics tm;
        tm.index = static_cast<int>(j);
        tm.begin = b.begin;
        tm.end = b.end;
        tm.tb_decel = b.replan.tb;
        tm.replan_iterations = b.replan.iterations;
        tm.extended = b.replan.tb > spec.x.tb + 1e-12;
        for (int k = b.begin; k < b.end; ++k) {
            const auto& r = R[k];
            const Eigen::Vector3d orig = gen.original_output((k - b.begin) * cfg.Ts);
            const Eigen::Vector3d meas(r.plant.x, r.plant.y, r.plant.l);
            m.tracking_error[k] = orig - meas;
            m.max_tracking_error = m.max_tracking_error.cwiseMax((orig - meas).cwiseAbs());
            tm.max_thx = std::max(tm.max_thx, std::abs(r.plant.thx));
            tm.max_thy = std::max(tm.max_thy, std::abs(r.plant.thy));
        }
        if (b.end > b.begin) {
            const auto& last = R[b.end - 1].plant;
            tm.end_error = fin - Eigen::Vector3d(last.x, last.y, last.l);
            const int kt = std::clamp(b.tf_index, b.begin, b.end - 1);
            const auto& at = R[kt].plant;
            tm.error_at_tf = fin - Eigen::Vector3d(at.x, at.y, at.l);
        }
        m.max_end_error = m.max_end_error.cwiseMax(tm.end_error.cwiseAbs());
        m.max_theta = std::max({m.max_theta, tm.max_thx, tm.max_thy});
        m.transitions.push_back(tm);
    }
    for (std::size_t k = 0; k < R.size(); ++k) {
        const auto& r = R[k];
        m.eq_series[k] = r.eq_dist;
        eq_sum += r.eq_dist;
        m.max_eq = std::max(m.max_eq, r.eq_dist);
        m.saturation_count += r.sat ? 1 : 0;
        m.qp_fallbacks += (r.qp_status == "infeasible" || r.qp_status == "max_iterations") ? 1 : 0;
        m.max_abs_u = std::max(m.max_abs_u, r.u.cwiseAbs().maxCoeff());
        const Eigen::Vector3d y(r.plant.x, r.plant.y, r.plant.l);
        m.y_min = m.y_min.cwiseMin(y);
        m.y_max = m.y_max.cwiseMax(y);
    }
    m.mean_eq = R.empty() ? 0.0 : eq_sum / static_cast<double>(R.size());
    return m;
}

// Transition boundaries recovered from the reference column: each transition ends after a rest window in
// which the reference outputs do not move.
std::vector<TransitionInfo> detect_bounds(const SimulationLog& log, const ScenarioConfig& cfg)
{
    const TransitionSpec base = cfg.transition();
    const int n_tf = static_cast<int>(std::llround(base.x.tf / cfg.Ts));
    const int n_b = static_cast<int>(std::llround(base.x.tb / cfg.Ts));
    const int n_rest = static_cast<int>(std::llround(cfg.rest / cfg.Ts));
    const int n = static_cast<int>(log.records.size());
    const int count = 2 * cfg.repetitions;
    std::vector<TransitionInfo> out;
    int begin = 0;
    auto still = [&](int k) {
        return k > 0 && (log.records[k].ref - log.records[k - 1].ref).cwiseAbs().maxCoeff() < 1e-12;
    };
    for (int j = 0; j < count && begin < n; ++j) {
        TransitionInfo t;
        t.begin = begin;
        t.tf_index = begin + n_tf;
        t.end = std::min(n, begin + n_tf + n_rest);
        if (j + 1 < count) {
            int run = 0;
            for (int k = begin + n_tf - n_b + 1; k < n; ++k) {
                run = still(k) ? run + 1 : 0;
                if (run >= n_rest) {
                    t.tf_index = k - n_rest;
                    t.end = k - n_rest + n_rest;
                    break;
                }
            }
        } else {
            t.end = n;
            t.tf_index = std::max(begin, n - n_rest);
        }
        out.push_back(t);
        begin = t.end;
    }
    return out;
}

}  // namespace

Metrics compute_metrics(const SimulationLog& log, const ScenarioConfig& cfg)
{
    return metrics_with_bounds(log, cfg, detect_bounds(log, cfg));
}

ScenarioResult run_scenario(const ScenarioConfig& cfg)
{
    cfg.validate();
    const double Ts = cfg.Ts;
    const CraneParameters nominal = CraneParameters::laboratory(cfg.m);
    const CraneParameters plant_params = true_plant(cfg);
    const DiscretePlantModel model = model_from_params(nominal, Ts);
    const FeedforwardGains ffg = feedforward_gains(model);
    const Mat63 L = cfg.sfb.L;
    PlantOptions popt;
    popt.mode = cfg.mode;

    SwingControlConfig swing = cfg.swing;
    swing.enabled = cfg.swing_control;

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    const TransitionSpec first = transition_for(cfg, 0);
    CraneState s;
    s.x = first.x.q0;
    s.y = first.y.q0;
    s.l = first.l_rest;

    Vec6 xhat;
    xhat << s.x, 0, s.y, 0, s.l, 0;
    Eigen::Vector3d fd_dob = Eigen::Vector3d::Zero();
    SwingObserver sobs(cfg.swing_observer);
    MpcController mpc(model, cfg.mpc);

    ScenarioResult res;
    res.log.Ts = Ts;
    std::vector<TransitionInfo> bounds;
    int k_global = 0;

    for (int j = 0; j < 2 * cfg.repetitions; ++j) {
        const TransitionSpec spec = transition_for(cfg, j);
        ReferenceGenerator gen(spec, Ts, cfg.limits, cfg.rest, cfg.mode);
        TransitionInfo info;
        info.begin = k_global;
        while (!gen.finished()) {
            // sensors
            Eigen::Vector3d y(s.x, s.y, s.l);
            if (cfg.quantize)
                for (int i = 0; i < 3; ++i)
                    y[i] = quantize(y[i], nominal[i].Rp);
            double thx_m = s.thx, thy_m = s.thy;
            if (cfg.angle_noise > 0) {
                thx_m += cfg.angle_noise * noise(rng);
                thy_m += cfg.angle_noise * noise(rng);
            }
            if (cfg.mode == Mode::TwoD)
                thy_m = 0.0;

            const SwingEstimate est = sobs.estimate();
            const ReferenceSample& ref = gen.command(est, swing, cfg.mode);

            Eigen::Vector3d fd_hat = Eigen::Vector3d::Zero();
            switch (cfg.feedforward) {
            case DisturbanceSource::None: break;
            case DisturbanceSource::ComputedTorque: {
                const Eigen::Vector3d vmeas(xhat[1], xhat[3], xhat[5]);
                fd_hat = computed_torque(ref.x_rm, ref.u_c, est, nominal, popt.deadband,
                                         cfg.ct_measured_velocity ? &vmeas : nullptr)
                             .fd;
                break;
            }
            case DisturbanceSource::Observer: fd_hat = fd_dob; break;
            }

            LogRecord rec;
            Eigen::Vector3d u;
            if (cfg.controller == ControllerKind::Sfb) {
                Eigen::Vector3d u_ff = Eigen::Vector3d::Zero();
                if (cfg.feedforward != DisturbanceSource::None)
                    u_ff = feedforward_signal(ref.x_rm, ref.u_c, fd_hat, ffg);
                bool sat = false;
                u = sfb_step(xhat, ref.x_rm, u_ff, cfg.sfb.K, cfg.sfb.u_max, &sat);
                rec.sat = sat;
            } else {
                MpcDiagnostics d;
                u = mpc.step(xhat, gen.preview(cfg.mpc.Hp), fd_hat, &d);
                rec.sat = d.saturated;
                rec.qp_status = to_string(d.status);
            }
            if (cfg.mode == Mode::TwoD)
                u[AxisY] = 0.0;

            rec.t = k_global * Ts;
            rec.plant = s;
            rec.ref = Eigen::Vector3d(ref.x_rm[0], ref.x_rm[2], ref.x_rm[4]);
            rec.u = u;
            rec.fd_hat = fd_hat;
            rec.thx_hat = est.thx;
            rec.thy_hat = est.thy;
            rec.eq_dist = distance_error(load_position(s), gen.original_output(gen.step_index() * Ts));
            res.log.records.push_back(rec);

            // estimator updates use x_hat(k) before it advances
            const Vec6 xhat_k = xhat;
            xhat = state_observer_step(model, L, xhat_k, u, fd_hat, y);
            fd_dob = dob_step(fd_dob, y, xhat_k, cfg.sfb.Lw);
            sobs.step(thx_m, thy_m);

            gen.advance();
            PlantInput pu;
            pu.v = u;
            s = step(s, pu, plant_params, Ts, cfg.substeps, popt);
            ++k_global;
        }
        info.end = k_global;
        info.tf_index = info.begin + gen.tf_steps();
        info.replan = gen.replan();
        bounds.push_back(info);
    }
    res.metrics = metrics_with_bounds(res.log, cfg, bounds);
    return res;
}

std::vector<ScenarioResult> run_batch(const std::vector<ScenarioConfig>& cfgs, bool parallel)
{
    std::vector<ScenarioResult> out(cfgs.size());
    std::vector<std::string> errors(cfgs.size());
    const long n = static_cast<long>(cfgs.size());
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long i = 0; i < n; ++i) {
            try {
                out[i] = run_scenario(cfgs[i]);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    } else {
        for (long i = 0; i < n; ++i) {
            try {
                out[i] = run_scenario(cfgs[i]);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    }
    for (long i = 0; i < n; ++i)
        if (!errors[i].empty())
            throw Error(ErrorKind::StateOutOfDomain, "batch run " + std::to_string(i) + ": " + errors[i]);
    return out;
}

std::vector<ScenarioConfig> canonical_runs(const std::vector<double>& masses)
{
    std::vector<ScenarioConfig> out;
    for (auto c : {ControllerKind::Mpc, ControllerKind::Sfb})
        for (int sc = 1; sc <= 3; ++sc)
            for (const char* speed : {"slow", "fast"})
                for (double m : masses)
                    out.push_back(ScenarioConfig::canonical(sc, c, speed, m));
    return out;
}

const std::vector<std::string>& log_columns()
{
    static const std::vector<std::string> cols = {
        "t",     "x",     "vx",    "y",       "vy",      "l",       "vl",      "thx",     "thx_dot",
        "thy",   "thy_dot", "x_ref", "y_ref", "l_ref",   "u_x",     "u_y",     "u_l",     "fdx_hat",
        "fdy_hat", "fdl_hat", "thx_hat", "thy_hat", "eq_dist", "sat_flag", "qp_status"};
    return cols;
}

void write_csv(const SimulationLog& log, std::ostream& os)
{
    const auto& cols = log_columns();
    for (std::size_t i = 0; i < cols.size(); ++i)
        os << cols[i] << (i + 1 < cols.size() ? "," : "\n");
    os << std::setprecision(17);
    for (const auto& r : log.records) {
        const auto& p = r.plant;
        const double v[] = {r.t,        p.x,        p.vx,       p.y,       p.vy,      p.l,
                            p.vl,       p.thx,      p.thx_dot,  p.thy,     p.thy_dot, r.ref[0],
                            r.ref[1],   r.ref[2],   r.u[0],     r.u[1],    r.u[2],    r.fd_hat[0],
                            r.fd_hat[1], r.fd_hat[2], r.thx_hat, r.thy_hat, r.eq_dist};
        for (double x : v)
            os << x << ',';
        os << (r.sat ? 1 : 0) << ',' << r.qp_status << '\n';
    }
}

SimulationLog read_csv(std::istream& is, double Ts)
{
    SimulationLog log;
    log.Ts = Ts;
    std::string line;
    if (!std::getline(is, line))
        throw Error(ErrorKind::Io, "empty CSV");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ','))
            header.push_back(c);
    }
    if (header != log_columns())
        throw Error(ErrorKind::Io, "CSV header does not match the log schema");
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string c;
        std::vector<std::string> f;
        while (std::getline(ss, c, ','))
            f.push_back(c);
        if (f.size() != header.size())
            throw Error(ErrorKind::Io, "CSV row has the wrong number of fields");
        std::vector<double> v(23);
        for (int i = 0; i < 23; ++i)
            v[i] = std::stod(f[i]);
        LogRecord r;
        r.t = v[0];
        r.plant = {v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10]};
        r.ref = {v[11], v[12], v[13]};
        r.u = {v[14], v[15], v[16]};
        r.fd_hat = {v[17], v[18], v[19]};
        r.thx_hat = v[20];
        r.thy_hat = v[21];
        r.eq_dist = v[22];
        r.sat = f[23] == "1";
        r.qp_status = f[24];
        log.records.push_back(r);
    }
    return log;
}

namespace {

json vec3(const Eigen::Vector3d& v)
{
    return json::array({v[0], v[1], v[2]});
}

Eigen::Vector3d get3(const json& j, const char* key)
{
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != 3)
        throw Error(ErrorKind::Config, std::string(key) + " must be a 3-element array");
    return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

Eigen::Vector2d get2(const json& a, const std::string& what)
{
    if (!a.is_array() || a.size() != 2)
        throw Error(ErrorKind::Config, what + " must be a 2-element array");
    return {a[0].get<double>(), a[1].get<double>()};
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where)
{
    if (!j.is_object())
        throw Error(ErrorKind::Config, where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            ok = ok || it.key() == a;
        if (!ok)
            throw Error(ErrorKind::Config, "unknown key '" + it.key() + "' in " + where);
    }
}

LspbSpec lspb_from_json(const json& j)
{
    check_keys(j, {"q0", "qf", "a", "vm", "tb", "tf"}, "trajectory axis");
    return {j.at("q0").get<double>(), j.at("qf").get<double>(), j.at("a").get<double>(),
            j.at("vm").get<double>(), j.at("tb").get<double>(), j.at("tf").get<double>()};
}

json lspb_to_json(const LspbSpec& s)
{
    return {{"q0", s.q0}, {"qf", s.qf}, {"a", s.a}, {"vm", s.vm}, {"tb", s.tb}, {"tf", s.tf}};
}

}  // namespace

std::string metrics_json(const Metrics& m, const ScenarioConfig* cfg)
{
    json j;
    json tr = json::array();
    for (const auto& t : m.transitions)
        tr.push_back({{"index", t.index},
                      {"begin", t.begin},
                      {"end", t.end},
                      {"end_error", vec3(t.end_error)},
                      {"error_at_tf", vec3(t.error_at_tf)},
                      {"max_thx", t.max_thx},
                      {"max_thy", t.max_thy},
                      {"tb_decel", t.tb_decel},
                      {"replan_iterations", t.replan_iterations},
                      {"extended", t.extended}});
    j["transitions"] = tr;
    j["max_end_error"] = vec3(m.max_end_error);
    j["max_theta"] = m.max_theta;
    j["max_theta_deg"] = m.max_theta * 180.0 / std::numbers::pi;
    j["mean_eq"] = m.mean_eq;
    j["max_eq"] = m.max_eq;
    j["max_tracking_error"] = vec3(m.max_tracking_error);
    j["saturation_count"] = m.saturation_count;
    j["qp_fallbacks"] = m.qp_fallbacks;
    j["max_abs_u"] = m.max_abs_u;
    j["y_min"] = vec3(m.y_min);
    j["y_max"] = vec3(m.y_max);
    if (cfg)
        j["config"] = json::parse(config_to_json(*cfg));
    return j.dump(2);
}

void export_log(const SimulationLog& log, const Metrics& m, const std::string& format, const std::string& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw Error(ErrorKind::Io, "cannot open " + path);
    if (format == "csv")
        write_csv(log, os);
    else if (format == "json")
        os << metrics_json(m) << '\n';
    else
        throw Error(ErrorKind::Config, "export format must be csv or json");
    if (!os)
        throw Error(ErrorKind::Io, "write failed for " + path);
}

ScenarioConfig config_from_json(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, std::string("config parse error: ") + e.what());
    }
    try {
        check_keys(j,
                   {"preset", "scenario", "controller", "feedforward", "swing_control", "mode", "mass", "repetitions",
                    "seed", "Ts", "substeps", "rest", "mismatch", "quantize", "angle_noise", "ct_measured_velocity",
                    "trajectory", "swing", "mpc", "sfb", "limits"},
                   "config");
        ScenarioConfig c;
        const std::string preset = j.value("preset", std::string("slow"));
        const std::string ctrl = j.value("controller", std::string("sfb"));
        if (ctrl != "mpc" && ctrl != "sfb")
            throw Error(ErrorKind::Config, "controller must be mpc or sfb");
        const double mass = j.value("mass", 0.8);
        if (j.contains("scenario"))
            c = ScenarioConfig::canonical(j.at("scenario").get<int>(),
                                          ctrl == "mpc" ? ControllerKind::Mpc : ControllerKind::Sfb, preset, mass);
        c.controller = ctrl == "mpc" ? ControllerKind::Mpc : ControllerKind::Sfb;
        c.trajectory = preset;
        c.m = mass;
        if (j.contains("feedforward")) {
            const auto f = j.at("feedforward").get<std::string>();
            if (f == "none")
                c.feedforward = DisturbanceSource::None;
            else if (f == "computed-torque")
                c.feedforward = DisturbanceSource::ComputedTorque;
            else if (f == "dob")
                c.feedforward = DisturbanceSource::Observer;
            else
                throw Error(ErrorKind::Config, "feedforward must be none, computed-torque or dob");
        }
        if (j.contains("swing_control"))
            c.swing_control = j.at("swing_control").get<bool>();
        if (j.contains("mode")) {
            const auto md = j.at("mode").get<std::string>();
            if (md != "2d" && md != "3d")
                throw Error(ErrorKind::Config, "mode must be 2d or 3d");
            c.mode = md == "2d" ? Mode::TwoD : Mode::ThreeD;
        }
        c.repetitions = j.value("repetitions", c.repetitions);
        c.seed = j.value("seed", c.seed);
        c.Ts = j.value("Ts", c.Ts);
        c.substeps = j.value("substeps", c.substeps);
        c.rest = j.value("rest", c.rest);
        c.mismatch = j.value("mismatch", c.mismatch);
        c.quantize = j.value("quantize", c.quantize);
        c.angle_noise = j.value("angle_noise", c.angle_noise);
        c.ct_measured_velocity = j.value("ct_measured_velocity", c.ct_measured_velocity);
        c.swing_observer.Ts = c.Ts;
        if (j.contains("trajectory")) {
            const auto& t = j.at("trajectory");
            check_keys(t, {"x", "y", "l_rest", "l_travel"}, "trajectory");
            c.trajectory = "custom";
            c.custom.x = lspb_from_json(t.at("x"));
            c.custom.y = t.contains("y") ? lspb_from_json(t.at("y")) : c.custom.x;
            c.custom.l_rest = t.value("l_rest", 0.25);
            c.custom.l_travel = t.value("l_travel", 0.05);
        }
        if (j.contains("swing")) {
            const auto& s = j.at("swing");
            check_keys(s, {"k", "v_l_max", "observer_L"}, "swing");
            if (s.contains("k"))
                c.swing.k = get2(s.at("k"), "swing.k");
            c.swing.v_l_max = s.value("v_l_max", c.swing.v_l_max);
            if (s.contains("observer_L")) {
                const auto& L = s.at("observer_L");
                if (!L.is_array() || L.size() != 2)
                    throw Error(ErrorKind::Config, "swing.observer_L must hold two 2-vectors");
                c.swing_observer.Lx = get2(L[0], "swing.observer_L[0]");
                c.swing_observer.Ly = get2(L[1], "swing.observer_L[1]");
            }
        }
        if (j.contains("mpc")) {
            const auto& m = j.at("mpc");
            check_keys(m, {"Hp", "Hu", "Q", "R", "u_min", "u_max", "y_min", "y_max", "output_constraints"}, "mpc");
            c.mpc.Hp = m.value("Hp", c.mpc.Hp);
            c.mpc.Hu = m.value("Hu", c.mpc.Hu);
            for (const char* key : {"Q", "R", "u_min", "u_max", "y_min", "y_max"}) {
                if (!m.contains(key))
                    continue;
                const Eigen::Vector3d v = get3(m, key);
                const std::string k = key;
                if (k == "Q") c.mpc.Q = v;
                else if (k == "R") c.mpc.R = v;
                else if (k == "u_min") c.mpc.u_min = v;
                else if (k == "u_max") c.mpc.u_max = v;
                else if (k == "y_min") c.mpc.y_min = v;
                else c.mpc.y_max = v;
            }
            c.mpc.output_constraints = m.value("output_constraints", c.mpc.output_constraints);
        }
        if (j.contains("sfb")) {
            const auto& s = j.at("sfb");
            check_keys(s, {"K", "L", "Lw"}, "sfb");
            if (s.contains("K")) {
                const auto& K = s.at("K");
                if (!K.is_array() || K.size() != 3)
                    throw Error(ErrorKind::Config, "sfb.K must hold three 2-vectors");
                c.sfb.K = block_feedback_gain(get2(K[0], "sfb.K").transpose(), get2(K[1], "sfb.K").transpose(),
                                              get2(K[2], "sfb.K").transpose());
            }
            if (s.contains("L")) {
                const auto& L = s.at("L");
                if (!L.is_array() || L.size() != 3)
                    throw Error(ErrorKind::Config, "sfb.L must hold three 2-vectors");
                c.sfb.L = block_observer_gain(get2(L[0], "sfb.L"), get2(L[1], "sfb.L"), get2(L[2], "sfb.L"));
            }
            if (s.contains("Lw"))
                c.sfb.Lw = get3(s, "Lw");
        }
        if (j.contains("limits")) {
            const auto& l = j.at("limits");
            check_keys(l, {"v_max", "a_max"}, "limits");
            c.limits.v_max = Eigen::Vector3d::Constant(l.value("v_max", 0.3));
            c.limits.a_max = Eigen::Vector3d::Constant(l.value("a_max", 0.2));
        }
        c.validate();
        return c;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, std::string("config value error: ") + e.what());
    }
}

ScenarioConfig load_config(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw Error(ErrorKind::Io, "cannot read " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return config_from_json(ss.str());
}

std::string config_to_json(const ScenarioConfig& c)
{
    json j;
    j["controller"] = to_string(c.controller);
    j["feedforward"] = to_string(c.feedforward);
    j["swing_control"] = c.swing_control;
    j["mode"] = c.mode == Mode::TwoD ? "2d" : "3d";
    j["mass"] = c.m;
    j["repetitions"] = c.repetitions;
    j["seed"] = c.seed;
    j["Ts"] = c.Ts;
    j["substeps"] = c.substeps;
    j["rest"] = c.rest;
    j["mismatch"] = c.mismatch;
    j["quantize"] = c.quantize;
    j["angle_noise"] = c.angle_noise;
    j["ct_measured_velocity"] = c.ct_measured_velocity;
    if (c.trajectory == "custom") {
        j["trajectory"] = {{"x", lspb_to_json(c.custom.x)},
                           {"y", lspb_to_json(c.custom.y)},
                           {"l_rest", c.custom.l_rest},
                           {"l_travel", c.custom.l_travel}};
    } else {
        j["preset"] = c.trajectory;
    }
    j["swing"] = {{"k", {c.swing.k[0], c.swing.k[1]}},
                  {"v_l_max", c.swing.v_l_max},
                  {"observer_L",
                   {{c.swing_observer.Lx[0], c.swing_observer.Lx[1]}, {c.swing_observer.Ly[0], c.swing_observer.Ly[1]}}}};
    j["mpc"] = {{"Hp", c.mpc.Hp},          {"Hu", c.mpc.Hu},         {"Q", vec3(c.mpc.Q)},
                {"R", vec3(c.mpc.R)},      {"u_min", vec3(c.mpc.u_min)}, {"u_max", vec3(c.mpc.u_max)},
                {"y_min", vec3(c.mpc.y_min)}, {"y_max", vec3(c.mpc.y_max)},
                {"output_constraints", c.mpc.output_constraints}};
    json K = json::array(), L = json::array();
    for (int i = 0; i < 3; ++i) {
        K.push_back({c.sfb.K(i, 2 * i), c.sfb.K(i, 2 * i + 1)});
        L.push_back({c.sfb.L(2 * i, i), c.sfb.L(2 * i + 1, i)});
    }
    j["sfb"] = {{"K", K}, {"L", L}, {"Lw", vec3(c.sfb.Lw)}};
    j["limits"] = {{"v_max", c.limits.v_max[0]}, {"a_max", c.limits.a_max[0]}};
    return j.dump(2);
}

}  // namespace crane
