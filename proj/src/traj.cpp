#include "crane/traj.hpp"

#include <algorithm>
#include <cmath>

#include "crane/error.hpp"

namespace crane {

namespace {

constexpr double kTimeTol = 1e-12;

bool on_grid(double t, double Ts)
{
    const double n = t / Ts;
    return std::abs(n - std::round(n)) <= 1e-9 * std::max(1.0, std::abs(n));
}

int steps_of(double t, double Ts)
{
    return static_cast<int>(std::llround(t / Ts));
}

}  // namespace

LspbSpec LspbSpec::reversed() const
{
    LspbSpec r = *this;
    std::swap(r.q0, r.qf);
    return r;
}

MinTimeSpec MinTimeSpec::from_endpoints(double q0, double qf, double tf)
{
    if (!(tf > 0))
        throw Error(ErrorKind::InvalidParameter, "minimum-time profile needs tf > 0");
    return {q0, qf, 4 * std::abs(qf - q0) / (tf * tf), tf};
}

ProfilePoint lspb_eval(const LspbSpec& s, double t)
{
    if (t < -kTimeTol || t > s.tf + kTimeTol)
        throw Error(ErrorKind::OutOfRange, "time outside [0, tf]");
    t = std::clamp(t, 0.0, s.tf);
    const double a = s.direction() * s.a;
    const double v = s.direction() * s.vm;
    if (t < s.tb)
        return {s.q0 + 0.5 * a * t * t, a * t, a};
    if (t < s.tf - s.tb)
        return {s.q0 - 0.5 * a * s.tb * s.tb + v * t, v, 0.0};
    return {s.qf - 0.5 * a * s.tf * s.tf + a * s.tf * t - 0.5 * a * t * t, a * (s.tf - t), -a};
}

ProfilePoint mintime_eval(const MinTimeSpec& s, double t)
{
    if (t < -kTimeTol || t > s.tf + kTimeTol)
        throw Error(ErrorKind::OutOfRange, "time outside [0, tf]");
    if (s.qf == s.q0)
        return {s.q0, 0.0, 0.0};
    t = std::clamp(t, 0.0, s.tf);
    const double a = s.direction() * s.a;
    if (t < s.tf / 2)
        return {s.q0 + 0.5 * a * t * t, a * t, a};
    return {s.qf - 0.5 * a * s.tf * s.tf + a * s.tf * t - 0.5 * a * t * t, a * (s.tf - t), -a};
}

std::vector<std::string> validate_spec(const LspbSpec& s, double v_max, double a_max, double Ts)
{
    std::vector<std::string> out;
    if (!(s.a > 0) || !(s.vm > 0) || !(s.tb > 0) || !(s.tf > 0))
        out.emplace_back("a, v_m, t_b, t_f must be positive");
    if (std::abs(s.vm - s.a * s.tb) > 1e-9)
        out.emplace_back("v_m != a*t_b");
    if (std::abs(std::abs(s.qf - s.q0) - s.vm * (s.tf - s.tb)) > 1e-9)
        out.emplace_back("|q_f - q_0| != v_m*(t_f - t_b)");
    if (!(s.tf > 2 * s.tb))
        out.emplace_back("t_f must exceed 2*t_b");
    if (s.vm > v_max)
        out.emplace_back("v_m exceeds v_max");
    if (s.a > a_max)
        out.emplace_back("a exceeds a_max");
    if (Ts > 0 && (!on_grid(s.tb, Ts) || !on_grid(s.tf, Ts)))
        out.emplace_back("t_b or t_f not a multiple of Ts");
    return out;
}

std::vector<std::string> validate_spec(const MinTimeSpec& s, double v_max, double a_max, double Ts,
                                       double supplied_vm)
{
    std::vector<std::string> out;
    if (!(s.tf > 0) || s.a < 0)
        out.emplace_back("t_f must be positive and a non-negative");
    if (std::abs(std::abs(s.qf - s.q0) - s.vm() * s.tf / 2) > 1e-9)
        out.emplace_back("|q_f - q_0| != v_m*t_f/2 with v_m = a*t_f/2");
    if (supplied_vm >= 0 && std::abs(supplied_vm - s.vm()) > 1e-9)
        out.emplace_back("supplied v_m != a*t_f/2");
    if (s.vm() > v_max)
        out.emplace_back("v_m exceeds v_max");
    if (s.a > a_max)
        out.emplace_back("a exceeds a_max");
    if (Ts > 0 && !on_grid(s.tf, Ts))
        out.emplace_back("t_f not a multiple of Ts");
    return out;
}

const char* to_string(Zone z)
{
    switch (z) {
    case Zone::Accel: return "accel";
    case Zone::ConstVel: return "const";
    case Zone::Decel: return "decel";
    case Zone::Done: return "done";
    }
    return "?";
}

Vec6 reference_model_step(const Vec6& x, const Eigen::Vector3d& u, double Ts)
{
    Vec6 y = x;
    for (int i = 0; i < 3; ++i) {
        y[2 * i] = x[2 * i] + Ts * x[2 * i + 1];
        y[2 * i + 1] = x[2 * i + 1] + Ts * u[i];
    }
    return y;
}

Vec6 reference_model_step(const Vec6& x, Eigen::Vector3d& u, double Ts, const RefLimits& lim, Zone zone)
{
    const bool clamp = zone == Zone::Accel || zone == Zone::ConstVel;
    if (clamp)
        u = u.cwiseMax(-lim.a_max).cwiseMin(lim.a_max);
    Vec6 y = reference_model_step(x, u, Ts);
    if (clamp)
        for (int i = 0; i < 3; ++i)
            y[2 * i + 1] = std::clamp(y[2 * i + 1], -lim.v_max[i], lim.v_max[i]);
    return y;
}

ReplanResult replan_deceleration(const Eigen::Vector2d& q_rd, const Eigen::Vector2d& q_rf,
                                 const Eigen::Vector2d& v_normal, double tb, double v_max, double a_max, double Ts)
{
    const bool discrete = Ts > 0;
    auto span = [&](double T) { return discrete ? T + Ts : T; };
    auto grid = [&](double T) { return discrete ? std::ceil(T / Ts - 1e-9) * Ts : T; };
    const Eigen::Vector2d d = q_rf - q_rd;

    ReplanResult r;
    double T = tb;

    // Step 1: correction velocities within the original window.
    r.v_rc = 2 * d / span(T);
    ++r.iterations;
    ++r.iterations;
    if (r.v_rc.cwiseAbs().maxCoeff() > v_max) {
        double need = T;
        for (int i = 0; i < 2; ++i)
            need = std::max(need, grid(2 * std::abs(d[i]) / v_max - (discrete ? Ts : 0.0)));
        T = need;
        ++r.iterations;
        r.v_rc = 2 * d / span(T);
        r.velocity_extended = true;
        r.hoist_update = true;
        ++r.iterations;
    }

    // Step 2: correction accelerations.
    r.a_rc = r.v_rc / T;
    ++r.iterations;
    ++r.iterations;
    if (r.a_rc.cwiseAbs().maxCoeff() > a_max) {
        double need = T;
        for (int i = 0; i < 2; ++i) {
            double vr = std::abs(v_normal[i]);
            if (!(vr > 0) || vr > v_max)
                vr = v_max;
            need = std::max(need, grid(2 * std::abs(d[i]) / vr - (discrete ? Ts : 0.0)));
        }
        ++r.iterations;
        T = need;
        r.v_rc = 2 * d / span(T);
        r.a_rc = r.v_rc / T;
        r.acceleration_fallback = true;
        r.hoist_update = true;
        ++r.iterations;
        ++r.iterations;
        if (r.a_rc.cwiseAbs().maxCoeff() > a_max) {
            // normal velocities inconsistent with a_max: stretch until the bound holds
            T = grid(std::max(T, r.v_rc.cwiseAbs().maxCoeff() / a_max));
            while (true) {
                r.v_rc = 2 * d / span(T);
                r.a_rc = r.v_rc / T;
                ++r.iterations;
                if (r.a_rc.cwiseAbs().maxCoeff() <= a_max || r.iterations >= 15)
                    break;
                T = grid(T + std::max(Ts, 1e-3 * T));
            }
        }
    }
    r.tb = T;
    r.hoist_update = T > tb;
    ++r.iterations;  // hoist flag check
    return r;
}

double HoistSegment::accel() const
{
    if (steps <= 0)
        return 0.0;
    const int m = steps / 2;
    const double c = (steps % 2 == 0) ? double(m) * m : double(m) * (m + 1);
    return dl / (Ts * Ts * c);
}

double HoistSegment::command(int k) const
{
    if (k < 0 || k >= steps)
        return 0.0;
    const int m = steps / 2;
    if (k < m)
        return accel();
    if (steps % 2 == 1 && k == m)
        return 0.0;
    return -accel();
}

TransitionSpec preset_transition(const std::string& name)
{
    TransitionSpec t;
    if (name == "slow") {
        t.x = {0.05, 0.50, 22.5e-3, 9e-2, 4.0, 9.0};
        t.l_rest = 0.25;
        t.l_travel = 0.05;
    } else if (name == "fast") {
        t.x = {0.05, 0.50, 75e-3, 15e-2, 2.0, 5.0};
        t.l_rest = 0.10;
        t.l_travel = 0.02;
    } else {
        throw Error(ErrorKind::Config, "unknown trajectory preset: " + name);
    }
    t.y = t.x;
    return t;
}

ReferenceGenerator::ReferenceGenerator(const TransitionSpec& spec, double Ts, RefLimits lim, double rest, Mode mode)
    : spec_(spec), Ts_(Ts), lim_(lim)
{
    if (!(Ts > 0))
        throw Error(ErrorKind::InvalidParameter, "Ts must be positive");
    if (mode == Mode::TwoD)
        spec_.y = {spec.y.q0, spec.y.q0, 0.0, 0.0, spec.x.tb, spec.x.tf};
    if (std::abs(spec_.x.tb - spec_.y.tb) > 1e-12 || std::abs(spec_.x.tf - spec_.y.tf) > 1e-12)
        throw Error(ErrorKind::Config, "traveling and traversing zone timings must agree");
    if (!on_grid(spec_.x.tb, Ts) || !on_grid(spec_.x.tf, Ts) || !on_grid(rest, Ts))
        throw Error(ErrorKind::Config, "zone timings must be multiples of Ts");
    n_b_ = steps_of(spec_.x.tb, Ts);
    n_tf_ = steps_of(spec_.x.tf, Ts);
    n_rest_ = steps_of(rest, Ts);
    n_dec_ = n_b_;
    if (n_b_ < 1 || n_tf_ <= 2 * n_b_)
        throw Error(ErrorKind::Config, "zone timings violate t_f > 2 t_b");
    up_ = {spec_.l_travel - spec_.l_rest, n_b_, Ts};
    down_ = {spec_.l_rest - spec_.l_travel, n_b_, Ts};
    x_ << spec_.x.q0, 0, spec_.y.q0, 0, spec_.l_rest, 0;
}

const ReferenceSample& ReferenceGenerator::command(const SwingEstimate& est, const SwingControlConfig& swing,
                                                   Mode mode)
{
    const int k = k_;
    const int dec_start = n_tf_ - n_b_;
    ReferenceSample s;
    Eigen::Vector3d a_ref = Eigen::Vector3d::Zero();
    if (k < n_b_) {
        s.zone = Zone::Accel;
        a_ref << spec_.x.direction() * spec_.x.a, spec_.y.direction() * spec_.y.a, up_.command(k);
    } else if (k < dec_start) {
        s.zone = Zone::ConstVel;
    } else if (k < dec_start + n_dec_) {
        s.zone = Zone::Decel;
        if (!replanned_) {
            replan_ = replan_deceleration({x_[0], x_[2]}, {spec_.x.qf, spec_.y.qf}, {spec_.x.vm, spec_.y.vm},
                                          spec_.x.tb, lim_.v_max[0], lim_.a_max[0], Ts_);
            replanned_ = true;
            x_[1] = replan_.v_rc[0];
            x_[3] = replan_.v_rc[1];
            a_dec_ = -replan_.a_rc;
            n_dec_ = steps_of(replan_.tb, Ts_);
            n_ext_ = n_dec_ - n_b_;
            if (replan_.hoist_update)
                down_.steps = n_dec_;
        }
        if (k < n_tf_)
            a_ref << -spec_.x.direction() * spec_.x.a, -spec_.y.direction() * spec_.y.a, 0.0;
        a_ref[2] = down_.command(k - dec_start);
    } else {
        s.zone = Zone::Done;
    }
    s.a_ref = a_ref;
    switch (s.zone) {
    case Zone::Accel:
    case Zone::ConstVel: {
        const Eigen::Vector2d uc = swing_correction(est, a_ref.head<2>(), swing, mode);
        s.u_c << uc, a_ref[2];
        if (mode == Mode::TwoD)
            s.u_c[1] = 0.0;
        s.u_c = s.u_c.cwiseMax(-lim_.a_max).cwiseMin(lim_.a_max);
        break;
    }
    case Zone::Decel:
        s.u_c << a_dec_, a_ref[2];
        break;
    case Zone::Done:
        s.u_c.setZero();
        break;
    }
    s.x_rm = x_;
    sample_ = s;
    return sample_;
}

void ReferenceGenerator::advance()
{
    x_ = reference_model_step(x_, sample_.u_c, Ts_);
    if (sample_.zone == Zone::Accel || sample_.zone == Zone::ConstVel)
        for (int i = 0; i < 3; ++i)
            x_[2 * i + 1] = std::clamp(x_[2 * i + 1], -lim_.v_max[i], lim_.v_max[i]);
    ++k_;
}

std::vector<Eigen::Vector3d> ReferenceGenerator::preview(int hp) const
{
    std::vector<Eigen::Vector3d> out;
    out.reserve(hp);
    Vec6 x = x_;
    const bool clamp = sample_.zone == Zone::Accel || sample_.zone == Zone::ConstVel;
    for (int i = 0; i < hp; ++i) {
        x = reference_model_step(x, sample_.u_c, Ts_);
        if (clamp)
            for (int j = 0; j < 3; ++j)
                x[2 * j + 1] = std::clamp(x[2 * j + 1], -lim_.v_max[j], lim_.v_max[j]);
        out.emplace_back(x[0], x[2], x[4]);
    }
    return out;
}

Eigen::Vector3d ReferenceGenerator::original_output(double t) const
{
    const double tf = spec_.x.tf, tb = spec_.x.tb;
    const double tc = std::clamp(t, 0.0, tf);
    double l = spec_.l_rest;
    if (tc < tb)
        l = mintime_eval({spec_.l_rest, spec_.l_travel, 4 * std::abs(spec_.l_travel - spec_.l_rest) / (tb * tb), tb},
                         tc)
                .q;
    else if (tc < tf - tb)
        l = spec_.l_travel;
    else if (tc < tf)
        l = mintime_eval({spec_.l_travel, spec_.l_rest, 4 * std::abs(spec_.l_travel - spec_.l_rest) / (tb * tb), tb},
                         tc - (tf - tb))
                .q;
    const double y = spec_.y.a > 0 ? lspb_eval(spec_.y, tc).q : spec_.y.q0;
    return {lspb_eval(spec_.x, tc).q, y, l};
}

Eigen::Vector3d ReferenceGenerator::final_point() const
{
    return {spec_.x.qf, spec_.y.qf, spec_.l_rest};
}

}  // namespace crane
