#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crane/model.hpp"
#include "crane/swing.hpp"

namespace crane {

struct ProfilePoint {
    double q = 0, qd = 0, qdd = 0;
};

// a and v_m are magnitudes; direction follows q_f - q_0.
struct LspbSpec {
    double q0 = 0, qf = 0;
    double a = 0, vm = 0;
    double tb = 0, tf = 0;

    double direction() const { return qf >= q0 ? 1.0 : -1.0; }
    LspbSpec reversed() const;
};

struct MinTimeSpec {
    double q0 = 0, qf = 0;
    double a = 0;  // magnitude
    double tf = 0;

    double vm() const { return a * tf / 2; }
    double direction() const { return qf >= q0 ? 1.0 : -1.0; }

    // (q0, qf, tf) authoritative, a derived.
    static MinTimeSpec from_endpoints(double q0, double qf, double tf);
};

ProfilePoint lspb_eval(const LspbSpec& spec, double t);
ProfilePoint mintime_eval(const MinTimeSpec& spec, double t);

// Itemized violations; empty means ok. Ts <= 0 skips the grid check.
std::vector<std::string> validate_spec(const LspbSpec& spec, double v_max, double a_max, double Ts = 0.0);
std::vector<std::string> validate_spec(const MinTimeSpec& spec, double v_max, double a_max, double Ts = 0.0,
                                       double supplied_vm = -1.0);

enum class Zone { Accel, ConstVel, Decel, Done };

const char* to_string(Zone z);

struct RefLimits {
    Eigen::Vector3d v_max{0.3, 0.3, 0.3};
    Eigen::Vector3d a_max{0.2, 0.2, 0.2};
};

// x_rm = (x, vx, y, vy, l, vl)
Vec6 reference_model_step(const Vec6& x_rm, const Eigen::Vector3d& u_c, double Ts);

// Same step with the command and velocity clamps of the accel/const-vel zones.
Vec6 reference_model_step(const Vec6& x_rm, Eigen::Vector3d& u_c, double Ts, const RefLimits& lim, Zone zone);

struct ReplanResult {
    Eigen::Vector2d v_rc = Eigen::Vector2d::Zero();
    Eigen::Vector2d a_rc = Eigen::Vector2d::Zero();
    double tb = 0;  // decel window, >= the original one
    bool hoist_update = false;
    bool velocity_extended = false;
    bool acceleration_fallback = false;
    int iterations = 0;
};

// With Ts > 0 the corrections land the forward-Euler reference model exactly on q_rf after tb/Ts steps
// (divisor tb + Ts) and extended windows stay on the sample grid. Ts = 0 uses continuous arithmetic.
ReplanResult replan_deceleration(const Eigen::Vector2d& q_rd, const Eigen::Vector2d& q_rf,
                                 const Eigen::Vector2d& v_normal, double tb, double v_max, double a_max,
                                 double Ts = 0.0);

// Hoisting command over a window of n steps (n even) moving by dl; exact for the Euler reference model.
struct HoistSegment {
    double dl = 0;
    int steps = 0;
    double Ts = 0.01;

    double accel() const;
    double command(int k) const;  // k in [0, steps)
};

struct TransitionSpec {
    LspbSpec x, y;
    double l_rest = 0.25;    // rope length at both ends of the transition
    double l_travel = 0.05;  // rope length reached at the end of the accel zone
};

TransitionSpec preset_transition(const std::string& name);  // "slow" or "fast"

struct ReferenceSample {
    Vec6 x_rm = Vec6::Zero();
    Eigen::Vector3d a_ref = Eigen::Vector3d::Zero();  // original accelerations
    Eigen::Vector3d u_c = Eigen::Vector3d::Zero();    // applied command
    Zone zone = Zone::Accel;
};

// Reference signal generator for one transition followed by a rest window.
class ReferenceGenerator {
public:
    ReferenceGenerator(const TransitionSpec& spec, double Ts, RefLimits lim = {}, double rest = 1.0,
                       Mode mode = Mode::ThreeD);

    // Command for the current step; replans on entry to the decel zone.
    const ReferenceSample& command(const SwingEstimate& est, const SwingControlConfig& swing, Mode mode);

    // Applies the last command to the reference model.
    void advance();

    // Outputs for steps k+1..k+hp with the current command frozen.
    std::vector<Eigen::Vector3d> preview(int hp) const;

    const Vec6& state() const { return x_; }
    const ReferenceSample& last() const { return sample_; }
    Eigen::Vector3d original_output(double t) const;  // undeviated path, t from transition start
    Eigen::Vector3d final_point() const;
    bool finished() const { return k_ >= total_steps(); }
    int step_index() const { return k_; }
    int total_steps() const { return n_tf_ + n_ext_ + n_rest_; }
    int tf_steps() const { return n_tf_ + n_ext_; }
    const ReplanResult& replan() const { return replan_; }
    bool replanned() const { return replanned_; }
    const TransitionSpec& spec() const { return spec_; }

private:
    TransitionSpec spec_;
    double Ts_;
    RefLimits lim_;
    int n_b_ = 0, n_tf_ = 0, n_rest_ = 0, n_ext_ = 0;
    int n_dec_ = 0;
    int k_ = 0;
    Vec6 x_ = Vec6::Zero();
    ReferenceSample sample_;
    ReplanResult replan_;
    bool replanned_ = false;
    Eigen::Vector2d a_dec_ = Eigen::Vector2d::Zero();
    HoistSegment up_, down_;
};

}  // namespace crane
