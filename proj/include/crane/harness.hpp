#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crane/mpc.hpp"
#include "crane/plant.hpp"
#include "crane/sfb.hpp"
#include "crane/swing.hpp"
#include "crane/traj.hpp"

namespace crane {

enum class ControllerKind { Mpc, Sfb };

const char* to_string(ControllerKind c);

struct ScenarioConfig {
    ControllerKind controller = ControllerKind::Sfb;
    DisturbanceSource feedforward = DisturbanceSource::ComputedTorque;
    bool swing_control = true;
    std::string trajectory = "slow";  // slow, fast or custom
    TransitionSpec custom;
    Mode mode = Mode::ThreeD;
    double m = 0.8;
    int repetitions = 1;  // out-and-back pairs
    std::uint64_t seed = 1;
    double Ts = 0.01;
    int substeps = 10;
    double rest = 1.0;

    double mismatch = 1.0;       // true plant J and B scaled by this factor
    bool quantize = false;       // 4096 counts/rev encoders on the three axes
    double angle_noise = 0.0;    // rad, std of additive noise on the swing angle sensor
    bool ct_measured_velocity = false;

    SwingControlConfig swing;
    SwingObserverConfig swing_observer;
    MpcConfig mpc;
    SfbConfig sfb = SfbConfig::defaults();
    RefLimits limits;

    // Scenario I: no feedforward, no swing control; II: feedforward; III: feedforward and swing control.
    static ScenarioConfig canonical(int scenario, ControllerKind controller, const std::string& trajectory,
                                    double m);

    TransitionSpec transition() const;
    void validate() const;  // throws Config
};

enum class QpLogStatus { None, Optimal, Infeasible, MaxIterations };

struct LogRecord {
    double t = 0;
    CraneState plant;
    Eigen::Vector3d ref = Eigen::Vector3d::Zero();  // reference model outputs
    Eigen::Vector3d u = Eigen::Vector3d::Zero();
    Eigen::Vector3d fd_hat = Eigen::Vector3d::Zero();
    double thx_hat = 0, thy_hat = 0;
    double eq_dist = 0;
    bool sat = false;
    std::string qp_status = "none";
};

struct SimulationLog {
    double Ts = 0.01;
    std::vector<LogRecord> records;
};

struct TransitionMetrics {
    int index = 0;
    int begin = 0, end = 0;  // record range [begin, end)
    Eigen::Vector3d end_error = Eigen::Vector3d::Zero();     // at the end of the rest window
    Eigen::Vector3d error_at_tf = Eigen::Vector3d::Zero();   // when the decel zone finishes
    double max_thx = 0, max_thy = 0;
    double tb_decel = 0;
    int replan_iterations = 0;
    bool extended = false;
};

struct Metrics {
    std::vector<TransitionMetrics> transitions;
    Eigen::Vector3d max_end_error = Eigen::Vector3d::Zero();
    double max_theta = 0;  // rad, over both angles and all transitions
    double mean_eq = 0, max_eq = 0;
    Eigen::Vector3d max_tracking_error = Eigen::Vector3d::Zero();  // against the original path
    int saturation_count = 0;
    int qp_fallbacks = 0;
    double max_abs_u = 0;
    Eigen::Vector3d y_min = Eigen::Vector3d::Constant(1e9);
    Eigen::Vector3d y_max = Eigen::Vector3d::Constant(-1e9);
    std::vector<Eigen::Vector3d> tracking_error;  // e_i(k) = original ref - measured
    std::vector<double> eq_series;
};

struct ScenarioResult {
    SimulationLog log;
    Metrics metrics;
};

double distance_error(const LoadPosition& load, const Eigen::Vector3d& ref_xyz_l);

ScenarioResult run_scenario(const ScenarioConfig& cfg);

// Independent runs; parallel uses one OpenMP task per scenario, serial is the reference path.
std::vector<ScenarioResult> run_batch(const std::vector<ScenarioConfig>& cfgs, bool parallel = true);

// The 24 canonical runs: controller x scenario x speed x mass.
std::vector<ScenarioConfig> canonical_runs(const std::vector<double>& masses = {0.4, 0.8});

// Metrics from a log and the config that produced it.
Metrics compute_metrics(const SimulationLog& log, const ScenarioConfig& cfg);

const std::vector<std::string>& log_columns();

void write_csv(const SimulationLog& log, std::ostream& os);
SimulationLog read_csv(std::istream& is, double Ts);
std::string metrics_json(const Metrics& m, const ScenarioConfig* cfg = nullptr);

void export_log(const SimulationLog& log, const Metrics& m, const std::string& format, const std::string& path);

ScenarioConfig config_from_json(const std::string& text);
ScenarioConfig load_config(const std::string& path);
std::string config_to_json(const ScenarioConfig& cfg);

}  // namespace crane
