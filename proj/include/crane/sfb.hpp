#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "crane/model.hpp"
#include "crane/plant.hpp"
#include "crane/swing.hpp"

namespace crane {

struct SfbConfig {
    Mat36 K = Mat36::Zero();
    Mat63 L = Mat63::Zero();
    Eigen::Vector3d Lw{-0.1, -0.1, -0.5};
    Eigen::Vector3d u_max{24.0, 24.0, 24.0};

    static SfbConfig defaults();
};

Mat36 block_feedback_gain(const Eigen::RowVector2d& Kx, const Eigen::RowVector2d& Ky, const Eigen::RowVector2d& Kl);

// Per-axis pole placement for the (position, velocity) pair.
Eigen::RowVector2d place_feedback(const AxisDiscretization& ax, double p1, double p2);
Eigen::Vector2d place_observer(const AxisDiscretization& ax, double p1, double p2);
SfbConfig pole_placement_config(const DiscretePlantModel& model, double k_radius = 0.85, double l_radius = 0.6);

struct FeedforwardGains {
    Mat36 Phi = Mat36::Zero();
    Eigen::Vector3d gamma = Eigen::Vector3d::Zero();
    Eigen::Vector3d lambda = Eigen::Vector3d::Zero();
};

FeedforwardGains feedforward_gains(const DiscretePlantModel& model);

// Double-integrator reference model matrices.
Mat6 reference_model_A(double Ts);
Mat63 reference_model_B(double Ts);

Eigen::Vector3d feedforward_signal(const Vec6& x_rm, const Eigen::Vector3d& u_c, const Eigen::Vector3d& fd,
                                   const FeedforwardGains& gains);

Eigen::Vector3d sfb_step(const Vec6& xhat, const Vec6& x_rm, const Eigen::Vector3d& u_ff, const Mat36& K,
                         const Eigen::Vector3d& u_max, bool* saturated = nullptr);

enum class DisturbanceSource { None, ComputedTorque, Observer };

const char* to_string(DisturbanceSource s);

struct DisturbanceEstimate {
    Eigen::Vector3d fd = Eigen::Vector3d::Zero();
    DisturbanceSource source = DisturbanceSource::None;
};

// Load coupling plus Coulomb terms along the reference; velocities default to the reference ones.
DisturbanceEstimate computed_torque(const Vec6& x_rm, const Eigen::Vector3d& u_c, const SwingEstimate& est,
                                    const CraneParameters& p, double deadband = 1e-4,
                                    const Eigen::Vector3d* velocity = nullptr);

Eigen::Vector3d dob_step(const Eigen::Vector3d& fd, const Eigen::Vector3d& y, const Vec6& xhat,
                         const Eigen::Vector3d& Lw);

struct DobAudit {
    std::array<std::complex<double>, 3> roots{};
    double max_modulus = 0;
    bool pass = false;
};

// Roots of (z - 1 + l1)(z - a1)(z - 1) + Ts (l2 (z - 1) - bd1 lw)
DobAudit dob_pole_audit(const AxisDiscretization& ax, const Eigen::Vector2d& L, double lw);

struct StabilityAudit {
    double rho_feedback = 0;   // A - BK
    double rho_observer = 0;   // A - LC
    double rho_combined = 0;   // A - BK - LC
    bool pass = false;
};

StabilityAudit stability_audit(const DiscretePlantModel& model, const Mat36& K, const Mat63& L);

double spectral_radius(const Eigen::MatrixXd& M);

}  // namespace crane
