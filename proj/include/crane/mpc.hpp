#pragma once

#include <vector>

#include <Eigen/Dense>

#include "crane/model.hpp"
#include "crane/qp.hpp"

namespace crane {

struct MpcConfig {
    int Hp = 20;
    int Hu = 3;
    Eigen::Vector3d Q{5000.0, 5000.0, 5000.0};
    Eigen::Vector3d R{1e-3, 1e-3, 1e-3};
    Eigen::Vector3d u_min{-24.0, -24.0, -24.0};
    Eigen::Vector3d u_max{24.0, 24.0, 24.0};
    Eigen::Vector3d y_min{0.0, 0.0, 1e-3};
    Eigen::Vector3d y_max{0.6, 0.6, 0.6};
    bool output_constraints = true;
    double tol = 1e-9;
    int max_iterations = 200;

    void validate() const;  // throws InvalidParameter
};

struct PredictionMatrices {
    int Hp = 0, Hu = 0;
    Eigen::MatrixXd Psi;    // 3Hp x 6
    Eigen::MatrixXd Gamma;  // 3Hp x 3
    Eigen::MatrixXd Theta;  // 3Hp x 3Hu
    Eigen::MatrixXd Xi;     // 3Hp x 3Hp
};

PredictionMatrices build_prediction(const DiscretePlantModel& model, int Hp, int Hu);

Eigen::VectorXd lift_disturbance(const Eigen::Vector3d& fd, int Hp);

// Y = Psi x + Gamma u_prev + Theta dU + Xi F
Eigen::VectorXd predict_outputs(const PredictionMatrices& P, const Vec6& x, const Eigen::Vector3d& u_prev,
                                const Eigen::VectorXd& dU, const Eigen::VectorXd& F);

struct LinearConstraints {
    Eigen::MatrixXd W;
    Eigen::VectorXd w;
};

// Input rows (6Hu) followed by output rows (6Hp) when enabled.
LinearConstraints build_constraints(const PredictionMatrices& P, const MpcConfig& cfg, const Vec6& x,
                                    const Eigen::Vector3d& u_prev, const Eigen::VectorXd& F);

struct QpProblem {
    Eigen::MatrixXd H;
    Eigen::VectorXd g;
    Eigen::MatrixXd W;
    Eigen::VectorXd w;
};

QpProblem build_qp(const PredictionMatrices& P, const MpcConfig& cfg, const Vec6& x, const Eigen::Vector3d& u_prev,
                   const Eigen::VectorXd& F, const Eigen::VectorXd& Yref);

struct MpcDiagnostics {
    QpStatus status = QpStatus::Optimal;
    int active = 0;
    int iterations = 0;
    double cost = 0;
    bool fallback = false;
    bool saturated = false;
};

struct MpcState {
    Eigen::Vector3d u_prev = Eigen::Vector3d::Zero();
    Eigen::VectorXd last_dU;  // last successful sequence, shifted on each fallback use
    int fallback_count = 0;
    std::vector<int> active;
};

class MpcController {
public:
    MpcController(const DiscretePlantModel& model, MpcConfig cfg = {});

    // yref holds y_ref(k+1..k+Hp); shorter windows are padded with their last entry.
    Eigen::Vector3d step(const Vec6& xhat, const std::vector<Eigen::Vector3d>& yref, const Eigen::Vector3d& fd,
                         MpcDiagnostics* diag = nullptr);

    const MpcState& state() const { return state_; }
    void reset(const Eigen::Vector3d& u_prev = Eigen::Vector3d::Zero());
    const PredictionMatrices& prediction() const { return P_; }
    const MpcConfig& config() const { return cfg_; }

private:
    MpcConfig cfg_;
    PredictionMatrices P_;
    Eigen::MatrixXd H_;
    MpcState state_;
};

// Block-diagonal 6x3 observer gain from per-axis 2-vectors.
Mat63 block_observer_gain(const Eigen::Vector2d& Lx, const Eigen::Vector2d& Ly, const Eigen::Vector2d& Ll);

// Observer gains used with both controllers by default.
Mat63 default_observer_gain();

// x(k+1|k) = (A - LC) x(k|k-1) + B u + Wd fd + L y
Vec6 state_observer_step(const DiscretePlantModel& model, const Mat63& L, const Vec6& xhat,
                         const Eigen::Vector3d& u, const Eigen::Vector3d& fd, const Eigen::Vector3d& y);

}  // namespace crane
