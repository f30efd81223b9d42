#pragma once

#include <vector>

#include <Eigen/Dense>

namespace crane {

enum class QpStatus { Optimal, Infeasible, MaxIterations };

const char* to_string(QpStatus s);

struct QpResult {
    QpStatus status = QpStatus::Infeasible;
    Eigen::VectorXd x;
    Eigen::VectorXd lambda;  // one multiplier per row of W
    double objective = 0;
    std::vector<int> active;
    int iterations = 0;
};

struct QpOptions {
    double tol = 1e-9;
    int max_iterations = 200;
    std::vector<int> warm_active;  // rows tried first when picking violated constraints
};

// min 1/2 x'Hx + g'x  s.t.  W x <= w   (H symmetric positive definite)
// Dual active-set method of Goldfarb and Idnani.
QpResult solve_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::MatrixXd& W,
                  const Eigen::VectorXd& w, const QpOptions& opt = {});

// Exhaustive oracle: every row subset of size <= n is treated as an equality set; the best feasible
// stationary point wins. parallel selects the OpenMP path.
QpResult solve_qp_enumerate(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::MatrixXd& W,
                            const Eigen::VectorXd& w, double tol = 1e-9, bool parallel = true);

struct KktResiduals {
    double stationarity = 0;
    double primal = 0;  // max violation of W x <= w
    double dual = 0;    // max negative multiplier
    double complementarity = 0;
};

KktResiduals kkt_residuals(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::MatrixXd& W,
                           const Eigen::VectorXd& w, const Eigen::VectorXd& x, const Eigen::VectorXd& lambda);

double qp_objective(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::VectorXd& x);

}  // namespace crane
