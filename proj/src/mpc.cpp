#include "crane/mpc.hpp"

#include <algorithm>

#include "crane/error.hpp"

namespace crane {

void MpcConfig::validate() const
{
    if (Hu < 1 || Hp < Hu)
        throw Error(ErrorKind::InvalidParameter, "horizons need Hp >= Hu >= 1");
    if ((Q.array() < 0).any() || (R.array() < 0).any() || Q.maxCoeff() <= 0)
        throw Error(ErrorKind::InvalidParameter, "weights must be non-negative with Q not all zero");
    if (!(u_min.array() < u_max.array()).all() || !(y_min.array() < y_max.array()).all())
        throw Error(ErrorKind::InvalidParameter, "bounds must satisfy min < max");
}

PredictionMatrices build_prediction(const DiscretePlantModel& model, int Hp, int Hu)
{
    if (Hu < 1 || Hp < Hu)
        throw Error(ErrorKind::InvalidParameter, "horizons need Hp >= Hu >= 1");
    const Mat6& A = model.A;
    PredictionMatrices P;
    P.Hp = Hp;
    P.Hu = Hu;
    P.Psi = Eigen::MatrixXd::Zero(3 * Hp, 6);
    P.Gamma = Eigen::MatrixXd::Zero(3 * Hp, 3);
    P.Theta = Eigen::MatrixXd::Zero(3 * Hp, 3 * Hu);
    P.Xi = Eigen::MatrixXd::Zero(3 * Hp, 3 * Hp);

    // S[s] = sum_{j<s} A^j B, CAW[j] = C A^j Wd
    std::vector<Mat63> S(Hp + 1, Mat63::Zero());
    std::vector<Eigen::Matrix3d> CAW(Hp);
    Mat6 Ap = Mat6::Identity();
    for (int s = 0; s < Hp; ++s) {
        CAW[s] = model.C * Ap * model.Wd;
        S[s + 1] = S[s] + Ap * model.B;
        Ap = A * Ap;
    }
    Ap = Mat6::Identity();
    for (int i = 1; i <= Hp; ++i) {
        Ap = A * Ap;
        const int r = 3 * (i - 1);
        P.Psi.block(r, 0, 3, 6) = model.C * Ap;
        P.Gamma.block(r, 0, 3, 3) = model.C * S[i];
        for (int p = 0; p < std::min(i, Hu); ++p)
            P.Theta.block(r, 3 * p, 3, 3) = model.C * S[i - p];
        for (int j = 0; j < i; ++j)
            P.Xi.block(r, 3 * j, 3, 3) = CAW[i - 1 - j];
    }
    return P;
}

Eigen::VectorXd lift_disturbance(const Eigen::Vector3d& fd, int Hp)
{
    return fd.replicate(Hp, 1);
}

Eigen::VectorXd predict_outputs(const PredictionMatrices& P, const Vec6& x, const Eigen::Vector3d& u_prev,
                                const Eigen::VectorXd& dU, const Eigen::VectorXd& F)
{
    return P.Psi * x + P.Gamma * u_prev + P.Theta * dU + P.Xi * F;
}

LinearConstraints build_constraints(const PredictionMatrices& P, const MpcConfig& cfg, const Vec6& x,
                                    const Eigen::Vector3d& u_prev, const Eigen::VectorXd& F)
{
    const int Hu = P.Hu, Hp = P.Hp;
    const int nin = 6 * Hu;
    const int nout = cfg.output_constraints ? 6 * Hp : 0;
    LinearConstraints c;
    c.W = Eigen::MatrixXd::Zero(nin + nout, 3 * Hu);
    c.w = Eigen::VectorXd::Zero(nin + nout);

    // u(k+j) = u_prev + sum_{p<=j} du(k+p)
    for (int j = 0; j < Hu; ++j)
        for (int p = 0; p <= j; ++p) {
            c.W.block(3 * j, 3 * p, 3, 3) = Eigen::Matrix3d::Identity();
            c.W.block(3 * Hu + 3 * j, 3 * p, 3, 3) = -Eigen::Matrix3d::Identity();
        }
    for (int j = 0; j < Hu; ++j) {
        c.w.segment<3>(3 * j) = cfg.u_max - u_prev;
        c.w.segment<3>(3 * Hu + 3 * j) = u_prev - cfg.u_min;
    }
    if (nout > 0) {
        const Eigen::VectorXd free = P.Psi * x + P.Gamma * u_prev + P.Xi * F;
        c.W.block(nin, 0, 3 * Hp, 3 * Hu) = P.Theta;
        c.W.block(nin + 3 * Hp, 0, 3 * Hp, 3 * Hu) = -P.Theta;
        for (int i = 0; i < Hp; ++i) {
            c.w.segment<3>(nin + 3 * i) = cfg.y_max - free.segment<3>(3 * i);
            c.w.segment<3>(nin + 3 * Hp + 3 * i) = free.segment<3>(3 * i) - cfg.y_min;
        }
    }
    return c;
}

QpProblem build_qp(const PredictionMatrices& P, const MpcConfig& cfg, const Vec6& x, const Eigen::Vector3d& u_prev,
                   const Eigen::VectorXd& F, const Eigen::VectorXd& Yref)
{
    const Eigen::VectorXd Qd = cfg.Q.replicate(P.Hp, 1);
    const Eigen::VectorXd Rd = cfg.R.replicate(P.Hu, 1);
    QpProblem q;
    q.H = P.Theta.transpose() * Qd.asDiagonal() * P.Theta;
    q.H.diagonal() += Rd;
    q.H = (0.5 * (q.H + q.H.transpose())).eval();
    const Eigen::VectorXd err = P.Psi * x + P.Gamma * u_prev + P.Xi * F - Yref;
    q.g = P.Theta.transpose() * (Qd.asDiagonal() * err);
    auto c = build_constraints(P, cfg, x, u_prev, F);
    q.W = std::move(c.W);
    q.w = std::move(c.w);
    return q;
}

MpcController::MpcController(const DiscretePlantModel& model, MpcConfig cfg) : cfg_(std::move(cfg))
{
    cfg_.validate();
    P_ = build_prediction(model, cfg_.Hp, cfg_.Hu);
}

void MpcController::reset(const Eigen::Vector3d& u_prev)
{
    state_ = {};
    state_.u_prev = u_prev;
}

Eigen::Vector3d MpcController::step(const Vec6& xhat, const std::vector<Eigen::Vector3d>& yref,
                                    const Eigen::Vector3d& fd, MpcDiagnostics* diag)
{
    if (yref.empty())
        throw Error(ErrorKind::InvalidParameter, "reference window is empty");
    Eigen::VectorXd Y(3 * cfg_.Hp);
    for (int i = 0; i < cfg_.Hp; ++i)
        Y.segment<3>(3 * i) = yref[std::min<std::size_t>(i, yref.size() - 1)];
    const Eigen::VectorXd F = lift_disturbance(fd, cfg_.Hp);
    const QpProblem qp = build_qp(P_, cfg_, xhat, state_.u_prev, F, Y);

    QpOptions opt;
    opt.tol = cfg_.tol;
    opt.max_iterations = cfg_.max_iterations;
    opt.warm_active = state_.active;
    MpcDiagnostics d;
    QpResult r;
    try {
        r = solve_qp(qp.H, qp.g, qp.W, qp.w, opt);
    } catch (const Error&) {
        r.status = QpStatus::Infeasible;
    }
    d.status = r.status;
    d.iterations = r.iterations;

    Eigen::Vector3d du = Eigen::Vector3d::Zero();
    if (r.status == QpStatus::Optimal) {
        du = r.x.head<3>();
        state_.last_dU = r.x;
        state_.active = r.active;
        d.active = static_cast<int>(r.active.size());
        d.cost = r.objective;
    } else {
        d.fallback = true;
        ++state_.fallback_count;
        if (state_.last_dU.size() >= 6) {
            // next element of the stored sequence, then shift it
            du = state_.last_dU.segment<3>(3);
            const Eigen::Index n = state_.last_dU.size();
            Eigen::VectorXd shifted = Eigen::VectorXd::Zero(n);
            shifted.head(n - 3) = state_.last_dU.tail(n - 3);
            state_.last_dU = shifted;
        }
        state_.active.clear();
    }
    Eigen::Vector3d u = state_.u_prev + du;
    const Eigen::Vector3d clipped = u.cwiseMax(cfg_.u_min).cwiseMin(cfg_.u_max);
    d.saturated = (clipped - u).cwiseAbs().maxCoeff() > 1e-12;
    u = clipped;
    state_.u_prev = u;
    if (diag)
        *diag = d;
    return u;
}

Mat63 block_observer_gain(const Eigen::Vector2d& Lx, const Eigen::Vector2d& Ly, const Eigen::Vector2d& Ll)
{
    Mat63 L = Mat63::Zero();
    L.block<2, 1>(0, 0) = Lx;
    L.block<2, 1>(2, 1) = Ly;
    L.block<2, 1>(4, 2) = Ll;
    return L;
}

Mat63 default_observer_gain()
{
    return block_observer_gain({0.429, 0.265}, {0.415, 0.277}, {0.435, 0.297});
}

Vec6 state_observer_step(const DiscretePlantModel& model, const Mat63& L, const Vec6& xhat,
                         const Eigen::Vector3d& u, const Eigen::Vector3d& fd, const Eigen::Vector3d& y)
{
    return (model.A - L * model.C) * xhat + model.B * u + model.Wd * fd + L * y;
}

}  // namespace crane
