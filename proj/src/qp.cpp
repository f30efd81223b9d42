#include "crane/qp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include "crane/error.hpp"

namespace crane {

const char* to_string(QpStatus s)
{
    switch (s) {
    case QpStatus::Optimal: return "optimal";
    case QpStatus::Infeasible: return "infeasible";
    case QpStatus::MaxIterations: return "max_iterations";
    }
    return "?";
}

double qp_objective(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::VectorXd& x)
{
    return 0.5 * x.dot(H * x) + g.dot(x);
}

namespace {

struct Normalized {
    Eigen::MatrixXd N;  // rows n_j = W_j / |W_j|
    Eigen::VectorXd b;  // w_j / |W_j|
    Eigen::VectorXd scale;
    std::vector<char> usable;
};

Normalized normalize_rows(const Eigen::MatrixXd& W, const Eigen::VectorXd& w)
{
    Normalized r;
    const Eigen::Index m = W.rows();
    r.N = W;
    r.b = w;
    r.scale = Eigen::VectorXd::Ones(m);
    r.usable.assign(m, 1);
    for (Eigen::Index j = 0; j < m; ++j) {
        const double nrm = W.row(j).norm();
        if (nrm < 1e-14) {
            r.usable[j] = 0;
            continue;
        }
        r.scale[j] = nrm;
        r.N.row(j) /= nrm;
        r.b[j] /= nrm;
    }
    return r;
}

Eigen::LLT<Eigen::MatrixXd> factor(const Eigen::MatrixXd& H)
{
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorKind::NumericalBreakdown, "QP Hessian is not positive definite");
    return llt;
}

}  // namespace

QpResult solve_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::MatrixXd& W,
                  const Eigen::VectorXd& w, const QpOptions& opt)
{
    const Eigen::Index n = H.rows();
    const Eigen::Index m = W.rows();
    const auto llt = factor(H);
    const Normalized C = normalize_rows(W, w);
    const double inf = std::numeric_limits<double>::infinity();
    const double tol = opt.tol;

    QpResult res;
    res.lambda = Eigen::VectorXd::Zero(m);
    for (Eigen::Index j = 0; j < m; ++j)
        if (!C.usable[j] && w[j] < -tol) {
            res.status = QpStatus::Infeasible;
            res.x = -llt.solve(g);
            return res;
        }

    Eigen::VectorXd x = -llt.solve(g);
    std::vector<int> A;
    std::vector<double> u;

    // violation of row j at x (positive when violated)
    auto violation = [&](int j) { return C.N.row(j).dot(x) - C.b[j]; };
    auto in_active = [&](int j) { return std::find(A.begin(), A.end(), j) != A.end(); };

    int iter = 0;
    while (true) {
        int p = -1;
        double worst = tol;
        for (int j : opt.warm_active) {
            if (j < 0 || j >= m || !C.usable[j] || in_active(j))
                continue;
            const double v = violation(j);
            if (v > worst) {
                worst = v;
                p = j;
            }
        }
        if (p < 0)
            for (int j = 0; j < m; ++j) {
                if (!C.usable[j] || in_active(j))
                    continue;
                const double v = violation(j);
                if (v > worst) {
                    worst = v;
                    p = j;
                }
            }
        if (p < 0) {
            res.status = QpStatus::Optimal;
            break;
        }

        double up = 0;
        const Eigen::VectorXd np = C.N.row(p).transpose();
        bool added = false;
        while (!added) {
            if (++iter > opt.max_iterations) {
                res.status = QpStatus::MaxIterations;
                res.x = x;
                res.iterations = iter;
                return res;
            }
            const int q = static_cast<int>(A.size());
            const Eigen::VectorXd Hn = llt.solve(np);
            Eigen::VectorXd z = Hn;
            Eigen::VectorXd r;
            if (q > 0) {
                Eigen::MatrixXd Na(n, q);
                for (int i = 0; i < q; ++i)
                    Na.col(i) = C.N.row(A[i]).transpose();
                const Eigen::MatrixXd HNa = llt.solve(Na);
                const Eigen::MatrixXd M = Na.transpose() * HNa;
                r = M.ldlt().solve(Na.transpose() * Hn);
                z -= HNa * r;
            }
            double t1 = inf;
            int k = -1;
            for (int i = 0; i < q; ++i)
                if (r[i] > 1e-14) {
                    const double ti = u[i] / r[i];
                    if (ti < t1) {
                        t1 = ti;
                        k = i;
                    }
                }
            const double zn = z.dot(np);
            const double t2 = zn > 1e-10 * np.dot(Hn) ? violation(p) / zn : inf;
            if (t1 == inf && t2 == inf) {
                res.status = QpStatus::Infeasible;
                res.x = x;
                res.iterations = iter;
                return res;
            }
            const double t = std::min(t1, t2);
            if (t2 < inf)
                x -= t * z;
            for (int i = 0; i < q; ++i)
                u[i] -= t * r[i];
            up += t;
            if (t2 <= t1) {
                A.push_back(p);
                u.push_back(up);
                added = true;
            } else {
                A.erase(A.begin() + k);
                u.erase(u.begin() + k);
            }
        }
    }
    res.x = x;
    res.iterations = iter;
    res.active = A;
    for (std::size_t i = 0; i < A.size(); ++i)
        res.lambda[A[i]] = std::max(0.0, u[i]) / C.scale[A[i]];
    res.objective = qp_objective(H, g, x);
    return res;
}

QpResult solve_qp_enumerate(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::MatrixXd& W,
                            const Eigen::VectorXd& w, double tol, bool parallel)
{
    const int n = static_cast<int>(H.rows());
    const int m = static_cast<int>(W.rows());
    if (m > 30)
        throw Error(ErrorKind::InvalidParameter, "enumeration oracle limited to 30 constraints");
    const auto llt = factor(H);
    const Normalized C = normalize_rows(W, w);
    const Eigen::VectorXd x0 = -llt.solve(g);
    const Eigen::MatrixXd HNt = llt.solve(C.N.transpose());  // n x m
    const Eigen::MatrixXd G = C.N * HNt;                     // m x m
    const Eigen::VectorXd d = C.b - C.N * x0;                // slack at the unconstrained minimizer

    const std::uint64_t total = std::uint64_t{1} << m;
    const int kmax = std::min(n, m);

    double best_obj = std::numeric_limits<double>::infinity();
    std::uint64_t best_mask = 0;
    bool found = false;

    auto evaluate = [&](std::uint64_t mask, double& obj) -> bool {
        const int k = std::popcount(mask);
        if (k > kmax)
            return false;
        std::vector<int> S;
        S.reserve(k);
        for (int j = 0; j < m; ++j)
            if (mask >> j & 1U) {
                if (!C.usable[j])
                    return false;
                S.push_back(j);
            }
        Eigen::VectorXd lam;
        if (k > 0) {
            Eigen::MatrixXd Gs(k, k);
            Eigen::VectorXd ds(k);
            for (int a = 0; a < k; ++a) {
                ds[a] = d[S[a]];
                for (int b = 0; b < k; ++b)
                    Gs(a, b) = G(S[a], S[b]);
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(Gs);
            lu.setThreshold(1e-10);
            if (lu.rank() < k)
                return false;
            // rows in S held at equality: N_S x = b_S with x = x0 - HNt_S lam
            lam = lu.solve(-ds);
            if (((Gs * lam + ds).cwiseAbs().maxCoeff()) > 1e-8)
                return false;
        }
        Eigen::VectorXd x = x0;
        for (int a = 0; a < k; ++a)
            x -= HNt.col(S[a]) * lam[a];
        for (int j = 0; j < m; ++j) {
            if (!C.usable[j]) {
                if (w[j] < -tol)
                    return false;
                continue;
            }
            if (C.N.row(j).dot(x) - C.b[j] > tol)
                return false;
        }
        obj = qp_objective(H, g, x);
        return true;
    };

    if (parallel) {
#pragma omp parallel
        {
            double local_obj = std::numeric_limits<double>::infinity();
            std::uint64_t local_mask = 0;
            bool local_found = false;
#pragma omp for schedule(dynamic, 256) nowait
            for (std::int64_t mk = 0; mk < static_cast<std::int64_t>(total); ++mk) {
                double obj;
                if (evaluate(static_cast<std::uint64_t>(mk), obj) &&
                    (obj < local_obj || (obj == local_obj && static_cast<std::uint64_t>(mk) < local_mask))) {
                    local_obj = obj;
                    local_mask = static_cast<std::uint64_t>(mk);
                    local_found = true;
                }
            }
#pragma omp critical
            {
                if (local_found && (local_obj < best_obj || (local_obj == best_obj && local_mask < best_mask))) {
                    best_obj = local_obj;
                    best_mask = local_mask;
                    found = true;
                }
            }
        }
    } else {
        for (std::uint64_t mk = 0; mk < total; ++mk) {
            double obj;
            if (evaluate(mk, obj) && obj < best_obj) {
                best_obj = obj;
                best_mask = mk;
                found = true;
            }
        }
    }

    QpResult res;
    res.lambda = Eigen::VectorXd::Zero(m);
    if (!found) {
        res.status = QpStatus::Infeasible;
        res.x = x0;
        return res;
    }
    std::vector<int> S;
    for (int j = 0; j < m; ++j)
        if (best_mask >> j & 1U)
            S.push_back(j);
    const int k = static_cast<int>(S.size());
    Eigen::VectorXd x = x0;
    if (k > 0) {
        Eigen::MatrixXd Gs(k, k);
        Eigen::VectorXd ds(k);
        for (int a = 0; a < k; ++a) {
            ds[a] = d[S[a]];
            for (int b = 0; b < k; ++b)
                Gs(a, b) = G(S[a], S[b]);
        }
        const Eigen::VectorXd lam = Gs.fullPivLu().solve(-ds);
        for (int a = 0; a < k; ++a) {
            x -= HNt.col(S[a]) * lam[a];
            res.lambda[S[a]] = lam[a] / C.scale[S[a]];
        }
    }
    res.status = QpStatus::Optimal;
    res.x = x;
    res.active = S;
    res.objective = qp_objective(H, g, x);
    return res;
}

KktResiduals kkt_residuals(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::MatrixXd& W,
                           const Eigen::VectorXd& w, const Eigen::VectorXd& x, const Eigen::VectorXd& lambda)
{
    KktResiduals r;
    r.stationarity = (H * x + g + W.transpose() * lambda).cwiseAbs().maxCoeff();
    if (W.rows() > 0) {
        const Eigen::VectorXd slack = w - W * x;
        r.primal = std::max(0.0, -slack.minCoeff());
        r.dual = std::max(0.0, -lambda.minCoeff());
        r.complementarity = lambda.cwiseProduct(slack).cwiseAbs().maxCoeff();
    }
    return r;
}

}  // namespace crane
