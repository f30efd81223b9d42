#include "crane/sfb.hpp"

#include <cmath>

#include "crane/error.hpp"
#include "crane/mpc.hpp"

namespace crane {

Mat36 block_feedback_gain(const Eigen::RowVector2d& Kx, const Eigen::RowVector2d& Ky, const Eigen::RowVector2d& Kl)
{
    Mat36 K = Mat36::Zero();
    K.block<1, 2>(0, 0) = Kx;
    K.block<1, 2>(1, 2) = Ky;
    K.block<1, 2>(2, 4) = Kl;
    return K;
}

SfbConfig SfbConfig::defaults()
{
    SfbConfig c;
    c.K = block_feedback_gain({1290.0, 110.0}, {2590.0, 120.0}, {3840.0, 120.0});
    c.L = default_observer_gain();
    return c;
}

Eigen::RowVector2d place_feedback(const AxisDiscretization& ax, double p1, double p2)
{
    // A - bK = [[1, Ts], [-b k1, a1 - b k2]]
    // char: z^2 - (1 + a1 - b k2) z + (a1 - b k2) + Ts b k1
    const double s = p1 + p2, pr = p1 * p2;
    const double b = ax.b1;
    if (!(b > 0))
        throw Error(ErrorKind::DegenerateModel, "b1 must be positive");
    const double k2 = (1 + ax.a1 - s) / b;
    const double k1 = (pr - ax.a1 + b * k2) / (ax.Ts * b);
    return {k1, k2};
}

Eigen::Vector2d place_observer(const AxisDiscretization& ax, double p1, double p2)
{
    // A - lC = [[1 - l1, Ts], [-l2, a1]]
    // char: z^2 - (1 - l1 + a1) z + a1 (1 - l1) + Ts l2
    const double s = p1 + p2, pr = p1 * p2;
    const double l1 = 1 + ax.a1 - s;
    const double l2 = (pr - ax.a1 * (1 - l1)) / ax.Ts;
    return {l1, l2};
}

SfbConfig pole_placement_config(const DiscretePlantModel& model, double k_radius, double l_radius)
{
    SfbConfig c;
    std::array<Eigen::RowVector2d, 3> K;
    std::array<Eigen::Vector2d, 3> L;
    for (int i = 0; i < 3; ++i) {
        K[i] = place_feedback(model.axes[i], k_radius, k_radius * 0.95);
        L[i] = place_observer(model.axes[i], l_radius, l_radius * 0.95);
    }
    c.K = block_feedback_gain(K[0], K[1], K[2]);
    c.L = block_observer_gain(L[0], L[1], L[2]);
    return c;
}

FeedforwardGains feedforward_gains(const DiscretePlantModel& model)
{
    FeedforwardGains f;
    for (int i = 0; i < 3; ++i) {
        const auto& ax = model.axes[i];
        if (!(ax.b1 > 0))
            throw Error(ErrorKind::DegenerateModel, "feedforward needs b1 > 0 on every axis");
        f.Phi(i, 2 * i + 1) = (1 - ax.a1) / ax.b1;
        f.gamma[i] = model.Ts / ax.b1;
        f.lambda[i] = ax.bd1 / ax.b1;
    }
    return f;
}

Mat6 reference_model_A(double Ts)
{
    Mat6 A = Mat6::Identity();
    for (int i = 0; i < 3; ++i)
        A(2 * i, 2 * i + 1) = Ts;
    return A;
}

Mat63 reference_model_B(double Ts)
{
    Mat63 B = Mat63::Zero();
    for (int i = 0; i < 3; ++i)
        B(2 * i + 1, i) = Ts;
    return B;
}

Eigen::Vector3d feedforward_signal(const Vec6& x_rm, const Eigen::Vector3d& u_c, const Eigen::Vector3d& fd,
                                   const FeedforwardGains& g)
{
    return g.Phi * x_rm + g.gamma.cwiseProduct(u_c) + g.lambda.cwiseProduct(fd);
}

Eigen::Vector3d sfb_step(const Vec6& xhat, const Vec6& x_rm, const Eigen::Vector3d& u_ff, const Mat36& K,
                         const Eigen::Vector3d& u_max, bool* saturated)
{
    const Eigen::Vector3d raw = K * (x_rm - xhat) + u_ff;
    const Eigen::Vector3d u = raw.cwiseMax(-u_max).cwiseMin(u_max);
    if (saturated)
        *saturated = (raw.cwiseAbs().array() > u_max.array()).any();
    return u;
}

const char* to_string(DisturbanceSource s)
{
    switch (s) {
    case DisturbanceSource::None: return "none";
    case DisturbanceSource::ComputedTorque: return "computed-torque";
    case DisturbanceSource::Observer: return "dob";
    }
    return "?";
}

DisturbanceEstimate computed_torque(const Vec6& x_rm, const Eigen::Vector3d& u_c, const SwingEstimate& est,
                                    const CraneParameters& p, double deadband, const Eigen::Vector3d* velocity)
{
    const double Sx = std::sin(est.thx), Cx = std::cos(est.thx);
    const double Sy = std::sin(est.thy), Cy = std::cos(est.thy);
    const Eigen::Vector3d nu(Sx * Cy, Sy, 1.0);
    const double l = x_rm[4];
    const double w2 = Cy * Cy * est.thx_dot * est.thx_dot + est.thy_dot * est.thy_dot;
    const double tension = p.m * (nu.dot(u_c) - l * w2 - p.g * Cx * Cy);
    const Eigen::Vector3d v = velocity ? *velocity : Eigen::Vector3d(x_rm[1], x_rm[3], x_rm[5]);

    DisturbanceEstimate d;
    d.source = DisturbanceSource::ComputedTorque;
    for (int i = 0; i < 3; ++i) {
        const AxisParams& a = p[i];
        d.fd[i] = a.rR() * nu[i] * tension + coulomb_friction(v[i], a.a1, a.a2, deadband);
    }
    return d;
}

Eigen::Vector3d dob_step(const Eigen::Vector3d& fd, const Eigen::Vector3d& y, const Vec6& xhat,
                         const Eigen::Vector3d& Lw)
{
    const Eigen::Vector3d innov(y[0] - xhat[0], y[1] - xhat[2], y[2] - xhat[4]);
    return fd + Lw.cwiseProduct(innov);
}

DobAudit dob_pole_audit(const AxisDiscretization& ax, const Eigen::Vector2d& L, double lw)
{
    const double l1 = L[0], l2 = L[1], a1 = ax.a1, Ts = ax.Ts, w = -ax.bd1;
    // (z - 1 + l1)(z - a1)(z - 1) = z^3 + c2 z^2 + c1 z + c0 before the Ts terms
    const double r = 1 - l1;
    double c2 = -(r + a1 + 1);
    double c1 = r * a1 + r + a1;
    double c0 = -r * a1;
    c1 += Ts * l2;
    c0 += Ts * (-l2 + w * lw);
    Eigen::Matrix3d comp;
    comp << -c2, -c1, -c0, 1, 0, 0, 0, 1, 0;
    const Eigen::Vector3cd ev = comp.eigenvalues();
    DobAudit a;
    for (int i = 0; i < 3; ++i) {
        a.roots[i] = ev[i];
        a.max_modulus = std::max(a.max_modulus, std::abs(ev[i]));
    }
    a.pass = a.max_modulus < 1.0 && lw < 0;
    return a;
}

double spectral_radius(const Eigen::MatrixXd& M)
{
    return M.eigenvalues().cwiseAbs().maxCoeff();
}

StabilityAudit stability_audit(const DiscretePlantModel& model, const Mat36& K, const Mat63& L)
{
    StabilityAudit a;
    a.rho_feedback = spectral_radius(model.A - model.B * K);
    a.rho_observer = spectral_radius(model.A - L * model.C);
    a.rho_combined = spectral_radius(model.A - model.B * K - L * model.C);
    a.pass = a.rho_feedback < 1 && a.rho_observer < 1 && a.rho_combined < 1;
    return a;
}

}  // namespace crane
