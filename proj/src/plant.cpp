#include "crane/plant.hpp"

#include <cmath>
#include <numbers>

#include "crane/error.hpp"

namespace crane {

CraneParameters CraneParameters::laboratory(double load_mass)
{
    CraneParameters p;
    p.axes[AxisX] = {75e-4, 96.3e-3, 14e-4, 23e-4, 21e-4, 13e-3, 37.5e-3};
    p.axes[AxisY] = {40e-4, 97.5e-3, 14e-4, 14e-4, 11e-4, 13e-3, 37.5e-3};
    p.axes[AxisL] = {65e-4, 24.55e-2, 14e-4, 13e-4, 14e-4, 13e-3, 13.5e-3};
    p.m = load_mass;
    p.g = 9.81;
    return p;
}

void CraneParameters::validate() const
{
    for (const auto& a : axes) {
        if (!(a.J > 0 && a.B > 0 && a.K > 0 && a.a1 >= 0 && a.a2 >= 0 && a.rg > 0 && a.rg < 1 && a.Rp > 0))
            throw Error(ErrorKind::InvalidParameter, "axis parameters out of range");
    }
    if (!(g > 0) || !(m >= 0))
        throw Error(ErrorKind::InvalidParameter, "mass or gravity out of range");
}

StateVec CraneState::vec() const
{
    StateVec v;
    v << x, vx, y, vy, l, vl, thx, thx_dot, thy, thy_dot;
    return v;
}

CraneState CraneState::from_vec(const StateVec& v)
{
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]};
}

double CraneState::pos(int axis) const
{
    return axis == AxisX ? x : axis == AxisY ? y : l;
}

double CraneState::vel(int axis) const
{
    return axis == AxisX ? vx : axis == AxisY ? vy : vl;
}

double coulomb_friction(double v, double a1, double a2, double deadband)
{
    if (v > deadband)
        return a1;
    if (v < -deadband)
        return -a2;
    return 0.0;
}

namespace {

void check_domain(const CraneState& s, const PlantOptions& opt)
{
    const double lim = std::numbers::pi / 2 - opt.angle_margin;
    if (!std::isfinite(s.l) || s.l < opt.l_min)
        throw Error(ErrorKind::StateOutOfDomain, "rope length below minimum");
    if (!(std::abs(s.thx) <= lim) || !(std::abs(s.thy) <= lim))
        throw Error(ErrorKind::StateOutOfDomain, "swing angle beyond limit");
}

}  // namespace

Eigen::Vector3d axis_accelerations(const CraneState& s, const PlantInput& u, const CraneParameters& p,
                                   const PlantOptions& opt)
{
    check_domain(s, opt);
    const bool planar = opt.mode == Mode::TwoD;
    const double thy = planar ? 0.0 : s.thy;
    const double thy_dot = planar ? 0.0 : s.thy_dot;
    const double Sx = std::sin(s.thx), Cx = std::cos(s.thx);
    const double Sy = std::sin(thy), Cy = std::cos(thy);

    // Rope direction terms shared by the three load disturbances.
    const Eigen::Vector3d nu(Sx * Cy, Sy, 1.0);
    const double w2 = Cy * Cy * s.thx_dot * s.thx_dot + thy_dot * thy_dot;
    const double tension_free = s.l * w2 + p.g * Cx * Cy;

    const Eigen::Vector3d v(s.vx, planar ? 0.0 : s.vy, s.vl);
    Eigen::Vector3d volts = u.v;
    if (planar)
        volts[AxisY] = 0.0;

    Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs;
    for (int i = 0; i < 3; ++i) {
        const AxisParams& a = p[i];
        const double c = a.rR() * p.m * nu[i];
        M.row(i) = c * nu.transpose();
        M(i, i) += a.J;
        rhs[i] = a.K * volts[i] - a.B * v[i] - coulomb_friction(v[i], a.a1, a.a2, opt.deadband) + c * tension_free;
    }
    if (planar) {
        M.row(AxisY).setZero();
        M.col(AxisY).setZero();
        M(AxisY, AxisY) = 1.0;
        rhs[AxisY] = 0.0;
    }

    Eigen::FullPivLU<Eigen::Matrix3d> lu(M);
    if (!lu.isInvertible())
        throw Error(ErrorKind::SingularMassMatrix, "actuator coupling matrix not invertible");
    Eigen::Vector3d acc = lu.solve(rhs);
    if (!acc.allFinite())
        throw Error(ErrorKind::SingularMassMatrix, "non-finite accelerations");
    return acc;
}

Eigen::Vector2d swing_angle_accelerations(double thx, double thy, double thx_dot, double thy_dot, double l,
                                          double l_dot, double ax, double ay, double g)
{
    const double Sx = std::sin(thx), Cx = std::cos(thx);
    const double Sy = std::sin(thy), Cy = std::cos(thy);
    const double thx_dd = -(Cx * ax + 2 * Cy * l_dot * thx_dot - 2 * l * Sy * thx_dot * thy_dot + g * Sx) / (l * Cy);
    const double thy_dd =
        -(Cy * ay - Sx * Sy * ax + 2 * l_dot * thy_dot + l * Cy * Sy * thx_dot * thx_dot + g * Cx * Sy) / l;
    return {thx_dd, thy_dd};
}

StateVec continuous_derivative(const CraneState& s, const PlantInput& u, const CraneParameters& p,
                               const PlantOptions& opt)
{
    const Eigen::Vector3d acc = axis_accelerations(s, u, p, opt);
    const bool planar = opt.mode == Mode::TwoD;
    const double thy = planar ? 0.0 : s.thy;
    const double thy_dot = planar ? 0.0 : s.thy_dot;
    const Eigen::Vector2d th_dd =
        swing_angle_accelerations(s.thx, thy, s.thx_dot, thy_dot, s.l, s.vl, acc[0], acc[1], p.g);
    const double thx_dd = th_dd[0], thy_dd = th_dd[1];

    StateVec d;
    d << s.vx, acc[0], s.vy, acc[1], s.vl, acc[2], s.thx_dot, thx_dd, s.thy_dot, thy_dd;
    if (planar) {
        d[2] = d[3] = d[8] = d[9] = 0.0;
    }
    if (!opt.swing)
        d[6] = d[7] = d[8] = d[9] = 0.0;
    return d;
}

CraneState step(const CraneState& s, const PlantInput& u, const CraneParameters& p, double dt, int substeps,
                const PlantOptions& opt)
{
    if (!(dt > 0) || substeps < 1)
        throw Error(ErrorKind::InvalidParameter, "step needs dt > 0 and substeps >= 1");
    const double h = dt / substeps;
    StateVec x = s.vec();
    auto f = [&](const StateVec& z) { return continuous_derivative(CraneState::from_vec(z), u, p, opt); };
    for (int i = 0; i < substeps; ++i) {
        const StateVec k1 = f(x);
        const StateVec k2 = f(x + 0.5 * h * k1);
        const StateVec k3 = f(x + 0.5 * h * k2);
        const StateVec k4 = f(x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    CraneState out = CraneState::from_vec(x);
    check_domain(out, opt);
    return out;
}

LoadPosition load_position(const CraneState& s)
{
    const double Sx = std::sin(s.thx), Cx = std::cos(s.thx);
    const double Sy = std::sin(s.thy), Cy = std::cos(s.thy);
    return {s.x + s.l * Sx * Cy, s.y + s.l * Sy, -s.l * Cx * Cy};
}

Eigen::Vector3d load_velocity(const CraneState& s)
{
    const double Sx = std::sin(s.thx), Cx = std::cos(s.thx);
    const double Sy = std::sin(s.thy), Cy = std::cos(s.thy);
    const double l = s.l;
    return {s.vx + s.vl * Sx * Cy + l * (Cx * Cy * s.thx_dot - Sx * Sy * s.thy_dot),
            s.vy + s.vl * Sy + l * Cy * s.thy_dot,
            -s.vl * Cx * Cy + l * (Sx * Cy * s.thx_dot + Cx * Sy * s.thy_dot)};
}

double total_energy(const CraneState& s, const CraneParameters& p)
{
    const Eigen::Vector3d v(s.vx, s.vy, s.vl);
    double e = 0;
    for (int i = 0; i < 3; ++i)
        e += 0.5 * p[i].J / p[i].rR() * v[i] * v[i];
    e += 0.5 * p.m * load_velocity(s).squaredNorm();
    e += p.m * p.g * load_position(s).z;
    return e;
}

}  // namespace crane
