#include "crane/model.hpp"

#include <cmath>

#include "crane/error.hpp"

namespace crane {

AxisDiscretization discretize_axis(double J, double B, double K, double Ts)
{
    if (!(J > 0) || !(B > 0) || !(K > 0) || !(Ts > 0))
        throw Error(ErrorKind::InvalidParameter, "discretize_axis needs positive J, B, K, Ts");
    AxisDiscretization ax;
    ax.a1 = std::exp(-B * Ts / J);
    // 1 - a1 without cancellation for small B*Ts/J
    const double one_minus = -std::expm1(-B * Ts / J);
    ax.b1 = K / B * one_minus;
    ax.bd1 = one_minus / B;
    ax.Ts = Ts;
    return ax;
}

DiscretePlantModel assemble_model(const std::array<AxisDiscretization, 3>& axes, double Ts)
{
    DiscretePlantModel m;
    m.Ts = Ts;
    m.axes = axes;
    for (int i = 0; i < 3; ++i) {
        const auto& ax = axes[i];
        if (ax.Ts != Ts)
            throw Error(ErrorKind::MismatchedSampleTime, "axis sample time differs from model sample time");
        const int r = 2 * i;
        m.A(r, r) = 1.0;
        m.A(r, r + 1) = Ts;
        m.A(r + 1, r + 1) = ax.a1;
        m.B(r + 1, i) = ax.b1;
        m.Wd(r + 1, i) = -ax.bd1;
        m.C(i, r) = 1.0;
    }
    return m;
}

DiscretePlantModel model_from_params(const CraneParameters& p, double Ts)
{
    std::array<AxisDiscretization, 3> axes;
    for (int i = 0; i < 3; ++i)
        axes[i] = discretize_axis(p[i].J, p[i].B, p[i].K, Ts);
    return assemble_model(axes, Ts);
}

double backward_difference_a1(double J, double B, double Ts)
{
    return J / (J + Ts * B);
}

bool axis_controllable(const AxisDiscretization& ax)
{
    Eigen::Matrix2d A;
    A << 1, ax.Ts, 0, ax.a1;
    const Eigen::Vector2d b(0, ax.b1);
    Eigen::Matrix2d ctrb;
    ctrb << b, A * b;
    return Eigen::FullPivLU<Eigen::Matrix2d>(ctrb).rank() == 2;
}

bool axis_observable(const AxisDiscretization& ax)
{
    Eigen::Matrix2d A;
    A << 1, ax.Ts, 0, ax.a1;
    const Eigen::RowVector2d c(1, 0);
    Eigen::Matrix2d obsv;
    obsv << c, c * A;
    return Eigen::FullPivLU<Eigen::Matrix2d>(obsv).rank() == 2;
}

}  // namespace crane
