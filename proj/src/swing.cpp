#include "crane/swing.hpp"

#include <cmath>
#include <numbers>

#include "crane/error.hpp"

namespace crane {

bool SwingControlConfig::gains_valid() const
{
    if (!enabled)
        return true;
    const double lo = 1.5 * v_l_max * (1 - 1e-12);
    return k[0] >= lo && k[1] >= lo;
}

SwingObserverConfig SwingObserverConfig::high_gain(double eps, double d1, double d2, double Ts)
{
    if (!(eps > 0) || !(Ts > 0))
        throw Error(ErrorKind::InvalidParameter, "observer needs eps > 0 and Ts > 0");
    SwingObserverConfig c;
    const Eigen::Vector2d L((d1 + 2) / eps, (eps * eps + d1 * eps + d2) / (eps * Ts));
    c.Lx = L;
    c.Ly = L;
    c.Ts = Ts;
    return c;
}

Eigen::Matrix2d SwingObserverConfig::error_matrix(const Eigen::Vector2d& L, double Ts)
{
    Eigen::Matrix2d M;
    M << 1 - L[0], Ts, -L[1], 1;
    return M;
}

double SwingObserverConfig::spectral_radius() const
{
    double r = 0;
    for (const auto* L : {&Lx, &Ly}) {
        const auto ev = error_matrix(*L, Ts).eigenvalues();
        r = std::max(r, ev.cwiseAbs().maxCoeff());
    }
    return r;
}

Eigen::Matrix2d swing_h_matrix(double thx, double thy)
{
    const double Sx = std::sin(thx), Cx = std::cos(thx);
    const double Sy = std::sin(thy), Cy = std::cos(thy);
    Eigen::Matrix2d H;
    H << Cx * Cy, 0, -Sx * Sy, Cy;
    return H;
}

Eigen::Vector2d swing_correction(const SwingEstimate& est, const Eigen::Vector2d& a_ref,
                                 const SwingControlConfig& cfg, Mode mode, double margin)
{
    if (!cfg.enabled)
        return a_ref;
    const double lim = std::numbers::pi / 2 - margin;
    if (!(std::abs(est.thx) < lim) || !(std::abs(est.thy) < lim))
        throw Error(ErrorKind::StateOutOfDomain, "swing estimate beyond angle limit");
    if (mode == Mode::TwoD) {
        const double c = std::cos(est.thx);
        if (c < 1e-3)
            throw Error(ErrorKind::NearSingularH, "cos(thx) too small");
        return {a_ref[0] + cfg.k[0] * est.thx_dot / c, a_ref[1]};
    }
    const double Sx = std::sin(est.thx), Cx = std::cos(est.thx);
    const double Sy = std::sin(est.thy), Cy = std::cos(est.thy);
    const double det = Cx * Cy * Cy;
    if (det < 1e-3)
        throw Error(ErrorKind::NearSingularH, "H matrix near singular");
    Eigen::Matrix2d Hinv;
    Hinv << Cy, 0, Sx * Sy, Cx * Cy;
    Hinv /= det;
    return a_ref + cfg.k.asDiagonal() * (Hinv * est.rates());
}

SwingObserver::SwingObserver(SwingObserverConfig cfg) : cfg_(cfg)
{
    if (!cfg_.stable())
        throw Error(ErrorKind::InvalidParameter, "swing observer error dynamics not stable");
}

SwingEstimate SwingObserver::estimate() const
{
    return {x_[0], x_[2], x_[1], x_[3]};
}

void SwingObserver::reset(const SwingEstimate& est)
{
    x_ << est.thx, est.thx_dot, est.thy, est.thy_dot;
}

SwingEstimate SwingObserver::step(double thx_meas, double thy_meas)
{
    const double Ts = cfg_.Ts;
    auto channel = [Ts](double th, double rate, double y, const Eigen::Vector2d& L) {
        const double e = y - th;
        return Eigen::Vector2d(th + Ts * rate + L[0] * e, rate + L[1] * e);
    };
    const Eigen::Vector2d cx = channel(x_[0], x_[1], thx_meas, cfg_.Lx);
    const Eigen::Vector2d cy = channel(x_[2], x_[3], thy_meas, cfg_.Ly);
    x_ << cx[0], cx[1], cy[0], cy[1];
    return estimate();
}

double storage_energy(const SwingEstimate& s, double l, double g)
{
    const double Cy = std::cos(s.thy);
    const double kin = 0.5 * l * (Cy * Cy * s.thx_dot * s.thx_dot + s.thy_dot * s.thy_dot);
    return kin + g * (1 - std::cos(s.thx) * Cy);
}

double storage_rate(const SwingEstimate& s, double l_dot, const Eigen::Vector2d& a)
{
    const double Cy = std::cos(s.thy);
    const double w2 = Cy * Cy * s.thx_dot * s.thx_dot + s.thy_dot * s.thy_dot;
    return -1.5 * l_dot * w2 - s.rates().dot(swing_h_matrix(s.thx, s.thy) * a);
}

}  // namespace crane
