#pragma once

#include <Eigen/Dense>

#include "crane/plant.hpp"

namespace crane {

struct SwingEstimate {
    double thx = 0, thy = 0;
    double thx_dot = 0, thy_dot = 0;

    Eigen::Vector2d angles() const { return {thx, thy}; }
    Eigen::Vector2d rates() const { return {thx_dot, thy_dot}; }
};

struct SwingControlConfig {
    Eigen::Vector2d k{0.17, 0.17};  // s^-1
    double v_l_max = 0.1;
    bool enabled = true;

    // k_i >= 1.5 v_l_max on both channels (only enforced when enabled)
    bool gains_valid() const;
};

struct SwingObserverConfig {
    Eigen::Vector2d Lx{1.0, 25.0};
    Eigen::Vector2d Ly{1.0, 25.0};
    double Ts = 0.01;

    // l1 = (d1 + 2)/eps, l2 = (eps^2 + d1 eps + d2)/(eps Ts), same gains on both channels
    static SwingObserverConfig high_gain(double eps, double d1, double d2, double Ts);

    // Error dynamics [[1 - l1, Ts], [-l2, 1]]
    static Eigen::Matrix2d error_matrix(const Eigen::Vector2d& L, double Ts);
    double spectral_radius() const;
    bool stable() const { return spectral_radius() < 1.0; }
};

// Rows map trolley accelerations into the swing equations.
Eigen::Matrix2d swing_h_matrix(double thx, double thy);

Eigen::Vector2d swing_correction(const SwingEstimate& est, const Eigen::Vector2d& a_ref,
                                 const SwingControlConfig& cfg, Mode mode = Mode::ThreeD, double margin = 0.05);

class SwingObserver {
public:
    explicit SwingObserver(SwingObserverConfig cfg = {});

    const SwingObserverConfig& config() const { return cfg_; }
    SwingEstimate estimate() const;
    void reset(const SwingEstimate& est = {});

    // Advances x(k) -> x(k+1) with the innovation from y(k); returns x(k+1).
    SwingEstimate step(double thx_meas, double thy_meas);

private:
    SwingObserverConfig cfg_;
    Eigen::Vector4d x_ = Eigen::Vector4d::Zero();  // thx, thx_dot, thy, thy_dot
};

// V = 1/2 (l cos^2(thy) thx_dot^2 + l thy_dot^2) + g (1 - cos thx cos thy)
double storage_energy(const SwingEstimate& s, double l, double g = 9.81);

// -1.5 l_dot (cos^2(thy) thx_dot^2 + thy_dot^2) - thdot^T H a
double storage_rate(const SwingEstimate& s, double l_dot, const Eigen::Vector2d& a_trolley);

}  // namespace crane
