#include <cmath>
#include <random>

#include "doctest.h"

#include "crane/error.hpp"
#include "crane/plant.hpp"
#include "crane/swing.hpp"

using namespace crane;

TEST_CASE("no swing rate means no correction")
{
    SwingControlConfig cfg;
    const SwingEstimate e{0.1, -0.05, 0.0, 0.0};
    const Eigen::Vector2d a = swing_correction(e, {0.02, -0.03}, cfg);
    CHECK(a[0] == doctest::Approx(0.02).epsilon(1e-15));
    CHECK(a[1] == doctest::Approx(-0.03).epsilon(1e-15));
}

TEST_CASE("correction inverts the coupling matrix")
{
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    SwingControlConfig cfg;
    cfg.k = {0.3, 0.2};
    for (int i = 0; i < 200; ++i) {
        const SwingEstimate e{0.6 * U(rng), 0.6 * U(rng), U(rng), U(rng)};
        const Eigen::Vector2d aref(U(rng), U(rng));
        const Eigen::Vector2d a = swing_correction(e, aref, cfg);
        const Eigen::Matrix2d H = swing_h_matrix(e.thx, e.thy);
        // H K^-1 (a - a_ref) = thdot
        const Eigen::Vector2d lhs = H * (cfg.k.cwiseInverse().asDiagonal() * (a - aref));
        CHECK(lhs[0] == doctest::Approx(e.thx_dot).epsilon(1e-12));
        CHECK(lhs[1] == doctest::Approx(e.thy_dot).epsilon(1e-12));
    }
}

TEST_CASE("correction refuses states near the singular coupling")
{
    SwingControlConfig cfg;
    try {
        swing_correction({1.55, 0.0, 0.1, 0.0}, {0, 0}, cfg);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK((e.kind() == ErrorKind::NearSingularH || e.kind() == ErrorKind::StateOutOfDomain));
    }
}

TEST_CASE("gain condition needs k >= 1.5 v_l_max")
{
    SwingControlConfig cfg;
    CHECK(cfg.gains_valid());
    cfg.k = {0.14, 0.17};
    CHECK_FALSE(cfg.gains_valid());
    cfg.k = {0.15, 0.15};
    CHECK(cfg.gains_valid());
}

TEST_CASE("default observer gains give a double pole at one half")
{
    const SwingObserverConfig c;
    CHECK(c.spectral_radius() == doctest::Approx(0.5).epsilon(1e-6));
    const Eigen::Matrix2d E = SwingObserverConfig::error_matrix(c.Lx, c.Ts);
    CHECK(E.trace() == doctest::Approx(1.0));
    CHECK(E.determinant() == doctest::Approx(0.25));
    SwingObserverConfig bad;
    bad.Lx = {2.5, 25.0};
    CHECK_FALSE(bad.stable());
    CHECK_THROWS_AS(SwingObserver{bad}, Error);
}

TEST_CASE("high-gain observer design places the poles at eps = 1")
{
    const double d1 = -1.0, d2 = 0.25;
    const SwingObserverConfig c = SwingObserverConfig::high_gain(1.0, d1, d2, 0.01);
    const Eigen::Matrix2d E = SwingObserverConfig::error_matrix(c.Lx, 0.01);
    // z^2 + d1 z + d2
    CHECK(-E.trace() == doctest::Approx(d1).epsilon(1e-12));
    CHECK(E.determinant() == doctest::Approx(d2).epsilon(1e-12));
    CHECK(c.Lx == c.Ly);
}

TEST_CASE("observer converges on a measured pendulum")
{
    SwingObserver obs;
    const double w = std::sqrt(9.81 / 0.4), Ts = 0.01;
    for (int k = 0; k < 300; ++k) {
        const double t = k * Ts;
        obs.step(0.05 * std::cos(w * t), -0.03 * std::sin(w * t));
    }
    const double t = 300 * Ts;
    const SwingEstimate e = obs.estimate();
    CHECK(e.thx == doctest::Approx(0.05 * std::cos(w * t)).epsilon(0.02).scale(0.05));
    CHECK(e.thx_dot == doctest::Approx(-0.05 * w * std::sin(w * t)).epsilon(0.1).scale(0.05 * w));
    obs.reset();
    CHECK(obs.estimate().thx == 0.0);
}

TEST_CASE("storage rate matches the derivative along the swing dynamics")
{
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const double g = 9.81;
    for (int i = 0; i < 200; ++i) {
        const double thx = 0.5 * U(rng), thy = 0.5 * U(rng), wx = U(rng), wy = U(rng);
        const double l = 0.3 + 0.1 * U(rng), ld = 0.1 * U(rng);
        const Eigen::Vector2d a(U(rng), U(rng));
        const Eigen::Vector2d dd = swing_angle_accelerations(thx, thy, wx, wy, l, ld, a[0], a[1], g);
        const double h = 1e-6;
        const double Vp = storage_energy({thx + h * wx, thy + h * wy, wx + h * dd[0], wy + h * dd[1]}, l + h * ld, g);
        const double Vm = storage_energy({thx - h * wx, thy - h * wy, wx - h * dd[0], wy - h * dd[1]}, l - h * ld, g);
        CHECK((Vp - Vm) / (2 * h) == doctest::Approx(storage_rate({thx, thy, wx, wy}, ld, a)).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("storage function vanishes only at rest")
{
    CHECK(storage_energy({}, 0.3) == 0.0);
    CHECK(storage_energy({0.1, 0, 0, 0}, 0.3) > 0.0);
    CHECK(storage_energy({0, 0, 0.2, 0}, 0.3) > 0.0);
}
