#include <cmath>
#include <random>

#include "doctest.h"

#include "crane/error.hpp"
#include "crane/plant.hpp"

using namespace crane;

namespace {

CraneState random_state(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    CraneState s;
    s.x = 0.3 + 0.2 * U(rng);
    s.vx = 0.2 * U(rng);
    s.y = 0.3 + 0.2 * U(rng);
    s.vy = 0.2 * U(rng);
    s.l = 0.3 + 0.2 * U(rng);
    s.vl = 0.1 * U(rng);
    s.thx = 0.4 * U(rng);
    s.thx_dot = 0.5 * U(rng);
    s.thy = 0.4 * U(rng);
    s.thy_dot = 0.5 * U(rng);
    return s;
}

}  // namespace

TEST_CASE("laboratory parameters validate and broken ones are rejected")
{
    CraneParameters p = CraneParameters::laboratory(0.8);
    CHECK_NOTHROW(p.validate());
    p[AxisY].J = -1;
    CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("hanging load is held by the gravity-compensating hoist voltage")
{
    const CraneParameters p = CraneParameters::laboratory(0.8);
    CraneState s;
    s.l = 0.3;
    PlantInput u;
    u.v[AxisL] = -p[AxisL].rR() * p.m * p.g / p[AxisL].K;
    const Eigen::Vector3d a = axis_accelerations(s, u, p);
    CHECK(a.cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::Vector3d free = axis_accelerations(s, {}, p);
    CHECK(free[AxisL] > 0);  // unpowered hoist pays out
}

TEST_CASE("actuator power balance matches the energy rate")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const CraneParameters p = CraneParameters::laboratory(0.8);
    for (int trial = 0; trial < 200; ++trial) {
        const CraneState s = random_state(rng);
        PlantInput u;
        u.v = 10.0 * Eigen::Vector3d(U(rng), U(rng), U(rng));
        const StateVec d = continuous_derivative(s, u, p);
        const double h = 1e-6;
        const double dE = (total_energy(CraneState::from_vec(s.vec() + h * d), p) -
                           total_energy(CraneState::from_vec(s.vec() - h * d), p)) /
                          (2 * h);
        double power = 0;
        const Eigen::Vector3d v(s.vx, s.vy, s.vl);
        for (int i = 0; i < 3; ++i)
            power += v[i] * (p[i].K * u.v[i] - p[i].B * v[i] - coulomb_friction(v[i], p[i].a1, p[i].a2, 1e-4)) /
                     p[i].rR();
        CHECK(dE == doctest::Approx(power).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("load acceleration plus gravity stays along the rope")
{
    std::mt19937_64 rng(5);
    const CraneParameters p = CraneParameters::laboratory(0.8);
    for (int trial = 0; trial < 200; ++trial) {
        const CraneState s = random_state(rng);
        PlantInput u;
        u.v = Eigen::Vector3d(5, -3, 2);
        const StateVec d = continuous_derivative(s, u, p);
        const double h = 1e-6;
        const Eigen::Vector3d acc = (load_velocity(CraneState::from_vec(s.vec() + h * d)) -
                                     load_velocity(CraneState::from_vec(s.vec() - h * d))) /
                                    (2 * h);
        const LoadPosition lp = load_position(s);
        const Eigen::Vector3d rope(lp.x - s.x, lp.y - s.y, lp.z);
        const Eigen::Vector3d f = acc + Eigen::Vector3d(0, 0, p.g);
        CHECK(f.cross(rope).norm() <= 1e-6 * std::max(1.0, f.norm()));
    }
}

TEST_CASE("load velocity is the derivative of load position")
{
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 100; ++trial) {
        const CraneState s = random_state(rng);
        StateVec rate = StateVec::Zero();
        rate << s.vx, 0, s.vy, 0, s.vl, 0, s.thx_dot, 0, s.thy_dot, 0;
        const double h = 1e-6;
        const LoadPosition a = load_position(CraneState::from_vec(s.vec() + h * rate));
        const LoadPosition b = load_position(CraneState::from_vec(s.vec() - h * rate));
        const Eigen::Vector3d fd((a.x - b.x) / (2 * h), (a.y - b.y) / (2 * h), (a.z - b.z) / (2 * h));
        CHECK((fd - load_velocity(s)).norm() < 1e-8);
    }
    CraneState s;
    s.x = 0.1;
    s.y = 0.2;
    s.l = 0.3;
    const LoadPosition lp = load_position(s);
    CHECK(lp.x == 0.1);
    CHECK(lp.y == 0.2);
    CHECK(lp.z == -0.3);
}

TEST_CASE("small free swing oscillates at the pendulum frequency")
{
    const Eigen::Vector2d a = swing_angle_accelerations(1e-4, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 9.81);
    CHECK(a[0] == doctest::Approx(-9.81 / 0.5 * 1e-4).epsilon(1e-6));
    CHECK(a[1] == 0.0);
}

TEST_CASE("frictionless undamped crane conserves energy")
{
    CraneParameters p = CraneParameters::laboratory(0.8);
    for (auto& a : p.axes)
        a.B = a.a1 = a.a2 = 0;
    CraneState s;
    s.l = 0.4;
    s.thx = 0.2;
    s.thy = 0.1;
    const double E0 = total_energy(s, p);
    for (int k = 0; k < 300; ++k)
        s = step(s, {}, p, 0.01, 10);
    CHECK(std::abs(total_energy(s, p) - E0) <= 1e-8 * std::abs(E0));
}

TEST_CASE("RK4 step converges at fourth order")
{
    CraneParameters p = CraneParameters::laboratory(0.4);
    for (auto& a : p.axes)
        a.a1 = a.a2 = 0;
    CraneState s;
    s.thx = 0.15;
    s.thy_dot = 0.3;
    PlantInput u;
    u.v = Eigen::Vector3d(4, 2, -1);
    const StateVec ref = step(s, u, p, 0.8, 4096).vec();
    const double e1 = (step(s, u, p, 0.8, 20).vec() - ref).norm();
    const double e2 = (step(s, u, p, 0.8, 40).vec() - ref).norm();
    CHECK(std::log2(e1 / e2) >= 3.5);
}

TEST_CASE("domain violations are labelled errors")
{
    const CraneParameters p = CraneParameters::laboratory(0.8);
    CraneState s;
    s.l = 1e-4;
    try {
        axis_accelerations(s, {}, p);
        FAIL("expected a domain error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::StateOutOfDomain);
    }
    s.l = 0.3;
    s.thx = 1.6;
    CHECK_THROWS_AS(axis_accelerations(s, {}, p), Error);
    CHECK_THROWS_AS(step(CraneState{}, {}, p, 0.0, 1), Error);
}

TEST_CASE("planar mode keeps the traversing axis and its swing frozen")
{
    const CraneParameters p = CraneParameters::laboratory(0.8);
    PlantOptions opt;
    opt.mode = Mode::TwoD;
    CraneState s;
    s.thx = 0.1;
    PlantInput u;
    u.v = Eigen::Vector3d(5, 5, 0);
    for (int k = 0; k < 100; ++k)
        s = step(s, u, p, 0.01, 10, opt);
    CHECK(s.y == 0.0);
    CHECK(s.vy == 0.0);
    CHECK(s.thy == 0.0);
    CHECK(s.x != 0.0);
}

TEST_CASE("coulomb friction respects the deadband and its two constants")
{
    CHECK(coulomb_friction(0.0, 2.0, 3.0, 1e-4) == 0.0);
    CHECK(coulomb_friction(1.0, 2.0, 3.0, 1e-4) == 2.0);
    CHECK(coulomb_friction(-1.0, 2.0, 3.0, 1e-4) == -3.0);
}
