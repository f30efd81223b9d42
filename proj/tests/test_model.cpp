#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"

#include "crane/error.hpp"
#include "crane/model.hpp"

using namespace crane;

TEST_CASE("axis discretization matches the matrix exponential")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> J(1e-3, 2e-2), B(1e-2, 0.5), K(5e-4, 5e-3), Ts(1e-3, 5e-2);
    for (int i = 0; i < 1000; ++i) {
        const double j = J(rng), b = B(rng), k = K(rng), ts = Ts(rng);
        const AxisDiscretization ax = discretize_axis(j, b, k, ts);
        Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
        M.row(0) << -b / j, k / j, 1.0 / j;
        const Eigen::Matrix3d E = (M * ts).exp();
        CHECK(ax.a1 == doctest::Approx(E(0, 0)).epsilon(1e-12));
        CHECK(ax.b1 == doctest::Approx(E(0, 1)).epsilon(1e-12));
        CHECK(ax.bd1 == doctest::Approx(E(0, 2)).epsilon(1e-12));
    }
}

TEST_CASE("laboratory model has the expected structure")
{
    const DiscretePlantModel m = model_from_params(CraneParameters::laboratory(0.8), 0.01);
    for (int i = 0; i < 3; ++i) {
        const int r = 2 * i;
        CHECK(m.A(r, r) == 1.0);
        CHECK(m.A(r, r + 1) == 0.01);
        CHECK(m.A(r + 1, r + 1) == doctest::Approx(std::exp(-0.01 * CraneParameters::laboratory()[i].B /
                                                            CraneParameters::laboratory()[i].J)));
        CHECK(m.B(r + 1, i) > 0);
        CHECK(m.Wd(r + 1, i) == -m.axes[i].bd1);  // disturbance opposes the drive
        CHECK(m.C(i, r) == 1.0);
        CHECK(axis_controllable(m.axes[i]));
        CHECK(axis_observable(m.axes[i]));
    }
    // traveling axis frozen values from an independent expm evaluation
    CHECK(m.axes[0].a1 == doctest::Approx(0.8795015081718721).epsilon(1e-12));
}

TEST_CASE("backward difference pole approaches the exact one for small steps")
{
    const double J = 75e-4, B = 96.3e-3;
    for (double Ts : {1e-2, 1e-3, 1e-4}) {
        const double exact = discretize_axis(J, B, 1.0, Ts).a1;
        CHECK(std::abs(backward_difference_a1(J, B, Ts) - exact) < 2 * (B * Ts / J) * (B * Ts / J));
    }
}

TEST_CASE("discretization rejects bad inputs")
{
    CHECK_THROWS_AS(discretize_axis(0, 1, 1, 0.01), Error);
    CHECK_THROWS_AS(discretize_axis(1, 1, 1, 0), Error);
    std::array<AxisDiscretization, 3> axes{discretize_axis(1, 1, 1, 0.01), discretize_axis(1, 1, 1, 0.01),
                                           discretize_axis(1, 1, 1, 0.02)};
    try {
        assemble_model(axes, 0.01);
        FAIL("expected mismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MismatchedSampleTime);
    }
}

TEST_CASE("zero input gain loses controllability")
{
    AxisDiscretization ax = discretize_axis(1e-2, 0.1, 1e-3, 0.01);
    ax.b1 = 0;
    CHECK_FALSE(axis_controllable(ax));
}
