#include <cmath>
#include <random>

#include "doctest.h"

#include "crane/error.hpp"
#include "crane/ident.hpp"

using namespace crane;

TEST_CASE("RLS equals the regularized normal equations")
{
    std::mt19937_64 rng(31);
    std::normal_distribution<double> N(0.0, 1.0);
    RlsState s;
    Mat4 G = Mat4::Identity() * 1e-6;
    Vec4 b = Vec4::Zero();
    const Vec4 truth(0.9, 0.02, -0.003, 0.001);
    for (int k = 0; k < 300; ++k) {
        RegressorSample r;
        r.phi = Vec4(N(rng), N(rng), N(rng), 1.0);
        r.y = r.phi.dot(truth) + 1e-3 * N(rng);
        s = rls_update(s, r);
        G += r.phi * r.phi.transpose();
        b += r.phi * r.y;
    }
    const Vec4 oracle = G.ldlt().solve(b);
    CHECK((s.theta - oracle).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(s.count == 300);
    CHECK((s.P - G.inverse()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("RLS covariance stays symmetric positive definite")
{
    std::mt19937_64 rng(32);
    std::normal_distribution<double> N(0.0, 1.0);
    RlsStateN<5> s;
    for (int k = 0; k < 2000; ++k) {
        RegressorSampleN<5> r;
        r.phi << N(rng), 1e-3 * N(rng), N(rng), 1.0, 0.5;
        r.y = N(rng);
        s = rls_update(s, r, 0.995);
        CHECK((s.P - s.P.transpose()).norm() == 0.0);
        CHECK(Eigen::LLT<Eigen::Matrix<double, 5, 5>>(s.P).info() == Eigen::Success);
    }
}

TEST_CASE("regression maps invert back to the physical parameters")
{
    const double J = 75e-4, B = 96.3e-3, K = 14e-4, b1 = 22e-4, b2 = 1e-4, Ts = 0.01;
    const IdentifiedAxis a = recover_parameters(forward_map(J, B, K, b1, b2, Ts), K, Ts, AxisKind::Traveling, 0, 0, 0, 9.81);
    CHECK(a.J == doctest::Approx(J).epsilon(1e-12));
    CHECK(a.B == doctest::Approx(B).epsilon(1e-12));
    CHECK(a.a1 == doctest::Approx(b1 + b2).epsilon(1e-12));
    CHECK(a.a2 == doctest::Approx(b1 - b2).epsilon(1e-12));

    const IdentifiedAxis s = recover_sampled(sampled_forward_map(J, B, K, b1, b2, Ts), K, Ts, AxisKind::Traveling, 0, 0, 0);
    CHECK(s.J == doctest::Approx(J).epsilon(1e-10));
    CHECK(s.B == doctest::Approx(B).epsilon(1e-10));
    CHECK(s.b1 == doctest::Approx(b1).epsilon(1e-10));
    CHECK(s.b2 == doctest::Approx(b2).epsilon(1e-10));

    CHECK_THROWS_AS(recover_parameters(Vec4(1.2, 0.1, 0, 0), K, Ts, AxisKind::Traveling, 0, 0, 0, 9.81), Error);
}

TEST_CASE("excitation respects its amplitude and is deterministic")
{
    const auto a = generate_excitation(20.0, 0.01, 12.0, 7);
    const auto b = generate_excitation(20.0, 0.01, 12.0, 7);
    CHECK(a.size() == 2000);
    CHECK(a == b);
    double peak = 0;
    for (double v : a)
        peak = std::max(peak, std::abs(v));
    CHECK(peak <= 12.0 + 1e-12);
    CHECK(peak > 11.0);
}

TEST_CASE("identification recovers every axis within one percent")
{
    const CraneParameters truth = CraneParameters::laboratory(0.4);
    for (auto kind : {AxisKind::Traveling, AxisKind::Traversing, AxisKind::Hoisting}) {
        for (std::uint64_t seed : {1, 2, 5}) {
            CAPTURE(seed);
            const AxisData d = plant_experiment(truth, kind, generate_excitation(20.0, 0.01, 12.0, seed), 0.01);
            const AxisKnowns kn = knowns_for(truth, kind, 0.01);
            const IdentResult r = identify_axis(d, kind, kn);
            const AxisParams& t = truth[axis_index(kind)];
            CHECK(r.axis.J == doctest::Approx(t.J).epsilon(0.01));
            CHECK(r.axis.B == doctest::Approx(t.B).epsilon(0.01));
            CHECK(r.axis.a1 == doctest::Approx(t.a1).epsilon(0.01));
            CHECK(r.axis.a2 == doctest::Approx(t.a2).epsilon(0.01));
            CHECK(validate_model(r.axis, d, kind, kn).velocity <= 1e-6);
        }
    }
}

TEST_CASE("backward-difference regression carries its model error")
{
    const CraneParameters truth = CraneParameters::laboratory(0.4);
    IdentOptions opt;
    opt.regression = Regression::BackwardDifference;
    const AxisData d =
        plant_experiment(truth, AxisKind::Traveling, generate_excitation(20.0, 0.01, 12.0, 3), 0.01);
    const IdentResult r = identify_axis(d, AxisKind::Traveling, knowns_for(truth, AxisKind::Traveling, 0.01), opt);
    CHECK(r.axis.J == doctest::Approx(truth[AxisX].J).epsilon(0.05));
    CHECK(r.axis.B == doctest::Approx(truth[AxisX].B).epsilon(0.05));
}

TEST_CASE("simulated axis reproduces a known model exactly")
{
    const CraneParameters truth = CraneParameters::laboratory(0.0);
    const AxisKnowns kn = knowns_for(truth, AxisKind::Traversing, 0.01);
    IdentifiedAxis ax{truth[AxisY].J, truth[AxisY].B, truth[AxisY].a1, truth[AxisY].a2,
                      (truth[AxisY].a1 + truth[AxisY].a2) / 2, (truth[AxisY].a1 - truth[AxisY].a2) / 2};
    const auto v = generate_excitation(5.0, 0.01, 10.0, 4);
    const AxisData sim = simulate_axis(ax, v, AxisKind::Traversing, kn);
    const ValidationMse mse = validate_model(ax, sim, AxisKind::Traversing, kn);
    CHECK(mse.position < 1e-20);
    CHECK(mse.velocity < 1e-16);
    const auto bv = backward_velocity({0.0, 0.01, 0.03}, 0.01);
    REQUIRE(bv.size() == 3);
    CHECK(bv[0] == 0.0);
    CHECK(bv[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bv[2] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("too little data is reported")
{
    AxisData d;
    d.voltage = {1.0, 2.0};
    d.position = {0.0, 0.0};
    const CraneParameters p = CraneParameters::laboratory(0.4);
    CHECK_THROWS_AS(identify_axis(d, AxisKind::Traveling, knowns_for(p, AxisKind::Traveling, 0.01)), Error);
}
