#include <cmath>
#include <random>

#include "doctest.h"

#include "crane/error.hpp"
#include "crane/traj.hpp"

using namespace crane;

namespace {

const LspbSpec slow{0.05, 0.50, 22.5e-3, 9e-2, 4.0, 9.0};

}

TEST_CASE("LSPB evaluates the slow traveling profile")
{
    const ProfilePoint b = lspb_eval(slow, 4.0);
    CHECK(b.q == doctest::Approx(0.05 + 0.5 * 22.5e-3 * 16).epsilon(1e-12));
    CHECK(b.qd == doctest::Approx(0.09).epsilon(1e-12));
    const ProfilePoint f = lspb_eval(slow, 9.0);
    CHECK(f.q == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(f.qd) < 1e-12);
    CHECK(lspb_eval(slow, 0.0).q == 0.05);
    CHECK(lspb_eval(slow, 4.5).qdd == 0.0);
    CHECK(lspb_eval(slow, 6.0).qdd < 0.0);
    CHECK_THROWS_AS(lspb_eval(slow, 9.01), Error);
    CHECK_THROWS_AS(lspb_eval(slow, -0.01), Error);
}

TEST_CASE("LSPB is C1 at both breakpoints in either direction")
{
    for (const LspbSpec& s : {slow, slow.reversed()}) {
        for (double tb : {s.tb, s.tf - s.tb}) {
            const ProfilePoint lo = lspb_eval(s, tb - 1e-9), hi = lspb_eval(s, tb + 1e-9);
            CHECK(std::abs(lo.qd - hi.qd) < 1e-9);
            CHECK(std::abs(lo.q - hi.q) < 1e-9);
        }
    }
    CHECK(slow.reversed().q0 == slow.qf);
    CHECK(lspb_eval(slow.reversed(), 2.0).qd < 0);
}

TEST_CASE("minimum-time profile is symmetric")
{
    const MinTimeSpec h{0.25, 0.05, 0.05, 4.0};
    CHECK(h.vm() == doctest::Approx(0.1));
    const ProfilePoint mid = mintime_eval(h, 2.0);
    CHECK(std::abs(mid.qd) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(mid.q == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(mintime_eval(h, 4.0).q == doctest::Approx(0.05).epsilon(1e-12));
    const MinTimeSpec null{0.2, 0.2, 0.0, 3.0};
    const ProfilePoint z = mintime_eval(null, 1.3);
    CHECK(z.q == 0.2);
    CHECK(z.qd == 0.0);
    CHECK(z.qdd == 0.0);
    CHECK_THROWS_AS(mintime_eval(h, 4.5), Error);
    CHECK(MinTimeSpec::from_endpoints(0.1, 0.02, 2.0).a == doctest::Approx(0.08));
}

TEST_CASE("spec validation itemizes violations")
{
    CHECK(validate_spec(slow, 0.3, 0.2, 0.01).empty());
    CHECK(validate_spec(LspbSpec{0.05, 0.50, 75e-3, 15e-2, 2.0, 5.0}, 0.3, 0.2, 0.01).empty());
    const LspbSpec bad{0.05, 0.50, 0.1, 0.2, 2.0, 4.0};
    CHECK_FALSE(validate_spec(bad, 0.3, 0.2).empty());
    CHECK_FALSE(validate_spec(slow, 0.05, 0.2).empty());
    CHECK_FALSE(validate_spec(LspbSpec{0.05, 0.50, 22.5e-3, 9e-2, 4.005, 9.0}, 0.3, 0.2, 0.01).empty());
    // over-determined hoisting row: supplied v_m disagrees with (q0, qf, tf)
    const MinTimeSpec fast_hoist{0.10, 0.02, 0.1, 2.0};
    CHECK_FALSE(validate_spec(fast_hoist, 0.3, 0.2, 0.01, 0.1).empty());
    CHECK(validate_spec(MinTimeSpec{0.25, 0.05, 0.05, 4.0}, 0.3, 0.2, 0.01).empty());
}

TEST_CASE("reference model integrates exactly and clamps in the accel zones")
{
    Vec6 x = Vec6::Zero();
    for (int k = 0; k < 400; ++k)
        x = reference_model_step(x, Eigen::Vector3d(22.5e-3, 0, 0), 0.01);
    CHECK(x[1] == doctest::Approx(0.09).epsilon(1e-12));
    CHECK(x[0] == doctest::Approx(0.01 * 0.01 * 22.5e-3 * 400 * 399 / 2).epsilon(1e-12));

    Vec6 y = Vec6::Zero();
    y[1] = 0.2;
    const Vec6 y1 = reference_model_step(y, Eigen::Vector3d::Zero(), 0.01);
    CHECK(y1[1] == 0.2);
    CHECK(y1[0] == doctest::Approx(0.002));

    RefLimits lim;
    Vec6 v = Vec6::Zero();
    v[1] = 0.3;
    Eigen::Vector3d u(0.5, 0, 0);
    const Vec6 v1 = reference_model_step(v, u, 0.01, lim, Zone::Accel);
    CHECK(v1[1] == 0.3);
    CHECK(u[0] == 0.2);
}

TEST_CASE("replanning arithmetic")
{
    const Eigen::Vector2d qf(0.5, 0.5), vn(0.09, 0.09);
    SUBCASE("undeviated entry reproduces the profile")
    {
        const ReplanResult r = replan_deceleration({0.32, 0.32}, qf, vn, 4.0, 0.3, 0.2);
        CHECK(r.v_rc[0] == doctest::Approx(0.09).epsilon(1e-12));
        CHECK(r.a_rc[0] == doctest::Approx(0.0225).epsilon(1e-12));
        CHECK(r.tb == 4.0);
        CHECK_FALSE(r.hoist_update);
    }
    SUBCASE("lagging entry speeds up without extension")
    {
        const ReplanResult r = replan_deceleration({0.26, 0.26}, qf, vn, 4.0, 0.3, 0.2);
        CHECK(r.v_rc[0] == doctest::Approx(0.12).epsilon(1e-12));
        CHECK(r.a_rc[0] == doctest::Approx(0.03).epsilon(1e-12));
        CHECK(r.tb == 4.0);
    }
    SUBCASE("velocity bound extends the window")
    {
        const ReplanResult r = replan_deceleration({0.5 - 1.4, 0.5}, qf, vn, 4.0, 0.3, 0.2);
        CHECK(r.velocity_extended);
        CHECK(r.hoist_update);
        CHECK(r.tb == doctest::Approx(2 * 1.4 / 0.3).epsilon(1e-12));
        CHECK(r.v_rc[0] == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(r.v_rc[1] == 0.0);
    }
    SUBCASE("acceleration bound falls back to the normal velocity")
    {
        const ReplanResult r = replan_deceleration({0.4, 0.45}, qf, vn, 0.5, 0.3, 0.2);
        CHECK(r.acceleration_fallback);
        CHECK(r.a_rc.cwiseAbs().maxCoeff() <= 0.2);
        CHECK(r.v_rc.cwiseAbs().maxCoeff() <= 0.3);
        CHECK(r.tb > 0.5);
    }
}

TEST_CASE("replanning lands the discrete reference on the goal")
{
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        const Eigen::Vector2d qf(0.5, 0.05), vn(0.09, 0.09);
        const Eigen::Vector2d qd(0.32 + 0.3 * U(rng), 0.23 + 0.3 * U(rng));
        const ReplanResult r = replan_deceleration(qd, qf, vn, 4.0, 0.3, 0.2, 0.01);
        CHECK(r.iterations <= 15);
        CHECK(r.tb >= 4.0);
        CHECK(std::abs(std::round(r.tb / 0.01) * 0.01 - r.tb) < 1e-9);
        const int n = static_cast<int>(std::llround(r.tb / 0.01));
        for (int a = 0; a < 2; ++a) {
            double q = qd[a], v = r.v_rc[a];
            for (int k = 0; k < n; ++k) {
                q += 0.01 * v;
                v -= 0.01 * r.a_rc[a];
            }
            CHECK(std::abs(q - qf[a]) < 1e-9);
            CHECK(std::abs(v) < 1e-9);
        }
    }
}

TEST_CASE("hoist segments stop exactly for even and odd lengths")
{
    for (int n : {200, 201, 2, 3}) {
        const HoistSegment h{-0.2, n, 0.01};
        double l = 0.25, v = 0;
        for (int k = 0; k < n; ++k) {
            l += 0.01 * v;
            v += 0.01 * h.command(k);
        }
        CHECK(l == doctest::Approx(0.05).epsilon(1e-12));
        CHECK(std::abs(v) < 1e-14);
    }
}

TEST_CASE("reference generator runs one transition and rests")
{
    const TransitionSpec spec = preset_transition("slow");
    ReferenceGenerator gen(spec, 0.01);
    CHECK(gen.total_steps() == 1000);
    SwingControlConfig off;
    off.enabled = false;
    int decel = 0;
    while (!gen.finished()) {
        const ReferenceSample& s = gen.command({}, off, Mode::ThreeD);
        decel += s.zone == Zone::Decel;
        CHECK(gen.preview(20).size() == 20);
        gen.advance();
    }
    CHECK(decel == 400);
    CHECK(gen.replanned());
    CHECK((gen.state().segment<1>(0)[0]) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(gen.state()[4] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK((gen.original_output(9.0) - gen.final_point()).norm() < 1e-12);
    CHECK_THROWS_AS(preset_transition("medium"), Error);
}

TEST_CASE("planar generator leaves the traversing reference in place")
{
    ReferenceGenerator gen(preset_transition("fast"), 0.01, {}, 1.0, Mode::TwoD);
    SwingControlConfig off;
    off.enabled = false;
    while (!gen.finished()) {
        gen.command({}, off, Mode::TwoD);
        CHECK(gen.state()[2] == 0.05);
        gen.advance();
    }
}

TEST_CASE("swing correction bends the accel-zone command and replanning absorbs it")
{
    ReferenceGenerator gen(preset_transition("fast"), 0.01);
    SwingControlConfig on;
    const SwingEstimate est{0.02, 0.01, 0.1, -0.1};
    const ReferenceSample& s = gen.command(est, on, Mode::ThreeD);
    CHECK(s.zone == Zone::Accel);
    CHECK(s.u_c[0] != s.a_ref[0]);
    while (!gen.finished()) {
        gen.command(gen.step_index() < 250 ? est : SwingEstimate{}, on, Mode::ThreeD);
        gen.advance();
    }
    CHECK((gen.state().head<1>()[0]) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::abs(gen.state()[1]) < 1e-9);
}
