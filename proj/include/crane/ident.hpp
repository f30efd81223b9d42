#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "crane/error.hpp"
#include "crane/plant.hpp"

namespace crane {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using Vec5 = Eigen::Matrix<double, 5, 1>;

enum class AxisKind { Traveling, Traversing, Hoisting };

template <int N>
struct RegressorSampleN {
    double y = 0;
    Eigen::Matrix<double, N, 1> phi = Eigen::Matrix<double, N, 1>::Zero();
};

template <int N>
struct RlsStateN {
    Eigen::Matrix<double, N, 1> theta = Eigen::Matrix<double, N, 1>::Zero();
    Eigen::Matrix<double, N, N> P = 1e6 * Eigen::Matrix<double, N, N>::Identity();
    long count = 0;
};

// phi = [v(k-1), v_a(k-1) (+ hoist offset), sgn(v(k)), 1]
using RegressorSample = RegressorSampleN<4>;
using RlsState = RlsStateN<4>;

template <int N>
RlsStateN<N> rls_update(const RlsStateN<N>& s, const RegressorSampleN<N>& sample, double forgetting = 1.0)
{
    using Vec = Eigen::Matrix<double, N, 1>;
    const Vec& phi = sample.phi;
    const Vec Pphi = s.P * phi;
    const double denom = forgetting + phi.dot(Pphi);
    if (!(denom > 0))
        throw Error(ErrorKind::NumericalBreakdown, "RLS denominator not positive");
    RlsStateN<N> out;
    const double eps = sample.y - phi.dot(s.theta);
    out.theta = s.theta + Pphi * (eps / denom);
    const Vec gain = Pphi / denom;
    // Joseph form keeps P positive definite under heavy cancellation
    const Eigen::Matrix<double, N, N> IKH = Eigen::Matrix<double, N, N>::Identity() - gain * phi.transpose();
    out.P = (IKH * s.P * IKH.transpose() + forgetting * gain * gain.transpose()) / forgetting;
    out.P = (0.5 * (out.P + out.P.transpose())).eval();
    out.count = s.count + 1;
    return out;
}

struct IdentifiedAxis {
    double J = 0, B = 0, a1 = 0, a2 = 0;
    double b1 = 0, b2 = 0;  // f_cf = b1*sgn(v) + b2
};

// Parameters the identification needs but does not estimate.
struct AxisKnowns {
    double K = 0;
    double Ts = 0.01;
    double m = 0;
    double rg = 0;
    double Rp = 0;
    double g = 9.81;
    double deadband = 1e-4;
};

enum class Regression {
    BackwardDifference,  // four-term regression with the closed-form backward-difference inverse
    Sampled,             // adds v_a(k-2); exact for interval-averaged velocities under a held input
};

struct IdentOptions {
    Regression regression = Regression::Sampled;
    double forgetting = 1.0;
    int prefilter = 0;           // moving-average window on velocities, 0 = off
    bool skip_crossings = true;  // drop windows with a velocity sign change
    double skip_speed = 1e-3;    // and windows slower than this (m/s)
    bool normalize = true;       // run RLS on RMS-scaled regressor columns
};

struct AxisData {
    std::vector<double> voltage;   // v_a(k), held over [k, k+1)
    std::vector<double> position;  // q(k) sampled at k*Ts
};

struct IdentResult {
    IdentifiedAxis axis;
    Eigen::VectorXd alpha;
    std::vector<Eigen::VectorXd> trace;
};

struct ValidationMse {
    double position = 0;
    double velocity = 0;
};

struct ExcitationShape {
    std::array<double, 3> freqs{0.1, 0.35, 0.9};  // Hz
    std::array<double, 3> weights{1.0, 1.0, 1.0};
};

std::vector<double> generate_excitation(double duration, double Ts, double amplitude, std::uint64_t seed,
                                        const ExcitationShape& shape = {});

Vec4 forward_map(double J, double B, double K, double b1, double b2, double Ts);

IdentifiedAxis recover_parameters(const Vec4& alpha, double K, double Ts, AxisKind kind, double m, double rg,
                                  double Rp, double g);

Vec5 sampled_forward_map(double J, double B, double K, double b1, double b2, double Ts);

IdentifiedAxis recover_sampled(const Vec5& theta, double K, double Ts, AxisKind kind, double m, double rg,
                               double Rp);

// Offset added to the hoisting voltage so gravity enters the regression as an input.
double hoist_offset(AxisKind kind, const AxisKnowns& k);

std::vector<double> backward_velocity(const std::vector<double>& position, double Ts);

std::vector<RegressorSample> build_regressors(const AxisData& data, AxisKind kind, const AxisKnowns& k,
                                              const IdentOptions& opt = {});

std::vector<RegressorSampleN<5>> build_sampled_regressors(const AxisData& data, AxisKind kind, const AxisKnowns& k,
                                                          const IdentOptions& opt = {});

IdentResult identify_axis(const AxisData& data, AxisKind kind, const AxisKnowns& k, const IdentOptions& opt = {});

// Integrates J v' + B v = K (v_a + offset) - f_cf(v) under the recorded voltages.
AxisData simulate_axis(const IdentifiedAxis& axis, const std::vector<double>& voltage, AxisKind kind,
                       const AxisKnowns& k, double q0 = 0.0, int substeps = 10);

ValidationMse validate_model(const IdentifiedAxis& axis, const AxisData& data, AxisKind kind, const AxisKnowns& k);

// Single-axis experiment on the full plant: only the chosen motor is driven.
AxisData plant_experiment(const CraneParameters& p, AxisKind kind, const std::vector<double>& voltage, double Ts,
                          int substeps = 10, double l0 = 0.25);

AxisKnowns knowns_for(const CraneParameters& p, AxisKind kind, double Ts);

int axis_index(AxisKind kind);

}  // namespace crane
