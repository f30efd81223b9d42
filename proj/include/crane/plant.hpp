#pragma once

#include <array>

#include <Eigen/Dense>

namespace crane {

// Axis order used everywhere: 0 traveling (x), 1 traversing (y), 2 hoisting (l).
enum Axis { AxisX = 0, AxisY = 1, AxisL = 2 };

struct AxisParams {
    double J = 0;   // effective inertia
    double B = 0;   // effective damping
    double K = 0;   // voltage-to-torque gain
    double a1 = 0;  // Coulomb constant, positive direction
    double a2 = 0;  // Coulomb constant, negative direction
    double rg = 0;  // gear ratio
    double Rp = 0;  // pulley radius

    double rR() const { return rg * Rp; }
};

struct CraneParameters {
    std::array<AxisParams, 3> axes{};
    double m = 0;
    double g = 9.81;

    const AxisParams& operator[](int i) const { return axes[i]; }
    AxisParams& operator[](int i) { return axes[i]; }

    // Desk-scale laboratory crane values.
    static CraneParameters laboratory(double load_mass = 0.0);

    // Throws InvalidParameter when an invariant is broken.
    void validate() const;
};

using StateVec = Eigen::Matrix<double, 10, 1>;

// Vector layout: x, vx, y, vy, l, vl, thx, thx_dot, thy, thy_dot
struct CraneState {
    double x = 0, vx = 0, y = 0, vy = 0, l = 0.25, vl = 0;
    double thx = 0, thx_dot = 0, thy = 0, thy_dot = 0;

    StateVec vec() const;
    static CraneState from_vec(const StateVec& v);

    double pos(int axis) const;
    double vel(int axis) const;
};

struct PlantInput {
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
};

struct LoadPosition {
    double x = 0, y = 0, z = 0;
};

enum class Mode { ThreeD, TwoD };

struct PlantOptions {
    Mode mode = Mode::ThreeD;
    double deadband = 1e-4;
    double angle_margin = 0.05;
    double l_min = 1e-3;
    bool swing = true;  // false: no load attached, swing states frozen
};

double coulomb_friction(double v, double a1, double a2, double deadband);

// Trolley/hoist accelerations from the coupled 3x3 actuator system.
Eigen::Vector3d axis_accelerations(const CraneState& s, const PlantInput& u, const CraneParameters& p,
                                   const PlantOptions& opt = {});

// Swing angle accelerations given trolley accelerations (ax, ay) and rope motion.
Eigen::Vector2d swing_angle_accelerations(double thx, double thy, double thx_dot, double thy_dot, double l,
                                          double l_dot, double ax, double ay, double g);

StateVec continuous_derivative(const CraneState& s, const PlantInput& u, const CraneParameters& p,
                               const PlantOptions& opt = {});

CraneState step(const CraneState& s, const PlantInput& u, const CraneParameters& p, double dt, int substeps,
                const PlantOptions& opt = {});

LoadPosition load_position(const CraneState& s);

Eigen::Vector3d load_velocity(const CraneState& s);

// Rotor kinetic energy (inertia folded into J_e) + load kinetic + potential energy.
double total_energy(const CraneState& s, const CraneParameters& p);

}  // namespace crane
