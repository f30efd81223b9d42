#pragma once

#include <array>

#include <Eigen/Dense>

#include "crane/plant.hpp"

namespace crane {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat63 = Eigen::Matrix<double, 6, 3>;
using Mat36 = Eigen::Matrix<double, 3, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

struct AxisDiscretization {
    double a1 = 0;
    double b1 = 0;
    double bd1 = 0;  // magnitude; enters the disturbance column with a minus sign
    double Ts = 0;
};

struct DiscretePlantModel {
    Mat6 A = Mat6::Zero();
    Mat63 B = Mat63::Zero();
    Mat63 Wd = Mat63::Zero();
    Mat36 C = Mat36::Zero();
    double Ts = 0;
    std::array<AxisDiscretization, 3> axes{};
};

AxisDiscretization discretize_axis(double J, double B, double K, double Ts);

DiscretePlantModel assemble_model(const std::array<AxisDiscretization, 3>& axes, double Ts);

// Convenience: discretize all three axes of a parameter set.
DiscretePlantModel model_from_params(const CraneParameters& p, double Ts);

// Backward-difference counterpart of a1 used by the identification regression.
double backward_difference_a1(double J, double B, double Ts);

bool axis_controllable(const AxisDiscretization& ax);
bool axis_observable(const AxisDiscretization& ax);

}  // namespace crane
