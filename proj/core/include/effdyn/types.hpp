#pragma once

#include <Eigen/Dense>

namespace effdyn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace effdyn
