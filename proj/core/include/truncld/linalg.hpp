#pragma once

#include <Eigen/Dense>

namespace truncld {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace truncld
