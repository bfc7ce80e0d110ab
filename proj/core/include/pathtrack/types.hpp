#pragma once

#include <Eigen/Core>

namespace pathtrack {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace pathtrack
