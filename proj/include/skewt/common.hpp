#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace skewt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Iteration control for series and continued-fraction evaluations.
struct Precision {
  double abs_tol = 1e-12;
  int max_iter = 500;
};

// Thrown when an iterative evaluation fails to converge; carries the value
// accumulated so far.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double partial)
      : std::runtime_error(what), partial_value(partial) {}
  double partial_value;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::domain_error(msg);
}

}  // namespace skewt
