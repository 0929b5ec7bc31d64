#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace halfspace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Failure categories; the CLI maps them to exit codes.
enum class ErrorKind { usage, validation, numeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error usage_error(const std::string& m) { return {ErrorKind::usage, m}; }
inline Error validation_error(const std::string& m) {
  return {ErrorKind::validation, m};
}
inline Error numeric_error(const std::string& m) { return {ErrorKind::numeric, m}; }

}  // namespace halfspace
