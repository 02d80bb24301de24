#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace spm {

/// Base of every error raised by the library. Errors raised inside an
/// outer iteration carry the index of the step that failed.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, std::optional<int> step = std::nullopt)
      : std::runtime_error(step ? "step " + std::to_string(*step) + ": " + what : what),
        step_(step) {}

  std::optional<int> step() const { return step_; }

 private:
  std::optional<int> step_;
};

/// Malformed input: dimension mismatch, non-finite coordinates, invalid
/// parameters, infeasible arguments.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// An inner iterative solver hit its iteration cap.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, Eigen::VectorXd last_iterate, double residual,
                std::optional<int> step = std::nullopt)
      : Error(what, step), last_iterate_(std::move(last_iterate)), residual_(residual) {}

  const Eigen::VectorXd& last_iterate() const { return last_iterate_; }
  double residual() const { return residual_; }

 private:
  Eigen::VectorXd last_iterate_;
  double residual_;
};

/// A solver returned a point whose optimality certificate is violated
/// beyond the allowed slack.
class CertificateFailure : public Error {
 public:
  CertificateFailure(const std::string& what, double residual,
                     std::optional<int> step = std::nullopt)
      : Error(what, step), residual_(residual) {}

  double residual() const { return residual_; }

 private:
  double residual_;
};

/// The outer iteration cannot continue, e.g. the accumulated feasible set
/// became empty.
class AlgorithmFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace spm
