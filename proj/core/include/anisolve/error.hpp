#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace anisolve {

/// Rejected input: a precondition on user-supplied data does not hold.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Configuration file problem, carrying the location of the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string file, std::size_t line, std::string field, const std::string& message)
      : std::runtime_error(file + ":" + std::to_string(line) + ": [" + field + "] " + message),
        file_(std::move(file)),
        line_(line),
        field_(std::move(field)) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string file_;
  std::size_t line_;
  std::string field_;
};

/// An inner regularized solve did not reach its residual tolerance.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(int iterations, double residual)
      : std::runtime_error("regularized solve did not converge after " + std::to_string(iterations) +
                           " iterations (residual " + std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}

  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// Inner solves converged but the epsilon sequence of iterates is not Cauchy.
class SchemeStalled : public std::runtime_error {
 public:
  explicit SchemeStalled(double last_increment)
      : std::runtime_error("epsilon schedule exhausted with iterate increment " +
                           std::to_string(last_increment)),
        last_increment_(last_increment) {}

  double last_increment() const noexcept { return last_increment_; }

 private:
  double last_increment_;
};

}  // namespace anisolve
