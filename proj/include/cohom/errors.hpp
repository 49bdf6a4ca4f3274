#ifndef COHOM_ERRORS_HPP
#define COHOM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cohom {

/// Malformed user input: dimension mismatch, bad geometry parameters, bad config.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A mesh whose discrete cell problem has a nontrivial kernel after pinning.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure (NaN, non-convergence of an inner solve).
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int iterations = 0)
      : std::runtime_error(what), iterations_(iterations) {}
  int iterations() const { return iterations_; }

 private:
  int iterations_;
};

}  // namespace cohom

#endif  // COHOM_ERRORS_HPP
