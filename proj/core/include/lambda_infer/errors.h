#pragma once

#include <stdexcept>
#include <string>

namespace lambda_infer {

// Precondition violated by the caller (bad index, out-of-range parameter, ...).
class Domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed or inconsistent input data (dataset files, configs, traces).
class Data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation would exceed a hard resource guard.
class Capacity_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical routine failed to reach its tolerance.
class Numerical_error : public std::runtime_error {
 public:
  Numerical_error(const std::string& what, double achieved_error)
      : std::runtime_error{what}, achieved_error_{achieved_error} {}

  auto achieved_error() const -> double { return achieved_error_; }

 private:
  double achieved_error_;
};

// Infeasible constraint set handed to an optimiser.
class Infeasible_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lambda_infer
