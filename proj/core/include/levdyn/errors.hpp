#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace levdyn {

/// Which feasibility constraint a leverage state violates.
enum class Constraint {
  none,
  leverage_below_one,    // some lambda_i < 1
  mean_field_above_cap,  // sum pi_i lambda_i > 1 + gamma, i.e. |phi| > 1
  non_finite,
};

std::string_view to_string(Constraint c);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model or run parameters outside their legal domain.
class ParamError : public Error {
 public:
  using Error::Error;
};

/// A map was evaluated outside (0, 1 + gamma).
class DomainError : public Error {
 public:
  using Error::Error;
};

class InfeasibleStateError : public Error {
 public:
  InfeasibleStateError(Constraint c, const std::string& what)
      : Error(what), constraint_(c) {}
  Constraint constraint() const noexcept { return constraint_; }

 private:
  Constraint constraint_;
};

/// An orbit left the feasible set where a complete orbit is required.
class OrbitViolationError : public Error {
 public:
  OrbitViolationError(std::size_t step, Constraint c, const std::string& what)
      : Error(what), step_(step), constraint_(c) {}
  std::size_t step() const noexcept { return step_; }
  Constraint constraint() const noexcept { return constraint_; }

 private:
  std::size_t step_;
  Constraint constraint_;
};

class InsufficientTraceError : public Error {
 public:
  using Error::Error;
};

class EmptyGridError : public Error {
 public:
  using Error::Error;
};

class DegenerateCloudError : public Error {
 public:
  using Error::Error;
};

/// Requested truncation accuracy not reachable with the available history.
class TailBoundError : public Error {
 public:
  using Error::Error;
};

class InsolvencyError : public Error {
 public:
  InsolvencyError(std::size_t period, std::size_t bank, const std::string& what)
      : Error(what), period_(period), bank_(bank) {}
  std::size_t period() const noexcept { return period_; }
  std::size_t bank() const noexcept { return bank_; }

 private:
  std::size_t period_;
  std::size_t bank_;
};

class NonstationarityError : public Error {
 public:
  NonstationarityError(std::size_t period, double phi, const std::string& what)
      : Error(what), period_(period), phi_(phi) {}
  std::size_t period() const noexcept { return period_; }
  double phi() const noexcept { return phi_; }

 private:
  std::size_t period_;
  double phi_;
};

}  // namespace levdyn
