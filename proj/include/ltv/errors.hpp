#pragma once

#include <stdexcept>
#include <string>

namespace ltv {

/// Invalid system description. `field()` names the offending field path,
/// e.g. "B" or "A.data[2]".
class SpecError : public std::invalid_argument {
   public:
    SpecError(std::string field, const std::string& message)
        : std::invalid_argument(field.empty() ? message : field + ": " + message),
          field_(std::move(field)),
          message_(message) {}

    const std::string& field() const noexcept { return field_; }
    /// The message without the field prefix.
    const std::string& message() const noexcept { return message_; }

   private:
    std::string field_;
    std::string message_;
};

/// Argument outside the domain of an operation (time outside [0, tau],
/// backward index pair, wrong half-plane, grid mismatch, ...).
class DomainError : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

class NotControllable : public std::runtime_error {
   public:
    NotControllable(double lambda_min, double lambda_max)
        : std::runtime_error("controllability Gramian is not coercive (lambda_min = " + std::to_string(lambda_min) +
                             ", lambda_max = " + std::to_string(lambda_max) + ")"),
          lambda_min_(lambda_min) {}

    double lambda_min() const noexcept { return lambda_min_; }

   private:
    double lambda_min_;
};

class NotNullControllable : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Factorization of the Gramian failed; carries the 2-norm condition estimate.
class SolveError : public std::runtime_error {
   public:
    explicit SolveError(double condition)
        : std::runtime_error("Gramian solve failed (condition estimate " + std::to_string(condition) + ")"),
          condition_(condition) {}

    double condition() const noexcept { return condition_; }

   private:
    double condition_;
};

}  // namespace ltv
