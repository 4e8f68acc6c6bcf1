#pragma once

#include <stdexcept>
#include <string>

namespace mimocap {

/// Base class for all library errors.
class error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class domain_error : public error {
  public:
    using error::error;
};

/// Input matrix failed a structural check (Hermitian, positive definite, ...).
class validation_error : public error {
  public:
    using error::error;
};

class dimension_error : public validation_error {
  public:
    using validation_error::validation_error;
};

/// Malformed correlation-matrix file. Carries the 1-based line number.
class parse_error : public error {
  public:
    parse_error(const std::string& what, int line)
        : error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

/// A matrix required by the analysis is numerically singular.
class degeneracy_error : public error {
  public:
    degeneracy_error(const std::string& what, double cond_estimate)
        : error(what), cond_(cond_estimate) {}
    double cond_estimate() const { return cond_; }

  private:
    double cond_;
};

/// The characteristic function had not decayed at the truncation frequency.
class truncation_error : public error {
  public:
    using error::error;
};

/// The capacity-axis window excludes too much probability mass.
class bracketing_error : public error {
  public:
    using error::error;
};

class io_error : public error {
  public:
    using error::error;
};

}  // namespace mimocap
