#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace adamir {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point lies outside the domain of the reference function or problem.
class DomainViolation : public Error {
 public:
  using Error::Error;
};

/// The mirror-map argmax is not attained (log-barrier with a nonnegative dual coordinate).
class NoMaximizer : public Error {
 public:
  using Error::Error;
};

/// A log-barrier prox step would leave the positive orthant; the caller must shrink the step.
class StepTooLarge : public Error {
 public:
  using Error::Error;
};

/// AdaMir was initialized with two (numerically) coincident points.
class DegenerateInit : public Error {
 public:
  using Error::Error;
};

/// A sampled regularity certificate (RC, RS, convexity, optimality) failed.
class CertificateViolation : public Error {
 public:
  using Error::Error;
};

class NonPositiveGap : public Error {
 public:
  using Error::Error;
};

class MissingOptimum : public Error {
 public:
  using Error::Error;
};

class MismatchedHorizons : public Error {
 public:
  using Error::Error;
};

/// Invalid user-supplied configuration (bad solver shorthand, inconsistent oracle settings...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// One of the numeric-sequence inequalities failed on a concrete sequence.
class LemmaViolation : public Error {
 public:
  LemmaViolation(std::string lemma, std::vector<double> sequence, double a0, double lhs,
                 double rhs);

  const std::string& lemma() const { return lemma_; }
  const std::vector<double>& sequence() const { return sequence_; }
  double a0() const { return a0_; }
  double lhs() const { return lhs_; }
  double rhs() const { return rhs_; }

 private:
  std::string lemma_;
  std::vector<double> sequence_;
  double a0_;
  double lhs_;
  double rhs_;
};

}  // namespace adamir
