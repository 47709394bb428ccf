#pragma once

#include <stdexcept>
#include <string>

namespace thickobs {

/// Invalid parameters or inputs outside an operation's domain.
class DomainError : public std::invalid_argument
{
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not produce a trustworthy result.
class NumericalError : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

/// Ladder algebra asked for more orders than the operator margin allows.
class PaddingError : public DomainError
{
 public:
  using DomainError::DomainError;
};

/// Observation Gramian too close to singular to build a pencil from.
class SingularGramianError : public NumericalError
{
 public:
  using NumericalError::NumericalError;
};

/// Truncation or quadrature refinement did not settle.
class UnreliableTruncationError : public NumericalError
{
 public:
  using NumericalError::NumericalError;
};

}  // namespace thickobs
