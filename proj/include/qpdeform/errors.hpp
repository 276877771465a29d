#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qpdeform {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates a precondition (p = 0, Q = 0, bad dimension, ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Some basket number [n] vanishes (q p a root of unity), so [n]! = 0 and
/// anything dividing by it is undefined.
class RootOfUnityDegeneracy : public Error {
 public:
  RootOfUnityDegeneracy(std::size_t index, const std::string& where)
      : Error(where + ": basket number [" + std::to_string(index) +
              "] vanishes (root-of-unity degeneracy)"),
        index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Coherent-state label outside the convergence disk |z|^2 < R.
class LabelOutOfDisk : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Basis-moment system too ill-conditioned for the requested degree.
class IllConditioned : public Error {
 public:
  IllConditioned(double condition, double limit)
      : Error("basis-moment system condition estimate " +
              std::to_string(condition) + " exceeds " + std::to_string(limit) +
              "; lower the degree"),
        condition_(condition) {}

  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

/// A series needed by the computation does not converge for the input.
class Divergence : public Error {
 public:
  using Error::Error;
};

}  // namespace qpdeform
