#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rdt {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A metric failed the positive-definiteness floor at a grid point.
class DefinitenessError : public Error {
 public:
  DefinitenessError(std::size_t index, double eigenvalue);
  std::size_t index() const { return index_; }
  double eigenvalue() const { return eigenvalue_; }

 private:
  std::size_t index_;
  double eigenvalue_;
};

/// The SPD guard tripped during time stepping.
class SpdViolation : public Error {
 public:
  SpdViolation(double t, std::size_t index, double eigenvalue);
  double time() const { return t_; }
  std::size_t index() const { return index_; }
  double eigenvalue() const { return eigenvalue_; }

 private:
  double t_;
  std::size_t index_;
  double eigenvalue_;
};

/// A NaN or infinity appeared in the evolving state.
class NonFiniteError : public Error {
 public:
  NonFiniteError(double t, std::size_t index);
  double time() const { return t_; }
  std::size_t index() const { return index_; }

 private:
  double t_;
  std::size_t index_;
};

/// Argument outside the domain where an operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Incompatible grids or tensor valences.
class ShapeError : public Error {
 public:
  using Error::Error;
};

}  // namespace rdt
