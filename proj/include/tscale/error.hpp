#pragma once

#include <stdexcept>
#include <string>

namespace tscale {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class PointNotInTimeScale : public Error {
 public:
  explicit PointNotInTimeScale(double t);
  double point() const noexcept { return point_; }

 private:
  double point_;
};

class OrderError : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  GridMismatch() : Error("operands live on different grids") {}
};

class OffNodeEvaluation : public Error {
 public:
  explicit OffNodeEvaluation(double t);
};

class EnsembleTooSmall : public Error {
 public:
  EnsembleTooSmall(std::size_t got, std::size_t needed);
};

class NotConverged : public Error {
 public:
  using Error::Error;
};

class EstimatorUndefined : public Error {
 public:
  using Error::Error;
};

}  // namespace tscale
