#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace simvi {

// Root of every error the library raises. Callers that only need to know
// "something went wrong in the solver stack" can catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Point outside the setup's domain (off the simplex, outside the ball, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// V(u, v) = +inf: v sits on the simplex boundary where u has mass.
class DivergenceInfinite : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class NumericsError : public Error {
 public:
  using Error::Error;
};

class UnboundedOmegaError : public Error {
 public:
  using Error::Error;
};

class UnsupportedRecenterError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class InnerSolverError : public Error {
 public:
  InnerSolverError(const std::string& what, double residual, std::size_t iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  std::size_t iterations_;
};

class RestartStallError : public Error {
 public:
  RestartStallError(const std::string& what, std::size_t stage, double ratio)
      : Error(what), stage_(stage), ratio_(ratio) {}

  std::size_t stage() const noexcept { return stage_; }
  double ratio() const noexcept { return ratio_; }

 private:
  std::size_t stage_;
  double ratio_;
};

// Shard evaluation failure re-raised by the cluster with the worker index.
class WorkerError : public Error {
 public:
  WorkerError(const std::string& what, std::size_t worker) : Error(what), worker_(worker) {}

  std::size_t worker() const noexcept { return worker_; }

 private:
  std::size_t worker_;
};

}  // namespace simvi
