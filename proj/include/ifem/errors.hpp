#pragma once

#include <stdexcept>
#include <string>

namespace ifem {

/// Subdomain layout does not align with the grid lines of a structured mesh.
class AlignmentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A value outside its mathematical domain (non-positive coefficient, bad degree).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid discretization parameter (e.g. a non-positive DG penalty).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid study configuration or command line.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Benchmark construction failed (e.g. the Kellogg root finder found no bracket).
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solve did not reach its tolerance.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ifem
