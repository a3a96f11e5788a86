#ifndef LAXLAB_ERROR_HPP
#define LAXLAB_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace laxlab {

class LaxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two coordinates came closer than the configured collision epsilon.
class CollisionError : public LaxError {
 public:
  CollisionError(std::size_t i, std::size_t j, double separation)
      : LaxError("collision between particles " + std::to_string(i) + " and " +
                 std::to_string(j) + " (separation " + std::to_string(separation) + ")"),
        first(i),
        second(j),
        separation(separation) {}

  std::size_t first;
  std::size_t second;
  double separation;
};

/// An interaction function or Lax entry was evaluated at (or next to) a pole.
class PoleError : public LaxError {
 public:
  using LaxError::LaxError;
};

/// The requested operation is not defined for this system family.
class UnsupportedFamilyError : public LaxError {
 public:
  using LaxError::LaxError;
};

/// Invalid parameters or configuration.
class SpecError : public LaxError {
 public:
  using LaxError::LaxError;
};

/// An iterative kernel (QR sweep) failed to converge.
class ConvergenceError : public LaxError {
 public:
  using LaxError::LaxError;
};

/// Step-size underflow, step budget exhausted, or non-finite state.
class IntegratorError : public LaxError {
 public:
  using LaxError::LaxError;
};

/// Logarithm branch could not be continued unambiguously along a path.
class BranchError : public LaxError {
 public:
  using LaxError::LaxError;
};

}  // namespace laxlab

#endif  // LAXLAB_ERROR_HPP
