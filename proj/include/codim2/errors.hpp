#pragma once

#include <stdexcept>
#include <string>

namespace codim2 {

// Precondition violated by the caller (bad grid, non-unit input, h <= 0, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Curves whose net circulation cannot be carried by a periodic S^1 field.
class TopologyError : public std::runtime_error {
 public:
  TopologyError(const std::string& what, int axis)
      : std::runtime_error(what), axis_(axis) {}
  int axis() const noexcept { return axis_; }

 private:
  int axis_;
};

// Malformed snapshot, config or CSV input.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The minimizing-movements inequality failed by more than roundoff.
class LedgerViolation : public std::runtime_error {
 public:
  LedgerViolation(const std::string& what, std::size_t step, double excess)
      : std::runtime_error(what), step_(step), excess_(excess) {}
  std::size_t step() const noexcept { return step_; }
  double excess() const noexcept { return excess_; }

 private:
  std::size_t step_;
  double excess_;
};

}  // namespace codim2
