#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rom {

// Malformed files, missing columns/bones, out-of-contract arguments.
class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// The QP solver did not reach the requested KKT tolerance within the iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double kkt_violation, std::uint64_t iterations)
      : std::runtime_error(what), kkt_violation_(kkt_violation), iterations_(iterations) {}
  double kkt_violation() const noexcept { return kkt_violation_; }
  std::uint64_t iterations() const noexcept { return iterations_; }

 private:
  double kkt_violation_;
  std::uint64_t iterations_;
};

}  // namespace rom
