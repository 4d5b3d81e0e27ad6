#pragma once

#include <stdexcept>
#include <string>

namespace lsr {

// Thrown when an evaluation point leaves the chart of validity (|x| < r_min,
// or an FD stencil would exit it).
struct ChartDomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Adaptive quadrature failed to reach tolerance within the subdivision budget.
struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// invert_jacobi received a right-hand side with a kernel (degree-1) component.
struct KernelViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Graph solver did not meet its residual tolerances within max_iter.
struct SolverDivergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Induced metric of a graph surface is numerically degenerate.
struct DegenerateMetric : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lsr
