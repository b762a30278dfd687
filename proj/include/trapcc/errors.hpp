#pragma once

#include <stdexcept>

namespace trapcc {

// Precondition and contract violations. Solver failure modes (max iterations,
// leaving the positive orthant, singular Jacobian) are reported through
// SolveStatus instead, since multi-start drivers count them rather than abort.

struct NotRealizable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AmbiguousEmbedding : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NegativeRadicand : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularFit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotConverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InadmissibleChartPoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateDistance : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SamplerExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace trapcc
