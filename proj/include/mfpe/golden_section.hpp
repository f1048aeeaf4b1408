#pragma once

#include <functional>
#include <vector>

namespace mfpe {

struct Bracket {
  double lower;
  double upper;
};

struct GoldenSectionResult {
  double x;
  double fx;
  std::vector<Bracket> trace;  ///< bracket after each iteration
};

/// Minimises a unimodal f on [a, b] until the bracket is narrower than tol.
/// Reuses one interior evaluation per iteration.
GoldenSectionResult golden_section_minimize(const std::function<double(double)>& f, double a, double b, double tol,
                                            int max_iterations = 200);

}  // namespace mfpe
