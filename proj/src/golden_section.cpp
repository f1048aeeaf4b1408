#include "mfpe/golden_section.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace mfpe {

GoldenSectionResult golden_section_minimize(const std::function<double(double)>& f, double a, double b, double tol,
                                            int max_iterations) {
  if (!(tol > 0.0)) throw std::invalid_argument("golden section: tol must be > 0");
  if (b < a) std::swap(a, b);

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  GoldenSectionResult result{0.5 * (a + b), 0.0, {}};
  if (b - a <= tol) {
    result.fx = f(result.x);
    return result;
  }

  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iterations && b - a > tol; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    result.trace.push_back({a, b});
  }

  if (fc <= fd) {
    result.x = c;
    result.fx = fc;
  } else {
    result.x = d;
    result.fx = fd;
  }
  return result;
}

}  // namespace mfpe
