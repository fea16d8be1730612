#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sner {

// Limited-memory quasi-Newton minimizer for
//   F(x) = f(x) + l1 * ||x||_1
// where f is smooth. With l1 > 0 it runs the orthant-wise variant (OWL-QN):
// pseudo-gradient steering, direction sign alignment and orthant projection
// in the line search. With l1 == 0 it is plain L-BFGS with a backtracking
// Armijo line search.
struct QuasiNewtonOptions {
  double l1 = 0.0;
  int max_iterations = 200;
  // Stop when (F_prev - F) / max(1, |F|) falls below this.
  double tolerance = 1e-5;
  // Stop when ||pseudo-gradient|| <= gradient_tolerance * max(1, ||x||).
  double gradient_tolerance = 1e-10;
  int history = 6;
  int max_line_search = 40;
};

enum class QuasiNewtonStatus { Converged, MaxIterations, LineSearchFailed, GradientVanished };

struct QuasiNewtonResult {
  std::vector<double> x;
  // F at the start point, then after each accepted step.
  std::vector<double> objective_history;
  int iterations = 0;
  QuasiNewtonStatus status = QuasiNewtonStatus::MaxIterations;
};

// Evaluates f at x and writes its gradient.
using SmoothObjective = std::function<double(std::span<const double> x, std::span<double> grad)>;

// Throws NumericalError when f evaluates to a non-finite value.
QuasiNewtonResult minimize_quasi_newton(const SmoothObjective& f, std::vector<double> x0,
                                        const QuasiNewtonOptions& options);

}  // namespace sner
