#include "sner/lbfgs.hpp"

#include <cmath>
#include <deque>

#include "sner/error.hpp"

namespace sner {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double l1_norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += std::abs(v);
  return s;
}

// Minimum-norm subgradient of f + l1*|x|.
void pseudo_gradient(std::span<const double> x, std::span<const double> g, double l1,
                     std::span<double> pg) {
  if (l1 == 0.0) {
    std::copy(g.begin(), g.end(), pg.begin());
    return;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) {
      pg[i] = g[i] + l1;
    } else if (x[i] < 0.0) {
      pg[i] = g[i] - l1;
    } else if (g[i] + l1 < 0.0) {
      pg[i] = g[i] + l1;
    } else if (g[i] - l1 > 0.0) {
      pg[i] = g[i] - l1;
    } else {
      pg[i] = 0.0;
    }
  }
}

struct Correction {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

// d = -H * pg by the two-loop recursion.
void two_loop(const std::deque<Correction>& memory, std::span<const double> pg,
              std::span<double> d) {
  for (std::size_t i = 0; i < pg.size(); ++i) d[i] = -pg[i];
  std::vector<double> alpha(memory.size());
  for (std::size_t k = memory.size(); k-- > 0;) {
    alpha[k] = memory[k].rho * dot(memory[k].s, d);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= alpha[k] * memory[k].y[i];
  }
  if (!memory.empty()) {
    const auto& last = memory.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (double& v : d) v *= gamma;
  }
  for (std::size_t k = 0; k < memory.size(); ++k) {
    const double beta = memory[k].rho * dot(memory[k].y, d);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += memory[k].s[i] * (alpha[k] - beta);
  }
}

}  // namespace

QuasiNewtonResult minimize_quasi_newton(const SmoothObjective& f, std::vector<double> x0,
                                        const QuasiNewtonOptions& options) {
  const std::size_t dim = x0.size();
  const double l1 = options.l1;
  QuasiNewtonResult result;
  std::vector<double> x = std::move(x0);
  std::vector<double> g(dim), pg(dim), d(dim), x_new(dim), g_new(dim), orthant(dim);

  const auto evaluate = [&](std::span<const double> at, std::span<double> grad, int iteration) {
    const double value = f(at, grad) + l1 * l1_norm(at);
    if (!std::isfinite(value)) {
      throw NumericalError("non-finite objective at iteration " + std::to_string(iteration));
    }
    return value;
  };

  double fx = evaluate(x, g, 0);
  result.objective_history.push_back(fx);
  std::deque<Correction> memory;

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    pseudo_gradient(x, g, l1, pg);
    if (norm(pg) <= options.gradient_tolerance * std::max(1.0, norm(x))) {
      result.status = QuasiNewtonStatus::GradientVanished;
      break;
    }

    two_loop(memory, pg, d);
    if (l1 > 0.0) {
      // keep only components that agree in sign with the steepest descent
      for (std::size_t i = 0; i < dim; ++i) {
        if (d[i] * pg[i] >= 0.0) d[i] = 0.0;
      }
      for (std::size_t i = 0; i < dim; ++i) {
        orthant[i] = x[i] != 0.0 ? (x[i] > 0.0 ? 1.0 : -1.0) : (pg[i] > 0.0 ? -1.0 : 1.0);
        if (x[i] == 0.0 && pg[i] == 0.0) orthant[i] = 0.0;
      }
    }
    double slope = dot(d, pg);
    if (slope >= 0.0) {
      // lost descent; restart from steepest descent
      memory.clear();
      for (std::size_t i = 0; i < dim; ++i) d[i] = -pg[i];
      slope = dot(d, pg);
    }

    double step = memory.empty() ? 1.0 / std::max(norm(pg), 1e-300) : 1.0;
    if (memory.empty()) step = std::min(step, 1.0);
    bool accepted = false;
    double f_new = fx;
    for (int ls = 0; ls < options.max_line_search; ++ls) {
      for (std::size_t i = 0; i < dim; ++i) {
        x_new[i] = x[i] + step * d[i];
        if (l1 > 0.0 && x_new[i] * orthant[i] <= 0.0) x_new[i] = 0.0;
      }
      f_new = evaluate(x_new, g_new, iter);
      double decrease = 0.0;
      for (std::size_t i = 0; i < dim; ++i) decrease += pg[i] * (x_new[i] - x[i]);
      if (f_new <= fx + 1e-4 * decrease && f_new <= fx) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      result.status = QuasiNewtonStatus::LineSearchFailed;
      break;
    }

    Correction c{std::vector<double>(dim), std::vector<double>(dim), 0.0};
    for (std::size_t i = 0; i < dim; ++i) {
      c.s[i] = x_new[i] - x[i];
      c.y[i] = g_new[i] - g[i];
    }
    const double sy = dot(c.s, c.y);
    if (sy > 1e-16) {
      c.rho = 1.0 / sy;
      memory.push_back(std::move(c));
      if (memory.size() > static_cast<std::size_t>(options.history)) memory.pop_front();
    }

    const double f_prev = fx;
    x.swap(x_new);
    g.swap(g_new);
    fx = f_new;
    result.objective_history.push_back(fx);
    result.iterations = iter;

    if ((f_prev - fx) / std::max(1.0, std::abs(fx)) < options.tolerance) {
      result.status = QuasiNewtonStatus::Converged;
      break;
    }
  }
  result.x = std::move(x);
  return result;
}

}  // namespace sner
