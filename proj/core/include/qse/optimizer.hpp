#pragma once

#include "qse/linalg.hpp"

#include <functional>

namespace qse {

/// Smooth objective to be minimized: returns f(x) and writes the gradient.
using ObjectiveWithGradient = std::function<double(const VectorXd& x, VectorXd& grad)>;

struct MinimizeOptions {
  int max_iterations = 2000;
  /// Stop when scaled_gradient(x, g) falls below this value.
  double gradient_tol = 1e-6;
  /// Maps (x, g) to the dimensionless stationarity measure compared
  /// against gradient_tol. Defaults to max|g_i| when empty.
  std::function<double(const VectorXd&, const VectorXd&)> scaled_gradient;
  /// Simplex iterations spent when the quasi-Newton stage stalls.
  int simplex_iterations = 4000;
};

struct MinimizeResult {
  VectorXd x;
  double value = 0.0;
  double scaled_gradient = 0.0;
  int iterations = 0;
  bool converged = false;
  /// True when the simplex fallback ran.
  bool used_simplex = false;
};

/// BFGS (GSL vector_bfgs2) on the analytic gradient. When the line search
/// stalls before the gradient test passes, a Nelder-Mead simplex
/// (nmsimplex2) restarts from the best point, followed by one more BFGS
/// polish. The returned point is never worse than x0.
[[nodiscard]] MinimizeResult minimize(const ObjectiveWithGradient& objective, const VectorXd& x0,
                                      const MinimizeOptions& options = {});

}  // namespace qse
