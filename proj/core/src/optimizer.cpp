#include "qse/optimizer.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <cmath>
#include <limits>
#include <memory>

namespace qse {

namespace {

struct Context {
  const ObjectiveWithGradient* objective;
  VectorXd x;
  VectorXd g;
};

void to_eigen(const gsl_vector* v, VectorXd& out) {
  out.resize(static_cast<Eigen::Index>(v->size));
  for (std::size_t i = 0; i < v->size; ++i) out(static_cast<Eigen::Index>(i)) = gsl_vector_get(v, i);
}

double eval(Context& c, const gsl_vector* v) {
  to_eigen(v, c.x);
  c.g.resize(c.x.size());
  const double f = (*c.objective)(c.x, c.g);
  return std::isfinite(f) ? f : std::numeric_limits<double>::max();
}

double f_cb(const gsl_vector* v, void* p) { return eval(*static_cast<Context*>(p), v); }

void df_cb(const gsl_vector* v, void* p, gsl_vector* g) {
  auto& c = *static_cast<Context*>(p);
  eval(c, v);
  for (Eigen::Index i = 0; i < c.g.size(); ++i) gsl_vector_set(g, static_cast<std::size_t>(i), c.g(i));
}

void fdf_cb(const gsl_vector* v, void* p, double* f, gsl_vector* g) {
  auto& c = *static_cast<Context*>(p);
  *f = eval(c, v);
  for (Eigen::Index i = 0; i < c.g.size(); ++i) gsl_vector_set(g, static_cast<std::size_t>(i), c.g(i));
}

struct VecDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
using GslVec = std::unique_ptr<gsl_vector, VecDeleter>;

GslVec to_gsl(const VectorXd& x) {
  GslVec v(gsl_vector_alloc(static_cast<std::size_t>(x.size())));
  for (Eigen::Index i = 0; i < x.size(); ++i) gsl_vector_set(v.get(), static_cast<std::size_t>(i), x(i));
  return v;
}

struct Point {
  VectorXd x;
  double f;
  VectorXd g;
};

double stationarity(const MinimizeOptions& o, const VectorXd& x, const VectorXd& g) {
  if (o.scaled_gradient) return o.scaled_gradient(x, g);
  return g.size() == 0 ? 0.0 : g.cwiseAbs().maxCoeff();
}

Point evaluate(const ObjectiveWithGradient& objective, const VectorXd& x) {
  Point p{x, 0.0, VectorXd(x.size())};
  p.f = objective(x, p.g);
  return p;
}

// Runs BFGS from `start`; returns the best point seen and adds to `iterations`.
Point run_bfgs(const ObjectiveWithGradient& objective, const Point& start, const MinimizeOptions& o,
               int& iterations) {
  const auto n = static_cast<std::size_t>(start.x.size());
  Context ctx{&objective, {}, {}};
  gsl_multimin_function_fdf fn{&f_cb, &df_cb, &fdf_cb, n, &ctx};
  gsl_multimin_fdfminimizer* s =
      gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, n);
  GslVec x0 = to_gsl(start.x);
  const double step = 0.01 * std::max(1.0, start.x.norm());
  gsl_multimin_fdfminimizer_set(s, &fn, x0.get(), step, 0.1);

  Point best = start;
  for (int it = 0; it < o.max_iterations; ++it) {
    const int status = gsl_multimin_fdfminimizer_iterate(s);
    ++iterations;
    const double f = gsl_multimin_fdfminimizer_minimum(s);
    if (f < best.f) {
      to_eigen(gsl_multimin_fdfminimizer_x(s), best.x);
      to_eigen(gsl_multimin_fdfminimizer_gradient(s), best.g);
      best.f = f;
    }
    if (stationarity(o, best.x, best.g) <= o.gradient_tol) break;
    if (status != GSL_SUCCESS) break;
  }
  gsl_multimin_fdfminimizer_free(s);
  return best;
}

Point run_simplex(const ObjectiveWithGradient& objective, const Point& start, const MinimizeOptions& o,
                  int& iterations) {
  const auto n = static_cast<std::size_t>(start.x.size());
  Context ctx{&objective, {}, {}};
  gsl_multimin_function fn{&f_cb, n, &ctx};
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  GslVec x0 = to_gsl(start.x);
  GslVec steps(gsl_vector_alloc(n));
  gsl_vector_set_all(steps.get(), 1e-3 * std::max(1.0, start.x.norm()));
  gsl_multimin_fminimizer_set(s, &fn, x0.get(), steps.get());
  for (int it = 0; it < o.simplex_iterations; ++it) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    ++iterations;
    const double size = gsl_multimin_fminimizer_size(s);
    if (gsl_multimin_test_size(size, 1e-10 * std::max(1.0, start.x.norm())) == GSL_SUCCESS) break;
  }
  VectorXd x;
  to_eigen(gsl_multimin_fminimizer_x(s), x);
  gsl_multimin_fminimizer_free(s);
  Point p = evaluate(objective, x);
  return p.f < start.f ? p : start;
}

}  // namespace

MinimizeResult minimize(const ObjectiveWithGradient& objective, const VectorXd& x0,
                        const MinimizeOptions& options) {
  // GSL reports line-search trouble through return codes; keep its default
  // abort-on-error handler out of the way.
  static const gsl_error_handler_t* previous = gsl_set_error_handler_off();
  (void)previous;

  MinimizeResult out;
  Point best = evaluate(objective, x0);
  int iterations = 0;
  if (x0.size() > 0 && stationarity(options, best.x, best.g) > options.gradient_tol) {
    best = run_bfgs(objective, best, options, iterations);
    if (stationarity(options, best.x, best.g) > options.gradient_tol) {
      out.used_simplex = true;
      best = run_simplex(objective, best, options, iterations);
      best = run_bfgs(objective, best, options, iterations);
    }
  }
  out.x = best.x;
  out.value = best.f;
  out.scaled_gradient = stationarity(options, best.x, best.g);
  out.iterations = iterations;
  out.converged = std::isfinite(best.f) && out.scaled_gradient <= options.gradient_tol;
  return out;
}

}  // namespace qse
