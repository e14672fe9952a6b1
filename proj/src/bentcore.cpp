#include "tetraframe/bentcore.hpp"

#include <gsl/gsl_blas.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace tf {

double bentcore_omega(const Lambda3& l, double alpha, double beta) {
  for (double v : l)
    if (v < 0.0) throw std::invalid_argument("block norms must be nonnegative");
  const double s = l[0] + l[1] + l[2];
  const double s2 = l[0] * l[0] + l[1] * l[1] + l[2] * l[2];
  return 0.25 * s * s - 0.5 * alpha * s + 0.25 * beta * s2;
}

namespace {

const std::array<Eigen::Matrix<double, 3, 9>, 7>& views() {
  static const auto v = [] {
    std::array<Eigen::Matrix<double, 3, 9>, 7> out;
    for (int a = 0; a < 7; ++a) {
      Tensor3 e;
      e.q[a] = 1.0;
      out[a] = matrix_view(e);
    }
    return out;
  }();
  return v;
}

// Unprojected full-tensor gradient as a 3x9 matrix view.
Eigen::Matrix<double, 3, 9> full_gradient(const Eigen::Matrix<double, 3, 9>& m, double alpha, double beta) {
  const Mat3 g = m * m.transpose();
  return (g.trace() - alpha) * m + beta * g * m;
}

}  // namespace

double bentcore_W(const Tensor3& q, double alpha, double beta) {
  const auto m = matrix_view(q);
  const Mat3 g = m * m.transpose();
  const double s = g.trace();
  return 0.25 * s * s - 0.5 * alpha * s + 0.25 * beta * g.squaredNorm();
}

Tensor3 bentcore_gradient(const Tensor3& q, double alpha, double beta) {
  const auto p = full_gradient(matrix_view(q), alpha, beta);
  Full3 f;
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 9; ++c) f[i * 9 + c] = p(i, c);
  return project3(f);
}

Lambda3 bentcore_lambdas(const Tensor3& q) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(gram(q));
  Vec3 ev = es.eigenvalues();
  Lambda3 l{std::max(0.0, ev[2]), std::max(0.0, ev[1]), std::max(0.0, ev[0])};
  return l;
}

std::string to_string(BentCoreType t) {
  switch (t) {
    case BentCoreType::Zero: return "zero";
    case BentCoreType::Tetrahedral: return "tetrahedral";
    case BentCoreType::Rank2: return "rank2";
    case BentCoreType::Sphere: return "sphere";
    case BentCoreType::Unbounded: return "unbounded";
  }
  return "?";
}

BentCoreReport bentcore_classify(double alpha, double beta) {
  BentCoreReport r;
  r.alpha = alpha;
  r.beta = beta;
  if (beta <= -2.0) {
    r.type = BentCoreType::Unbounded;
    r.omega = -std::numeric_limits<double>::infinity();
    return r;
  }
  r.covered = beta > -29.0 / 15.0;
  if (alpha <= 0.0) {
    r.type = BentCoreType::Zero;
    return r;
  }
  if (beta == 0.0) {
    r.type = BentCoreType::Sphere;
    r.lambda = {alpha / 3.0, alpha / 3.0, alpha / 3.0};
    r.omega = -0.25 * alpha * alpha;
  } else if (beta > 0.0) {
    r.type = BentCoreType::Tetrahedral;
    const double l = alpha / (3.0 + beta);
    r.lambda = {l, l, l};
    r.omega = -3.0 * alpha * alpha / (4.0 * (3.0 + beta));
  } else {
    r.type = BentCoreType::Rank2;
    const double l = alpha / (2.0 + beta);
    r.lambda = {l, l, 0.0};
    r.omega = -alpha * alpha / (2.0 * (2.0 + beta));
  }
  return r;
}

bool lambda_feasible(const Lambda3& l, double tol) {
  for (int k = 0; k < 3; ++k) {
    const double a = l[(k + 1) % 3], b = l[(k + 2) % 3], c = l[k];
    if (c < -tol) return false;
    if (0.25 * (a - b) * (a - b) > c * (a + b - 2.0 * c / 3.0) + tol) return false;
  }
  return true;
}

namespace {

struct Params {
  double alpha, beta;
};

double f_eval(const gsl_vector* x, void* p) {
  const auto* pr = static_cast<const Params*>(p);
  Tensor3 q;
  for (int a = 0; a < 7; ++a) q.q[a] = gsl_vector_get(x, a);
  return bentcore_W(q, pr->alpha, pr->beta);
}

void df_eval(const gsl_vector* x, void* p, gsl_vector* g) {
  const auto* pr = static_cast<const Params*>(p);
  Tensor3 q;
  for (int a = 0; a < 7; ++a) q.q[a] = gsl_vector_get(x, a);
  const auto full = full_gradient(matrix_view(q), pr->alpha, pr->beta);
  for (int a = 0; a < 7; ++a) gsl_vector_set(g, a, full.cwiseProduct(views()[a]).sum());
}

void fdf_eval(const gsl_vector* x, void* p, double* f, gsl_vector* g) {
  *f = f_eval(x, p);
  df_eval(x, p, g);
}

}  // namespace

NumericMinimum bentcore_numeric_minimum(double alpha, double beta, int starts, std::uint64_t seed) {
  if (beta <= -2.0) throw std::invalid_argument("potential is unbounded below for beta <= -2");
  Params pr{alpha, beta};
  gsl_multimin_function_fdf fn;
  fn.n = 7;
  fn.f = f_eval;
  fn.df = df_eval;
  fn.fdf = fdf_eval;
  fn.params = &pr;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  const double scale = std::sqrt(std::abs(alpha) + 0.1) / 3.0;
  NumericMinimum best;
  best.omega = std::numeric_limits<double>::infinity();
  best.starts = starts;
  gsl_vector* x = gsl_vector_alloc(7);
  gsl_multimin_fdfminimizer* s = gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, 7);
  for (int st = 0; st < starts; ++st) {
    for (int a = 0; a < 7; ++a) gsl_vector_set(x, a, scale * nd(rng));
    gsl_multimin_fdfminimizer_set(s, &fn, x, 0.01 * scale, 0.1);
    int status = GSL_CONTINUE;
    for (int it = 0; it < 5000 && status == GSL_CONTINUE; ++it) {
      if (gsl_multimin_fdfminimizer_iterate(s) != GSL_SUCCESS) break;
      status = gsl_multimin_test_gradient(s->gradient, 1e-11);
    }
    if (status == GSL_SUCCESS || gsl_blas_dnrm2(s->gradient) < 1e-8) ++best.converged_starts;
    const double v = s->f;
    if (v < best.omega) {
      best.omega = v;
      for (int a = 0; a < 7; ++a) best.q.q[a] = gsl_vector_get(s->x, a);
    }
  }
  gsl_multimin_fdfminimizer_free(s);
  gsl_vector_free(x);
  best.lambda = bentcore_lambdas(best.q);
  return best;
}

namespace {

// Maximize sum u^2 over the feasible slice sum u = 1 by grid search with zoom.
std::pair<double, Lambda3> relaxed_ratio_search() {
  double best = -1.0;
  double bx = 1.0 / 3.0, by = 1.0 / 3.0;
  double lo_x = 0.0, hi_x = 1.0, lo_y = 0.0, hi_y = 1.0;
  const int n = 400;
  for (int level = 0; level < 12; ++level) {
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        const double x = lo_x + (hi_x - lo_x) * i / n, y = lo_y + (hi_y - lo_y) * j / n;
        const double z = 1.0 - x - y;
        if (x < 0.0 || y < 0.0 || z < 0.0) continue;
        const Lambda3 u{x, y, z};
        if (!lambda_feasible(u, 0.0)) continue;
        const double v = x * x + y * y + z * z;
        if (v > best) {
          best = v;
          bx = x;
          by = y;
        }
      }
    const double wx = (hi_x - lo_x) * 4.0 / n, wy = (hi_y - lo_y) * 4.0 / n;
    lo_x = bx - wx;
    hi_x = bx + wx;
    lo_y = by - wy;
    hi_y = by + wy;
  }
  return {best, Lambda3{bx, by, 1.0 - bx - by}};
}

}  // namespace

double relaxed_max_square_ratio(Lambda3* argmax) {
  static const auto r = relaxed_ratio_search();
  if (argmax) *argmax = r.second;
  return r.first;
}

RelaxedMinimum bentcore_relaxed_minimum(double alpha, double beta) {
  RelaxedMinimum r;
  Lambda3 u{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  double s2 = 1.0 / 3.0;
  if (beta < 0.0) s2 = relaxed_max_square_ratio(&u);
  const double a = 0.25 * (1.0 + beta * s2);
  if (a <= 0.0) {
    r.omega = -std::numeric_limits<double>::infinity();
    return r;
  }
  if (alpha <= 0.0) return r;
  const double t = alpha / (4.0 * a);
  r.lambda = {t * u[0], t * u[1], t * u[2]};
  r.omega = -alpha * alpha / (16.0 * a);
  return r;
}

namespace {

BentCoreType numeric_type(const Lambda3& l, double alpha, double beta) {
  const double s = l[0] + l[1] + l[2];
  // at alpha = 0 the potential is quartic and descent stalls near 1e-7
  const double scale = std::max(std::abs(alpha), 1.0);
  if (s < 1e-6 * scale) return BentCoreType::Zero;
  if (beta == 0.0) return BentCoreType::Sphere;
  if (l[2] < 1e-5 * s && std::abs(l[0] - l[1]) < 1e-5 * s) return BentCoreType::Rank2;
  if (std::abs(l[0] - l[2]) < 1e-5 * s) return BentCoreType::Tetrahedral;
  return BentCoreType::Sphere;
}

}  // namespace

BentCoreCheck bentcore_minimize(double alpha, double beta, double rel_tol, int starts, std::uint64_t seed) {
  BentCoreCheck c;
  c.closed = bentcore_classify(alpha, beta);
  c.relaxed = bentcore_relaxed_minimum(alpha, beta);
  if (c.closed.type == BentCoreType::Unbounded) {
    c.numeric.omega = -std::numeric_limits<double>::infinity();
    c.type_matches = true;
    c.agrees = true;
    return c;
  }
  c.numeric = bentcore_numeric_minimum(alpha, beta, starts, seed);
  c.rel_diff = std::abs(c.numeric.omega - c.closed.omega) / std::max(std::abs(c.closed.omega), 1e-12);
  if (c.closed.type == BentCoreType::Zero) c.rel_diff = std::abs(c.numeric.omega);
  const BentCoreType nt = numeric_type(c.numeric.lambda, alpha, beta);
  if (c.closed.type == BentCoreType::Sphere) {
    const double s = c.numeric.lambda[0] + c.numeric.lambda[1] + c.numeric.lambda[2];
    c.type_matches = std::abs(s - alpha) < 1e-6 * alpha;
  } else {
    c.type_matches = nt == c.closed.type;
  }
  c.agrees = c.type_matches && c.rel_diff < rel_tol;
  return c;
}

}  // namespace tf
