#include <doctest.h>

#include <limits>

#include "gen.hpp"
#include "tetraframe/bentcore.hpp"

using namespace tf;

namespace {

// W on the full array, without library helpers.
double w_full(const Tensor3& q, double alpha, double beta) {
  const Mat3 g = gen::gram_full(to_full(q));
  const double tr = g.trace();
  return 0.25 * tr * tr - 0.5 * alpha * tr + 0.25 * beta * g.squaredNorm();
}

// Grid search over the relaxed lambda region with local zooming.
double lambda_grid_min(double alpha, double beta) {
  double best = 0.0;  // lambda = 0
  Lambda3 c{0, 0, 0};
  double span = 2.0 * std::abs(alpha) + 1.0;
  Lambda3 lo{0, 0, 0};
  for (int level = 0; level < 40; ++level) {
    const int n = 24;
    const double step = span / n;
    Lambda3 arg = c;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j)
        for (int k = 0; k <= n; ++k) {
          const Lambda3 l{lo[0] + i * step, lo[1] + j * step, lo[2] + k * step};
          if (l[0] < 0 || l[1] < 0 || l[2] < 0 || !lambda_feasible(l, 1e-12)) continue;
          const double w = bentcore_omega(l, alpha, beta);
          if (w < best) best = w, arg = l;
        }
    c = arg;
    span *= 0.25;
    for (int a = 0; a < 3; ++a) lo[a] = std::max(0.0, c[a] - span / 2);
  }
  return best;
}

// Plain gradient descent on 7 parameters with central-difference gradients of w_full.
double tensor_descent_min(double alpha, double beta, std::uint64_t seed) {
  gen::Rng rng(seed);
  double best = std::numeric_limits<double>::infinity();
  for (int start = 0; start < 12; ++start) {
    Tensor3 q = gen::tensor3(rng, 0.6);
    double step = 0.05;
    double w = w_full(q, alpha, beta);
    for (int it = 0; it < 20000 && step > 1e-14; ++it) {
      Tensor3 g;
      for (int a = 0; a < 7; ++a) {
        Tensor3 e;
        e[a] = 1e-7;
        g[a] = (w_full(q + e, alpha, beta) - w_full(q - e, alpha, beta)) / 2e-7;
      }
      const Tensor3 trial = q - step * g;
      const double wt = w_full(trial, alpha, beta);
      if (wt < w) {
        q = trial, w = wt;
        step *= 1.2;
      } else {
        step *= 0.5;
      }
    }
    best = std::min(best, w);
  }
  return best;
}

}  // namespace

TEST_CASE("omega values") {
  CHECK(bentcore_omega({0, 0, 0}, 1.3, 0.4) == 0.0);
  CHECK(bentcore_omega({0.25, 0.25, 0.25}, 1, 1) == doctest::Approx(-3.0 / 16).epsilon(1e-15));
  CHECK(bentcore_omega({1, 1, 0}, 1, -1) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK_THROWS(bentcore_omega({-0.1, 0, 0}, 1, 1));
}

TEST_CASE("W and its gradient on tensors") {
  gen::Rng rng(51);
  for (int s = 0; s < 50; ++s) {
    const Tensor3 q = gen::tensor3(rng);
    const double alpha = rng.uniform(-1, 2), beta = rng.uniform(-1.9, 2);
    CHECK(bentcore_W(q, alpha, beta) == doctest::Approx(w_full(q, alpha, beta)).epsilon(1e-12));
    const auto l = bentcore_lambdas(q);
    CHECK(bentcore_omega(l, alpha, beta) == doctest::Approx(w_full(q, alpha, beta)).epsilon(1e-10));
    CHECK(lambda_feasible(l, 1e-10));
    const Tensor3 g = bentcore_gradient(q, alpha, beta);
    for (int a = 0; a < 7; ++a) {
      Tensor3 e;
      e[a] = 1.0;
      const double fd = (w_full(q + 1e-6 * e, alpha, beta) - w_full(q - 1e-6 * e, alpha, beta)) / 2e-6;
      CHECK(std::abs(inner(g, e) - fd) < 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("closed-form classification") {
  auto r = bentcore_classify(1, 1);
  CHECK(r.type == BentCoreType::Tetrahedral);
  for (double l : r.lambda) CHECK(l == doctest::Approx(0.25));
  CHECK(r.omega == doctest::Approx(-3.0 / 16));
  r = bentcore_classify(1, -1);
  CHECK(r.type == BentCoreType::Rank2);
  CHECK(r.lambda[0] == doctest::Approx(1.0));
  CHECK(r.lambda[1] == doctest::Approx(1.0));
  CHECK(r.lambda[2] == 0.0);
  CHECK(r.omega == doctest::Approx(-0.5));
  CHECK(bentcore_classify(0, 1).type == BentCoreType::Zero);
  CHECK(bentcore_classify(-1, 0.5).type == BentCoreType::Zero);
  CHECK(bentcore_classify(-1, 0).type == BentCoreType::Zero);
  r = bentcore_classify(2, 0);
  CHECK(r.type == BentCoreType::Sphere);
  CHECK(r.omega == doctest::Approx(-1.0));
  CHECK(bentcore_classify(1, -2).type == BentCoreType::Unbounded);
  CHECK(!bentcore_classify(1, -1.95).covered);
  CHECK(bentcore_classify(1, -1.9).covered);
}

TEST_CASE("direct-evaluation minimum values") {
  for (double alpha : {0.3, 1.0, 1.7})
    for (double beta : {0.2, 1.0, 2.0}) {
      CHECK(bentcore_classify(alpha, beta).omega == doctest::Approx(-3 * alpha * alpha / (4 * (3 + beta))).epsilon(1e-14));
      CHECK(bentcore_classify(alpha, -beta / 2.5).omega ==
            doctest::Approx(-alpha * alpha / (2 * (2 - beta / 2.5))).epsilon(1e-14));
    }
}

TEST_CASE("lambda-grid oracle agrees for beta > 0") {
  for (auto [a, b] : {std::pair{1.0, 1.0}, {0.4, 0.3}, {1.8, 1.9}}) {
    const double oracle = lambda_grid_min(a, b);
    CHECK(gen::rel_err(oracle, bentcore_classify(a, b).omega) < 1e-6);
  }
}

TEST_CASE("tensor-space descent oracle agrees on both sides of beta = 0") {
  for (auto [a, b] : {std::pair{1.0, 1.0}, {1.0, -1.0}, {0.6, -1.5}, {1.5, 0.5}}) {
    const double oracle = tensor_descent_min(a, b, 7);
    const auto chk = bentcore_minimize(a, b);
    CHECK(gen::rel_err(oracle, chk.closed.omega) < 1e-6);
    CHECK(chk.agrees);
    CHECK(chk.type_matches);
  }
}

TEST_CASE("relaxed lambda region undercuts tensors for beta < 0") {
  Lambda3 arg;
  const double ratio = relaxed_max_square_ratio(&arg);
  CHECK(ratio > 0.5 + 1e-3);
  CHECK(lambda_feasible(arg, 1e-12));
  // genuine tensors never exceed one half
  gen::Rng rng(52);
  for (int s = 0; s < 2000; ++s) {
    const auto l = bentcore_lambdas(gen::tensor3(rng));
    const double sum = l[0] + l[1] + l[2];
    CHECK((l[0] * l[0] + l[1] * l[1] + l[2] * l[2]) / (sum * sum) <= 0.5 + 1e-12);
  }
  const auto rel = bentcore_relaxed_minimum(1, -1);
  CHECK(rel.omega < -0.5 - 1e-4);
  CHECK(bentcore_relaxed_minimum(1, 1).omega == doctest::Approx(-3.0 / 16).epsilon(1e-8));
}

TEST_CASE("numeric minimum is never below the closed form on a sweep") {
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const double a = 0.2 + 1.8 * i / 4, b = -29.0 / 15 + 0.1 + (2 - (-29.0 / 15 + 0.1)) * j / 4;
      const auto chk = bentcore_minimize(a, b);
      CHECK(chk.agrees);
      CHECK(chk.numeric.omega >= chk.closed.omega - 1e-6 * std::abs(chk.closed.omega));
    }
}
