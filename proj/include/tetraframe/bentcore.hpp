#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "tetraframe/tensor.hpp"

namespace tf {

using Lambda3 = std::array<double, 3>;

// 1/4 (sum l)^2 - alpha/2 sum l + beta/4 sum l^2 ; throws for negative entries.
double bentcore_omega(const Lambda3& lambda, double alpha, double beta);

// |Q|^4/4 - alpha/2 |Q|^2 + beta/4 sum_ij <Q_i,Q_j>^2 on the full tensor.
double bentcore_W(const Tensor3& q, double alpha, double beta);
// Frobenius gradient Pi(|Q|^2 Q - alpha Q + beta (QQ^T) Q).
Tensor3 bentcore_gradient(const Tensor3& q, double alpha, double beta);
// Sorted (descending) eigenvalues of QQ^T, i.e. the block norms |Q_j|^2 in the diagonalizing basis.
Lambda3 bentcore_lambdas(const Tensor3& q);

enum class BentCoreType { Zero, Tetrahedral, Rank2, Sphere, Unbounded };
std::string to_string(BentCoreType t);

struct BentCoreReport {
  double alpha = 0.0, beta = 0.0;
  BentCoreType type = BentCoreType::Zero;
  Lambda3 lambda{};
  double omega = 0.0;  // -inf when unbounded
  // False for -2 < beta <= -29/15 where the classification is not covered by the stability argument.
  bool covered = true;
};

// Closed-form classification with direct-evaluation critical values.
BentCoreReport bentcore_classify(double alpha, double beta);

// Inequalities bounding the block norms of traceless tensors (pairwise form).
bool lambda_feasible(const Lambda3& lambda, double tol = 1e-12);

struct NumericMinimum {
  Tensor3 q;
  Lambda3 lambda{};
  double omega = 0.0;
  int starts = 0;
  int converged_starts = 0;
};

// Multi-start BFGS over the 7-parameter tensor space. Not meaningful for beta <= -2.
NumericMinimum bentcore_numeric_minimum(double alpha, double beta, int starts = 24, std::uint64_t seed = 1);

// Minimum of omega over the cone cut out by lambda_feasible (a relaxation of the tensor set).
struct RelaxedMinimum {
  Lambda3 lambda{};
  double omega = 0.0;
};
RelaxedMinimum bentcore_relaxed_minimum(double alpha, double beta);
// max (sum l^2)/(sum l)^2 over the relaxed cone; 1/2 on genuine tensors.
double relaxed_max_square_ratio(Lambda3* argmax = nullptr);

struct BentCoreCheck {
  BentCoreReport closed;
  NumericMinimum numeric;
  RelaxedMinimum relaxed;
  double rel_diff = 0.0;  // |numeric - closed| / max(|closed|, 1e-12)
  bool type_matches = false;
  bool agrees = false;
};

BentCoreCheck bentcore_minimize(double alpha, double beta, double rel_tol = 1e-6, int starts = 24,
                                std::uint64_t seed = 1);

}  // namespace tf
