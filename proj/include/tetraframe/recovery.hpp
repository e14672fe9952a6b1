#pragma once

#include <vector>

#include "tetraframe/frames.hpp"
#include "tetraframe/tensor.hpp"

namespace tf {

struct RecoveryResult {
  Frame frame;
  double residual = 0.0;            // |gram(Q) - lambda^2 I|_F of the input
  std::vector<double> mu_values;    // n = 3 only
};

// theta = arg(q1, q2)/3 in [0, 2pi/3)
RecoveryResult recover_mb(const Tensor2& t, double tol = 1e-6);
double mb_angle(const Tensor2& t);

// det(sum_j b_j Q_j)
double mu(const Tensor3& t, const Vec3& b);

// c_ijk = tr(Q_i Q_j Q_k); mu(b) = (1/3) sum c_ijk b_i b_j b_k
struct MuCoefficients {
  double c[3][3][3];
  explicit MuCoefficients(const Tensor3& t);
  double value(const Vec3& b) const;
  Vec3 gradient(const Vec3& b) const;
  Mat3 hessian(const Vec3& b) const;
};

// At most max_steps Gauss-Newton steps on gram(Q) - lambda^2 I = 0 (minimum-norm updates).
Tensor3 project_to_variety(const Tensor3& t, int max_steps = 5);

RecoveryResult recover_tetrahedron(const Tensor3& t, double tol = 1e-6);
// Constructive route: align one maximizer with e1 and recover the MB block.
RecoveryResult recover_tetrahedron_aligned(const Tensor3& t, double tol = 1e-6);

struct CriticalDiagnostics {
  double gamma = 0.0;              // b . eta(b) b
  double eta_residual = 0.0;       // |eta(b) b - gamma b|
  double lagrange_residual = 0.0;  // tangential part of grad mu
};
CriticalDiagnostics validate_critical_structure(const Tensor3& t, const Vec3& b);

}  // namespace tf
