#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace tf {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

// Full 3x3x3 array, entry (i,j,k) at i*9 + j*3 + k.
using Full3 = std::array<double, 27>;
// Full 2x2x2 array, entry (i,j,k) at i*4 + j*2 + k.
using Full2 = std::array<double, 8>;

inline constexpr double kLambda3Sq = 32.0 / 27.0;
inline constexpr double kLambda2Sq = 9.0 / 8.0;
inline constexpr double kMu3 = 8.0 / 9.0;  // Q(nu,nu) = kMu3 nu for a frame containing nu
inline constexpr double kMu2 = 3.0 / 4.0;
inline constexpr double kAlpha = 32.0 / 27.0;  // block sum constant

// (n+1)(n^2-1)/n^3
double lambda_sq(int n);

// Traceless symmetric 3-tensor in 3D stored as
// (Q111, Q112, Q113, Q122, Q123, Q222, Q223).
struct Tensor3 {
  std::array<double, 7> q{};

  double& operator[](int a) { return q[a]; }
  double operator[](int a) const { return q[a]; }
  Tensor3& operator+=(const Tensor3& o);
  Tensor3& operator-=(const Tensor3& o);
  Tensor3& operator*=(double s);
  friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
  friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
  friend Tensor3 operator*(double s, Tensor3 a) { return a *= s; }
  bool operator==(const Tensor3&) const = default;
};

// Traceless symmetric 3-tensor in 2D, (Q111, Q112).
struct Tensor2 {
  std::array<double, 2> q{};

  double& operator[](int a) { return q[a]; }
  double operator[](int a) const { return q[a]; }
  Tensor2& operator+=(const Tensor2& o);
  Tensor2& operator-=(const Tensor2& o);
  Tensor2& operator*=(double s);
  friend Tensor2 operator+(Tensor2 a, const Tensor2& b) { return a += b; }
  friend Tensor2 operator-(Tensor2 a, const Tensor2& b) { return a -= b; }
  friend Tensor2 operator*(double s, Tensor2 a) { return a *= s; }
  bool operator==(const Tensor2&) const = default;
};

Full3 to_full(const Tensor3& t);
Full2 to_full(const Tensor2& t);

// Orthogonal (Frobenius) projection onto the traceless symmetric subspace.
Tensor3 project3(const Full3& a);
Tensor2 project2(const Full2& a);
// Untyped entry point: full holds n^3 entries, result holds the minimal parameters.
std::vector<double> project(std::span<const double> full, int n);

// Frobenius inner product / norm of the full tensors.
double inner(const Tensor3& a, const Tensor3& b);
double inner(const Tensor2& a, const Tensor2& b);
double norm_sq(const Tensor3& a);
double norm_sq(const Tensor2& a);
// Gram matrix of the basis tensors (parameter metric).
const Eigen::Matrix<double, 7, 7>& metric3();

std::array<Mat3, 3> blocks(const Tensor3& t);
std::array<Mat2, 2> blocks(const Tensor2& t);
Eigen::Matrix<double, 3, 9> matrix_view(const Tensor3& t);
Eigen::Matrix<double, 2, 4> matrix_view(const Tensor2& t);

Mat3 gram(const Tensor3& t);
Mat2 gram(const Tensor2& t);

// sum_i v_i Q_i
Mat3 contract_vec(const Tensor3& t, const Vec3& v);
// (Q(v,v))_i = sum_jk Q_ijk v_j v_k
Vec3 contract2(const Tensor3& t, const Vec3& v);
Vec2 contract2(const Tensor2& t, const Vec2& v);

// W = |Q Q^T - lambda_n^2 I|_F^2
double potential_W(const Tensor3& t);
double potential_W(const Tensor2& t);
// Frobenius gradient Pi(4 (QQ^T - lambda^2 I) Q) in minimal parameters.
Tensor3 gradient_W(const Tensor3& t);
Tensor2 gradient_W(const Tensor2& t);

// V = 1/2 |Q(nu,nu) - mu nu|^2 ; throws std::invalid_argument for non-unit nu.
double boundary_V(const Tensor3& t, const Vec3& nu);
double boundary_V(const Tensor2& t, const Vec2& nu);
Tensor3 gradient_V(const Tensor3& t, const Vec3& nu);
Tensor2 gradient_V(const Tensor2& t, const Vec2& nu);

// max_i |sum_j Q_j Q_i Q_j - (alpha/2) Q_i|_F
double block_sum_check(const Tensor3& t);

// max |contraction over a repeated index pair| of the full tensor
double max_trace(const Full3& a);

// Q'_{ijk} = R_ia R_jb R_kc Q_abc
Tensor3 rotate(const Tensor3& t, const Mat3& r);
Tensor2 rotate(const Tensor2& t, const Mat2& r);

}  // namespace tf
