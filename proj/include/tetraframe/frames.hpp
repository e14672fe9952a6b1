#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "tetraframe/tensor.hpp"

namespace tf {

// n+1 unit vectors in R^n stored as the columns of an n x (n+1) matrix.
struct Frame {
  int n = 0;
  Eigen::MatrixXd vectors;

  Eigen::VectorXd vec(int j) const { return vectors.col(j); }
  int size() const { return static_cast<int>(vectors.cols()); }
};

// Largest violation of the frame identities (inner products, sum, outer-product sum).
double frame_residual(const Frame& f);

// Columns reordered lexicographically, for set comparisons.
Frame canonical_order(const Frame& f);

// Max over columns of the angle to the nearest vector of the other frame.
double frame_set_distance(const Frame& a, const Frame& b);

// Recursive simplex matrix C_n (n x (n+1)), 2 <= n <= 16.
Eigen::MatrixXd build_simplex_matrix(int n);

// Columns of R C_n. Throws if R is not a rotation within 1e-10.
Frame frame_from_rotation(const Eigen::MatrixXd& r);

// R = (n/(n+1)) A C_n^T
Eigen::MatrixXd rotation_from_frame(const Frame& f);

// Q_ijk = sum_l u_i u_j u_k, any n; entry (i,j,k) at (i*n + j)*n + k.
std::vector<double> frame_tensor_full(const Frame& f);
Tensor3 tensor3_from_frame(const Frame& f);
Tensor2 tensor2_from_frame(const Frame& f);

// Haar-distributed rotation. n = 3 samples a unit quaternion, other n use QR of a Gaussian.
Eigen::MatrixXd random_rotation(int n, std::uint64_t seed);
Mat3 random_rotation3(std::uint64_t seed);

// Mercedes-Benz frame with first vector at angle theta.
Frame mb_frame(double theta);
// Cube-vertex tetrahedron v0 and the frame u0 containing e3.
Frame standard_tetrahedron();
Frame u0_frame();
// Rotation carrying the v0 set onto the u0 set.
Mat3 r0_rotation();

struct EigenPairSet {
  int n = 0;
  double lambda = 0.0;                  // common eigenvalue on the variety
  std::vector<double> values;           // per-pair eigenvalue sqrt of the Gram spectrum
  std::vector<Eigen::VectorXd> f;       // orthonormal vectors
  std::vector<Eigen::MatrixXd> b;       // orthonormal traceless symmetric matrices
};

// General path: diagonalize QQ^T. full holds n^3 entries.
EigenPairSet eigenpairs(const std::vector<double>& full, int n);
EigenPairSet eigenpairs(const Tensor3& t);
EigenPairSet eigenpairs(const Tensor2& t);
// Frame path: f^k = R e^k with R from rotation_from_frame.
EigenPairSet eigenpairs_from_frame(const Frame& f);
// Q_i = sum_k lambda_k f^k_i B^k, returned as n^3 entries.
std::vector<double> reconstruct(const EigenPairSet& e);

}  // namespace tf
