#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "tetraframe/tensor.hpp"

namespace tf {

// a + b i + c j + d k
struct Quat {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  double norm() const;
  Quat normalized() const;
  Quat conj() const { return {w, -x, -y, -z}; }
  Quat inverse() const;
  Quat operator-() const { return {-w, -x, -y, -z}; }
};

Quat operator*(const Quat& p, const Quat& q);
double chordal(const Quat& p, const Quat& q);

// Element of the binary tetrahedral group, components stored doubled (exact).
struct BinaryTet {
  std::array<int, 4> h{2, 0, 0, 0};

  Quat quat() const { return {h[0] / 2.0, h[1] / 2.0, h[2] / 2.0, h[3] / 2.0}; }
  BinaryTet inverse() const { return {{h[0], -h[1], -h[2], -h[3]}}; }
  bool operator==(const BinaryTet&) const = default;
};

BinaryTet operator*(const BinaryTet& a, const BinaryTet& b);
std::string to_string(const BinaryTet& g);
// Accepts 1, -1, +-i, +-j, +-k, s, t, s^-1, t^-1, s^2, s^-2 or four doubled integers "a,b,c,d".
BinaryTet parse_binary_tet(const std::string& text);

namespace bt {
BinaryTet one();
BinaryTet minus_one();
BinaryTet i();
BinaryTet j();
BinaryTet k();
BinaryTet s();  // (1+i+j+k)/2
BinaryTet t();  // (1+i+j-k)/2
}  // namespace bt

// All 24 elements.
const std::vector<BinaryTet>& binary_tetrahedral_group();
bool is_in_2T(const std::array<int, 4>& doubled);

enum class ConjClass { Identity, S, SInv, S2, S2Inv, MinusOne, IJK };
inline constexpr int kNumClasses = 7;

ConjClass conj_class(const BinaryTet& g);
std::string class_label(ConjClass c);
// Representative used for generators and reports.
BinaryTet class_representative(ConjClass c);

struct Snap {
  BinaryTet element;
  double distance = 0.0;
};
Snap snap_to_2T(const Quat& q);

// Rotation R_q; R_q = R_{-q}.
Mat3 rotation_of(const Quat& q);
// Unit quaternion with w >= 0 for a rotation matrix.
Quat quat_from_rotation(const Mat3& r);

// T(q) = sum_l (R_q v0^l)^{(x)3}
Tensor3 tetra_tensor(const Quat& q);

// Geodesic from 1 to sigma; t in [0,1].
Quat geodesic_generator(const Quat& sigma, double t);
Quat geodesic_generator(const BinaryTet& sigma, double t);

// F_{alpha,beta}(r e^{i theta}) = G_beta((1-r)/(1-rho)) G_alpha(theta/2pi), rho <= |z| <= 1.
Quat annulus_map(const BinaryTet& alpha, const BinaryTet& beta, double rho, std::complex<double> z);

// (z - a)/(1 - conj(a) z), |a| < 1
std::complex<double> mobius(std::complex<double> a, std::complex<double> z);

struct Defect {
  std::complex<double> a;
  BinaryTet alpha;
  BinaryTet beta;
};

// Throws if the excision disks {|mobius(a_j, z)| < rho} overlap.
void validate_defects(const std::vector<Defect>& defects, double rho);
// Product of F_{alpha_j,beta_j}(mobius(a_j, z)) in listed order.
// Throws std::domain_error when z lies inside an excision disk.
Quat multi_defect_field(const std::vector<Defect>& defects, double rho, std::complex<double> z);
bool inside_excision(const std::vector<Defect>& defects, double rho, std::complex<double> z);

struct LoopClass {
  ConjClass cls = ConjClass::Identity;
  BinaryTet element;      // snapped holonomy q_start^{-1} q_end
  double snap_distance = 0.0;
  double max_step = 0.0;  // largest chordal step between consecutive lifts
};

// Classify a closed loop of near-variety tensors (first sample not repeated at the end).
// Throws std::runtime_error on an ambiguous lift or snap drift.
LoopClass classify_loop(const std::vector<Tensor3>& loop, double tol = 0.5);
// Same, for a loop already expressed as rotations.
LoopClass classify_rotation_loop(const std::vector<Mat3>& rotations);

}  // namespace tf
