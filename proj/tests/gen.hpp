#pragma once

// Hand-rolled generators and oracles shared by the unit tests.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "tetraframe/tensor.hpp"

namespace gen {

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform(double a = -1.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(eng); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng); }
  int below(int n) { return std::uniform_int_distribution<int>(0, n - 1)(eng); }
};

inline tf::Vec3 unit3(Rng& r) {
  tf::Vec3 v;
  do v = tf::Vec3(r.normal(), r.normal(), r.normal());
  while (v.norm() < 1e-3);
  return v.normalized();
}

inline tf::Tensor3 tensor3(Rng& r, double scale = 1.0) {
  tf::Tensor3 t;
  for (int a = 0; a < 7; ++a) t[a] = scale * r.uniform();
  return t;
}

inline tf::Tensor2 tensor2(Rng& r, double scale = 1.0) {
  tf::Tensor2 t;
  for (int a = 0; a < 2; ++a) t[a] = scale * r.uniform();
  return t;
}

// Rotation from a normalized Gaussian quaternion, built without the library.
inline tf::Mat3 rotation3(Rng& r) {
  double w = r.normal(), x = r.normal(), y = r.normal(), z = r.normal();
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  w /= n, x /= n, y /= n, z /= n;
  tf::Mat3 m;
  m << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return m;
}

// Independent full-array helpers: Q_ijk at i*9+j*3+k.
inline tf::Mat3 gram_full(const tf::Full3& q) {
  tf::Mat3 g = tf::Mat3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int l = 0; l < 3; ++l)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) g(i, l) += q[i * 9 + j * 3 + k] * q[l * 9 + j * 3 + k];
  return g;
}

inline tf::Full3 full_from_vectors(const std::vector<tf::Vec3>& us) {
  tf::Full3 q{};
  for (const auto& u : us)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) q[i * 9 + j * 3 + k] += u[i] * u[j] * u[k];
  return q;
}

// Cube-vertex tetrahedron.
inline std::vector<tf::Vec3> v0() {
  const double c = 1.0 / std::sqrt(3.0);
  return {tf::Vec3(c, c, c), tf::Vec3(c, -c, -c), tf::Vec3(-c, c, -c), tf::Vec3(-c, -c, c)};
}

inline std::vector<tf::Vec3> rotated(const std::vector<tf::Vec3>& us, const tf::Mat3& r) {
  std::vector<tf::Vec3> out;
  for (const auto& u : us) out.push_back(r * u);
  return out;
}

// Minimal parameters straight from the full array.
inline tf::Tensor3 minimal(const tf::Full3& q) {
  return tf::Tensor3{{q[0], q[1], q[2], q[4], q[5], q[13], q[14]}};
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace gen
