#include "tetraframe/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tf {

namespace {

inline int id3(int i, int j, int k) { return i * 9 + j * 3 + k; }
inline int id2(int i, int j, int k) { return i * 4 + j * 2 + k; }

template <class F>
void for_perms(int i, int j, int k, F&& f) {
  f(i, j, k);
  f(i, k, j);
  f(j, i, k);
  f(j, k, i);
  f(k, i, j);
  f(k, j, i);
}

void check_unit(double norm) {
  if (std::abs(norm - 1.0) > 1e-12) throw std::invalid_argument("normal vector is not unit length");
}

}  // namespace

double lambda_sq(int n) {
  const double nn = n;
  return (nn + 1.0) * (nn * nn - 1.0) / (nn * nn * nn);
}

Tensor3& Tensor3::operator+=(const Tensor3& o) {
  for (int a = 0; a < 7; ++a) q[a] += o.q[a];
  return *this;
}
Tensor3& Tensor3::operator-=(const Tensor3& o) {
  for (int a = 0; a < 7; ++a) q[a] -= o.q[a];
  return *this;
}
Tensor3& Tensor3::operator*=(double s) {
  for (auto& x : q) x *= s;
  return *this;
}
Tensor2& Tensor2::operator+=(const Tensor2& o) {
  q[0] += o.q[0];
  q[1] += o.q[1];
  return *this;
}
Tensor2& Tensor2::operator-=(const Tensor2& o) {
  q[0] -= o.q[0];
  q[1] -= o.q[1];
  return *this;
}
Tensor2& Tensor2::operator*=(double s) {
  q[0] *= s;
  q[1] *= s;
  return *this;
}

Full3 to_full(const Tensor3& t) {
  const auto& q = t.q;
  Full3 a{};
  auto set = [&](int i, int j, int k, double v) {
    for_perms(i, j, k, [&](int x, int y, int z) { a[id3(x, y, z)] = v; });
  };
  set(0, 0, 0, q[0]);
  set(0, 0, 1, q[1]);
  set(0, 0, 2, q[2]);
  set(0, 1, 1, q[3]);
  set(0, 1, 2, q[4]);
  set(0, 2, 2, -q[0] - q[3]);
  set(1, 1, 1, q[5]);
  set(1, 1, 2, q[6]);
  set(1, 2, 2, -q[1] - q[5]);
  set(2, 2, 2, -q[2] - q[6]);
  return a;
}

Full2 to_full(const Tensor2& t) {
  Full2 a{};
  auto set = [&](int i, int j, int k, double v) {
    for_perms(i, j, k, [&](int x, int y, int z) { a[id2(x, y, z)] = v; });
  };
  set(0, 0, 0, t.q[0]);
  set(0, 0, 1, t.q[1]);
  set(0, 1, 1, -t.q[0]);
  set(1, 1, 1, -t.q[1]);
  return a;
}

Tensor3 project3(const Full3& a) {
  Full3 s{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        double acc = 0.0;
        for_perms(i, j, k, [&](int x, int y, int z) { acc += a[id3(x, y, z)]; });
        s[id3(i, j, k)] = acc / 6.0;
      }
  double v[3];
  for (int i = 0; i < 3; ++i) v[i] = s[id3(i, 0, 0)] + s[id3(i, 1, 1)] + s[id3(i, 2, 2)];
  auto entry = [&](int i, int j, int k) {
    double d = 0.0;
    if (i == j) d += v[k];
    if (i == k) d += v[j];
    if (j == k) d += v[i];
    return s[id3(i, j, k)] - d / 5.0;
  };
  return Tensor3{{entry(0, 0, 0), entry(0, 0, 1), entry(0, 0, 2), entry(0, 1, 1), entry(0, 1, 2),
                  entry(1, 1, 1), entry(1, 1, 2)}};
}

Tensor2 project2(const Full2& a) {
  Full2 s{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        double acc = 0.0;
        for_perms(i, j, k, [&](int x, int y, int z) { acc += a[id2(x, y, z)]; });
        s[id2(i, j, k)] = acc / 6.0;
      }
  double v[2];
  for (int i = 0; i < 2; ++i) v[i] = s[id2(i, 0, 0)] + s[id2(i, 1, 1)];
  auto entry = [&](int i, int j, int k) {
    double d = 0.0;
    if (i == j) d += v[k];
    if (i == k) d += v[j];
    if (j == k) d += v[i];
    return s[id2(i, j, k)] - d / 4.0;
  };
  return Tensor2{{entry(0, 0, 0), entry(0, 0, 1)}};
}

std::vector<double> project(std::span<const double> full, int n) {
  if (n == 3) {
    if (full.size() != 27) throw std::invalid_argument("expected 27 entries for n=3");
    Full3 a;
    std::copy(full.begin(), full.end(), a.begin());
    auto t = project3(a);
    return {t.q.begin(), t.q.end()};
  }
  if (n == 2) {
    if (full.size() != 8) throw std::invalid_argument("expected 8 entries for n=2");
    Full2 a;
    std::copy(full.begin(), full.end(), a.begin());
    auto t = project2(a);
    return {t.q.begin(), t.q.end()};
  }
  throw std::invalid_argument("dimension must be 2 or 3");
}

const Eigen::Matrix<double, 7, 7>& metric3() {
  static const Eigen::Matrix<double, 7, 7> m = [] {
    Eigen::Matrix<double, 7, 7> g;
    std::array<Full3, 7> basis;
    for (int a = 0; a < 7; ++a) {
      Tensor3 e;
      e.q[a] = 1.0;
      basis[a] = to_full(e);
    }
    for (int a = 0; a < 7; ++a)
      for (int b = 0; b < 7; ++b) {
        double acc = 0.0;
        for (int x = 0; x < 27; ++x) acc += basis[a][x] * basis[b][x];
        g(a, b) = acc;
      }
    return g;
  }();
  return m;
}

double inner(const Tensor3& a, const Tensor3& b) {
  const auto& g = metric3();
  double acc = 0.0;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) acc += a.q[i] * g(i, j) * b.q[j];
  return acc;
}

double inner(const Tensor2& a, const Tensor2& b) { return 4.0 * (a.q[0] * b.q[0] + a.q[1] * b.q[1]); }
double norm_sq(const Tensor3& a) { return inner(a, a); }
double norm_sq(const Tensor2& a) { return inner(a, a); }

std::array<Mat3, 3> blocks(const Tensor3& t) {
  const auto& q = t.q;
  const double q33 = -q[0] - q[3], q233 = -q[1] - q[5], q333 = -q[2] - q[6];
  std::array<Mat3, 3> b;
  b[0] << q[0], q[1], q[2], q[1], q[3], q[4], q[2], q[4], q33;
  b[1] << q[1], q[3], q[4], q[3], q[5], q[6], q[4], q[6], q233;
  b[2] << q[2], q[4], q33, q[4], q[6], q233, q33, q233, q333;
  return b;
}

std::array<Mat2, 2> blocks(const Tensor2& t) {
  std::array<Mat2, 2> b;
  b[0] << t.q[0], t.q[1], t.q[1], -t.q[0];
  b[1] << t.q[1], -t.q[0], -t.q[0], -t.q[1];
  return b;
}

Eigen::Matrix<double, 3, 9> matrix_view(const Tensor3& t) {
  auto b = blocks(t);
  Eigen::Matrix<double, 3, 9> m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) m(i, j * 3 + k) = b[i](j, k);
  return m;
}

Eigen::Matrix<double, 2, 4> matrix_view(const Tensor2& t) {
  auto b = blocks(t);
  Eigen::Matrix<double, 2, 4> m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) m(i, j * 2 + k) = b[i](j, k);
  return m;
}

Mat3 gram(const Tensor3& t) {
  auto m = matrix_view(t);
  return m * m.transpose();
}

Mat2 gram(const Tensor2& t) {
  auto m = matrix_view(t);
  return m * m.transpose();
}

Mat3 contract_vec(const Tensor3& t, const Vec3& v) {
  auto b = blocks(t);
  return v[0] * b[0] + v[1] * b[1] + v[2] * b[2];
}

Vec3 contract2(const Tensor3& t, const Vec3& v) {
  auto b = blocks(t);
  return Vec3(v.dot(b[0] * v), v.dot(b[1] * v), v.dot(b[2] * v));
}

Vec2 contract2(const Tensor2& t, const Vec2& v) {
  auto b = blocks(t);
  return Vec2(v.dot(b[0] * v), v.dot(b[1] * v));
}

double potential_W(const Tensor3& t) {
  return (gram(t) - kLambda3Sq * Mat3::Identity()).squaredNorm();
}

double potential_W(const Tensor2& t) {
  return (gram(t) - kLambda2Sq * Mat2::Identity()).squaredNorm();
}

Tensor3 gradient_W(const Tensor3& t) {
  auto mv = matrix_view(t);
  Mat3 m = mv * mv.transpose() - kLambda3Sq * Mat3::Identity();
  Eigen::Matrix<double, 3, 9> g = 4.0 * m * mv;
  Full3 a;
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 9; ++c) a[i * 9 + c] = g(i, c);
  return project3(a);
}

Tensor2 gradient_W(const Tensor2& t) {
  auto mv = matrix_view(t);
  Mat2 m = mv * mv.transpose() - kLambda2Sq * Mat2::Identity();
  Eigen::Matrix<double, 2, 4> g = 4.0 * m * mv;
  Full2 a;
  for (int i = 0; i < 2; ++i)
    for (int c = 0; c < 4; ++c) a[i * 4 + c] = g(i, c);
  return project2(a);
}

double boundary_V(const Tensor3& t, const Vec3& nu) {
  check_unit(nu.norm());
  return 0.5 * (contract2(t, nu) - kMu3 * nu).squaredNorm();
}

double boundary_V(const Tensor2& t, const Vec2& nu) {
  check_unit(nu.norm());
  return 0.5 * (contract2(t, nu) - kMu2 * nu).squaredNorm();
}

Tensor3 gradient_V(const Tensor3& t, const Vec3& nu) {
  check_unit(nu.norm());
  Vec3 r = contract2(t, nu) - kMu3 * nu;
  Full3 a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) a[id3(i, j, k)] = r[i] * nu[j] * nu[k];
  return project3(a);
}

Tensor2 gradient_V(const Tensor2& t, const Vec2& nu) {
  check_unit(nu.norm());
  Vec2 r = contract2(t, nu) - kMu2 * nu;
  Full2 a;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) a[id2(i, j, k)] = r[i] * nu[j] * nu[k];
  return project2(a);
}

double block_sum_check(const Tensor3& t) {
  auto b = blocks(t);
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    Mat3 s = Mat3::Zero();
    for (int j = 0; j < 3; ++j) s += b[j] * b[i] * b[j];
    worst = std::max(worst, (s - 0.5 * kAlpha * b[i]).norm());
  }
  return worst;
}

double max_trace(const Full3& a) {
  double worst = 0.0;
  for (int x = 0; x < 3; ++x) {
    double t1 = 0, t2 = 0, t3 = 0;
    for (int y = 0; y < 3; ++y) {
      t1 += a[id3(x, y, y)];
      t2 += a[id3(y, y, x)];
      t3 += a[id3(y, x, y)];
    }
    worst = std::max({worst, std::abs(t1), std::abs(t2), std::abs(t3)});
  }
  return worst;
}

Tensor3 rotate(const Tensor3& t, const Mat3& r) {
  const Full3 a = to_full(t);
  Full3 b{}, c{}, d{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        double acc = 0.0;
        for (int x = 0; x < 3; ++x) acc += r(i, x) * a[id3(x, j, k)];
        b[id3(i, j, k)] = acc;
      }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        double acc = 0.0;
        for (int x = 0; x < 3; ++x) acc += r(j, x) * b[id3(i, x, k)];
        c[id3(i, j, k)] = acc;
      }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        double acc = 0.0;
        for (int x = 0; x < 3; ++x) acc += r(k, x) * c[id3(i, j, x)];
        d[id3(i, j, k)] = acc;
      }
  return project3(d);
}

Tensor2 rotate(const Tensor2& t, const Mat2& r) {
  const Full2 a = to_full(t);
  Full2 d{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        double acc = 0.0;
        for (int x = 0; x < 2; ++x)
          for (int y = 0; y < 2; ++y)
            for (int z = 0; z < 2; ++z) acc += r(i, x) * r(j, y) * r(k, z) * a[id2(x, y, z)];
        d[id2(i, j, k)] = acc;
      }
  return project2(d);
}

}  // namespace tf
