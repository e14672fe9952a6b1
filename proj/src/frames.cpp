#include "tetraframe/frames.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "tetraframe/quaternion.hpp"

namespace tf {

double frame_residual(const Frame& f) {
  const int n = f.n;
  const auto& a = f.vectors;
  double worst = 0.0;
  Eigen::MatrixXd g = a.transpose() * a;
  for (int j = 0; j <= n; ++j)
    for (int k = 0; k <= n; ++k) {
      double expect = -1.0 / n + (j == k ? (n + 1.0) / n : 0.0);
      worst = std::max(worst, std::abs(g(j, k) - expect));
    }
  worst = std::max(worst, a.rowwise().sum().cwiseAbs().maxCoeff());
  Eigen::MatrixXd p = a * a.transpose() - ((n + 1.0) / n) * Eigen::MatrixXd::Identity(n, n);
  worst = std::max(worst, p.cwiseAbs().maxCoeff());
  return worst;
}

Frame canonical_order(const Frame& f) {
  std::vector<int> idx(f.size());
  for (int i = 0; i < f.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int x, int y) {
    for (int r = 0; r < f.n; ++r) {
      if (f.vectors(r, x) != f.vectors(r, y)) return f.vectors(r, x) < f.vectors(r, y);
    }
    return false;
  });
  Frame out{f.n, Eigen::MatrixXd(f.n, f.size())};
  for (int i = 0; i < f.size(); ++i) out.vectors.col(i) = f.vectors.col(idx[i]);
  return out;
}

namespace {

double nearest_angle(const Eigen::VectorXd& v, const Frame& other) {
  double best = std::numbers::pi;
  for (int j = 0; j < other.size(); ++j) {
    double chord = (v - other.vectors.col(j)).norm();
    best = std::min(best, 2.0 * std::asin(std::min(1.0, 0.5 * chord)));
  }
  return best;
}

}  // namespace

double frame_set_distance(const Frame& a, const Frame& b) {
  double worst = 0.0;
  for (int j = 0; j < a.size(); ++j) worst = std::max(worst, nearest_angle(a.vectors.col(j), b));
  for (int j = 0; j < b.size(); ++j) worst = std::max(worst, nearest_angle(b.vectors.col(j), a));
  return worst;
}

Eigen::MatrixXd build_simplex_matrix(int n) {
  if (n < 2 || n > 16) throw std::invalid_argument("simplex dimension must lie in [2,16]");
  Eigen::MatrixXd c(2, 3);
  const double h = std::sqrt(3.0) / 2.0;
  c << h, -h, 0.0, -0.5, -0.5, 1.0;
  for (int m = 2; m < n; ++m) {
    const double m1 = m + 1.0;
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(m + 1, m + 2);
    next.topLeftCorner(m, m + 1) = (std::sqrt(m1 * m1 - 1.0) / m1) * c;
    next.row(m).head(m + 1).setConstant(-1.0 / m1);
    next(m, m + 1) = 1.0;
    c = std::move(next);
  }
  return c;
}

Frame frame_from_rotation(const Eigen::MatrixXd& r) {
  const int n = static_cast<int>(r.rows());
  if (r.cols() != n) throw std::invalid_argument("rotation must be square");
  if ((r.transpose() * r - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10 ||
      r.determinant() < 0.0)
    throw std::invalid_argument("matrix is not a rotation");
  return Frame{n, r * build_simplex_matrix(n)};
}

Eigen::MatrixXd rotation_from_frame(const Frame& f) {
  const int n = f.n;
  return (n / (n + 1.0)) * f.vectors * build_simplex_matrix(n).transpose();
}

std::vector<double> frame_tensor_full(const Frame& f) {
  const int n = f.n;
  std::vector<double> out(static_cast<size_t>(n) * n * n, 0.0);
  for (int l = 0; l < f.size(); ++l) {
    const auto u = f.vectors.col(l);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) out[(i * n + j) * n + k] += u[i] * u[j] * u[k];
  }
  return out;
}

Tensor3 tensor3_from_frame(const Frame& f) {
  if (f.n != 3 || f.size() != 4) throw std::invalid_argument("expected a tetrahedral frame");
  if (frame_residual(f) > 1e-10) throw std::invalid_argument("frame identities violated");
  Tensor3 t;
  for (int l = 0; l < 4; ++l) {
    const double x = f.vectors(0, l), y = f.vectors(1, l), z = f.vectors(2, l);
    t.q[0] += x * x * x;
    t.q[1] += x * x * y;
    t.q[2] += x * x * z;
    t.q[3] += x * y * y;
    t.q[4] += x * y * z;
    t.q[5] += y * y * y;
    t.q[6] += y * y * z;
  }
  return t;
}

Tensor2 tensor2_from_frame(const Frame& f) {
  if (f.n != 2 || f.size() != 3) throw std::invalid_argument("expected an MB frame");
  if (frame_residual(f) > 1e-10) throw std::invalid_argument("frame identities violated");
  Tensor2 t;
  for (int l = 0; l < 3; ++l) {
    const double x = f.vectors(0, l), y = f.vectors(1, l);
    t.q[0] += x * x * x;
    t.q[1] += x * x * y;
  }
  return t;
}

Mat3 random_rotation3(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Quat q{g(rng), g(rng), g(rng), g(rng)};
  return rotation_of(q.normalized());
}

Eigen::MatrixXd random_rotation(int n, std::uint64_t seed) {
  if (n == 3) return random_rotation3(seed);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

Frame mb_frame(double theta) {
  Frame f{2, Eigen::MatrixXd(2, 3)};
  for (int l = 0; l < 3; ++l) {
    const double a = theta + 2.0 * std::numbers::pi * l / 3.0;
    f.vectors(0, l) = std::cos(a);
    f.vectors(1, l) = std::sin(a);
  }
  return f;
}

Frame standard_tetrahedron() {
  Frame f{3, Eigen::MatrixXd(3, 4)};
  f.vectors << 1, 1, -1, -1, 1, -1, 1, -1, 1, -1, -1, 1;
  f.vectors /= std::sqrt(3.0);
  return f;
}

Frame u0_frame() {
  Frame f{3, Eigen::MatrixXd(3, 4)};
  const double a = std::sqrt(8.0 / 9.0), b = std::sqrt(2.0 / 9.0), c = std::sqrt(2.0 / 3.0);
  f.vectors << 0, a, -b, -b, 0, 0, c, -c, 1, -1.0 / 3, -1.0 / 3, -1.0 / 3;
  return f;
}

Mat3 r0_rotation() {
  Mat3 r;
  const double s3 = std::sqrt(3.0), s8 = std::sqrt(8.0);
  r << 4, -2, -2, 0, 2 * s3, -2 * s3, s8, s8, s8;
  return r / std::sqrt(24.0);
}

namespace {

Eigen::MatrixXd block_of(const std::vector<double>& full, int n, int i) {
  Eigen::MatrixXd b(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) b(j, k) = full[(i * n + j) * n + k];
  return b;
}

std::vector<double> to_vector(const Tensor3& t) {
  auto a = to_full(t);
  return {a.begin(), a.end()};
}
std::vector<double> to_vector(const Tensor2& t) {
  auto a = to_full(t);
  return {a.begin(), a.end()};
}

void fill_tensors(EigenPairSet& e, const std::vector<double>& full, const Eigen::MatrixXd& fmat) {
  const int n = e.n;
  std::vector<Eigen::MatrixXd> q;
  for (int i = 0; i < n; ++i) q.push_back(block_of(full, n, i));
  for (int k = 0; k < n; ++k) {
    e.f.push_back(fmat.col(k));
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) b += fmat(j, k) * q[j];
    e.b.push_back(b / e.values[k]);
  }
}

}  // namespace

EigenPairSet eigenpairs(const std::vector<double>& full, int n) {
  if (n < 2 || static_cast<int>(full.size()) != n * n * n)
    throw std::invalid_argument("tensor size does not match dimension");
  Eigen::MatrixXd mv(n, n * n);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < n * n; ++c) mv(i, c) = full[i * n * n + c];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mv * mv.transpose());
  const auto& ev = es.eigenvalues();
  if (ev.maxCoeff() <= 0.0 || ev.minCoeff() < 1e-12 * ev.maxCoeff())
    throw std::domain_error("QQ^T is rank deficient");
  EigenPairSet e;
  e.n = n;
  for (int k = 0; k < n; ++k) e.values.push_back(std::sqrt(ev[k]));
  e.lambda = e.values.back();
  fill_tensors(e, full, es.eigenvectors());
  return e;
}

EigenPairSet eigenpairs(const Tensor3& t) { return eigenpairs(to_vector(t), 3); }
EigenPairSet eigenpairs(const Tensor2& t) { return eigenpairs(to_vector(t), 2); }

EigenPairSet eigenpairs_from_frame(const Frame& f) {
  const int n = f.n;
  EigenPairSet e;
  e.n = n;
  e.lambda = std::sqrt(lambda_sq(n));
  e.values.assign(n, e.lambda);
  fill_tensors(e, frame_tensor_full(f), rotation_from_frame(f));
  return e;
}

std::vector<double> reconstruct(const EigenPairSet& e) {
  const int n = e.n;
  std::vector<double> out(static_cast<size_t>(n) * n * n, 0.0);
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd qi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) qi += e.values[k] * e.f[k][i] * e.b[k];
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) out[(i * n + j) * n + k] = qi(j, k);
  }
  return out;
}

}  // namespace tf
