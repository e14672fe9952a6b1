#include "tetraframe/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tf {

double mb_angle(const Tensor2& t) {
  double phi = std::atan2(t.q[1], t.q[0]);
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  double theta = phi / 3.0;
  if (theta >= 2.0 * std::numbers::pi / 3.0) theta = 0.0;
  return theta;
}

RecoveryResult recover_mb(const Tensor2& t, double tol) {
  RecoveryResult r;
  r.residual = (gram(t) - kLambda2Sq * Mat2::Identity()).norm();
  if (!(r.residual < tol)) throw std::domain_error("tensor is off the MB variety");
  r.frame = mb_frame(mb_angle(t));
  return r;
}

double mu(const Tensor3& t, const Vec3& b) {
  if (std::abs(b.norm() - 1.0) > 1e-12) throw std::invalid_argument("mu expects a unit vector");
  return contract_vec(t, b).determinant();
}

MuCoefficients::MuCoefficients(const Tensor3& t) {
  auto q = blocks(t);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      Mat3 p = q[i] * q[j];
      for (int k = j; k < 3; ++k) {
        const double v = (p * q[k]).trace();
        c[i][j][k] = c[i][k][j] = c[j][i][k] = c[j][k][i] = c[k][i][j] = c[k][j][i] = v;
      }
    }
}

double MuCoefficients::value(const Vec3& b) const {
  double acc = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) acc += c[i][j][k] * b[i] * b[j] * b[k];
  return acc / 3.0;
}

Vec3 MuCoefficients::gradient(const Vec3& b) const {
  Vec3 g = Vec3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) g[i] += c[i][j][k] * b[j] * b[k];
  return g;
}

Mat3 MuCoefficients::hessian(const Vec3& b) const {
  Mat3 h = Mat3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) h(i, j) += 2.0 * c[i][j][k] * b[k];
  return h;
}

namespace {

std::array<Eigen::Matrix<double, 3, 9>, 7> basis_views() {
  std::array<Eigen::Matrix<double, 3, 9>, 7> out;
  for (int a = 0; a < 7; ++a) {
    Tensor3 e;
    e.q[a] = 1.0;
    out[a] = matrix_view(e);
  }
  return out;
}

Eigen::Matrix<double, 6, 1> sym_entries(const Mat3& m) {
  Eigen::Matrix<double, 6, 1> v;
  v << m(0, 0), m(0, 1), m(0, 2), m(1, 1), m(1, 2), m(2, 2);
  return v;
}

void tangent_basis(const Vec3& b, Vec3& t1, Vec3& t2) {
  Vec3 a = std::abs(b[0]) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  t1 = (a - a.dot(b) * b).normalized();
  t2 = b.cross(t1);
}

struct Critical {
  Vec3 b;
  double value;
};

// Riemannian Newton ascent on the sphere with gradient fallback.
bool ascend(const MuCoefficients& mc, Vec3 b, Critical& out) {
  b.normalize();
  double val = mc.value(b);
  for (int it = 0; it < 200; ++it) {
    Vec3 g = mc.gradient(b);
    const double radial = b.dot(g);
    Vec3 gt = g - radial * b;
    if (gt.norm() < 1e-12) {
      Vec3 t1, t2;
      tangent_basis(b, t1, t2);
      Mat3 h = mc.hessian(b);
      Eigen::Matrix2d h2;
      h2 << t1.dot(h * t1) - radial, t1.dot(h * t2), t2.dot(h * t1), t2.dot(h * t2) - radial;
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h2);
      if (es.eigenvalues().maxCoeff() >= -1e-9) return false;
      out = {b, val};
      return true;
    }
    Vec3 t1, t2;
    tangent_basis(b, t1, t2);
    Mat3 h = mc.hessian(b);
    Eigen::Matrix2d h2;
    h2 << t1.dot(h * t1) - radial, t1.dot(h * t2), t2.dot(h * t1), t2.dot(h * t2) - radial;
    Eigen::Vector2d g2(t1.dot(gt), t2.dot(gt));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h2);
    bool moved = false;
    if (es.eigenvalues().maxCoeff() < 0.0) {
      Eigen::Vector2d s2 = -h2.ldlt().solve(g2);
      Vec3 step = s2[0] * t1 + s2[1] * t2;
      if (step.norm() > 0.5) step *= 0.5 / step.norm();
      Vec3 nb = (b + step).normalized();
      const double nv = mc.value(nb);
      if (nv >= val - 1e-15) {
        b = nb;
        val = nv;
        moved = true;
      }
    }
    if (!moved) {
      double tau = 1.0 / std::max(1e-3, h.norm());
      for (int ls = 0; ls < 60; ++ls, tau *= 0.5) {
        Vec3 nb = (b + tau * gt).normalized();
        const double nv = mc.value(nb);
        if (nv > val) {
          b = nb;
          val = nv;
          moved = true;
          break;
        }
      }
      if (!moved) {
        out = {b, val};
        return gt.norm() < 1e-10;
      }
    }
  }
  return false;
}

std::vector<Vec3> seed_directions() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> ico;
  for (int s1 : {-1, 1})
    for (int s2 : {-1, 1}) {
      ico.emplace_back(0.0, s1, s2 * phi);
      ico.emplace_back(s1, s2 * phi, 0.0);
      ico.emplace_back(s2 * phi, 0.0, s1);
    }
  std::vector<Vec3> seeds;
  for (const auto& v : ico) seeds.push_back(v.normalized());
  for (const auto& v : ico) seeds.push_back(Vec3(-v[1], v[0], v[2]).normalized());
  return seeds;
}

std::vector<Critical> distinct_maximizers(const MuCoefficients& mc) {
  static const std::vector<Vec3> seeds = seed_directions();
  std::vector<Critical> found;
  for (const auto& s : seeds) {
    Critical c;
    if (ascend(mc, s, c)) found.push_back(c);
  }
  std::sort(found.begin(), found.end(), [](const Critical& a, const Critical& b) { return a.value > b.value; });
  std::vector<Critical> kept;
  for (const auto& c : found) {
    bool dup = false;
    for (const auto& k : kept) {
      const double ang = 2.0 * std::asin(std::min(1.0, 0.5 * (c.b - k.b).norm()));
      if (ang < 0.1) {
        dup = true;
        break;
      }
    }
    if (!dup) kept.push_back(c);
  }
  return kept;
}

double variety_residual(const Tensor3& t) { return (gram(t) - kLambda3Sq * Mat3::Identity()).norm(); }

}  // namespace

Tensor3 project_to_variety(const Tensor3& t, int max_steps) {
  static const auto views = basis_views();
  Tensor3 cur = t, best = t;
  double best_res = variety_residual(t);
  for (int s = 0; s < max_steps; ++s) {
    auto m = matrix_view(cur);
    Mat3 f = m * m.transpose() - kLambda3Sq * Mat3::Identity();
    if (f.norm() < 1e-15) break;
    Eigen::Matrix<double, 6, 7> j;
    for (int a = 0; a < 7; ++a) {
      Mat3 d = views[a] * m.transpose();
      j.col(a) = sym_entries(d + d.transpose());
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::Matrix<double, 6, 7>> cod;
    // Near the variety the Jacobian has rank 4 (7 parameters minus the 3 rotation directions);
    // the remaining singular values are tiny and must not be inverted.
    cod.setThreshold(1e-6);
    cod.compute(j);
    Eigen::Matrix<double, 7, 1> delta = cod.solve(sym_entries(f));
    for (int a = 0; a < 7; ++a) cur.q[a] -= delta[a];
    const double res = variety_residual(cur);
    if (!(res < best_res)) break;
    best = cur;
    best_res = res;
  }
  return best;
}

RecoveryResult recover_tetrahedron(const Tensor3& t, double tol) {
  RecoveryResult r;
  r.residual = variety_residual(t);
  if (!(r.residual < tol)) throw std::domain_error("tensor is off the tetrahedral variety");
  const Tensor3 on = r.residual > 1e-14 ? project_to_variety(t) : t;
  MuCoefficients mc(on);
  auto kept = distinct_maximizers(mc);
  if (kept.size() < 4) throw std::runtime_error("fewer than four distinct maximizers found");
  r.frame = Frame{3, Eigen::MatrixXd(3, 4)};
  for (int j = 0; j < 4; ++j) {
    r.frame.vectors.col(j) = kept[j].b;
    r.mu_values.push_back(kept[j].value);
  }
  if (frame_residual(r.frame) > std::max(1e-8, tol))
    throw std::runtime_error("recovered vectors do not form a tetrahedral frame");
  return r;
}

RecoveryResult recover_tetrahedron_aligned(const Tensor3& t, double tol) {
  RecoveryResult r;
  r.residual = variety_residual(t);
  if (!(r.residual < tol)) throw std::domain_error("tensor is off the tetrahedral variety");
  const Tensor3 on = r.residual > 1e-14 ? project_to_variety(t) : t;
  MuCoefficients mc(on);
  auto kept = distinct_maximizers(mc);
  if (kept.empty()) throw std::runtime_error("no maximizer found");
  const Vec3 b1 = kept.front().b;
  Vec3 t1, t2;
  tangent_basis(b1, t1, t2);
  Mat3 rot;
  rot.row(0) = b1.transpose();
  rot.row(1) = t1.transpose();
  rot.row(2) = t2.transpose();
  const Tensor3 aligned = rotate(on, rot);
  const double scale = 27.0 / (16.0 * std::sqrt(2.0));
  Tensor2 block{{scale * aligned.q[5], scale * aligned.q[6]}};
  const Frame c = mb_frame(mb_angle(block));
  r.frame = Frame{3, Eigen::MatrixXd(3, 4)};
  r.frame.vectors.col(0) = b1;
  for (int j = 0; j < 3; ++j) {
    Vec3 a(-1.0 / 3.0, 2.0 * std::sqrt(2.0) / 3.0 * c.vectors(0, j), 2.0 * std::sqrt(2.0) / 3.0 * c.vectors(1, j));
    r.frame.vectors.col(j + 1) = rot.transpose() * a;
  }
  for (int j = 0; j < 4; ++j) r.mu_values.push_back(mc.value(r.frame.vectors.col(j)));
  return r;
}

CriticalDiagnostics validate_critical_structure(const Tensor3& t, const Vec3& b) {
  CriticalDiagnostics d;
  Vec3 v = contract_vec(t, b) * b;
  d.gamma = b.dot(v);
  d.eta_residual = (v - d.gamma * b).norm();
  MuCoefficients mc(t);
  Vec3 g = mc.gradient(b);
  d.lagrange_residual = (g - b.dot(g) * b).norm();
  return d;
}

}  // namespace tf
