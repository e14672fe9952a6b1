#include "tetraframe/solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "tetraframe/frames.hpp"

namespace tf {

TensorField::TensorField(std::shared_ptr<const GridDomain> d, int nc, FieldParams p)
    : dom(std::move(d)), ncomp(nc), params(p) {
  if (!dom) throw std::invalid_argument("field needs a domain");
  if (nc != 2 && nc != 7) throw std::invalid_argument("ncomp must be 2 or 7");
  if (nc == 2 && dom->dim != 2) throw std::invalid_argument("MB fields live on 2D domains");
  values.assign(dom->size() * static_cast<std::size_t>(nc), 0.0);
}

Tensor3 TensorField::t3(std::int64_t node) const {
  if (ncomp != 7) throw std::logic_error("field does not hold 3D tensors");
  Tensor3 t;
  std::copy_n(at(node), 7, t.q.begin());
  return t;
}

Tensor2 TensorField::t2(std::int64_t node) const {
  if (ncomp != 2) throw std::logic_error("field does not hold MB tensors");
  Tensor2 t;
  std::copy_n(at(node), 2, t.q.begin());
  return t;
}

void TensorField::set(std::int64_t node, const Tensor3& t) {
  if (ncomp != 7) throw std::logic_error("field does not hold 3D tensors");
  std::copy_n(t.q.begin(), 7, at(node));
}

void TensorField::set(std::int64_t node, const Tensor2& t) {
  if (ncomp != 2) throw std::logic_error("field does not hold MB tensors");
  std::copy_n(t.q.begin(), 2, at(node));
}

double TensorField::W(std::int64_t node) const {
  return ncomp == 7 ? potential_W(t3(node)) : potential_W(t2(node));
}

double TensorField::amplitude(std::int64_t node) const {
  return std::sqrt(ncomp == 7 ? norm_sq(t3(node)) : norm_sq(t2(node)));
}

// ---------------------------------------------------------------- boundary data

Eigen::Matrix<double, 6, 7> boundary_system_matrix(const Vec3& nu) {
  Eigen::Matrix<double, 6, 7> m;
  for (int a = 0; a < 7; ++a) {
    Tensor3 e;
    e.q[a] = 1.0;
    const Mat3 c = contract_vec(e, nu);
    m.col(a) << c(0, 0), c(0, 1), c(0, 2), c(1, 1), c(1, 2), c(2, 2);
  }
  return m;
}

Eigen::Matrix<double, 6, 1> boundary_system_rhs(const Vec3& nu) {
  const Mat3 r = (4.0 / 3.0) * (nu * nu.transpose() - Mat3::Identity() / 3.0);
  Eigen::Matrix<double, 6, 1> v;
  v << r(0, 0), r(0, 1), r(0, 2), r(1, 1), r(1, 2), r(2, 2);
  return v;
}

Mat3 normal_adapted_basis(const Vec3& nu) {
  const Vec3 a = std::abs(nu[0]) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 t1 = (a - a.dot(nu) * nu).normalized();
  const Vec3 t2 = nu.cross(t1);
  Mat3 r;
  r.row(0) = t1.transpose();
  r.row(1) = t2.transpose();
  r.row(2) = nu.transpose();
  return r;
}

Tensor3 dirichlet_bc_from_normal(const Vec3& nu, std::optional<double> theta) {
  if (!std::isfinite(nu.norm()) || std::abs(nu.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("boundary normal must be a unit vector");
  if (!theta) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::Matrix<double, 6, 7>> cod;
    cod.setThreshold(1e-10);
    cod.compute(boundary_system_matrix(nu));
    const Eigen::Matrix<double, 7, 1> x = cod.solve(boundary_system_rhs(nu));
    Tensor3 t;
    for (int a = 0; a < 7; ++a) t.q[a] = x[a];
    return t;
  }
  const double c = 4.0 * std::sqrt(2.0) / 9.0;
  const double a = c * std::cos(3.0 * *theta), b = -c * std::sin(3.0 * *theta);
  Tensor3 e3{{a, b, -4.0 / 9.0, -a, 0.0, -b, -4.0 / 9.0}};
  return rotate(e3, normal_adapted_basis(nu).transpose());
}

Tensor2 mb_from_normal(const Vec3& nu) {
  const double phi = std::atan2(nu[1], nu[0]);
  return Tensor2{{kMu2 * std::cos(3.0 * phi), kMu2 * std::sin(3.0 * phi)}};
}

Quat escape_map_quaternion(double x, double y) {
  const double r = std::min(1.0, std::hypot(x, y));
  const double th = std::atan2(y, x);
  const double c = std::cos(0.25 * std::numbers::pi * r), s = std::sin(0.25 * std::numbers::pi * r);
  return Quat{c, -std::sin(th) * s, std::cos(th) * s, 0.0};
}

Tensor3 escape_map_tensor(double x, double y) {
  static const Tensor3 base = tensor3_from_frame(u0_frame());
  return rotate(base, rotation_of(escape_map_quaternion(x, y)));
}

Tensor3 ball_one_singularity_tensor(const Vec3& x) {
  const double x1 = x[0], x2 = x[1], w = 1.0 - x[2];
  const double d = x1 * x1 + x2 * x2 + w * w;
  if (d < 1e-14) return Tensor3{};
  const Vec3 f1 = Vec3(2 * x1 * w, 2 * x2 * w, x1 * x1 + x2 * x2 - w * w) / d;
  const Vec3 f2 = Vec3(-x1 * x1 + x2 * x2 + w * w, -2 * x1 * x2, 2 * x1 * w) / d;
  const Vec3 f3 = Vec3(2 * x1 * x2, -(x1 * x1 - x2 * x2 + w * w), -2 * x2 * w) / d;
  const double r3 = std::sqrt(3.0) / 2.0, c = 2.0 * std::sqrt(2.0) / 3.0;
  const Vec3 b[3] = {f2, -0.5 * f2 + r3 * f3, -0.5 * f2 - r3 * f3};
  std::array<Vec3, 4> a{f1, Vec3(-f1 / 3.0 + c * b[0]), Vec3(-f1 / 3.0 + c * b[1]), Vec3(-f1 / 3.0 + c * b[2])};
  Tensor3 t;
  for (const auto& u : a) {
    t.q[0] += u[0] * u[0] * u[0];
    t.q[1] += u[0] * u[0] * u[1];
    t.q[2] += u[0] * u[0] * u[2];
    t.q[3] += u[0] * u[1] * u[1];
    t.q[4] += u[0] * u[1] * u[2];
    t.q[5] += u[1] * u[1] * u[1];
    t.q[6] += u[1] * u[1] * u[2];
  }
  return t;
}

// ---------------------------------------------------------------- seeds

SeedSpec parse_seed(const std::string& text) {
  SeedSpec s;
  std::string body = text;
  std::string head;
  {
    std::istringstream is(body);
    is >> head;
  }
  auto numbers_after_head = [&](std::size_t lo, std::size_t hi) {
    std::istringstream is(body);
    std::string h;
    is >> h;
    std::vector<double> v;
    double x;
    while (is >> x) v.push_back(x);
    if (!is.eof() || v.size() < lo || v.size() > hi) throw std::invalid_argument("malformed seed spec: " + text);
    return v;
  };
  if (head == "zero") {
    numbers_after_head(0, 0);
    s.kind = SeedSpec::Kind::Zero;
  } else if (head == "escape_map") {
    numbers_after_head(0, 0);
    s.kind = SeedSpec::Kind::EscapeMap;
  } else if (head == "ball_one_singularity") {
    numbers_after_head(0, 0);
    s.kind = SeedSpec::Kind::BallOneSingularity;
  } else if (head == "frame_constant") {
    auto v = numbers_after_head(0, 4);
    s.kind = SeedSpec::Kind::FrameConstant;
    if (v.size() == 1) {
      s.theta = v[0];
      s.rotation = Eigen::AngleAxisd(v[0], Vec3::UnitZ()).toRotationMatrix();
    } else if (v.size() == 4) {
      Quat q{v[0], v[1], v[2], v[3]};
      if (q.norm() < 1e-12) throw std::invalid_argument("zero quaternion in seed spec");
      s.rotation = rotation_of(q.normalized());
      s.theta = std::atan2(s.rotation(1, 0), s.rotation(0, 0));
    } else if (!v.empty()) {
      throw std::invalid_argument("frame_constant takes an angle or a quaternion");
    }
  } else if (head == "normal_aligned") {
    auto v = numbers_after_head(0, 1);
    s.kind = SeedSpec::Kind::NormalAligned;
    if (!v.empty()) s.theta = v[0];
  } else if (head == "defects") {
    s.kind = SeedSpec::Kind::QuaternionDefects;
    std::vector<std::string> parts;
    std::string part;
    std::istringstream is(body.substr(body.find("defects") + 7));
    while (std::getline(is, part, ';')) parts.push_back(part);
    if (parts.size() < 2) throw std::invalid_argument("defects seed needs rho and at least one defect");
    {
      std::istringstream r(parts[0]);
      if (!(r >> s.rho)) throw std::invalid_argument("defects seed: missing rho");
    }
    for (std::size_t p = 1; p < parts.size(); ++p) {
      std::istringstream d(parts[p]);
      double re, im;
      std::string al, be, extra;
      if (!(d >> re >> im >> al >> be) || (d >> extra)) throw std::invalid_argument("malformed defect: " + parts[p]);
      s.defects.push_back({{re, im}, parse_binary_tet(al), parse_binary_tet(be)});
    }
    validate_defects(s.defects, s.rho);
  } else {
    throw std::invalid_argument("unknown seed kind: " + head);
  }
  return s;
}

std::string describe_seed(const SeedSpec& s) {
  std::ostringstream os;
  os.precision(17);
  switch (s.kind) {
    case SeedSpec::Kind::Zero: os << "zero"; break;
    case SeedSpec::Kind::EscapeMap: os << "escape_map"; break;
    case SeedSpec::Kind::BallOneSingularity: os << "ball_one_singularity"; break;
    case SeedSpec::Kind::FrameConstant: {
      const Quat q = quat_from_rotation(s.rotation);
      os << "frame_constant " << q.w << ' ' << q.x << ' ' << q.y << ' ' << q.z;
      break;
    }
    case SeedSpec::Kind::NormalAligned: os << "normal_aligned " << s.theta; break;
    case SeedSpec::Kind::QuaternionDefects:
      os << "defects " << s.rho;
      for (const auto& d : s.defects)
        os << "; " << d.a.real() << ' ' << d.a.imag() << ' ' << d.alpha.h[0] << ',' << d.alpha.h[1] << ','
           << d.alpha.h[2] << ',' << d.alpha.h[3] << ' ' << d.beta.h[0] << ',' << d.beta.h[1] << ','
           << d.beta.h[2] << ',' << d.beta.h[3];
      break;
  }
  if (s.noise > 0.0) os << " noise " << s.noise << " seed " << s.seed;
  return os.str();
}

TensorField seed_field(std::shared_ptr<const GridDomain> dom, int ncomp, FieldParams params, const SeedSpec& spec) {
  TensorField f(dom, ncomp, params);
  const bool mb = ncomp == 2;
  auto needs3 = [&](const char* what) {
    if (mb) throw std::invalid_argument(std::string(what) + " seed requires a 7-component field");
  };
  Tensor3 const3;
  Tensor2 const2;
  switch (spec.kind) {
    case SeedSpec::Kind::EscapeMap:
      needs3("escape_map");
      if (dom->dim != 2) throw std::invalid_argument("escape_map seed needs a 2D domain");
      break;
    case SeedSpec::Kind::BallOneSingularity:
      needs3("ball_one_singularity");
      if (dom->dim != 3) throw std::invalid_argument("ball_one_singularity seed needs a 3D domain");
      break;
    case SeedSpec::Kind::QuaternionDefects:
      needs3("defects");
      if (dom->dim != 2) throw std::invalid_argument("defects seed needs a 2D domain");
      validate_defects(spec.defects, spec.rho);
      break;
    case SeedSpec::Kind::FrameConstant:
      if (mb) const2 = tensor2_from_frame(mb_frame(spec.theta));
      else const3 = rotate(tensor3_from_frame(standard_tetrahedron()), spec.rotation);
      break;
    default: break;
  }
  for (auto node : dom->active) {
    const Vec3 x = dom->position(node);
    switch (spec.kind) {
      case SeedSpec::Kind::Zero: break;
      case SeedSpec::Kind::EscapeMap: f.set(node, escape_map_tensor(x[0], x[1])); break;
      case SeedSpec::Kind::BallOneSingularity: f.set(node, ball_one_singularity_tensor(x)); break;
      case SeedSpec::Kind::QuaternionDefects: {
        const std::complex<double> z(x[0], x[1]);
        if (std::abs(z) <= 1.0 && !inside_excision(spec.defects, spec.rho, z))
          f.set(node, tetra_tensor(multi_defect_field(spec.defects, spec.rho, z)));
        break;
      }
      case SeedSpec::Kind::FrameConstant:
        if (mb) f.set(node, const2);
        else f.set(node, const3);
        break;
      case SeedSpec::Kind::NormalAligned:
        if (dom->mask[node] != kBoundary) break;
        if (mb) f.set(node, mb_from_normal(dom->normals[node]));
        else f.set(node, dirichlet_bc_from_normal(dom->normals[node], spec.theta));
        break;
    }
  }
  if (spec.noise > 0.0) {
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> u(-spec.noise, spec.noise);
    for (auto node : dom->active) {
      double* q = f.at(node);
      for (int c = 0; c < ncomp; ++c) q[c] += u(rng);
    }
  }
  return f;
}

void copy_boundary(const TensorField& src, TensorField& dst) {
  if (src.dom != dst.dom && (src.dom->size() != dst.dom->size() || src.dom->mask != dst.dom->mask))
    throw std::invalid_argument("fields live on different domains");
  if (src.ncomp != dst.ncomp) throw std::invalid_argument("component count mismatch");
  for (auto node : dst.dom->active)
    if (dst.dom->mask[node] == kBoundary) std::copy_n(src.at(node), src.ncomp, dst.at(node));
}

// ---------------------------------------------------------------- kernels

namespace {

template <int NC>
struct Kernel {
  static constexpr int D = NC == 7 ? 3 : 2;
  static constexpr int NCOL = D * D;
  struct Entry {
    int a, i, col;
    double coef;
  };
  std::vector<Entry> entries;
  Eigen::Matrix<double, NC, NC> metric, minv;
  double lam2;
  double mu;

  Kernel() {
    lam2 = NC == 7 ? kLambda3Sq : kLambda2Sq;
    mu = NC == 7 ? kMu3 : kMu2;
    std::array<std::array<double, D * NCOL>, NC> views{};
    for (int a = 0; a < NC; ++a) {
      if constexpr (NC == 7) {
        Tensor3 e;
        e.q[a] = 1.0;
        auto m = matrix_view(e);
        for (int i = 0; i < D; ++i)
          for (int c = 0; c < NCOL; ++c) views[a][i * NCOL + c] = m(i, c);
      } else {
        Tensor2 e;
        e.q[a] = 1.0;
        auto m = matrix_view(e);
        for (int i = 0; i < D; ++i)
          for (int c = 0; c < NCOL; ++c) views[a][i * NCOL + c] = m(i, c);
      }
      for (int i = 0; i < D; ++i)
        for (int c = 0; c < NCOL; ++c)
          if (views[a][i * NCOL + c] != 0.0) entries.push_back({a, i, c, views[a][i * NCOL + c]});
    }
    for (int a = 0; a < NC; ++a)
      for (int b = 0; b < NC; ++b) {
        double s = 0.0;
        for (int k = 0; k < D * NCOL; ++k) s += views[a][k] * views[b][k];
        metric(a, b) = s;
      }
    minv = metric.inverse();
  }

  void view(const double* q, double m[D][NCOL]) const {
    for (int i = 0; i < D; ++i)
      for (int c = 0; c < NCOL; ++c) m[i][c] = 0.0;
    for (const auto& e : entries) m[e.i][e.col] += e.coef * q[e.a];
  }

  // Returns W; writes the Frobenius gradient when g is non-null; amp2 receives |A|^2.
  double w_grad(const double* q, double* g, double& amp2) const {
    double m[D][NCOL];
    view(q, m);
    double r[D][D];
    for (int i = 0; i < D; ++i)
      for (int j = i; j < D; ++j) {
        double s = 0.0;
        for (int c = 0; c < NCOL; ++c) s += m[i][c] * m[j][c];
        r[i][j] = r[j][i] = s;
      }
    amp2 = 0.0;
    double w = 0.0;
    for (int i = 0; i < D; ++i) {
      amp2 += r[i][i];
      r[i][i] -= lam2;
    }
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) w += r[i][j] * r[i][j];
    if (g) {
      double p[D][NCOL];
      for (int i = 0; i < D; ++i)
        for (int c = 0; c < NCOL; ++c) {
          double s = 0.0;
          for (int j = 0; j < D; ++j) s += r[i][j] * m[j][c];
          p[i][c] = 4.0 * s;
        }
      to_metric_gradient(p, g);
    }
    return w;
  }

  double v_grad(const double* q, const Vec3& nu, double* g) const {
    double m[D][NCOL];
    view(q, m);
    double nn[NCOL];
    for (int j = 0; j < D; ++j)
      for (int k = 0; k < D; ++k) nn[j * D + k] = nu[j] * nu[k];
    double res[D];
    double v = 0.0;
    for (int i = 0; i < D; ++i) {
      double s = 0.0;
      for (int c = 0; c < NCOL; ++c) s += m[i][c] * nn[c];
      res[i] = s - mu * nu[i];
      v += res[i] * res[i];
    }
    if (g) {
      double p[D][NCOL];
      for (int i = 0; i < D; ++i)
        for (int c = 0; c < NCOL; ++c) p[i][c] = res[i] * nn[c];
      to_metric_gradient(p, g);
    }
    return 0.5 * v;
  }

  void to_metric_gradient(const double p[D][NCOL], double* g) const {
    double c[NC] = {};
    for (const auto& e : entries) c[e.a] += e.coef * p[e.i][e.col];
    for (int a = 0; a < NC; ++a) {
      double s = 0.0;
      for (int b = 0; b < NC; ++b) s += minv(a, b) * c[b];
      g[a] = s;
    }
  }

  double msq(const double* d) const {
    double s = 0.0;
    for (int a = 0; a < NC; ++a) {
      double t = 0.0;
      for (int b = 0; b < NC; ++b) t += metric(a, b) * d[b];
      s += d[a] * t;
    }
    return s;
  }
};

template <int NC>
const Kernel<NC>& kernel() {
  static const Kernel<NC> k;
  return k;
}

struct SweepOut {
  double* next = nullptr;  // updated values (full array), or null
  double* grad = nullptr;  // Frobenius gradient per node, or null
  double dt = 0.0;
  bool energy = false;
};

struct Partial {
  Energy e;
  double max_amp2 = 0.0;
  std::int64_t bad_node = -1;
};

template <int NC>
Partial sweep_range(const TensorField& f, const SweepOut& out, std::size_t lo, std::size_t hi) {
  const auto& k = kernel<NC>();
  const GridDomain& dom = *f.dom;
  const int d = dom.dim;
  const int nd = dom.num_dirs();
  const double h = dom.h;
  const double hd = std::pow(h, d), hd2 = std::pow(h, d - 2), hd1 = std::pow(h, d - 1);
  const double inv_eps2 = 1.0 / (f.params.eps * f.params.eps);
  const double inv_d1 = 1.0 / (f.params.delta1 * f.params.delta1);
  const double inv_d2 = 1.0 / (f.params.delta2 * f.params.delta2);
  const BcMode bc = f.params.bc;
  const double* vals = f.values.data();
  const bool need_grad = out.next || out.grad;
  Partial part;
  double g[NC] = {}, gw[NC] = {}, gv[NC] = {}, diff[NC] = {};
  for (std::size_t idx = lo; idx < hi; ++idx) {
    const std::int64_t node = dom.active[idx];
    const double* q = vals + node * NC;
    const bool boundary = dom.mask[node] == kBoundary;
    const bool fixed = boundary && bc == BcMode::Strong;
    const bool need_node_grad = need_grad && !fixed;
    double amp2 = 0.0;
    const double w = k.w_grad(q, need_node_grad ? gw : nullptr, amp2);
    part.max_amp2 = std::max(part.max_amp2, amp2);
    if (out.energy) part.e.bulk += hd * inv_eps2 * w;
    if (need_node_grad)
      for (int a = 0; a < NC; ++a) g[a] = hd * inv_eps2 * gw[a];
    for (int dir = 0; dir < nd; ++dir) {
      const std::int64_t j = dom.nbr[node * nd + dir];
      if (j < 0 || dom.mask[j] == kExterior) continue;
      const double* qj = vals + j * NC;
      for (int a = 0; a < NC; ++a) diff[a] = q[a] - qj[a];
      if (need_node_grad)
        for (int a = 0; a < NC; ++a) g[a] += hd2 * diff[a];
      if (out.energy && (dir & 1)) part.e.dirichlet += 0.5 * hd2 * k.msq(diff);
    }
    double mobility = 1.0;
    if (boundary && bc == BcMode::Weak) {
      const Vec3& nu = dom.normals[node];
      const double v = k.v_grad(q, nu, need_node_grad ? gv : nullptr);
      if (out.energy) part.e.surface += hd1 * (v * inv_d1 + w * inv_d2);
      if (need_node_grad)
        for (int a = 0; a < NC; ++a) g[a] += hd1 * (gv[a] * inv_d1 + gw[a] * inv_d2);
      const double cw = 8.0 * amp2 + 4.0 * std::sqrt(w);
      mobility = 1.0 / (1.0 + out.dt / h * (inv_d1 + cw * inv_d2));
    }
    if (out.grad) {
      double* gout = out.grad + node * NC;
      for (int a = 0; a < NC; ++a) gout[a] = fixed ? 0.0 : g[a];
    }
    if (out.next) {
      double* qn = out.next + node * NC;
      if (fixed) {
        for (int a = 0; a < NC; ++a) qn[a] = q[a];
      } else {
        const double s = out.dt * mobility / hd;
        for (int a = 0; a < NC; ++a) {
          qn[a] = q[a] - s * g[a];
          if (!std::isfinite(qn[a]) && part.bad_node < 0) part.bad_node = node;
        }
      }
    }
  }
  return part;
}

Partial sweep(const TensorField& f, const SweepOut& out, int threads) {
  const std::size_t n = f.dom->active.size();
  threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max<std::size_t>(1, n / 256))));
  auto run = [&](std::size_t lo, std::size_t hi) {
    return f.ncomp == 7 ? sweep_range<7>(f, out, lo, hi) : sweep_range<2>(f, out, lo, hi);
  };
  std::vector<Partial> parts(threads);
  if (threads == 1) {
    parts[0] = run(0, n);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      const std::size_t lo = n * t / threads, hi = n * (t + 1) / threads;
      pool.emplace_back([&, t, lo, hi] { parts[t] = run(lo, hi); });
    }
    for (auto& th : pool) th.join();
  }
  Partial total;
  for (const auto& p : parts) {
    total.e.dirichlet += p.e.dirichlet;
    total.e.bulk += p.e.bulk;
    total.e.surface += p.e.surface;
    total.max_amp2 = std::max(total.max_amp2, p.max_amp2);
    if (total.bad_node < 0) total.bad_node = p.bad_node;
  }
  return total;
}

}  // namespace

Energy energy(const TensorField& f, int threads) {
  SweepOut out;
  out.energy = true;
  return sweep(f, out, threads).e;
}

std::vector<double> energy_gradient(const TensorField& f, int threads) {
  std::vector<double> g(f.values.size(), 0.0);
  SweepOut out;
  out.grad = g.data();
  sweep(f, out, threads);
  return g;
}

double default_dt(const TensorField& f) {
  const double h = f.dom->h;
  const double eps = f.params.eps;
  return 0.2 * std::min(h * h / (2.0 * f.dom->dim), eps * eps / 8.0);
}

double amplitude_bound(const FieldParams& p) {
  const double gamma = (p.delta2 * p.delta2) / (p.delta1 * p.delta1);
  return std::max(8.0 / 3.0, std::cbrt(8.0 * gamma / 3.0)) + 0.05;
}

StepStats step(TensorField& f, double dt, int threads, bool with_energy) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  std::vector<double> next(f.values);
  SweepOut out;
  out.next = next.data();
  out.dt = dt;
  out.energy = with_energy;
  const Partial p = sweep(f, out, threads);
  if (p.bad_node >= 0) {
    const Vec3 x = f.dom->position(p.bad_node);
    std::ostringstream os;
    os << "non-finite value at node " << p.bad_node << " (" << x[0] << ", " << x[1] << ", " << x[2]
       << "); reduce dt";
    throw SolverError(os.str());
  }
  f.values.swap(next);
  StepStats s;
  s.before = p.e;
  s.max_amplitude = std::sqrt(p.max_amp2);
  return s;
}

RelaxReport relax(TensorField& f, const SolverConfig& cfg, const CheckpointHook& hook) {
  RelaxReport rep;
  rep.dt = cfg.dt > 0.0 ? cfg.dt : default_dt(f);
  if (rep.dt > default_dt(f) * (1.0 + 1e-12))
    throw std::invalid_argument("time step exceeds the stability bound");
  const long every = std::max(1L, cfg.energy_every);
  const long window = std::max(every, (cfg.window + every - 1) / every * every);
  const bool weak = f.params.bc == BcMode::Weak;
  if (weak) rep.amplitude_bound = amplitude_bound(f.params);
  std::map<long, double> hist;
  double prev = std::numeric_limits<double>::infinity();
  long it = 0;
  for (; it < cfg.max_iters; ++it) {
    const bool with_energy = it % every == 0;
    const StepStats st = step(f, rep.dt, cfg.threads, with_energy);
    rep.max_amplitude = std::max(rep.max_amplitude, st.max_amplitude);
    if (weak && st.max_amplitude > rep.amplitude_bound) rep.bound_held = false;
    if (cfg.checkpoint_every > 0 && hook && (it + 1) % cfg.checkpoint_every == 0) hook(f, it + 1);
    if (!with_energy) continue;
    const double e = st.before.total();
    rep.energy_history.emplace_back(it, e);
    if (e > prev * (1.0 + 1e-13) + 1e-300) ++rep.monotone_violations;
    prev = e;
    hist[it] = e;
    if (it >= window && it >= cfg.min_iters) {
      auto old = hist.find(it - window);
      if (old != hist.end()) {
        const double denom = std::max(std::abs(e), 1e-300);
        if ((old->second - e) / denom < cfg.rel_energy_tol) {
          rep.converged = true;
          ++it;
          break;
        }
      }
      hist.erase(hist.begin(), hist.lower_bound(it - window));
    }
  }
  rep.iterations = it;
  rep.final_energy = energy(f, cfg.threads);
  double amp = 0.0;
  for (auto node : f.dom->active) amp = std::max(amp, f.amplitude(node));
  rep.max_amplitude = std::max(rep.max_amplitude, amp);
  if (weak && amp > rep.amplitude_bound) rep.bound_held = false;
  return rep;
}

}  // namespace tf
