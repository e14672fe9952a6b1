#include "tetraframe/quaternion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "tetraframe/frames.hpp"
#include "tetraframe/recovery.hpp"

namespace tf {

double Quat::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

Quat Quat::normalized() const {
  const double n = norm();
  return {w / n, x / n, y / n, z / n};
}

Quat Quat::inverse() const {
  const double n2 = w * w + x * x + y * y + z * z;
  return {w / n2, -x / n2, -y / n2, -z / n2};
}

Quat operator*(const Quat& a, const Quat& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z, a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x, a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

double chordal(const Quat& p, const Quat& q) {
  const double dw = p.w - q.w, dx = p.x - q.x, dy = p.y - q.y, dz = p.z - q.z;
  return std::sqrt(dw * dw + dx * dx + dy * dy + dz * dz);
}

BinaryTet operator*(const BinaryTet& p, const BinaryTet& q) {
  const auto& a = p.h;
  const auto& b = q.h;
  std::array<int, 4> s{a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
                       a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
                       a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
                       a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
  BinaryTet out;
  for (int c = 0; c < 4; ++c) {
    if (s[c] % 2 != 0) throw std::logic_error("product left the half-integer lattice");
    out.h[c] = s[c] / 2;
  }
  if (!is_in_2T(out.h)) throw std::logic_error("product left the binary tetrahedral group");
  return out;
}

std::string to_string(const BinaryTet& g) {
  static const char* units[4] = {"", "i", "j", "k"};
  std::ostringstream os;
  bool half = false;
  for (int v : g.h)
    if (v == 1 || v == -1) half = true;
  if (half) {
    os << "(";
    for (int c = 0; c < 4; ++c) {
      os << (g.h[c] > 0 ? (c == 0 ? "" : "+") : "-") << (c == 0 ? "1" : units[c]);
    }
    os << ")/2";
  } else {
    for (int c = 0; c < 4; ++c)
      if (g.h[c] != 0) os << (g.h[c] > 0 ? "" : "-") << (c == 0 ? "1" : units[c]);
  }
  return os.str();
}

namespace bt {
BinaryTet one() { return {{2, 0, 0, 0}}; }
BinaryTet minus_one() { return {{-2, 0, 0, 0}}; }
BinaryTet i() { return {{0, 2, 0, 0}}; }
BinaryTet j() { return {{0, 0, 2, 0}}; }
BinaryTet k() { return {{0, 0, 0, 2}}; }
BinaryTet s() { return {{1, 1, 1, 1}}; }
BinaryTet t() { return {{1, 1, 1, -1}}; }
}  // namespace bt

bool is_in_2T(const std::array<int, 4>& d) {
  int twos = 0, ones = 0, zeros = 0;
  for (int v : d) {
    if (v == 2 || v == -2) ++twos;
    else if (v == 1 || v == -1) ++ones;
    else if (v == 0) ++zeros;
    else return false;
  }
  return (twos == 1 && zeros == 3) || ones == 4;
}

const std::vector<BinaryTet>& binary_tetrahedral_group() {
  static const std::vector<BinaryTet> g = [] {
    std::vector<BinaryTet> out;
    for (int c = 0; c < 4; ++c)
      for (int sgn : {2, -2}) {
        BinaryTet e{{0, 0, 0, 0}};
        e.h[c] = sgn;
        out.push_back(e);
      }
    for (int m = 0; m < 16; ++m) {
      BinaryTet e;
      for (int c = 0; c < 4; ++c) e.h[c] = (m >> c) & 1 ? -1 : 1;
      out.push_back(e);
    }
    return out;
  }();
  return g;
}

namespace {

int element_index(const BinaryTet& g) {
  const auto& all = binary_tetrahedral_group();
  for (size_t n = 0; n < all.size(); ++n)
    if (all[n] == g) return static_cast<int>(n);
  throw std::logic_error("not an element of 2T");
}

// Orbit labels computed by exhaustive conjugation.
const std::vector<ConjClass>& class_table() {
  static const std::vector<ConjClass> table = [] {
    const auto& all = binary_tetrahedral_group();
    std::vector<int> orbit(all.size(), -1);
    int next = 0;
    for (size_t a = 0; a < all.size(); ++a) {
      if (orbit[a] >= 0) continue;
      for (const auto& h : all) orbit[element_index(h * all[a] * h.inverse())] = next;
      ++next;
    }
    if (next != kNumClasses) throw std::logic_error("expected seven conjugacy classes");
    const std::pair<BinaryTet, ConjClass> anchors[] = {
        {bt::one(), ConjClass::Identity},  {bt::s(), ConjClass::S},
        {bt::s().inverse(), ConjClass::SInv}, {bt::s() * bt::s(), ConjClass::S2},
        {(bt::s() * bt::s()).inverse(), ConjClass::S2Inv}, {bt::minus_one(), ConjClass::MinusOne},
        {bt::i(), ConjClass::IJK}};
    std::map<int, ConjClass> label;
    for (const auto& [g, c] : anchors) label[orbit[element_index(g)]] = c;
    if (label.size() != kNumClasses) throw std::logic_error("class anchors are not distinct");
    std::vector<ConjClass> out(all.size());
    for (size_t a = 0; a < all.size(); ++a) out[a] = label[orbit[a]];
    return out;
  }();
  return table;
}

}  // namespace

ConjClass conj_class(const BinaryTet& g) { return class_table()[element_index(g)]; }

BinaryTet parse_binary_tet(const std::string& text) {
  static const std::map<std::string, BinaryTet> named = [] {
    std::map<std::string, BinaryTet> m;
    m["1"] = bt::one();
    m["-1"] = bt::minus_one();
    m["i"] = bt::i();
    m["j"] = bt::j();
    m["k"] = bt::k();
    m["-i"] = bt::i().inverse();
    m["-j"] = bt::j().inverse();
    m["-k"] = bt::k().inverse();
    m["s"] = bt::s();
    m["t"] = bt::t();
    m["s^-1"] = bt::s().inverse();
    m["t^-1"] = bt::t().inverse();
    m["s^2"] = bt::s() * bt::s();
    m["s^-2"] = (bt::s() * bt::s()).inverse();
    return m;
  }();
  if (auto it = named.find(text); it != named.end()) return it->second;
  std::string body = text;
  std::replace(body.begin(), body.end(), ',', ' ');
  std::istringstream is(body);
  BinaryTet g;
  for (int c = 0; c < 4; ++c)
    if (!(is >> g.h[c])) throw std::invalid_argument("unknown 2T element: " + text);
  std::string rest;
  if (is >> rest || !is_in_2T(g.h)) throw std::invalid_argument("unknown 2T element: " + text);
  return g;
}

std::string class_label(ConjClass c) {
  switch (c) {
    case ConjClass::Identity: return "1";
    case ConjClass::S: return "s";
    case ConjClass::SInv: return "s^-1";
    case ConjClass::S2: return "s^2";
    case ConjClass::S2Inv: return "s^-2";
    case ConjClass::MinusOne: return "-1";
    case ConjClass::IJK: return "ijk";
  }
  return "?";
}

BinaryTet class_representative(ConjClass c) {
  switch (c) {
    case ConjClass::Identity: return bt::one();
    case ConjClass::S: return bt::s();
    case ConjClass::SInv: return bt::s().inverse();
    case ConjClass::S2: return bt::s() * bt::s();
    case ConjClass::S2Inv: return (bt::s() * bt::s()).inverse();
    case ConjClass::MinusOne: return bt::minus_one();
    case ConjClass::IJK: return bt::i();
  }
  return bt::one();
}

Snap snap_to_2T(const Quat& q) {
  Snap best{bt::one(), 1e300};
  for (const auto& g : binary_tetrahedral_group()) {
    const double d = chordal(q, g.quat());
    if (d < best.distance) best = {g, d};
  }
  return best;
}

Mat3 rotation_of(const Quat& q) {
  const double a = q.w, b = q.x, c = q.y, d = q.z;
  Mat3 r;
  r << a * a + b * b - c * c - d * d, 2 * b * c - 2 * a * d, 2 * a * c + 2 * b * d,
      2 * a * d + 2 * b * c, a * a + c * c - b * b - d * d, 2 * c * d - 2 * a * b,
      2 * b * d - 2 * a * c, 2 * a * b + 2 * c * d, a * a + d * d - b * b - c * c;
  return r;
}

Quat quat_from_rotation(const Mat3& r) {
  Quat q;
  const double tr = r.trace();
  if (tr > 0.0) {
    const double s = 2.0 * std::sqrt(1.0 + tr);
    q = {0.25 * s, (r(2, 1) - r(1, 2)) / s, (r(0, 2) - r(2, 0)) / s, (r(1, 0) - r(0, 1)) / s};
  } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
    q = {(r(2, 1) - r(1, 2)) / s, 0.25 * s, (r(0, 1) + r(1, 0)) / s, (r(0, 2) + r(2, 0)) / s};
  } else if (r(1, 1) > r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2));
    q = {(r(0, 2) - r(2, 0)) / s, (r(0, 1) + r(1, 0)) / s, 0.25 * s, (r(1, 2) + r(2, 1)) / s};
  } else {
    const double s = 2.0 * std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1));
    q = {(r(1, 0) - r(0, 1)) / s, (r(0, 2) + r(2, 0)) / s, (r(1, 2) + r(2, 1)) / s, 0.25 * s};
  }
  q = q.normalized();
  if (q.w < 0.0) q = -q;
  return q;
}

Tensor3 tetra_tensor(const Quat& q) {
  static const Frame v0 = standard_tetrahedron();
  const Mat3 r = rotation_of(q);
  Tensor3 t;
  for (int l = 0; l < 4; ++l) {
    const Vec3 u = r * v0.vectors.col(l);
    const double x = u[0], y = u[1], z = u[2];
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

Quat geodesic_generator(const Quat& sigma, double t) {
  if (t < 0.0 || t > 1.0) throw std::invalid_argument("geodesic parameter outside [0,1]");
  const double vn = std::sqrt(sigma.x * sigma.x + sigma.y * sigma.y + sigma.z * sigma.z);
  if (vn < 1e-15) {
    if (sigma.w > 0.0) return {1.0, 0.0, 0.0, 0.0};
    return {std::cos(std::numbers::pi * t), std::sin(std::numbers::pi * t), 0.0, 0.0};
  }
  const double s = std::atan2(vn, sigma.w);
  const double f = std::sin(s * t) / vn;
  return {std::cos(s * t), sigma.x * f, sigma.y * f, sigma.z * f};
}

Quat geodesic_generator(const BinaryTet& sigma, double t) { return geodesic_generator(sigma.quat(), t); }

Quat annulus_map(const BinaryTet& alpha, const BinaryTet& beta, double rho, std::complex<double> z) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("annulus inner radius must lie in (0,1)");
  const double r = std::abs(z);
  if (r < rho - 1e-12 || r > 1.0 + 1e-12) throw std::domain_error("point outside the annulus");
  double theta = std::arg(z);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  const double radial = std::clamp((1.0 - r) / (1.0 - rho), 0.0, 1.0);
  const double angular = std::clamp(theta / (2.0 * std::numbers::pi), 0.0, 1.0);
  return geodesic_generator(beta, radial) * geodesic_generator(alpha, angular);
}

std::complex<double> mobius(std::complex<double> a, std::complex<double> z) {
  if (std::abs(a) >= 1.0) throw std::invalid_argument("Mobius parameter must lie in the open unit disk");
  return (z - a) / (1.0 - std::conj(a) * z);
}

namespace {

// Euclidean disk equal to {|mobius(a,z)| < rho}.
void excision_disk(std::complex<double> a, double rho, std::complex<double>& c, double& r) {
  const double a2 = std::norm(a);
  const double den = 1.0 - rho * rho * a2;
  c = a * (1.0 - rho * rho) / den;
  r = rho * (1.0 - a2) / den;
}

}  // namespace

void validate_defects(const std::vector<Defect>& defects, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("annulus inner radius must lie in (0,1)");
  for (const auto& d : defects)
    if (std::abs(d.a) >= 1.0) throw std::invalid_argument("defect outside the open unit disk");
  for (size_t i = 0; i < defects.size(); ++i)
    for (size_t j = i + 1; j < defects.size(); ++j) {
      std::complex<double> ci, cj;
      double ri, rj;
      excision_disk(defects[i].a, rho, ci, ri);
      excision_disk(defects[j].a, rho, cj, rj);
      if (std::abs(ci - cj) <= ri + rj) throw std::invalid_argument("defect excision disks overlap");
    }
}

bool inside_excision(const std::vector<Defect>& defects, double rho, std::complex<double> z) {
  for (const auto& d : defects)
    if (std::abs(mobius(d.a, z)) < rho) return true;
  return false;
}

Quat multi_defect_field(const std::vector<Defect>& defects, double rho, std::complex<double> z) {
  Quat q;
  for (const auto& d : defects) {
    const auto w = mobius(d.a, z);
    if (std::abs(w) < rho) throw std::domain_error("point inside an excised disk");
    q = q * annulus_map(d.alpha, d.beta, rho, w);
  }
  return q;
}

LoopClass classify_rotation_loop(const std::vector<Mat3>& rotations) {
  if (rotations.size() < 3) throw std::invalid_argument("loop needs at least three samples");
  const auto& group = binary_tetrahedral_group();
  const double max_chord = 2.0 * std::sin(std::numbers::pi / 24.0);
  LoopClass out;
  auto lift = [&](const Mat3& r, const Quat& prev) {
    const Quat raw = quat_from_rotation(r);
    Quat best;
    double bd = 1e300;
    for (const auto& g : group) {
      const Quat c = raw * g.quat();
      const double d = chordal(c, prev);
      if (d < bd) {
        bd = d;
        best = c;
      }
    }
    if (bd > max_chord) throw std::runtime_error("loop step too coarse for an unambiguous lift");
    out.max_step = std::max(out.max_step, bd);
    return best;
  };
  const Quat start = quat_from_rotation(rotations.front());
  Quat cur = start;
  for (size_t k = 1; k < rotations.size(); ++k) cur = lift(rotations[k], cur);
  const Quat end = lift(rotations.front(), cur);
  const Snap snap = snap_to_2T(start.inverse() * end);
  if (snap.distance > 0.1) throw std::runtime_error("lifted loop drifted away from 2T");
  out.element = snap.element;
  out.snap_distance = snap.distance;
  out.cls = conj_class(snap.element);
  return out;
}

LoopClass classify_loop(const std::vector<Tensor3>& loop, double tol) {
  static const Frame v0 = standard_tetrahedron();
  std::vector<Mat3> rots;
  rots.reserve(loop.size());
  for (const auto& t : loop) {
    Frame f = recover_tetrahedron(t, tol).frame;
    Mat3 r = 0.75 * f.vectors * v0.vectors.transpose();
    if (r.determinant() < 0.0) {
      f.vectors.col(0).swap(f.vectors.col(1));
      r = 0.75 * f.vectors * v0.vectors.transpose();
    }
    Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    rots.push_back(svd.matrixU() * svd.matrixV().transpose());
  }
  return classify_rotation_loop(rots);
}

}  // namespace tf
