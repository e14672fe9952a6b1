#include "tetraframe/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace tf {

namespace {

// Outward edge normals of the equilateral triangle with a vertex on +y.
const std::array<Vec3, 3>& triangle_normals() {
  static const std::array<Vec3, 3> n = [] {
    std::array<Vec3, 3> out;
    const double angles[3] = {-0.5 * std::numbers::pi, std::numbers::pi / 6.0, 5.0 * std::numbers::pi / 6.0};
    for (int e = 0; e < 3; ++e) out[e] = Vec3(std::cos(angles[e]), std::sin(angles[e]), 0.0);
    return out;
  }();
  return n;
}

Vec3 radial(const Vec3& x) {
  const double r = x.norm();
  return r > 0.0 ? Vec3(x / r) : Vec3::UnitX();
}

}  // namespace

int ShapeSpec::dim() const {
  switch (kind) {
    case ShapeKind::Ball:
    case ShapeKind::BoxMinusBall: return 3;
    default: return 2;
  }
}

double ShapeSpec::sdf(const Vec3& x) const {
  switch (kind) {
    case ShapeKind::Disk: return Vec3(x[0], x[1], 0.0).norm() - radius;
    case ShapeKind::Ball: return x.norm() - radius;
    case ShapeKind::TriangleWithHole: {
      double d = -1e300;
      const Vec3 p(x[0], x[1], 0.0);
      for (const auto& nrm : triangle_normals()) d = std::max(d, nrm.dot(p) - 0.5 * radius);
      if (hole_radius > 0.0) d = std::max(d, hole_radius - (p - hole_center).norm());
      return d;
    }
    case ShapeKind::BoxMinusBall: {
      double d = -1e300;
      for (int c = 0; c < 3; ++c) d = std::max(d, std::abs(x[c]) - half_extent[c]);
      return std::max(d, hole_radius - x.norm());
    }
    case ShapeKind::Rectangle:
      return std::max(std::abs(x[0]) - half_extent[0], std::abs(x[1]) - half_extent[1]);
  }
  return 0.0;
}

Vec3 ShapeSpec::normal(const Vec3& x) const {
  switch (kind) {
    case ShapeKind::Disk: return radial(Vec3(x[0], x[1], 0.0));
    case ShapeKind::Ball: return radial(x);
    case ShapeKind::TriangleWithHole: {
      const Vec3 p(x[0], x[1], 0.0);
      double best = -1e300;
      Vec3 nrm = Vec3::UnitX();
      for (const auto& e : triangle_normals()) {
        const double d = e.dot(p) - 0.5 * radius;
        if (d > best) {
          best = d;
          nrm = e;
        }
      }
      if (hole_radius > 0.0 && hole_radius - (p - hole_center).norm() > best) nrm = -radial(p - hole_center);
      return nrm;
    }
    case ShapeKind::BoxMinusBall: {
      double best = -1e300;
      Vec3 nrm = Vec3::UnitX();
      for (int c = 0; c < 3; ++c) {
        const double d = std::abs(x[c]) - half_extent[c];
        if (d > best) {
          best = d;
          nrm = Vec3::Zero();
          nrm[c] = x[c] >= 0.0 ? 1.0 : -1.0;
        }
      }
      if (hole_radius - x.norm() > best) nrm = -radial(x);
      return nrm;
    }
    case ShapeKind::Rectangle: {
      const double dx = std::abs(x[0]) - half_extent[0], dy = std::abs(x[1]) - half_extent[1];
      if (dx >= dy) return Vec3(x[0] >= 0.0 ? 1.0 : -1.0, 0.0, 0.0);
      return Vec3(0.0, x[1] >= 0.0 ? 1.0 : -1.0, 0.0);
    }
  }
  return Vec3::UnitX();
}

void ShapeSpec::bounds(Vec3& lo, Vec3& hi) const {
  switch (kind) {
    case ShapeKind::Disk:
    case ShapeKind::TriangleWithHole:
      lo = Vec3(-radius, -radius, 0.0);
      hi = Vec3(radius, radius, 0.0);
      return;
    case ShapeKind::Ball:
      lo = Vec3::Constant(-radius);
      hi = Vec3::Constant(radius);
      return;
    case ShapeKind::BoxMinusBall:
      lo = -half_extent;
      hi = half_extent;
      return;
    case ShapeKind::Rectangle:
      lo = Vec3(-half_extent[0], -half_extent[1], 0.0);
      hi = Vec3(half_extent[0], half_extent[1], 0.0);
      return;
  }
}

std::string ShapeSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case ShapeKind::Disk: os << "disk " << radius; break;
    case ShapeKind::Ball: os << "ball " << radius; break;
    case ShapeKind::TriangleWithHole:
      os << "triangle_with_hole " << radius << ' ' << hole_radius << ' ' << hole_center[0] << ' ' << hole_center[1];
      break;
    case ShapeKind::BoxMinusBall: os << "box_minus_ball " << half_extent[0] << ' ' << hole_radius; break;
    case ShapeKind::Rectangle: os << "rectangle " << half_extent[0] << ' ' << half_extent[1]; break;
  }
  return os.str();
}

void ShapeSpec::validate() const {
  switch (kind) {
    case ShapeKind::Disk:
    case ShapeKind::Ball:
      if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
      return;
    case ShapeKind::TriangleWithHole: {
      if (!(radius > 0.0) || hole_radius < 0.0) throw std::invalid_argument("invalid triangle parameters");
      ShapeSpec tri = *this;
      tri.hole_radius = 0.0;
      if (hole_radius > 0.0 && tri.sdf(hole_center) + hole_radius >= 0.0)
        throw std::invalid_argument("excised disk does not lie inside the triangle");
      return;
    }
    case ShapeKind::BoxMinusBall:
      if (!(hole_radius > 0.0) || hole_radius >= half_extent.minCoeff())
        throw std::invalid_argument("ball must lie strictly inside the box");
      return;
    case ShapeKind::Rectangle:
      if (!(half_extent[0] > 0.0 && half_extent[1] > 0.0)) throw std::invalid_argument("invalid rectangle");
      return;
  }
}

ShapeSpec parse_shape(const std::string& text) {
  std::istringstream is(text);
  std::string name;
  is >> name;
  std::vector<double> p;
  double v;
  while (is >> v) p.push_back(v);
  if (!is.eof()) throw std::invalid_argument("malformed shape parameters: " + text);
  auto need = [&](size_t lo, size_t hi) {
    if (p.size() < lo || p.size() > hi) throw std::invalid_argument("wrong parameter count for shape " + name);
  };
  ShapeSpec s;
  if (name == "disk") {
    need(1, 1);
    s.kind = ShapeKind::Disk;
    s.radius = p[0];
  } else if (name == "ball") {
    need(1, 1);
    s.kind = ShapeKind::Ball;
    s.radius = p[0];
  } else if (name == "triangle_with_hole") {
    need(2, 4);
    s.kind = ShapeKind::TriangleWithHole;
    s.radius = p[0];
    s.hole_radius = p[1];
    if (p.size() == 4) s.hole_center = Vec3(p[2], p[3], 0.0);
    else if (p.size() == 3) throw std::invalid_argument("hole center needs two coordinates");
  } else if (name == "box_minus_ball") {
    need(2, 2);
    s.kind = ShapeKind::BoxMinusBall;
    s.half_extent = Vec3::Constant(p[0]);
    s.hole_radius = p[1];
  } else if (name == "rectangle") {
    need(2, 2);
    s.kind = ShapeKind::Rectangle;
    s.half_extent = Vec3(p[0], p[1], 0.0);
  } else {
    throw std::invalid_argument("unknown shape: " + name);
  }
  s.validate();
  return s;
}

std::array<int, 3> GridDomain::coords(std::int64_t idx) const {
  const int i = static_cast<int>(idx % n[0]);
  const std::int64_t r = idx / n[0];
  return {i, static_cast<int>(r % n[1]), static_cast<int>(r / n[1])};
}

Vec3 GridDomain::position(std::int64_t idx) const {
  const auto c = coords(idx);
  return origin + h * Vec3(c[0], c[1], c[2]);
}

std::size_t GridDomain::count(NodeType t) const {
  std::size_t c = 0;
  for (auto m : mask) c += (m == t);
  return c;
}

GridDomain build_domain(const ShapeSpec& shape, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  shape.validate();
  GridDomain d;
  d.dim = shape.dim();
  d.h = h;
  d.shape = shape;
  Vec3 lo, hi;
  shape.bounds(lo, hi);
  for (int c = 0; c < 3; ++c) {
    if (c < d.dim) {
      d.origin[c] = h * std::floor(lo[c] / h) - 2.0 * h;
      d.n[c] = static_cast<int>(std::ceil((hi[c] - d.origin[c]) / h)) + 3;
    } else {
      d.origin[c] = 0.0;
      d.n[c] = 1;
    }
  }
  const std::size_t total = static_cast<std::size_t>(d.n[0]) * d.n[1] * d.n[2];
  if (total > 50'000'000) throw std::invalid_argument("grid too large");
  d.sdf.resize(total);
  d.mask.assign(total, kExterior);
  d.normals.assign(total, Vec3::Zero());
  for (std::size_t idx = 0; idx < total; ++idx) d.sdf[idx] = shape.sdf(d.position(idx));

  const int nd = d.num_dirs();
  d.nbr.assign(total * nd, -1);
  for (std::size_t idx = 0; idx < total; ++idx) {
    const auto c = d.coords(idx);
    for (int axis = 0; axis < d.dim; ++axis)
      for (int s = 0; s < 2; ++s) {
        auto cc = c;
        cc[axis] += s == 0 ? -1 : 1;
        if (cc[axis] < 0 || cc[axis] >= d.n[axis]) continue;
        d.nbr[idx * nd + 2 * axis + s] = d.index(cc[0], cc[1], cc[2]);
      }
  }
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (d.sdf[idx] > 0.0) continue;
    bool edge = false;
    for (int dir = 0; dir < nd; ++dir) {
      const auto j = d.nbr[idx * nd + dir];
      if (j < 0 || d.sdf[j] > 0.0) edge = true;
    }
    d.mask[idx] = edge ? kBoundary : kInterior;
    if (edge) d.normals[idx] = shape.normal(d.position(idx));
    d.active.push_back(static_cast<std::int64_t>(idx));
  }
  return d;
}

}  // namespace tf
