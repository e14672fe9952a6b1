#include "tetraframe/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "tetraframe/recovery.hpp"

namespace tf {

double default_w_threshold(int ncomp) {
  if (ncomp == 7) return 0.5 * potential_W(Tensor3{});
  if (ncomp == 2) return 0.5 * potential_W(Tensor2{});
  throw std::invalid_argument("ncomp must be 2 or 7");
}

Winding phase_winding(const std::vector<Vec2>& ab) {
  if (ab.size() < 3) throw AnalysisError("winding loop needs at least three samples");
  Winding w;
  double total = 0.0;
  for (std::size_t k = 0; k < ab.size(); ++k) {
    const Vec2& p = ab[k];
    const Vec2& n = ab[(k + 1) % ab.size()];
    if (p.norm() < 1e-12 || n.norm() < 1e-12) throw AnalysisError("phase undefined on the loop (zero amplitude)");
    const double d = std::atan2(p[0] * n[1] - p[1] * n[0], p.dot(n));
    if (std::abs(d) >= 0.9 * std::numbers::pi) throw AnalysisError("phase step too large along the loop");
    w.max_step = std::max(w.max_step, std::abs(d));
    total += d;
  }
  w.raw_thirds = total / (2.0 * std::numbers::pi);
  w.thirds = static_cast<int>(std::lround(w.raw_thirds));
  if (std::abs(w.raw_thirds - w.thirds) > 0.1) throw AnalysisError("winding does not round to a multiple of 1/3");
  return w;
}

Winding winding_index_2d(const TensorField& f, const std::vector<std::int64_t>& loop) {
  if (f.ncomp != 2) throw std::invalid_argument("winding_index_2d expects an MB field");
  std::vector<Vec2> ab;
  ab.reserve(loop.size());
  for (auto node : loop) {
    if (!f.dom->inside(node)) throw AnalysisError("loop leaves the domain");
    const double* q = f.at(node);
    ab.emplace_back(q[0], q[1]);
  }
  return phase_winding(ab);
}

int SingularSetReport::interior_clusters() const {
  int c = 0;
  for (const auto& cl : clusters) c += !cl.touches_boundary;
  return c;
}

SingularSetReport singular_cells(const TensorField& f, double w_threshold) {
  const GridDomain& dom = *f.dom;
  SingularSetReport rep;
  rep.threshold = w_threshold;
  std::vector<double> w(dom.size(), 0.0);
  std::vector<char> flag(dom.size(), 0);
  for (auto node : dom.active) {
    w[node] = f.W(node);
    if (w[node] > w_threshold) {
      flag[node] = 1;
      rep.singular_cells.push_back(node);
    }
  }
  std::vector<int> label(dom.size(), -1);
  const int zr = dom.dim == 3 ? 1 : 0;
  for (auto seed : rep.singular_cells) {
    if (label[seed] >= 0) continue;
    const int id = static_cast<int>(rep.clusters.size());
    Cluster cl;
    std::vector<std::int64_t> stack{seed};
    label[seed] = id;
    while (!stack.empty()) {
      const auto node = stack.back();
      stack.pop_back();
      cl.nodes.push_back(node);
      const auto c = dom.coords(node);
      for (int dz = -zr; dz <= zr; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int x = c[0] + dx, y = c[1] + dy, z = c[2] + dz;
            if (x < 0 || y < 0 || z < 0 || x >= dom.n[0] || y >= dom.n[1] || z >= dom.n[2]) continue;
            const auto j = dom.index(x, y, z);
            if (flag[j] && label[j] < 0) {
              label[j] = id;
              stack.push_back(j);
            }
          }
    }
    std::sort(cl.nodes.begin(), cl.nodes.end());
    for (auto node : cl.nodes) {
      cl.centroid += dom.position(node);
      cl.max_W = std::max(cl.max_W, w[node]);
      if (dom.mask[node] == kBoundary) cl.touches_boundary = true;
    }
    cl.centroid /= static_cast<double>(cl.nodes.size());
    rep.clusters.push_back(std::move(cl));
  }
  return rep;
}

namespace {

std::vector<std::int64_t> rectangle_cycle(const GridDomain& dom, int i0, int j0, int i1, int j1) {
  std::vector<std::int64_t> loop;
  if (i0 < 0 || j0 < 0 || i1 >= dom.n[0] || j1 >= dom.n[1]) return loop;
  for (int i = i0; i <= i1; ++i) loop.push_back(dom.index(i, j0));
  for (int j = j0 + 1; j <= j1; ++j) loop.push_back(dom.index(i1, j));
  for (int i = i1 - 1; i >= i0; --i) loop.push_back(dom.index(i, j1));
  for (int j = j1 - 1; j > j0; --j) loop.push_back(dom.index(i0, j));
  return loop;
}

LoopClass classify_tensor_loop(const std::vector<Tensor3>& samples) {
  return classify_loop(samples, 0.5);
}

}  // namespace

void classify_clusters(const TensorField& f, SingularSetReport& rep, int min_margin, int max_margin) {
  const GridDomain& dom = *f.dom;
  if (dom.dim != 2) throw std::invalid_argument("cluster loops are built on 2D grids");
  std::vector<int> owner(dom.size(), -1);
  for (std::size_t c = 0; c < rep.clusters.size(); ++c)
    for (auto node : rep.clusters[c].nodes) owner[node] = static_cast<int>(c);
  for (std::size_t c = 0; c < rep.clusters.size(); ++c) {
    Cluster& cl = rep.clusters[c];
    if (cl.touches_boundary) {
      cl.loop_error = "cluster touches the boundary";
      continue;
    }
    int imin = dom.n[0], imax = -1, jmin = dom.n[1], jmax = -1;
    for (auto node : cl.nodes) {
      const auto xy = dom.coords(node);
      imin = std::min(imin, xy[0]);
      imax = std::max(imax, xy[0]);
      jmin = std::min(jmin, xy[1]);
      jmax = std::max(jmax, xy[1]);
    }
    cl.loop_error = "no valid loop";
    for (int m = min_margin; m <= max_margin; ++m) {
      const int i0 = imin - m, i1 = imax + m, j0 = jmin - m, j1 = jmax + m;
      bool encloses_other = false;
      for (std::size_t o = 0; o < rep.clusters.size() && !encloses_other; ++o) {
        if (o == c) continue;
        for (auto node : rep.clusters[o].nodes) {
          const auto xy = dom.coords(node);
          if (xy[0] >= i0 && xy[0] <= i1 && xy[1] >= j0 && xy[1] <= j1) {
            encloses_other = true;
            break;
          }
        }
      }
      if (encloses_other) {
        cl.loop_error = "loop would enclose another cluster";
        break;
      }
      auto loop = rectangle_cycle(dom, i0, j0, i1, j1);
      if (loop.empty()) {
        cl.loop_error = "loop leaves the grid";
        break;
      }
      bool ok = true;
      for (auto node : loop)
        if (!dom.inside(node) || owner[node] >= 0) ok = false;
      if (!ok) {
        cl.loop_error = "loop leaves the domain";
        break;
      }
      try {
        if (f.ncomp == 2) {
          cl.winding = winding_index_2d(f, loop);
        } else {
          std::vector<Tensor3> samples;
          for (auto node : loop) samples.push_back(f.t3(node));
          cl.loop_class = classify_tensor_loop(samples);
        }
        cl.loop = std::move(loop);
        cl.loop_error.clear();
        break;
      } catch (const std::exception& e) {
        cl.loop_error = e.what();
      }
    }
  }
}

namespace {

template <class T>
std::optional<T> interpolate_impl(const TensorField& f, const Vec3& x) {
  const GridDomain& dom = *f.dom;
  int base[3] = {0, 0, 0};
  double frac[3] = {0.0, 0.0, 0.0};
  for (int c = 0; c < dom.dim; ++c) {
    const double s = (x[c] - dom.origin[c]) / dom.h;
    base[c] = static_cast<int>(std::floor(s));
    frac[c] = s - base[c];
    if (base[c] < 0 || base[c] + 1 >= dom.n[c]) return std::nullopt;
  }
  T out;
  double wsum = 0.0;
  const int corners = 1 << dom.dim;
  for (int k = 0; k < corners; ++k) {
    int idx[3] = {base[0], base[1], base[2]};
    double wt = 1.0;
    for (int c = 0; c < dom.dim; ++c) {
      const int bit = (k >> c) & 1;
      idx[c] += bit;
      wt *= bit ? frac[c] : 1.0 - frac[c];
    }
    const auto node = dom.index(idx[0], idx[1], idx[2]);
    if (!dom.inside(node) || wt == 0.0) continue;
    const double* q = f.at(node);
    for (std::size_t a = 0; a < out.q.size(); ++a) out.q[a] += wt * q[a];
    wsum += wt;
  }
  if (wsum < 1e-3) return std::nullopt;
  for (auto& v : out.q) v /= wsum;
  return out;
}

}  // namespace

std::optional<Tensor3> interpolate3(const TensorField& f, const Vec3& x) {
  if (f.ncomp != 7) throw std::invalid_argument("field does not hold 3D tensors");
  return interpolate_impl<Tensor3>(f, x);
}

std::optional<Tensor2> interpolate2(const TensorField& f, const Vec3& x) {
  if (f.ncomp != 2) throw std::invalid_argument("field does not hold MB tensors");
  return interpolate_impl<Tensor2>(f, x);
}

namespace {

void append_segment(std::vector<Vec3>& loop, const Vec3& a, const Vec3& b, double ds) {
  const int n = std::max(1, static_cast<int>(std::ceil((b - a).norm() / ds)));
  for (int k = 0; k < n; ++k) loop.push_back(a + (b - a) * (static_cast<double>(k) / n));
}

std::vector<Vec3> circle(const Vec3& c, double r, double ds) {
  const int n = std::max(16, static_cast<int>(std::ceil(2.0 * std::numbers::pi * r / ds)));
  std::vector<Vec3> out;
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * k / n;
    out.push_back(c + r * Vec3(std::cos(t), std::sin(t), 0.0));
  }
  return out;
}

std::vector<Vec3> polygon(const std::vector<Vec3>& v, double ds) {
  std::vector<Vec3> out;
  for (std::size_t k = 0; k < v.size(); ++k) append_segment(out, v[k], v[(k + 1) % v.size()], ds);
  return out;
}

}  // namespace

std::vector<std::vector<Vec3>> boundary_offset_loops(const ShapeSpec& shape, double offset, double ds) {
  if (!(ds > 0.0) || offset < 0.0) throw std::invalid_argument("invalid loop spacing or offset");
  std::vector<std::vector<Vec3>> loops;
  switch (shape.kind) {
    case ShapeKind::Disk:
      if (offset >= shape.radius) throw std::invalid_argument("offset exceeds the disk radius");
      loops.push_back(circle(Vec3::Zero(), shape.radius - offset, ds));
      break;
    case ShapeKind::TriangleWithHole: {
      const double d = 0.5 * shape.radius - offset;
      if (d <= 0.0) throw std::invalid_argument("offset exceeds the inradius");
      std::vector<Vec3> v;
      for (double deg : {-30.0, 90.0, 210.0}) {
        const double t = deg * std::numbers::pi / 180.0;
        v.emplace_back(2.0 * d * std::cos(t), 2.0 * d * std::sin(t), 0.0);
      }
      loops.push_back(polygon(v, ds));
      if (shape.hole_radius > 0.0) loops.push_back(circle(shape.hole_center, shape.hole_radius + offset, ds));
      break;
    }
    case ShapeKind::Rectangle: {
      const double a = shape.half_extent[0] - offset, b = shape.half_extent[1] - offset;
      if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("offset exceeds the rectangle");
      loops.push_back(polygon({Vec3(-a, -b, 0), Vec3(a, -b, 0), Vec3(a, b, 0), Vec3(-a, b, 0)}, ds));
      break;
    }
    default: throw std::invalid_argument("offset loops are defined for 2D shapes");
  }
  return loops;
}

BoundaryWindingReport boundary_windings(const TensorField& f, double offset) {
  BoundaryWindingReport rep;
  const auto loops = boundary_offset_loops(f.dom->shape, offset, 0.5 * f.dom->h);
  for (std::size_t l = 0; l < loops.size(); ++l) {
    try {
      if (f.ncomp == 2) {
        std::vector<Vec2> ab;
        for (const auto& x : loops[l]) {
          auto t = interpolate2(f, x);
          if (!t) throw AnalysisError("loop leaves the domain");
          ab.emplace_back(t->q[0], t->q[1]);
        }
        rep.loops.push_back(phase_winding(ab));
      } else {
        std::vector<Tensor3> samples;
        for (const auto& x : loops[l]) {
          auto t = interpolate3(f, x);
          if (!t) throw AnalysisError("loop leaves the domain");
          samples.push_back(*t);
        }
        rep.classes.push_back(classify_tensor_loop(samples));
      }
    } catch (const std::exception& e) {
      rep.errors.push_back("loop " + std::to_string(l) + ": " + e.what());
    }
  }
  return rep;
}

bool classes_compose_to(const std::vector<ConjClass>& parts, ConjClass target) {
  const auto& group = binary_tetrahedral_group();
  auto key = [](const BinaryTet& g) { return g.h; };
  std::set<std::array<int, 4>> reach{key(bt::one())};
  std::vector<BinaryTet> reach_el{bt::one()};
  for (auto cls : parts) {
    std::set<std::array<int, 4>> next;
    std::vector<BinaryTet> next_el;
    for (const auto& a : reach_el)
      for (const auto& g : group) {
        if (conj_class(g) != cls) continue;
        const BinaryTet p = a * g;
        if (next.insert(key(p)).second) next_el.push_back(p);
      }
    reach = std::move(next);
    reach_el = std::move(next_el);
  }
  for (const auto& g : reach_el)
    if (conj_class(g) == target) return true;
  return false;
}

Vec2 tangential_pair(const Tensor3& q, const Vec3& nu, const Vec3& t1) {
  const Vec3 t2 = nu.cross(t1);
  Mat3 r;
  r.row(0) = t1.transpose();
  r.row(1) = t2.transpose();
  r.row(2) = nu.transpose();
  const Tensor3 rq = rotate(q, r);
  return {rq.q[0], rq.q[1]};
}

namespace {

using Sampler = std::function<std::optional<Tensor3>(const Vec3&)>;

std::vector<Vec3> fibonacci_sphere(int n) {
  std::vector<Vec3> pts;
  pts.reserve(n);
  const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < n; ++k) {
    const double z = 1.0 - (2.0 * k + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    pts.emplace_back(r * std::cos(ga * k), r * std::sin(ga * k), z);
  }
  return pts;
}

double angle_between(const Vec3& a, const Vec3& b) { return 2.0 * std::asin(std::min(1.0, 0.5 * (a - b).norm())); }

Vec3 any_perpendicular(const Vec3& c) {
  const Vec3 a = std::abs(c[0]) < 0.6 ? Vec3::UnitX() : (std::abs(c[1]) < 0.6 ? Vec3::UnitY() : Vec3::UnitZ());
  return (a - a.dot(c) * c).normalized();
}

// Groups unit vectors by angular adjacency; returns member lists.
std::vector<std::vector<int>> angular_clusters(const std::vector<Vec3>& dirs, double link) {
  const int n = static_cast<int>(dirs.size());
  std::vector<int> label(n, -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < n; ++s) {
    if (label[s] >= 0) continue;
    std::vector<int> members, stack{s};
    label[s] = static_cast<int>(out.size());
    while (!stack.empty()) {
      const int k = stack.back();
      stack.pop_back();
      members.push_back(k);
      for (int j = 0; j < n; ++j)
        if (label[j] < 0 && angle_between(dirs[k], dirs[j]) < link) {
          label[j] = label[s];
          stack.push_back(j);
        }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

struct Cap {
  std::vector<Vec3> members;
  Vec3 centre = Vec3::Zero();
  double radius = 0.0;
  bool valid = true;
};

void fit_cap(Cap& c) {
  Vec3 m = Vec3::Zero();
  for (const auto& d : c.members) m += d;
  if (m.norm() < 1e-6 * c.members.size()) {
    c.valid = false;
    c.centre = Vec3::UnitZ();
    return;
  }
  c.centre = m.normalized();
  c.radius = 0.0;
  for (const auto& d : c.members) c.radius = std::max(c.radius, angle_between(d, c.centre));
}

std::vector<Vec3> cap_loop(const Vec3& c, double rho, int n, Vec3& u) {
  u = any_perpendicular(c);
  const Vec3 v = c.cross(u);
  std::vector<Vec3> pts;
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * k / n;
    pts.push_back((std::cos(rho) * c + std::sin(rho) * (std::cos(t) * u + std::sin(t) * v)).normalized());
  }
  return pts;
}

// Flags and groups surface samples, then merges groups whose loop caps overlap.
std::vector<Cap> flagged_caps(const std::vector<Vec3>& dirs, const std::vector<char>& flagged, double link,
                              double margin) {
  std::vector<Vec3> fl;
  for (std::size_t k = 0; k < dirs.size(); ++k)
    if (flagged[k]) fl.push_back(dirs[k]);
  std::vector<Cap> caps;
  for (const auto& members : angular_clusters(fl, link)) {
    Cap c;
    for (int k : members) c.members.push_back(fl[k]);
    fit_cap(c);
    caps.push_back(std::move(c));
  }
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t a = 0; a < caps.size() && !merged; ++a)
      for (std::size_t b = a + 1; b < caps.size() && !merged; ++b) {
        if (angle_between(caps[a].centre, caps[b].centre) < caps[a].radius + caps[b].radius + 2.0 * margin) {
          caps[a].members.insert(caps[a].members.end(), caps[b].members.begin(), caps[b].members.end());
          fit_cap(caps[a]);
          caps.erase(caps.begin() + static_cast<long>(b));
          merged = true;
        }
      }
  }
  return caps;
}

SurfaceReport surface_core(const Sampler& sample, double radius, double w_threshold, const SurfaceOptions& opt) {
  SurfaceReport rep;
  rep.sample_radius = radius;
  rep.genus = 0;
  const auto dirs = fibonacci_sphere(opt.samples);
  rep.total_samples = opt.samples;
  const double amp0 = 4.0 * std::sqrt(2.0) / 9.0;
  std::vector<char> flagged(dirs.size(), 0);
  std::vector<std::optional<Tensor3>> qs(dirs.size());
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    qs[k] = sample(dirs[k]);
    if (!qs[k]) {
      flagged[k] = 1;
      continue;
    }
    const Vec2 p = tangential_pair(*qs[k], dirs[k], any_perpendicular(dirs[k]));
    flagged[k] = p.norm() < opt.amplitude_fraction * amp0 || potential_W(*qs[k]) > w_threshold;
  }
  const double spacing = std::sqrt(4.0 * std::numbers::pi / opt.samples);
  // Phase jumps between neighbours catch point defects where the amplitude never drops.
  // Fibonacci points are ordered by z, so neighbours sit in a short index window.
  const double link = 1.6 * spacing;
  const int window = static_cast<int>(std::ceil(link * opt.samples / 2.0)) + 2;
  std::vector<char> jump(dirs.size(), 0);
  for (int k = 0; k < static_cast<int>(dirs.size()); ++k) {
    if (flagged[k]) continue;
    const Vec3 u = any_perpendicular(dirs[k]);
    const Vec2 pk = tangential_pair(*qs[k], dirs[k], u);
    const double ak = std::atan2(pk[1], pk[0]);
    const int lo = std::max(0, k - window), hi = std::min(static_cast<int>(dirs.size()) - 1, k + window);
    for (int j = lo; j <= hi && !jump[k]; ++j) {
      if (j == k || flagged[j] || angle_between(dirs[k], dirs[j]) > link) continue;
      const Vec3 t1 = (u - u.dot(dirs[j]) * dirs[j]).normalized();
      const Vec2 pj = tangential_pair(*qs[j], dirs[j], t1);
      double d = std::atan2(pj[1], pj[0]) - ak;
      d = std::remainder(d, 2.0 * std::numbers::pi);
      if (std::abs(d) > opt.max_phase_step) jump[k] = 1;
    }
  }
  for (std::size_t k = 0; k < dirs.size(); ++k) flagged[k] |= jump[k];
  rep.flagged_samples = static_cast<int>(std::count(flagged.begin(), flagged.end(), 1));
  auto caps = flagged_caps(dirs, flagged, 2.5 * spacing, opt.margin);
  for (const auto& cap : caps) {
    SurfaceSingularity s;
    s.direction = cap.centre;
    s.samples = static_cast<int>(cap.members.size());
    s.cap_radius = cap.radius + opt.margin;
    if (!cap.valid || s.cap_radius > 0.5 * std::numbers::pi - 0.05) {
      rep.errors.push_back("flagged region too large for a local trivialization");
      rep.singularities.push_back(s);
      continue;
    }
    Vec3 u;
    const auto pts = cap_loop(cap.centre, s.cap_radius, opt.loop_points, u);
    try {
      std::vector<Vec2> ab;
      for (const auto& p : pts) {
        auto q = sample(p);
        if (!q) throw AnalysisError("surface loop sample outside the domain");
        const Vec3 t1 = (u - u.dot(p) * p).normalized();
        ab.push_back(tangential_pair(*q, p, t1));
      }
      s.winding = phase_winding(ab);
      rep.index_sum_thirds += s.winding.thirds;
    } catch (const std::exception& e) {
      rep.errors.push_back(e.what());
    }
    rep.singularities.push_back(s);
  }
  return rep;
}

}  // namespace

SurfaceReport surface_mb_reduction(const TensorField& f, const SurfaceOptions& opt) {
  if (f.ncomp != 7 || f.dom->shape.kind != ShapeKind::Ball)
    throw std::invalid_argument("surface reduction needs a 7-component field on a ball");
  const double r = f.dom->shape.radius - opt.depth * f.dom->h;
  const Vec3 centre = Vec3::Zero();
  return surface_core([&](const Vec3& d) { return interpolate3(f, centre + r * d); }, r, default_w_threshold(7),
                      opt);
}

SurfaceReport surface_mb_reduction(const std::function<Tensor3(const Vec3&)>& map, double radius,
                                   const SurfaceOptions& opt) {
  return surface_core([&](const Vec3& d) { return std::optional<Tensor3>(map(radius * d)); }, radius,
                      default_w_threshold(7), opt);
}

JunctionReport junction_probe(const TensorField& f, const Vec3& center, double radius, int samples) {
  if (f.ncomp != 7 || f.dom->dim != 3) throw std::invalid_argument("junction probe needs a 3D tensor field");
  JunctionReport rep;
  rep.center = center;
  rep.radius = radius;
  const double thr = default_w_threshold(7);
  const auto dirs = fibonacci_sphere(samples);
  std::vector<char> flagged(dirs.size(), 0);
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    auto q = interpolate3(f, center + radius * dirs[k]);
    flagged[k] = q && potential_W(*q) > thr;
  }
  const double spacing = std::sqrt(4.0 * std::numbers::pi / samples);
  const double margin = std::max(2.0 * spacing, 1.5 * f.dom->h / radius);
  auto caps = flagged_caps(dirs, flagged, 2.5 * spacing, margin);
  std::vector<ConjClass> classes;
  bool all = true;
  for (const auto& cap : caps) {
    JunctionArm arm;
    arm.direction = cap.centre;
    arm.samples = static_cast<int>(cap.members.size());
    const double rho = cap.radius + margin;
    try {
      if (!cap.valid || rho > 0.5 * std::numbers::pi) throw AnalysisError("arm patch too large");
      Vec3 u;
      const auto pts = cap_loop(cap.centre, rho, 720, u);
      std::vector<Tensor3> loop;
      for (const auto& p : pts) {
        auto q = interpolate3(f, center + radius * p);
        if (!q) throw AnalysisError("probe loop leaves the domain");
        loop.push_back(*q);
      }
      arm.loop_class = classify_tensor_loop(loop);
      classes.push_back(arm.loop_class->cls);
    } catch (const std::exception& e) {
      arm.error = e.what();
      all = false;
    }
    rep.arms.push_back(arm);
  }
  if (all && !classes.empty()) rep.product_consistent = classes_compose_to(classes, ConjClass::Identity);
  return rep;
}

}  // namespace tf
