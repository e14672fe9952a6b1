#include <doctest.h>

#include <numbers>

#include "gen.hpp"
#include "tetraframe/analysis.hpp"
#include "tetraframe/frames.hpp"

using namespace tf;

namespace {

std::shared_ptr<const GridDomain> make_domain(const std::string& shape, double h) {
  return std::make_shared<const GridDomain>(build_domain(parse_shape(shape), h));
}

// MB field with phase k*arg(x - c) for each centre; nodes within h of a centre are zeroed.
TensorField mb_vortices(std::shared_ptr<const GridDomain> dom, const std::vector<std::pair<Vec3, int>>& vortices) {
  TensorField f(dom, 2, {});
  for (auto node : dom->active) {
    const Vec3 x = dom->position(node);
    double phase = 0;
    bool core = false;
    for (const auto& [c, k] : vortices) {
      const Vec3 d = x - c;
      if (d.norm() < 0.75 * dom->h) core = true;
      phase += k * std::atan2(d[1], d[0]);
    }
    if (!core) f.set(node, Tensor2{{0.75 * std::cos(phase), 0.75 * std::sin(phase)}});
  }
  return f;
}

std::vector<Vec2> circle_pairs(int k, int n, int shift = 0) {
  std::vector<Vec2> out;
  for (int s = 0; s < n; ++s) {
    const double a = 2 * std::numbers::pi * ((s + shift) % n) / n;
    out.emplace_back(std::cos(k * a), std::sin(k * a));
  }
  return out;
}

}  // namespace

TEST_CASE("default thresholds are half the zero potential") {
  CHECK(default_w_threshold(7) == doctest::Approx(512.0 / 243).epsilon(1e-15));
  CHECK(default_w_threshold(2) == doctest::Approx(81.0 / 64).epsilon(1e-15));
}

TEST_CASE("phase winding properties") {
  for (int k = -4; k <= 4; ++k) {
    const auto w = phase_winding(circle_pairs(k, 60));
    CHECK(w.thirds == k);
    CHECK(phase_winding(circle_pairs(k, 120)).thirds == k);
    CHECK(phase_winding(circle_pairs(k, 60, 17)).thirds == k);
    auto rev = circle_pairs(k, 60);
    std::reverse(rev.begin(), rev.end());
    CHECK(phase_winding(rev).thirds == -k);
  }
  CHECK_THROWS_AS(phase_winding(circle_pairs(1, 2)), AnalysisError);
  CHECK_THROWS_AS(phase_winding({Vec2(1, 0), Vec2(-1, 1e-3), Vec2(1, 0)}), AnalysisError);
}

TEST_CASE("singular cells of trivial and degenerate fields") {
  const auto dom = make_domain("disk 1", 0.0625);
  const auto c = seed_field(dom, 7, {}, parse_seed("frame_constant 0.3"));
  CHECK(singular_cells(c, default_w_threshold(7)).singular_cells.empty());
  const TensorField zero(dom, 7, {});
  const auto all = singular_cells(zero, 0.0);
  CHECK(all.singular_cells.size() == dom->active.size());
  CHECK(all.clusters.size() == 1);
}

TEST_CASE("MB vortex windings on grid loops") {
  const auto dom = make_domain("disk 1", 1.0 / 32);
  for (int k : {1, -1, 2}) {
    const auto f = mb_vortices(dom, {{Vec3(0.1, -0.05, 0), k}});
    auto rep = singular_cells(f, default_w_threshold(2));
    REQUIRE(rep.clusters.size() == 1);
    classify_clusters(f, rep);
    REQUIRE(rep.clusters[0].winding);
    CHECK(rep.clusters[0].winding->thirds == k);
    CHECK(rep.clusters[0].winding->index() == doctest::Approx(k / 3.0));
    const auto bw = boundary_windings(f, 2.5 * dom->h);
    REQUIRE(bw.loops.size() == 1);
    CHECK(bw.loops[0].thirds == k);
  }
  const auto two = mb_vortices(dom, {{Vec3(0.4, 0, 0), 1}, {Vec3(-0.4, 0.1, 0), -1}});
  auto rep = singular_cells(two, default_w_threshold(2));
  REQUIRE(rep.clusters.size() == 2);
  classify_clusters(two, rep);
  int sum = 0;
  for (const auto& c : rep.clusters) sum += c.winding->thirds;
  CHECK(sum == 0);
  CHECK(boundary_windings(two, 2.5 * dom->h).loops[0].thirds == 0);
}

TEST_CASE("winding of an explicit node cycle") {
  const auto dom = make_domain("disk 1", 1.0 / 32);
  const auto f = mb_vortices(dom, {{Vec3(0, 0, 0), 1}});
  // square cycle of half-width 5 cells around the origin, counterclockwise
  const auto c = dom->coords(dom->active.front());
  (void)c;
  int ci = -1, cj = -1;
  for (auto node : dom->active)
    if (dom->position(node).norm() < 1e-12) {
      const auto cc = dom->coords(node);
      ci = cc[0], cj = cc[1];
    }
  REQUIRE(ci >= 0);
  std::vector<std::int64_t> loop;
  const int r = 5;
  for (int i = -r; i < r; ++i) loop.push_back(dom->index(ci + i, cj - r));
  for (int j = -r; j < r; ++j) loop.push_back(dom->index(ci + r, cj + j));
  for (int i = r; i > -r; --i) loop.push_back(dom->index(ci + i, cj + r));
  for (int j = r; j > -r; --j) loop.push_back(dom->index(ci - r, cj + j));
  CHECK(winding_index_2d(f, loop).thirds == 1);
  std::rotate(loop.begin(), loop.begin() + 7, loop.end());
  CHECK(winding_index_2d(f, loop).thirds == 1);
  std::reverse(loop.begin(), loop.end());
  CHECK(winding_index_2d(f, loop).thirds == -1);
  // away from the vortex
  std::vector<std::int64_t> off;
  for (auto& n : loop) off.push_back(n + 12);
  CHECK(winding_index_2d(f, off).thirds == 0);
}

TEST_CASE("7-component defect classes from quaternion seeds") {
  const auto dom = make_domain("disk 1", 1.0 / 32);
  FieldParams p;
  {
    const auto f = seed_field(dom, 7, p, parse_seed("defects 0.15; 0 0 s 1"));
    auto rep = singular_cells(f, default_w_threshold(7));
    REQUIRE(rep.interior_clusters() == 1);
    classify_clusters(f, rep);
    REQUIRE(rep.clusters[0].loop_class);
    CHECK(rep.clusters[0].loop_class->cls == ConjClass::S);
    const auto bw = boundary_windings(f, 2.5 * dom->h);
    REQUIRE(bw.classes.size() == 1);
    CHECK(bw.classes[0].cls == ConjClass::S);
  }
  {
    const auto f = seed_field(dom, 7, p, parse_seed("defects 0.1; 0.4 0 s 1; -0.4 0 s^-1 1"));
    auto rep = singular_cells(f, default_w_threshold(7));
    REQUIRE(rep.interior_clusters() == 2);
    classify_clusters(f, rep);
    std::vector<ConjClass> cls;
    for (const auto& c : rep.clusters) cls.push_back(c.loop_class->cls);
    CHECK(std::count(cls.begin(), cls.end(), ConjClass::S) == 1);
    CHECK(std::count(cls.begin(), cls.end(), ConjClass::SInv) == 1);
    const auto bw = boundary_windings(f, 2.5 * dom->h);
    CHECK(bw.classes[0].cls == ConjClass::Identity);
    CHECK(classes_compose_to(cls, bw.classes[0].cls));
  }
}

TEST_CASE("class composition") {
  using C = ConjClass;
  CHECK(classes_compose_to({C::S, C::SInv}, C::Identity));
  CHECK(!classes_compose_to({C::S}, C::Identity));
  CHECK(classes_compose_to({C::IJK, C::IJK}, C::MinusOne));
  CHECK(classes_compose_to({C::IJK, C::IJK}, C::Identity));
  CHECK(classes_compose_to({C::S, C::S, C::S}, C::MinusOne));
  CHECK(classes_compose_to({C::S, C::S}, C::S2));
  CHECK(!classes_compose_to({C::S, C::S}, C::S));
  CHECK(classes_compose_to({}, C::Identity));
}

TEST_CASE("offset loops") {
  const auto disk = boundary_offset_loops(parse_shape("disk 1"), 0.1, 0.01);
  REQUIRE(disk.size() == 1);
  for (const auto& x : disk[0]) CHECK(x.norm() == doctest::Approx(0.9).epsilon(1e-12));
  const auto tri = boundary_offset_loops(parse_shape("triangle_with_hole 1 0.25 0 0"), 0.05, 0.01);
  REQUIRE(tri.size() == 2);
  const ShapeSpec s = parse_shape("triangle_with_hole 1 0.25 0 0");
  for (const auto& loop : tri)
    for (const auto& x : loop) CHECK(s.sdf(x) < 0.0);
}

TEST_CASE("interpolation reproduces affine fields") {
  const auto dom = make_domain("disk 1", 0.0625);
  TensorField f(dom, 7, {});
  for (auto node : dom->active) {
    const Vec3 x = dom->position(node);
    for (int a = 0; a < 7; ++a) f.at(node)[a] = 0.3 * a + x[0] - 2 * x[1];
  }
  gen::Rng rng(41);
  for (int s = 0; s < 50; ++s) {
    const Vec3 x(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6), 0);
    const auto q = interpolate3(f, x);
    REQUIRE(q);
    for (int a = 0; a < 7; ++a) CHECK((*q)[a] == doctest::Approx(0.3 * a + x[0] - 2 * x[1]).epsilon(1e-12));
  }
  CHECK(!interpolate3(f, Vec3(3, 0, 0)));
}

TEST_CASE("surface reduction of the one-singularity ball map") {
  const auto rep = surface_mb_reduction([](const Vec3& x) { return ball_one_singularity_tensor(x); }, 1.0);
  CHECK(rep.genus == 0);
  CHECK(rep.expected_thirds() == 6);
  CHECK(rep.errors.empty());
  REQUIRE(!rep.singularities.empty());
  CHECK(rep.index_sum_thirds == 6);
  for (const auto& s : rep.singularities) CHECK(s.direction[2] > 0.9);
}

TEST_CASE("tangential pair of boundary-aligned tensors") {
  gen::Rng rng(42);
  for (int s = 0; s < 50; ++s) {
    const Vec3 nu = gen::unit3(rng);
    const double th = rng.uniform(0, 2 * std::numbers::pi);
    const Tensor3 t = dirichlet_bc_from_normal(nu, th);
    const Mat3 b = normal_adapted_basis(nu);
    const Vec2 ab = tangential_pair(t, nu, b.row(0).transpose());
    CHECK(ab.norm() == doctest::Approx(4 * std::sqrt(2.0) / 9).epsilon(1e-12));
    CHECK(std::cos(std::atan2(ab[1], ab[0]) + 3 * th) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("junction probe on a smooth field finds no arms") {
  const auto dom = make_domain("ball 1", 0.125);
  const auto f = seed_field(dom, 7, {}, parse_seed("frame_constant 0.2"));
  const auto jr = junction_probe(f, Vec3::Zero(), 0.5);
  CHECK(jr.arms.empty());
}
