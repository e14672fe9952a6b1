#include <doctest.h>

#include <numbers>
#include <queue>

#include "gen.hpp"
#include "oracles.hpp"
#include "tetraframe/frames.hpp"
#include "tetraframe/solver.hpp"

using namespace tf;

using oracle::make_domain;
using oracle::random_field;
using oracle::gradient_mismatch;

TEST_CASE("disk grid: node count and normals") {
  const auto dom = make_domain("disk 1", 1.0 / 64);
  const double expect = std::numbers::pi * 64 * 64;
  CHECK(std::abs(dom->active.size() - expect) / expect < 0.02);
  for (auto node : dom->active) {
    if (dom->mask[node] != kBoundary) continue;
    const Vec3 x = dom->position(node);
    const Vec3 nu = dom->normals[node];
    CHECK(std::abs(nu.norm() - 1.0) < 1e-10);
    CHECK(std::acos(std::min(1.0, nu.dot(x.normalized()))) < 0.05);
    CHECK(std::abs(dom->sdf[node]) <= dom->h);
  }
}

TEST_CASE("ball grid: boundary shell is connected") {
  const auto dom = make_domain("ball 1", 1.0 / 32);
  std::vector<char> seen(dom->size(), 0);
  std::int64_t start = -1;
  std::size_t total = 0;
  for (auto node : dom->active)
    if (dom->mask[node] == kBoundary) {
      ++total;
      if (start < 0) start = node;
    }
  std::queue<std::int64_t> q;
  q.push(start);
  seen[start] = 1;
  std::size_t reached = 0;
  while (!q.empty()) {
    const auto node = q.front();
    q.pop();
    ++reached;
    const auto c = dom->coords(node);
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int i = c[0] + dx, j = c[1] + dy, k = c[2] + dz;
          if (i < 0 || j < 0 || k < 0 || i >= dom->n[0] || j >= dom->n[1] || k >= dom->n[2]) continue;
          const auto nb = dom->index(i, j, k);
          if (dom->mask[nb] == kBoundary && !seen[nb]) {
            seen[nb] = 1;
            q.push(nb);
          }
        }
  }
  CHECK(reached == total);
}

TEST_CASE("shape parsing rejects degenerate input") {
  CHECK_THROWS(parse_shape("disk -1"));
  CHECK_THROWS(parse_shape("triangle_with_hole 1 0.6 0.5 0"));
  CHECK_THROWS(parse_shape("hexagon 1"));
  CHECK_THROWS(build_domain(parse_shape("disk 1"), 0.0));
  CHECK(parse_shape(parse_shape("triangle_with_hole 1 0.25 0 0").describe()).describe() ==
        parse_shape("triangle_with_hole 1 0.25 0 0").describe());
}

TEST_CASE("boundary system has rank 5") {
  gen::Rng rng(31);
  for (int s = 0; s < 100; ++s) {
    const Vec3 nu = gen::unit3(rng);
    Eigen::JacobiSVD<Eigen::Matrix<double, 6, 7>> svd(boundary_system_matrix(nu));
    const auto sv = svd.singularValues();
    CHECK(sv[4] > 1e-8);
    CHECK(sv[5] < 1e-12);
  }
}

TEST_CASE("boundary data from a normal") {
  const Tensor3 mn = dirichlet_bc_from_normal(Vec3::UnitZ());
  const double expect[7] = {0, 0, -4.0 / 9, 0, 0, 0, -4.0 / 9};
  for (int a = 0; a < 7; ++a) CHECK(std::abs(mn[a] - expect[a]) < 1e-12);
  const Tensor3 t0 = dirichlet_bc_from_normal(Vec3::UnitZ(), 0.0);
  CHECK(t0[0] == doctest::Approx(4 * std::sqrt(2.0) / 9).epsilon(1e-15));
  CHECK(std::abs(t0[1]) < 1e-15);
  gen::Rng rng(32);
  for (int s = 0; s < 100; ++s) {
    const Vec3 nu = gen::unit3(rng);
    const double th = rng.uniform(0, 2 * std::numbers::pi);
    const Tensor3 t = dirichlet_bc_from_normal(nu, th);
    CHECK(potential_W(t) < 1e-12);
    CHECK(boundary_V(t, nu) < 1e-12);
    const Tensor3 m = dirichlet_bc_from_normal(nu);
    CHECK(boundary_V(m, nu) < 1e-24);
  }
  CHECK_THROWS_AS(dirichlet_bc_from_normal(Vec3(1, 1, 0)), std::invalid_argument);
  for (double phi : {0.0, 0.7, 2.5}) {
    const Vec3 nu(std::cos(phi), std::sin(phi), 0.0);
    const Tensor2 t = mb_from_normal(nu);
    CHECK(potential_W(t) < 1e-28);
    CHECK(boundary_V(t, Vec2(nu[0], nu[1])) < 1e-28);
  }
}

TEST_CASE("escape map") {
  CHECK(boundary_V(escape_map_tensor(0, 0), Vec3::UnitZ()) < 1e-28);
  gen::Rng rng(33);
  for (int s = 0; s < 100; ++s) {
    const double th = rng.uniform(0, 2 * std::numbers::pi), r = rng.uniform(0, 1);
    CHECK(potential_W(escape_map_tensor(r * std::cos(th), r * std::sin(th))) < 1e-26);
    const Vec3 nu(std::cos(th), std::sin(th), 0.0);
    CHECK(boundary_V(escape_map_tensor(nu[0], nu[1]), nu) < 1e-26);
  }
}

TEST_CASE("one-singularity ball map contains the normal away from the pole") {
  gen::Rng rng(34);
  for (int s = 0; s < 200; ++s) {
    const Vec3 x = gen::unit3(rng);
    if (x[2] > 0.95) continue;
    const Tensor3 t = ball_one_singularity_tensor(x);
    CHECK(potential_W(t) < 1e-20);
    CHECK(boundary_V(t, x) < 1e-20);
  }
  CHECK(norm_sq(ball_one_singularity_tensor(Vec3::UnitZ())) < 1e-30);
}

TEST_CASE("seeds") {
  const auto dom = make_domain("disk 1", 0.125);
  const auto zero = seed_field(dom, 7, {}, parse_seed("zero"));
  for (double v : zero.values) CHECK(v == 0.0);
  for (const std::string s : {"zero", "escape_map", "normal_aligned 0.3", "frame_constant 0.5",
                              "defects 0.1; 0.3 0 s 1; -0.3 0 s^-1 1"}) {
    const auto spec = parse_seed(s);
    CHECK(describe_seed(parse_seed(describe_seed(spec))) == describe_seed(spec));
  }
  CHECK_THROWS(parse_seed("spiral"));
  CHECK_THROWS(seed_field(dom, 2, {}, parse_seed("escape_map")));
  SeedSpec noisy = parse_seed("zero");
  noisy.noise = 0.01;
  noisy.seed = 5;
  const auto a = seed_field(dom, 7, {}, noisy), b = seed_field(dom, 7, {}, noisy);
  CHECK(a.values == b.values);
}

TEST_CASE("energy of constant fields") {
  const auto dom = make_domain("disk 1", 0.0625);
  FieldParams p;
  p.eps = 0.1;
  TensorField zero(dom, 7, p);
  const double vol = dom->active.size() * dom->h * dom->h;
  CHECK(energy(zero).bulk == doctest::Approx(100 * 1024.0 / 243 * vol).epsilon(1e-12));
  CHECK(energy(zero).dirichlet == 0.0);
  p.bc = BcMode::Free;
  auto c = seed_field(dom, 7, p, parse_seed("frame_constant 0.9 0.1 0.3 0.3"));
  CHECK(energy(c).total() < 1e-24);
}

TEST_CASE("assembled gradient matches finite differences on toy grids") {
  gen::Rng rng(35);
  for (BcMode bc : {BcMode::Strong, BcMode::Weak, BcMode::Free}) {
    FieldParams p;
    p.eps = 0.3;
    p.delta1 = 0.2;
    p.delta2 = 0.25;
    p.bc = bc;
    const auto sq = make_domain("rectangle 0.5 0.5", 0.25);  // 5 x 5 nodes
    CHECK(sq->active.size() == 25);
    CHECK(gradient_mismatch(random_field(sq, 7, p, rng, 0.7)) < 1e-5);
    CHECK(gradient_mismatch(random_field(sq, 2, p, rng, 0.7)) < 1e-5);
    const auto disk = make_domain("disk 1", 0.3);
    CHECK(gradient_mismatch(random_field(disk, 7, p, rng, 0.7)) < 1e-5);
    const auto ball = make_domain("ball 1", 0.4);
    CHECK(gradient_mismatch(random_field(ball, 7, p, rng, 0.7)) < 1e-5);
  }
}

TEST_CASE("monotone descent from 100 random initializations") {
  gen::Rng rng(36);
  const auto disk = make_domain("disk 1", 0.125);
  const auto ball = make_domain("ball 1", 0.25);
  long violations = 0;
  for (int s = 0; s < 100; ++s) {
    FieldParams p;
    p.eps = rng.uniform(0.05, 0.3);
    p.delta1 = p.delta2 = 0.02;
    p.bc = static_cast<BcMode>(s % 3);
    const int ncomp = s % 4 == 0 ? 2 : 7;
    auto dom = (s % 5 == 4 && ncomp == 7) ? ball : disk;
    TensorField f = random_field(dom, ncomp, p, rng, 1.0);
    SolverConfig cfg;
    cfg.max_iters = 150;
    cfg.energy_every = 1;
    cfg.rel_energy_tol = 0;
    const auto rep = relax(f, cfg);
    violations += rep.monotone_violations;
    CHECK(rep.final_energy.total() <= rep.energy_history.front().second);
  }
  CHECK(violations == 0);
}

TEST_CASE("strong boundary values are untouched") {
  const auto dom = make_domain("disk 1", 0.0625);
  FieldParams p;
  p.eps = 0.1;
  SeedSpec spec = parse_seed("zero");
  spec.noise = 0.3;
  spec.seed = 3;
  TensorField f = seed_field(dom, 7, p, spec);
  const auto before = f.values;
  SolverConfig cfg;
  cfg.max_iters = 300;
  relax(f, cfg);
  for (auto node : dom->active)
    if (dom->mask[node] == kBoundary)
      for (int a = 0; a < 7; ++a) CHECK(f.at(node)[a] == before[node * 7 + a]);
}

TEST_CASE("a critical point is a fixed point of the step") {
  const auto dom = make_domain("disk 1", 0.0625);
  FieldParams p;
  p.bc = BcMode::Free;
  auto f = seed_field(dom, 7, p, parse_seed("frame_constant 0.5 0.5 0.5 -0.5"));
  const auto before = f.values;
  step(f, default_dt(f));
  double worst = 0;
  for (std::size_t i = 0; i < before.size(); ++i) worst = std::max(worst, std::abs(f.values[i] - before[i]));
  CHECK(worst < 1e-12);
}

TEST_CASE("relaxation is reproducible for a fixed thread count") {
  const auto dom = make_domain("disk 1", 0.03125);
  FieldParams p;
  p.eps = 0.1;
  SeedSpec spec = parse_seed("zero");
  spec.noise = 0.1;
  spec.seed = 9;
  for (int threads : {1, 3}) {
    TensorField a = seed_field(dom, 7, p, spec), b = a;
    SolverConfig cfg;
    cfg.max_iters = 50;
    cfg.threads = threads;
    relax(a, cfg);
    relax(b, cfg);
    CHECK(a.values == b.values);
  }
}

TEST_CASE("divergence and unstable steps are reported") {
  const auto dom = make_domain("disk 1", 0.125);
  TensorField f(dom, 7, {});
  SolverConfig cfg;
  cfg.dt = 10 * default_dt(f);
  CHECK_THROWS_AS(relax(f, cfg), std::invalid_argument);
  f.values[dom->active[5] * 7] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(step(f, default_dt(f)), SolverError);
}

TEST_CASE("amplitude bound in weak mode") {
  FieldParams p;
  p.delta1 = p.delta2 = 0.02;
  CHECK(amplitude_bound(p) == doctest::Approx(8.0 / 3 + 0.05));
  p.delta2 = 0.04;
  CHECK(amplitude_bound(p) == doctest::Approx(std::max(8.0 / 3, std::cbrt(32.0 / 3)) + 0.05));
}
