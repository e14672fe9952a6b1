#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gen.hpp"
#include "tetraframe/analysis.hpp"
#include "tetraframe/config.hpp"
#include "tetraframe/io.hpp"
#include "tetraframe/quaternion.hpp"

using namespace tf;

namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "tetraframe_tests";
  fs::create_directories(dir);
  return dir / name;
}

// Two-by-two square with every node active, built by hand.
std::shared_ptr<const GridDomain> toy_2x2() {
  GridDomain d;
  d.dim = 2;
  d.h = 0.5;
  d.n = {2, 2, 1};
  d.origin = Vec3(-0.25, -0.25, 0);
  d.shape = parse_shape("rectangle 0.25 0.25");
  d.sdf.assign(4, -0.01);
  d.mask.assign(4, kBoundary);
  d.normals = {Vec3(-1, 0, 0), Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(1, 0, 0)};
  d.active = {0, 1, 2, 3};
  d.nbr = {-1, 1, -1, 2, 0, -1, -1, 3, -1, 3, 0, -1, 2, -1, 1, -1};
  return std::make_shared<const GridDomain>(std::move(d));
}

TensorField toy_field() {
  TensorField f(toy_2x2(), 7, {});
  f.set(0, tetra_tensor(Quat{}));
  f.set(1, tetra_tensor(bt::s().quat()));
  f.set(2, tetra_tensor(Quat{std::cos(0.25), 0, 0, std::sin(0.25)}));
  // node 3 stays zero: singular
  return f;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("VTK output of the 2x2 toy grid matches the golden file") {
  std::ostringstream os;
  write_vtk(os, toy_field(), default_w_threshold(7));
  const std::string golden = slurp(fs::path(TF_FIXTURE_DIR) / "golden_2x2.vtk");
  REQUIRE(!golden.empty());
  CHECK(os.str() == golden);
}

TEST_CASE("VTK output follows the legacy structured-points grammar") {
  std::ostringstream os;
  write_vtk(os, toy_field(), default_w_threshold(7));
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "# vtk DataFile Version 3.0");
  std::getline(in, line);
  CHECK(!line.empty());
  CHECK(line.size() < 256);
  std::getline(in, line);
  CHECK(line == "ASCII");
  std::string kw;
  in >> kw >> line;
  CHECK(kw == "DATASET");
  CHECK(line == "STRUCTURED_POINTS");
  int nx, ny, nz;
  in >> kw >> nx >> ny >> nz;
  CHECK(kw == "DIMENSIONS");
  double x, y, z;
  in >> kw >> x >> y >> z;
  CHECK(kw == "ORIGIN");
  in >> kw >> x >> y >> z;
  CHECK(kw == "SPACING");
  CHECK(x > 0);
  int npts;
  in >> kw >> npts;
  CHECK(kw == "POINT_DATA");
  CHECK(npts == nx * ny * nz);
  std::string name, type;
  int ncomp;
  in >> kw >> name >> type >> ncomp;
  CHECK(kw == "SCALARS");
  CHECK(name == "W");
  in >> kw >> name;
  CHECK(kw == "LOOKUP_TABLE");
  for (int i = 0; i < npts; ++i) CHECK(static_cast<bool>(in >> x));
  int vec_arrays = 0;
  while (in >> kw) {
    CHECK(kw == "VECTORS");
    in >> name >> type;
    for (int i = 0; i < 3 * npts; ++i) CHECK(static_cast<bool>(in >> x));
    ++vec_arrays;
  }
  CHECK(vec_arrays == 4);
}

TEST_CASE("CSV round trip is bitwise") {
  const auto dom = std::make_shared<const GridDomain>(build_domain(parse_shape("disk 1"), 0.125));
  gen::Rng rng(61);
  for (int ncomp : {7, 2}) {
    TensorField f(dom, ncomp, {});
    for (auto& v : f.values) v = 0;
    for (auto node : dom->active)
      for (int a = 0; a < ncomp; ++a) f.at(node)[a] = rng.normal() * std::pow(10.0, rng.uniform(-8, 3));
    const auto path = scratch("round.csv");
    write_csv(path.string(), f, 1.0);
    TensorField g(dom, ncomp, {});
    read_csv(path.string(), g);
    CHECK(g.values == f.values);
  }
}

TEST_CASE("CSV reader rejects mismatched input") {
  const auto dom = std::make_shared<const GridDomain>(build_domain(parse_shape("disk 1"), 0.125));
  TensorField f(dom, 7, {});
  const auto path = scratch("bad.csv");
  {
    std::ofstream out(path);
    out << "x,y,q1\n0,0,1\n";
  }
  CHECK_THROWS_AS(read_csv(path.string(), f), IoError);
  CHECK_THROWS_AS(read_csv(scratch("missing.csv").string(), f), IoError);
}

TEST_CASE("checkpoint round trip") {
  const auto dom = std::make_shared<const GridDomain>(build_domain(parse_shape("triangle_with_hole 1 0.25 0 0"), 0.0625));
  FieldParams p{0.04, 0.03, 0.02, BcMode::Weak};
  TensorField f(dom, 2, p);
  gen::Rng rng(62);
  for (auto& v : f.values) v = rng.normal();
  const auto path = scratch("ck.bin");
  write_checkpoint(path.string(), f, 1234);
  const auto ck = read_checkpoint(path.string());
  CHECK(ck.iteration == 1234);
  CHECK(ck.field.ncomp == 2);
  CHECK(ck.field.values == f.values);
  CHECK(ck.field.params.eps == p.eps);
  CHECK(ck.field.params.delta1 == p.delta1);
  CHECK(ck.field.params.bc == BcMode::Weak);
  CHECK(ck.field.dom->mask == dom->mask);
  const std::string bytes = slurp(path);
  CHECK(bytes.substr(0, 4) == "TFCK");
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);
  {
    std::ofstream out(path, std::ios::binary);
    out << bytes.substr(0, bytes.size() / 2);
  }
  CHECK_THROWS_AS(read_checkpoint(path.string()), IoError);
}

TEST_CASE("config parsing") {
  const auto c = Config::parse("# comment\nmode = mb\n[field]\neps = 0.04  \nbc=strong\n");
  CHECK(c.str("mode") == "mb");
  CHECK(c.num("field.eps") == 0.04);
  CHECK(c.str("field.bc") == "strong");
  CHECK_THROWS_AS(Config::parse("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("bad key! = 1\n"), ConfigError);
  CHECK_THROWS_AS(c.num("mode"), ConfigError);
  CHECK_THROWS_AS(Config::load("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("config validation against the schemas") {
  const auto& schema = schema_for("relax2d");
  {
    auto c = Config::parse("mode = mb\ndomain.shape = disk 1\ndomain.h = 0.1\nfield.eps = 0.1\ninit = zero\nsolver.max_iters = 10\n");
    c.validate(schema);
    CHECK(c.str("field.bc") == "strong");
    CHECK(c.has("solver.tol"));
  }
  {
    auto c = Config::parse("mode = mb\ndomain.shape = disk 1\nfield.eps = 0.1\ninit = zero\nsolver.max_iters = 10\n");
    CHECK_THROWS_AS(c.validate(schema), MissingKeyError);
  }
  {
    auto c = Config::parse("mode = mb\ndomain.shape = disk 1\ndomain.h = 0.1\nfield.eps = 0.1\ninit = zero\n"
                           "solver.max_iters = 10\nsolver.turbo = 1\n");
    CHECK_THROWS_AS(c.validate(schema), ConfigError);
  }
  CHECK_THROWS(schema_for("nonsense"));
  CHECK(!schema_for("relax3d").empty());
  CHECK(!schema_for("analyze").empty());
  CHECK(!schema_for("bentcore").empty());
}

TEST_CASE("environment overrides") {
  CHECK(env_name("field.eps") == "TETRAFRAME_FIELD_EPS");
  auto c = Config::parse("field.eps = 0.1\n");
  ::setenv("TETRAFRAME_FIELD_EPS", "0.25", 1);
  c.apply_env(schema_for("relax2d"));
  ::unsetenv("TETRAFRAME_FIELD_EPS");
  CHECK(c.num("field.eps") == 0.25);
}
