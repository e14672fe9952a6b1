#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "commands.hpp"
#include "gen.hpp"
#include "oracles.hpp"
#include "tetraframe/io.hpp"
#include "tetraframe/quaternion.hpp"

using namespace tf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tf_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<std::vector<double>> read_rows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> r;
    std::istringstream is(line);
    for (std::string cell; std::getline(is, cell, ',');) r.push_back(std::stod(cell));
    rows.push_back(r);
  }
  return rows;
}

struct CoutCapture {
  std::ostringstream buf;
  std::streambuf* old = std::cout.rdbuf(buf.rdbuf());
  ~CoutCapture() { std::cout.rdbuf(old); }
};

TensorField constant_field(const Tensor3& t) {
  TensorField f(oracle::make_domain("disk 1", 0.125), 7, FieldParams{});
  for (auto node : f.dom->active) f.set(node, t);
  return f;
}

}  // namespace

TEST_CASE("recover on a constant identity field lists the v0 vectors") {
  const fs::path dir = scratch("recover_const");
  write_checkpoint((dir / "f.bin").string(), constant_field(tetra_tensor(Quat{1, 0, 0, 0})), 0);
  CoutCapture cap;
  REQUIRE(tfcli::run_recover_field((dir / "f.bin").string(), dir.string(), 0.0) == 0);
  const auto rows = read_rows(dir / "frames.csv");
  REQUIRE(!rows.empty());
  const auto v0 = gen::v0();
  for (const auto& r : rows) {
    REQUIRE(r.size() == 2 + 12 + 2);
    CHECK(r.back() == 0.0);
    for (int k = 0; k < 4; ++k) {
      const Vec3 a(r[2 + 3 * k], r[3 + 3 * k], r[4 + 3 * k]);
      double best = 1e9;
      for (const auto& v : v0) best = std::min(best, (a - v).norm());
      CHECK(best < 1e-10);
    }
  }
}

TEST_CASE("recover on an all-singular field emits sentinel rows") {
  const fs::path dir = scratch("recover_zero");
  write_checkpoint((dir / "f.bin").string(), constant_field(Tensor3{}), 0);
  CoutCapture cap;
  REQUIRE(tfcli::run_recover_field((dir / "f.bin").string(), dir.string(), 0.0) == 0);
  const auto rows = read_rows(dir / "frames.csv");
  REQUIRE(!rows.empty());
  for (const auto& r : rows) {
    CHECK(r.back() == 1.0);
    for (std::size_t c = 2; c + 2 < r.size(); ++c) CHECK(r[c] == 0.0);
  }
}

TEST_CASE("classify along loops in a smooth field gives the identity class") {
  const fs::path dir = scratch("classify_const");
  write_checkpoint((dir / "f.bin").string(), constant_field(tetra_tensor(Quat{0.5, 0.5, 0.5, 0.5})), 0);
  for (const char* spec : {"circle 0.1 -0.2 0.4", "boundary 0.1"}) {
    CoutCapture cap;
    REQUIRE(tfcli::run_classify_field((dir / "f.bin").string(), spec, 100) == 0);
    CHECK(cap.buf.str().find("class=1\n") != std::string::npos);
  }
  CoutCapture cap;
  CHECK_THROWS(tfcli::run_classify_field((dir / "f.bin").string(), "circle 0 0 3", 100));
  CHECK_THROWS_AS(tfcli::run_classify_field((dir / "f.bin").string(), "square 1", 100), ConfigError);
}

TEST_CASE("classify around a seeded defect reports its class") {
  // field T(g(phi)) with g a geodesic from 1 to s, phi the polar angle about the origin
  TensorField f(oracle::make_domain("disk 1", 0.0625), 7, FieldParams{});
  const BinaryTet s = parse_binary_tet("s");
  for (auto node : f.dom->active) {
    const Vec3 x = f.dom->position(node);
    double t = std::atan2(x[1], x[0]) / (2 * std::numbers::pi);
    if (t < 0) t += 1;
    f.set(node, tetra_tensor(geodesic_generator(s, t)));
  }
  const fs::path dir = scratch("classify_defect");
  write_checkpoint((dir / "f.bin").string(), f, 0);
  CoutCapture cap;
  REQUIRE(tfcli::run_classify_field((dir / "f.bin").string(), "circle 0 0 0.5", 300) == 0);
  CHECK(cap.buf.str().find("class=" + class_label(ConjClass::S) + "\n") != std::string::npos);
}
