#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tetraframe/tensor.hpp"

namespace tf {

enum class ShapeKind { Disk, Ball, TriangleWithHole, BoxMinusBall, Rectangle };

// Analytic domain description. Signed distance is negative inside.
struct ShapeSpec {
  ShapeKind kind = ShapeKind::Disk;
  double radius = 1.0;       // disk / ball radius, triangle circumradius
  double hole_radius = 0.0;  // excised disk (triangle) or ball (box)
  Vec3 hole_center = Vec3::Zero();
  Vec3 half_extent = Vec3::Ones();  // rectangle / box

  int dim() const;
  double sdf(const Vec3& x) const;
  // Outward unit normal from the active piece of the signed distance.
  Vec3 normal(const Vec3& x) const;
  void bounds(Vec3& lo, Vec3& hi) const;
  std::string describe() const;
  void validate() const;
};

// Parses "disk r", "ball r", "triangle_with_hole R rh [cx cy]", "box_minus_ball L r", "rectangle lx ly".
ShapeSpec parse_shape(const std::string& text);

enum NodeType : std::uint8_t { kExterior = 0, kInterior = 1, kBoundary = 2 };

struct GridDomain {
  int dim = 2;
  double h = 0.0;
  std::array<int, 3> n{1, 1, 1};
  Vec3 origin = Vec3::Zero();
  ShapeSpec shape;
  std::vector<double> sdf;
  std::vector<std::uint8_t> mask;
  std::vector<Vec3> normals;      // zero except on boundary nodes
  std::vector<std::int64_t> active;  // nodes with mask != exterior
  // 2*dim neighbor indices per node (-1 when off-grid), order -x,+x,-y,+y,-z,+z.
  std::vector<std::int64_t> nbr;

  std::size_t size() const { return mask.size(); }
  std::int64_t index(int i, int j, int k = 0) const {
    return (static_cast<std::int64_t>(k) * n[1] + j) * n[0] + i;
  }
  std::array<int, 3> coords(std::int64_t idx) const;
  Vec3 position(std::int64_t idx) const;
  int num_dirs() const { return 2 * dim; }
  std::int64_t neighbor(std::int64_t idx, int dir) const { return nbr[idx * num_dirs() + dir]; }
  bool inside(std::int64_t idx) const { return idx >= 0 && mask[idx] != kExterior; }
  std::size_t count(NodeType t) const;
};

GridDomain build_domain(const ShapeSpec& shape, double h);

}  // namespace tf
