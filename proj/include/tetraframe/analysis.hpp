#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tetraframe/quaternion.hpp"
#include "tetraframe/solver.hpp"

namespace tf {

// Half the potential of the zero tensor: 512/243 (7 components) or 81/64 (MB).
double default_w_threshold(int ncomp);

class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Index k/3 carried as the integer k.
struct Winding {
  int thirds = 0;
  double raw_thirds = 0.0;  // unrounded phase winding / 2pi
  double max_step = 0.0;    // largest phase increment along the loop
  double index() const { return thirds / 3.0; }
};

// Winding of the 3-fold phase atan2(y, x) of a closed sequence of (x, y) pairs.
// Throws AnalysisError when a phase step reaches pi or the rounding residual exceeds 0.1.
Winding phase_winding(const std::vector<Vec2>& ab);
// MB field along an ordered node cycle (first node not repeated).
Winding winding_index_2d(const TensorField& f, const std::vector<std::int64_t>& loop);

struct Cluster {
  std::vector<std::int64_t> nodes;
  Vec3 centroid = Vec3::Zero();
  double max_W = 0.0;
  bool touches_boundary = false;
  std::vector<std::int64_t> loop;  // grid cycle used for the index, empty if none was valid
  std::optional<Winding> winding;      // MB fields
  std::optional<LoopClass> loop_class; // 7-component 2D fields
  std::string loop_error;
};

struct SingularSetReport {
  double threshold = 0.0;
  std::vector<std::int64_t> singular_cells;
  std::vector<Cluster> clusters;
  int interior_clusters() const;
};

// Nodes with W > threshold, grouped by 8- (2D) or 26-neighbour (3D) adjacency, sorted by first node.
SingularSetReport singular_cells(const TensorField& f, double w_threshold);
// Adds loop indices (MB) or loop classes (7-component) to every interior 2D cluster.
void classify_clusters(const TensorField& f, SingularSetReport& rep, int min_margin = 2, int max_margin = 8);

// Field value at an arbitrary point by multilinear interpolation over active corners.
std::optional<Tensor3> interpolate3(const TensorField& f, const Vec3& x);
std::optional<Tensor2> interpolate2(const TensorField& f, const Vec3& x);

// Closed polylines at distance `offset` inside each boundary component of a 2D shape,
// counterclockwise, sampled at spacing ds. The first loop is the outer boundary.
std::vector<std::vector<Vec3>> boundary_offset_loops(const ShapeSpec& shape, double offset, double ds);

struct BoundaryWindingReport {
  std::vector<Winding> loops;  // MB: winding along each offset loop
  std::vector<LoopClass> classes;  // 7-component: class of each offset loop
  std::vector<std::string> errors;
};
BoundaryWindingReport boundary_windings(const TensorField& f, double offset);

// Checks whether elements of the given classes can be chosen with product (in order, any order
// permutation allowed) lying in the target class.
bool classes_compose_to(const std::vector<ConjClass>& parts, ConjClass target);

struct SurfaceSingularity {
  Vec3 direction = Vec3::Zero();  // unit vector of the cap centre
  double cap_radius = 0.0;        // angular radius of the index loop
  int samples = 0;                // flagged surface samples in the cluster
  Winding winding;                // thirds of the tangential 3-fold phase
};

struct SurfaceReport {
  double sample_radius = 0.0;
  int total_samples = 0;
  int flagged_samples = 0;
  std::vector<SurfaceSingularity> singularities;
  int index_sum_thirds = 0;
  int genus = 0;
  int expected_thirds() const { return 3 * (2 - 2 * genus); }
  std::vector<std::string> errors;
};

struct SurfaceOptions {
  double depth = 0.75;            // sample sphere radius R - depth*h
  int samples = 20000;            // Fibonacci points on the sphere
  double amplitude_fraction = 0.5;  // flag when tangential amplitude < fraction * 4 sqrt(2)/9
  double max_phase_step = 0.6;    // flag when the phase jumps more than this to a neighbour
  double margin = 0.12;           // added to the cluster angular radius for the loop
  int loop_points = 720;
};

// Tangential 3-fold phase pair (Q'111, Q'112) in the basis (t1, t2, nu).
Vec2 tangential_pair(const Tensor3& q, const Vec3& nu, const Vec3& t1);
// Ball domains only.
SurfaceReport surface_mb_reduction(const TensorField& f, const SurfaceOptions& opt = {});
// Same analysis for an analytic map evaluated directly on the unit sphere.
SurfaceReport surface_mb_reduction(const std::function<Tensor3(const Vec3&)>& map, double radius,
                                   const SurfaceOptions& opt = {});

struct JunctionArm {
  Vec3 direction = Vec3::Zero();
  int samples = 0;
  std::optional<LoopClass> loop_class;
  std::string error;
};

struct JunctionReport {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  std::vector<JunctionArm> arms;
  std::optional<bool> product_consistent;  // some choice of class members multiplies to 1
};

// Probes the singular set of a 3D field with a sphere of the given radius: arms are flagged
// patches on the sphere and each is classified by a loop around the patch.
JunctionReport junction_probe(const TensorField& f, const Vec3& center, double radius, int samples = 4000);

}  // namespace tf
