#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tetraframe/grid.hpp"
#include "tetraframe/quaternion.hpp"
#include "tetraframe/tensor.hpp"

namespace tf {

enum class BcMode { Strong, Weak, Free };

struct FieldParams {
  double eps = 0.05;
  double delta1 = 0.02;
  double delta2 = 0.02;
  BcMode bc = BcMode::Strong;
};

// One tensor per grid node: 2 components (MB mode) or 7 (tetrahedral target).
struct TensorField {
  std::shared_ptr<const GridDomain> dom;
  int ncomp = 7;
  std::vector<double> values;
  FieldParams params;

  TensorField() = default;
  TensorField(std::shared_ptr<const GridDomain> d, int nc, FieldParams p);

  double* at(std::int64_t node) { return values.data() + node * ncomp; }
  const double* at(std::int64_t node) const { return values.data() + node * ncomp; }
  Tensor3 t3(std::int64_t node) const;
  Tensor2 t2(std::int64_t node) const;
  void set(std::int64_t node, const Tensor3& t);
  void set(std::int64_t node, const Tensor2& t);
  // W of the node tensor (3D or MB potential depending on ncomp).
  double W(std::int64_t node) const;
  double amplitude(std::int64_t node) const;  // Frobenius norm of the full tensor
};

// Member of the boundary family with Q(nu,nu) = (8/9) nu.
// Without theta: minimum-norm solution of the rank-5 system.
// With theta: the on-variety member at tangential phase theta in the nu-adapted basis.
Tensor3 dirichlet_bc_from_normal(const Vec3& nu, std::optional<double> theta = std::nullopt);
// The 6x7 system matrix (rows: (1,1),(1,2),(1,3),(2,2),(2,3),(3,3)) and right-hand side.
Eigen::Matrix<double, 6, 7> boundary_system_matrix(const Vec3& nu);
Eigen::Matrix<double, 6, 1> boundary_system_rhs(const Vec3& nu);
// Rotation with third row nu (so R nu = e3) and a fixed tangent convention.
Mat3 normal_adapted_basis(const Vec3& nu);

// MB tensor aligned with a planar normal.
Tensor2 mb_from_normal(const Vec3& nu);

// Escape map of the unit disk, as a rotation of the frame containing e3.
Quat escape_map_quaternion(double x, double y);
Tensor3 escape_map_tensor(double x, double y);
// Ball map with one boundary singularity at the north pole; zero at the pole.
Tensor3 ball_one_singularity_tensor(const Vec3& x);

struct SeedSpec {
  enum class Kind { Zero, EscapeMap, BallOneSingularity, QuaternionDefects, FrameConstant, NormalAligned };
  Kind kind = Kind::Zero;
  std::vector<Defect> defects;
  double rho = 0.1;
  Mat3 rotation = Mat3::Identity();  // FrameConstant
  double theta = 0.0;                // NormalAligned / FrameConstant (MB)
  double noise = 0.0;
  std::uint64_t seed = 0;
};

SeedSpec parse_seed(const std::string& text);
std::string describe_seed(const SeedSpec& s);

// Nodewise evaluation of spec on active nodes. NormalAligned fills boundary nodes only.
TensorField seed_field(std::shared_ptr<const GridDomain> dom, int ncomp, FieldParams params, const SeedSpec& spec);
// Copy boundary values of src into dst.
void copy_boundary(const TensorField& src, TensorField& dst);

struct Energy {
  double dirichlet = 0.0;
  double bulk = 0.0;
  double surface = 0.0;
  double total() const { return dirichlet + bulk + surface; }
};

Energy energy(const TensorField& f, int threads = 1);

// Frobenius gradient of the discrete energy per node (ncomp values each); zero on fixed nodes.
std::vector<double> energy_gradient(const TensorField& f, int threads = 1);

struct SolverConfig {
  double dt = 0.0;  // <= 0 selects 0.2 min(h^2/(2 dim), eps^2/8)
  long max_iters = 10000;
  long min_iters = 0;
  double rel_energy_tol = 1e-8;
  long window = 100;
  int threads = 1;
  long energy_every = 1;
  long checkpoint_every = 0;
};

double default_dt(const TensorField& f);
double amplitude_bound(const FieldParams& p);

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StepStats {
  Energy before;       // energy of the input state (when computed)
  double max_amplitude = 0.0;
};

// One explicit Euler step A <- A - dt m_i g_i / h^d. Throws SolverError on non-finite values.
StepStats step(TensorField& f, double dt, int threads = 1, bool with_energy = true);

struct RelaxReport {
  long iterations = 0;
  bool converged = false;
  double dt = 0.0;
  std::vector<std::pair<long, double>> energy_history;
  long monotone_violations = 0;
  double max_amplitude = 0.0;   // over all checks
  double amplitude_bound = 0.0; // weak mode only, 0 otherwise
  bool bound_held = true;
  Energy final_energy;
};

using CheckpointHook = std::function<void(const TensorField&, long)>;

RelaxReport relax(TensorField& f, const SolverConfig& cfg, const CheckpointHook& hook = {});

}  // namespace tf
