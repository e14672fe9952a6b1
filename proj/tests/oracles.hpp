#pragma once

// Solver-side oracles shared by the unit tests and the acceptance run.

#include <memory>
#include <string>

#include "gen.hpp"
#include "tetraframe/solver.hpp"

namespace oracle {

inline std::shared_ptr<const tf::GridDomain> make_domain(const std::string& shape, double h) {
  return std::make_shared<const tf::GridDomain>(tf::build_domain(tf::parse_shape(shape), h));
}

inline tf::TensorField random_field(std::shared_ptr<const tf::GridDomain> dom, int ncomp, tf::FieldParams p,
                                    gen::Rng& rng, double scale) {
  tf::TensorField f(dom, ncomp, p);
  for (auto node : dom->active)
    for (int a = 0; a < ncomp; ++a) f.at(node)[a] = scale * rng.uniform();
  return f;
}

inline Eigen::MatrixXd metric_of(int ncomp) {
  Eigen::MatrixXd m(ncomp, ncomp);
  for (int a = 0; a < ncomp; ++a)
    for (int b = 0; b < ncomp; ++b) {
      if (ncomp == 7) {
        tf::Tensor3 ea, eb;
        ea[a] = 1, eb[b] = 1;
        m(a, b) = tf::inner(ea, eb);
      } else {
        tf::Tensor2 ea, eb;
        ea[a] = 1, eb[b] = 1;
        m(a, b) = tf::inner(ea, eb);
      }
    }
  return m;
}

// Relative error of the assembled gradient against central differences of energy().
// Fixed (strong boundary) nodes must report a zero gradient; their values enter the numerator.
inline double gradient_mismatch(tf::TensorField f) {
  const auto g = tf::energy_gradient(f);
  const auto m = metric_of(f.ncomp);
  const bool strong = f.params.bc == tf::BcMode::Strong;
  double num = 0, den = 0;
  for (auto node : f.dom->active) {
    const bool fixed = strong && f.dom->mask[node] == tf::kBoundary;
    Eigen::VectorXd gn(f.ncomp), fd(f.ncomp);
    for (int a = 0; a < f.ncomp; ++a) {
      gn[a] = g[node * f.ncomp + a];
      double& v = f.at(node)[a];
      const double keep = v, h = 1e-6;
      v = keep + h;
      const double ep = tf::energy(f).total();
      v = keep - h;
      const double em = tf::energy(f).total();
      v = keep;
      fd[a] = (ep - em) / (2 * h);
    }
    if (fixed) {
      num += gn.squaredNorm();
      continue;
    }
    num += (m * gn - fd).squaredNorm();
    den += fd.squaredNorm();
  }
  return std::sqrt(num / den);
}

}  // namespace oracle
