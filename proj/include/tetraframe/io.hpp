#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>

#include "tetraframe/solver.hpp"

namespace tf {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Binary checkpoint, little-endian:
//   "TFCK" | u32 version | u32 dim | u32 ncomp | f64 h | u32 len | shape text |
//   f64 eps | f64 delta1 | f64 delta2 | u32 bc | i64 iteration | u64 nodes | f64 values[nodes*ncomp]
void write_checkpoint(const std::string& path, const TensorField& f, std::int64_t iteration);
struct Checkpoint {
  TensorField field;
  std::int64_t iteration = 0;
};
Checkpoint read_checkpoint(const std::string& path);

// CSV: header x,y[,z],q1..qN,W,flag ; one row per active node in index order.
// flag bit 0: boundary node, bit 1: W above w_threshold.
void write_csv(std::ostream& os, const TensorField& f, double w_threshold);
void write_csv(const std::string& path, const TensorField& f, double w_threshold);
// Reads values back into a field on the same domain; coordinates must match the grid.
void read_csv(const std::string& path, TensorField& f);

// Legacy ASCII VTK structured points with scalar W and one vector array per frame vector.
// Frame vectors are zero at exterior nodes and at nodes with W above w_threshold or failed recovery.
void write_vtk(std::ostream& os, const TensorField& f, double w_threshold);
void write_vtk(const std::string& path, const TensorField& f, double w_threshold);

}  // namespace tf
