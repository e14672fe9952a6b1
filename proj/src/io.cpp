#include "tetraframe/io.hpp"

#include <fmt/format.h>

#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "tetraframe/frames.hpp"
#include "tetraframe/recovery.hpp"

namespace tf {

namespace {

void put_u(std::ostream& os, std::uint64_t v, int bytes) {
  char buf[8];
  for (int b = 0; b < bytes; ++b) buf[b] = static_cast<char>((v >> (8 * b)) & 0xff);
  os.write(buf, bytes);
}

std::uint64_t get_u(std::istream& is, int bytes) {
  unsigned char buf[8];
  if (!is.read(reinterpret_cast<char*>(buf), bytes)) throw IoError("truncated checkpoint");
  std::uint64_t v = 0;
  for (int b = 0; b < bytes; ++b) v |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
  return v;
}

void put_f64(std::ostream& os, double d) { put_u(os, std::bit_cast<std::uint64_t>(d), 8); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get_u(is, 8)); }

std::ofstream open_out(const std::string& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

}  // namespace

void write_checkpoint(const std::string& path, const TensorField& f, std::int64_t iteration) {
  auto out = open_out(path, true);
  out.write("TFCK", 4);
  put_u(out, 1, 4);
  put_u(out, static_cast<std::uint64_t>(f.dom->dim), 4);
  put_u(out, static_cast<std::uint64_t>(f.ncomp), 4);
  put_f64(out, f.dom->h);
  const std::string shape = f.dom->shape.describe();
  put_u(out, shape.size(), 4);
  out.write(shape.data(), static_cast<std::streamsize>(shape.size()));
  put_f64(out, f.params.eps);
  put_f64(out, f.params.delta1);
  put_f64(out, f.params.delta2);
  put_u(out, static_cast<std::uint64_t>(f.params.bc), 4);
  put_u(out, static_cast<std::uint64_t>(iteration), 8);
  put_u(out, f.dom->size(), 8);
  for (double v : f.values) put_f64(out, v);
  if (!out) throw IoError("write failed for " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::string(magic, 4) != "TFCK") throw IoError("not a checkpoint file: " + path);
  if (get_u(in, 4) != 1) throw IoError("unsupported checkpoint version");
  const int dim = static_cast<int>(get_u(in, 4));
  const int ncomp = static_cast<int>(get_u(in, 4));
  const double h = get_f64(in);
  const auto len = get_u(in, 4);
  if (len > 4096) throw IoError("corrupt shape record");
  std::string shape(len, '\0');
  if (!in.read(shape.data(), static_cast<std::streamsize>(len))) throw IoError("truncated checkpoint");
  FieldParams p;
  p.eps = get_f64(in);
  p.delta1 = get_f64(in);
  p.delta2 = get_f64(in);
  const auto bc = get_u(in, 4);
  if (bc > 2) throw IoError("corrupt boundary mode");
  p.bc = static_cast<BcMode>(bc);
  const auto iteration = static_cast<std::int64_t>(get_u(in, 8));
  const auto nodes = get_u(in, 8);
  auto dom = std::make_shared<const GridDomain>(build_domain(parse_shape(shape), h));
  if (dom->dim != dim || dom->size() != nodes) throw IoError("checkpoint grid does not match its shape record");
  Checkpoint ck{TensorField(dom, ncomp, p), iteration};
  for (auto& v : ck.field.values) v = get_f64(in);
  return ck;
}

void write_csv(std::ostream& os, const TensorField& f, double w_threshold) {
  const GridDomain& dom = *f.dom;
  os << "x,y";
  if (dom.dim == 3) os << ",z";
  for (int a = 0; a < f.ncomp; ++a) os << ",q" << a + 1;
  os << ",W,flag\n";
  for (auto node : dom.active) {
    const Vec3 x = dom.position(node);
    std::string row = fmt::format("{},{}", x[0], x[1]);
    if (dom.dim == 3) row += fmt::format(",{}", x[2]);
    const double* q = f.at(node);
    for (int a = 0; a < f.ncomp; ++a) row += fmt::format(",{}", q[a]);
    const double w = f.W(node);
    const int flag = (dom.mask[node] == kBoundary ? 1 : 0) | (w > w_threshold ? 2 : 0);
    row += fmt::format(",{},{}\n", w, flag);
    os << row;
  }
}

void write_csv(const std::string& path, const TensorField& f, double w_threshold) {
  auto out = open_out(path, false);
  write_csv(out, f, w_threshold);
  if (!out) throw IoError("write failed for " + path);
}

void read_csv(const std::string& path, TensorField& f) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  const GridDomain& dom = *f.dom;
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV");
  const int coords = dom.dim == 3 ? 3 : 2;
  const int cols = coords + f.ncomp + 2;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (row >= dom.active.size()) throw IoError("CSV has more rows than active nodes");
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      v.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw IoError("malformed CSV cell: " + cell);
    }
    if (static_cast<int>(v.size()) != cols) throw IoError("CSV row has the wrong column count");
    const auto node = dom.active[row];
    const Vec3 x = dom.position(node);
    for (int c = 0; c < coords; ++c)
      if (std::abs(v[c] - x[c]) > 1e-9 * std::max(1.0, std::abs(x[c]))) throw IoError("CSV coordinates do not match the grid");
    std::copy_n(v.begin() + coords, f.ncomp, f.at(node));
    ++row;
  }
  if (row != dom.active.size()) throw IoError("CSV has fewer rows than active nodes");
}

void write_vtk(std::ostream& os, const TensorField& f, double w_threshold) {
  const GridDomain& dom = *f.dom;
  const int nvec = f.ncomp == 7 ? 4 : 3;
  std::vector<double> w(dom.size(), 0.0);
  std::vector<std::array<Vec3, 4>> frames(dom.size());
  for (auto& fr : frames) fr.fill(Vec3::Zero());
  for (auto node : dom.active) {
    w[node] = f.W(node);
    if (w[node] > w_threshold) continue;
    try {
      Frame fr = f.ncomp == 7 ? recover_tetrahedron(f.t3(node), 0.5).frame : recover_mb(f.t2(node), 1e300).frame;
      fr = canonical_order(fr);
      for (int k = 0; k < nvec; ++k) {
        Vec3 v = Vec3::Zero();
        for (int c = 0; c < fr.n; ++c) v[c] = fr.vectors(c, k);
        frames[node][k] = v;
      }
    } catch (const std::exception&) {
      // left zero: recovery not possible at this node
    }
  }
  os << "# vtk DataFile Version 3.0\n";
  os << "tetraframe field ncomp=" << f.ncomp << "\n";
  os << "ASCII\n";
  os << "DATASET STRUCTURED_POINTS\n";
  os << fmt::format("DIMENSIONS {} {} {}\n", dom.n[0], dom.n[1], dom.n[2]);
  os << fmt::format("ORIGIN {} {} {}\n", dom.origin[0], dom.origin[1], dom.origin[2]);
  os << fmt::format("SPACING {} {} {}\n", dom.h, dom.h, dom.h);
  os << fmt::format("POINT_DATA {}\n", dom.size());
  os << "SCALARS W double 1\nLOOKUP_TABLE default\n";
  for (std::size_t i = 0; i < dom.size(); ++i) os << fmt::format("{}\n", w[i]);
  for (int k = 0; k < nvec; ++k) {
    os << "VECTORS frame_" << k + 1 << " double\n";
    for (std::size_t i = 0; i < dom.size(); ++i) {
      const Vec3& v = frames[i][k];
      os << fmt::format("{} {} {}\n", v[0], v[1], v[2]);
    }
  }
}

void write_vtk(const std::string& path, const TensorField& f, double w_threshold) {
  auto out = open_out(path, false);
  write_vtk(out, f, w_threshold);
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace tf
