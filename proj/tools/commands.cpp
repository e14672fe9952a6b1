#include "commands.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "tetraframe/analysis.hpp"
#include "tetraframe/bentcore.hpp"
#include "tetraframe/frames.hpp"
#include "tetraframe/io.hpp"
#include "tetraframe/quaternion.hpp"
#include "tetraframe/recovery.hpp"

namespace tfcli {

namespace fs = std::filesystem;
using namespace tf;

Config load_config(const CommonFlags& flags, const std::string& command) {
  const auto& schema = schema_for(command);
  Config cfg = flags.config.empty() ? Config::parse("", "<empty>") : Config::load(flags.config);
  cfg.apply_env(schema);
  if (flags.threads) cfg.set("threads", std::to_string(*flags.threads));
  if (flags.seed) cfg.set("seed", std::to_string(*flags.seed));
  if (flags.checkpoint_every) cfg.set("checkpoint_every", std::to_string(*flags.checkpoint_every));
  cfg.validate(schema);
  return cfg;
}

void write_report(const std::string& path, const Report& r) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& [k, v] : r) out << k << '=' << v << '\n';
}

namespace {

void print_report(const Report& r) {
  for (const auto& [k, v] : r) std::cout << k << '=' << v << '\n';
}

std::string num(double v) { return fmt::format("{}", v); }

std::string vec(const Vec3& v) { return fmt::format("{} {} {}", v[0], v[1], v[2]); }

double threshold_from(const Config& cfg, int ncomp) {
  const double t = cfg.has("analysis.w_threshold") ? cfg.num("analysis.w_threshold") : 0.0;
  return t > 0.0 ? t : default_w_threshold(ncomp);
}

double opt_num(const Config& cfg, const std::string& key, double fallback) {
  return cfg.has(key) && !cfg.str(key).empty() ? cfg.num(key) : fallback;
}

BcMode parse_bc(const std::string& s) {
  if (s == "strong") return BcMode::Strong;
  if (s == "weak") return BcMode::Weak;
  if (s == "free") return BcMode::Free;
  throw ConfigError("field.bc must be strong, weak or free");
}

fs::path ensure_dir(const std::string& d) {
  fs::path p(d);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (!fs::is_directory(p)) throw IoError("cannot create output directory " + d);
  return p;
}

}  // namespace

Report analyze_field(const TensorField& f, const Config& cfg) {
  Report r;
  const auto& dom = *f.dom;
  const double thr = threshold_from(cfg, f.ncomp);
  r.emplace_back("w_threshold", num(thr));
  auto rep = singular_cells(f, thr);
  r.emplace_back("singular_cells", std::to_string(rep.singular_cells.size()));
  r.emplace_back("clusters", std::to_string(rep.clusters.size()));
  r.emplace_back("interior_clusters", std::to_string(rep.interior_clusters()));
  double max_w = 0.0;
  for (auto node : dom.active) max_w = std::max(max_w, f.W(node));
  r.emplace_back("max_W", num(max_w));
  const double w0 = 2.0 * default_w_threshold(f.ncomp);
  for (double frac : {0.05, 0.1, 0.25, 0.5})
    r.emplace_back(fmt::format("sensitivity.{}W0.interior_clusters", frac),
                   std::to_string(singular_cells(f, frac * w0).interior_clusters()));
  if (dom.dim == 2) {
    const int mmin = static_cast<int>(opt_num(cfg, "analysis.margin_min", 2));
    const int mmax = static_cast<int>(opt_num(cfg, "analysis.margin_max", 8));
    classify_clusters(f, rep, mmin, mmax);
    int sum_thirds = 0;
    bool all_wound = true;
    std::vector<ConjClass> classes;
    for (std::size_t c = 0; c < rep.clusters.size(); ++c) {
      const auto& cl = rep.clusters[c];
      const std::string p = fmt::format("cluster.{}.", c);
      r.emplace_back(p + "centroid", vec(cl.centroid));
      r.emplace_back(p + "nodes", std::to_string(cl.nodes.size()));
      r.emplace_back(p + "max_W", num(cl.max_W));
      r.emplace_back(p + "touches_boundary", cl.touches_boundary ? "true" : "false");
      if (cl.winding) {
        r.emplace_back(p + "winding_thirds", std::to_string(cl.winding->thirds));
        sum_thirds += cl.winding->thirds;
      }
      if (cl.loop_class) {
        r.emplace_back(p + "class", class_label(cl.loop_class->cls));
        r.emplace_back(p + "holonomy", to_string(cl.loop_class->element));
        classes.push_back(cl.loop_class->cls);
      }
      if (!cl.loop_error.empty()) {
        r.emplace_back(p + "loop_error", cl.loop_error);
        if (!cl.touches_boundary) all_wound = false;
      }
    }
    if (f.ncomp == 2) {
      r.emplace_back("cluster_winding_sum_thirds", std::to_string(sum_thirds));
      r.emplace_back("all_interior_clusters_indexed", all_wound ? "true" : "false");
    }
    const double offset = opt_num(cfg, "analysis.boundary_offset", 2.5) * dom.h;
    const auto bw = boundary_windings(f, offset);
    for (std::size_t l = 0; l < bw.loops.size(); ++l)
      r.emplace_back(fmt::format("boundary_loop.{}.winding_thirds", l), std::to_string(bw.loops[l].thirds));
    for (std::size_t l = 0; l < bw.classes.size(); ++l)
      r.emplace_back(fmt::format("boundary_loop.{}.class", l), class_label(bw.classes[l].cls));
    for (const auto& e : bw.errors) r.emplace_back("boundary_loop_error", e);
    if (f.ncomp == 7 && !bw.classes.empty() && all_wound) {
      const bool ok = classes_compose_to(classes, bw.classes.front().cls);
      r.emplace_back("clusters_compose_to_boundary_class", ok ? "true" : "false");
    }
  } else {
    for (std::size_t c = 0; c < rep.clusters.size(); ++c) {
      const auto& cl = rep.clusters[c];
      const std::string p = fmt::format("cluster.{}.", c);
      r.emplace_back(p + "centroid", vec(cl.centroid));
      r.emplace_back(p + "nodes", std::to_string(cl.nodes.size()));
      r.emplace_back(p + "touches_boundary", cl.touches_boundary ? "true" : "false");
    }
    if (dom.shape.kind == ShapeKind::Ball && f.ncomp == 7) {
      SurfaceOptions so;
      so.samples = static_cast<int>(opt_num(cfg, "analysis.surface_samples", 20000));
      const auto sr = surface_mb_reduction(f, so);
      r.emplace_back("surface.flagged_samples", std::to_string(sr.flagged_samples));
      r.emplace_back("surface.singularities", std::to_string(sr.singularities.size()));
      for (std::size_t s = 0; s < sr.singularities.size(); ++s) {
        const auto& si = sr.singularities[s];
        r.emplace_back(fmt::format("surface.{}.direction", s), vec(si.direction));
        r.emplace_back(fmt::format("surface.{}.winding_thirds", s), std::to_string(si.winding.thirds));
      }
      r.emplace_back("surface.index_sum_thirds", std::to_string(sr.index_sum_thirds));
      r.emplace_back("surface.expected_thirds", std::to_string(sr.expected_thirds()));
      for (const auto& e : sr.errors) r.emplace_back("surface.error", e);
    }
    if (cfg.has("analysis.probe") && !cfg.str("analysis.probe").empty()) {
      std::istringstream is(cfg.str("analysis.probe"));
      double x, y, z, rad;
      if (!(is >> x >> y >> z >> rad)) throw ConfigError("analysis.probe expects x y z r");
      const auto jr = junction_probe(f, Vec3(x, y, z), rad);
      r.emplace_back("probe.arms", std::to_string(jr.arms.size()));
      for (std::size_t a = 0; a < jr.arms.size(); ++a) {
        const auto& arm = jr.arms[a];
        r.emplace_back(fmt::format("probe.{}.direction", a), vec(arm.direction));
        if (arm.loop_class) r.emplace_back(fmt::format("probe.{}.class", a), class_label(arm.loop_class->cls));
        if (!arm.error.empty()) r.emplace_back(fmt::format("probe.{}.error", a), arm.error);
      }
      if (jr.product_consistent)
        r.emplace_back("probe.product_consistent", *jr.product_consistent ? "true" : "false");
    }
  }
  return r;
}

int run_relax(const CommonFlags& flags, bool three_d) {
  const std::string command = three_d ? "relax3d" : "relax2d";
  Config cfg = load_config(flags, command);
  const ShapeSpec shape = parse_shape(cfg.str("domain.shape"));
  if (three_d != (shape.dim() == 3)) throw ConfigError(command + " needs a " + (three_d ? "3D" : "2D") + " shape");
  int ncomp = 7;
  if (!three_d) {
    const std::string mode = cfg.str("mode");
    if (mode == "mb") ncomp = 2;
    else if (mode != "tetra") throw ConfigError("mode must be mb or tetra");
  }
  FieldParams fp;
  fp.eps = cfg.num("field.eps");
  fp.delta1 = cfg.num("field.delta1");
  fp.delta2 = cfg.num("field.delta2");
  fp.bc = parse_bc(cfg.str("field.bc"));
  if (!(fp.eps > 0.0 && fp.delta1 > 0.0 && fp.delta2 > 0.0)) throw ConfigError("penalty lengths must be positive");

  auto dom = std::make_shared<const GridDomain>(build_domain(shape, cfg.num("domain.h")));
  spdlog::info("{}: {} active nodes ({} boundary), ncomp={}", command, dom->active.size(), dom->count(kBoundary), ncomp);
  SeedSpec init = parse_seed(cfg.str("init"));
  init.noise = cfg.num("init.noise");
  init.seed = cfg.u64("seed");
  TensorField field = seed_field(dom, ncomp, fp, init);
  if (fp.bc == BcMode::Strong) {
    const TensorField bc = seed_field(dom, ncomp, fp, parse_seed(cfg.str("bc.data")));
    copy_boundary(bc, field);
  }

  SolverConfig sc;
  sc.dt = cfg.num("solver.dt");
  sc.max_iters = cfg.integer("solver.max_iters");
  sc.min_iters = cfg.integer("solver.min_iters");
  sc.rel_energy_tol = cfg.num("solver.tol");
  sc.window = cfg.integer("solver.window");
  sc.energy_every = cfg.integer("solver.energy_every");
  sc.threads = static_cast<int>(cfg.integer("threads"));
  sc.checkpoint_every = cfg.integer("checkpoint_every");
  if (sc.threads < 1) throw ConfigError("threads must be at least 1");

  const fs::path out = ensure_dir(flags.out);
  const auto t0 = std::chrono::steady_clock::now();
  RelaxReport rr;
  try {
    rr = relax(field, sc, [&](const TensorField& f, long it) {
      write_checkpoint((out / fmt::format("checkpoint_{:08d}.bin", it)).string(), f, it);
      spdlog::info("iteration {} checkpoint written", it);
    });
  } catch (const SolverError& e) {
    spdlog::error("solver diverged: {}", e.what());
    return 1;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_checkpoint((out / "final.bin").string(), field, rr.iterations);
  const double thr = threshold_from(cfg, ncomp);
  if (cfg.flag("output.csv")) write_csv((out / "field.csv").string(), field, thr);
  if (cfg.flag("output.vtk")) write_vtk((out / "field.vtk").string(), field, thr);
  {
    std::ofstream eh(out / "energy.csv");
    eh << "iteration,energy\n";
    for (const auto& [it, e] : rr.energy_history) eh << it << ',' << fmt::format("{}", e) << '\n';
  }
  Report r;
  r.emplace_back("command", command);
  r.emplace_back("nodes", std::to_string(dom->active.size()));
  r.emplace_back("iterations", std::to_string(rr.iterations));
  r.emplace_back("converged", rr.converged ? "true" : "false");
  r.emplace_back("dt", num(rr.dt));
  r.emplace_back("seconds", num(secs));
  r.emplace_back("energy.dirichlet", num(rr.final_energy.dirichlet));
  r.emplace_back("energy.bulk", num(rr.final_energy.bulk));
  r.emplace_back("energy.surface", num(rr.final_energy.surface));
  r.emplace_back("energy.total", num(rr.final_energy.total()));
  r.emplace_back("monotone_violations", std::to_string(rr.monotone_violations));
  r.emplace_back("max_amplitude", num(rr.max_amplitude));
  if (fp.bc == BcMode::Weak) {
    r.emplace_back("amplitude_bound", num(rr.amplitude_bound));
    r.emplace_back("amplitude_bound_held", rr.bound_held ? "true" : "false");
  }
  for (auto& kv : analyze_field(field, cfg)) r.push_back(std::move(kv));
  write_report((out / "report.txt").string(), r);
  if (!flags.quiet) print_report(r);
  return 0;
}

int run_analyze(const CommonFlags& flags) {
  Config cfg = load_config(flags, "analyze");
  const Checkpoint ck = read_checkpoint(cfg.str("input"));
  Report r;
  r.emplace_back("input", cfg.str("input"));
  r.emplace_back("iteration", std::to_string(ck.iteration));
  for (auto& kv : analyze_field(ck.field, cfg)) r.push_back(std::move(kv));
  const fs::path out = ensure_dir(flags.out);
  write_report((out / "analysis.txt").string(), r);
  if (!flags.quiet) print_report(r);
  return 0;
}

int run_bentcore(const CommonFlags& flags, std::optional<double> alpha, std::optional<double> beta) {
  Config cfg = load_config(flags, "bentcore");
  if (alpha) cfg.set("alpha", num(*alpha));
  if (beta) cfg.set("beta", num(*beta));
  const bool single = !cfg.str("alpha").empty() || !cfg.str("beta").empty();
  const int starts = static_cast<int>(cfg.integer("starts"));
  const double tol = cfg.num("tol");
  const auto seed = cfg.u64("seed");
  auto row = [&](double a, double b) {
    const auto c = bentcore_minimize(a, b, tol, starts, seed);
    std::cout << fmt::format("{},{},{},{},{},{},{},{},{}\n", a, b, to_string(c.closed.type), c.closed.omega,
                             c.numeric.omega, c.relaxed.omega, c.rel_diff, c.closed.covered ? "true" : "false",
                             c.agrees ? "true" : "false");
    return c.agrees;
  };
  std::cout << "alpha,beta,type,omega_closed,omega_tensor_numeric,omega_relaxed_region,rel_diff,covered,agrees\n";
  if (single) {
    if (cfg.str("alpha").empty() || cfg.str("beta").empty()) throw ConfigError("alpha and beta must both be given");
    return row(cfg.num("alpha"), cfg.num("beta")) ? 0 : 1;
  }
  const long n = cfg.integer("sweep.n");
  if (n < 2) throw ConfigError("sweep.n must be at least 2");
  const double a0 = cfg.num("sweep.alpha_min"), a1 = cfg.num("sweep.alpha_max");
  const double b0 = cfg.num("sweep.beta_min"), b1 = cfg.num("sweep.beta_max");
  int bad = 0;
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j)
      bad += !row(a0 + (a1 - a0) * i / (n - 1), b0 + (b1 - b0) * j / (n - 1));
  std::cerr << fmt::format("{} of {} points disagree\n", bad, n * n);
  return bad == 0 ? 0 : 1;
}

int run_recover(const std::vector<double>& q) {
  if (q.size() == 7) {
    Tensor3 t;
    std::copy(q.begin(), q.end(), t.q.begin());
    const auto r = recover_tetrahedron(t, 0.5);
    std::cout << fmt::format("residual={}\n", r.residual);
    for (int k = 0; k < 4; ++k) {
      const Vec3 v = r.frame.vectors.col(k);
      std::cout << fmt::format("a{}={} mu={}\n", k + 1, vec(v), r.mu_values[k]);
    }
    return 0;
  }
  if (q.size() == 2) {
    const auto r = recover_mb(Tensor2{{q[0], q[1]}}, 1e-6);
    std::cout << fmt::format("residual={}\n", r.residual);
    for (int k = 0; k < 3; ++k)
      std::cout << fmt::format("a{}={} {}\n", k + 1, r.frame.vectors(0, k), r.frame.vectors(1, k));
    return 0;
  }
  throw ConfigError("recover expects 7 (3D) or 2 (MB) tensor components");
}

int run_recover_field(const std::string& field, const std::string& out, double w_threshold) {
  const Checkpoint ck = read_checkpoint(field);
  const TensorField& f = ck.field;
  const double thr = w_threshold > 0.0 ? w_threshold : default_w_threshold(f.ncomp);
  const bool mb = f.ncomp == 2;
  const int nvec = mb ? 3 : 4, vdim = mb ? 2 : 3;
  const fs::path dir = ensure_dir(out);
  const std::string path = (dir / "frames.csv").string();
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  const char* axes = "xyz";
  os << "x,y";
  if (f.dom->dim == 3) os << ",z";
  for (int k = 1; k <= nvec; ++k)
    for (int c = 0; c < vdim; ++c) os << ",a" << k << axes[c];
  os << ",W,singular\n";
  long singular = 0;
  for (const auto node : f.dom->active) {
    const Vec3 x = f.dom->position(node);
    os << fmt::format("{},{}", x[0], x[1]);
    if (f.dom->dim == 3) os << fmt::format(",{}", x[2]);
    const double w = mb ? potential_W(f.t2(node)) : potential_W(f.t3(node));
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(vdim, nvec);
    bool ok = w < thr;
    if (ok) {
      try {
        if (mb) {
          v = recover_mb(f.t2(node), std::numeric_limits<double>::infinity()).frame.vectors;
        } else {
          // pointwise retraction onto the variety, then exact recovery
          const Tensor3 on = project_to_variety(f.t3(node), 50);
          v = recover_tetrahedron(on, 1e-8).frame.vectors;
        }
      } catch (const std::exception&) {
        ok = false;
        v.setZero();
      }
    }
    singular += !ok;
    for (int k = 0; k < nvec; ++k)
      for (int c = 0; c < vdim; ++c) os << fmt::format(",{}", v(c, k));
    os << fmt::format(",{},{}\n", w, ok ? 0 : 1);
  }
  std::cout << fmt::format("frames={}\nnodes={}\nsingular_nodes={}\nw_threshold={}\n", path, f.dom->active.size(),
                           singular, thr);
  return 0;
}

namespace {

std::vector<Vec3> loop_points(const TensorField& f, const std::string& spec, int samples) {
  std::istringstream is(spec);
  std::string kind;
  is >> kind;
  std::vector<double> a;
  for (double v; is >> v;) a.push_back(v);
  if (!is.eof()) throw ConfigError("unreadable loop spec '" + spec + "'");
  std::vector<Vec3> pts;
  if (kind == "circle" && (a.size() == 3 || a.size() == 7)) {
    const bool planar = a.size() == 3;
    const Vec3 c = planar ? Vec3(a[0], a[1], 0.0) : Vec3(a[0], a[1], a[2]);
    const double r = planar ? a[2] : a[3];
    Vec3 n = planar ? Vec3::UnitZ() : Vec3(a[4], a[5], a[6]);
    if (!(r > 0.0) || n.norm() == 0.0) throw ConfigError("circle needs a positive radius and a nonzero normal");
    n.normalize();
    Vec3 u = n.unitOrthogonal(), w = n.cross(u);
    if (planar) u = Vec3::UnitX(), w = Vec3::UnitY();
    for (int k = 0; k < samples; ++k) {
      const double t = 2.0 * std::numbers::pi * k / samples;
      pts.push_back(c + r * (std::cos(t) * u + std::sin(t) * w));
    }
  } else if (kind == "boundary" && (a.size() == 1 || a.size() == 2)) {
    if (f.dom->dim != 2) throw ConfigError("boundary loops need a 2D field");
    const auto loops = boundary_offset_loops(f.dom->shape, a[0], f.dom->h / 2.0);
    const std::size_t idx = a.size() == 2 ? static_cast<std::size_t>(a[1]) : 0;
    if (idx >= loops.size()) throw ConfigError("no boundary component " + std::to_string(idx));
    pts = loops[idx];
  } else {
    throw ConfigError("loop spec must be 'circle cx cy r', 'circle cx cy cz r nx ny nz' or 'boundary OFFSET [INDEX]'");
  }
  return pts;
}

}  // namespace

int run_classify_field(const std::string& field, const std::string& loop_spec, int samples) {
  if (samples < 3) throw ConfigError("samples must be at least 3");
  const Checkpoint ck = read_checkpoint(field);
  if (ck.field.ncomp != 7) throw ConfigError("classify needs a 7-component field; use analyze for MB windings");
  std::vector<Tensor3> loop;
  double max_w = 0.0;
  for (const Vec3& x : loop_points(ck.field, loop_spec, samples)) {
    const auto t = interpolate3(ck.field, x);
    if (!t) throw std::runtime_error(fmt::format("loop point {} lies outside the field", vec(x)));
    max_w = std::max(max_w, potential_W(*t));
    loop.push_back(*t);
  }
  const auto lc = classify_loop(loop);
  std::cout << fmt::format("class={}\nholonomy={}\nsnap_distance={}\nmax_step={}\nloop_points={}\nloop_max_W={}\n",
                           class_label(lc.cls), to_string(lc.element), lc.snap_distance, lc.max_step, loop.size(),
                           max_w);
  return 0;
}

int run_classify(const std::string& input, const std::string& generator, int samples) {
  std::vector<Tensor3> loop;
  if (!generator.empty()) {
    if (samples < 3) throw ConfigError("samples must be at least 3");
    const BinaryTet g = parse_binary_tet(generator);
    for (int k = 0; k < samples; ++k) loop.push_back(tetra_tensor(geodesic_generator(g, static_cast<double>(k) / samples)));
  } else {
    std::ifstream in(input);
    if (!in) throw IoError("cannot read " + input);
    std::string line;
    while (std::getline(in, line)) {
      for (char& c : line)
        if (c == ',') c = ' ';
      std::istringstream is(line);
      Tensor3 t;
      int a = 0;
      while (a < 7 && is >> t.q[a]) ++a;
      if (a == 0) continue;
      if (a != 7) throw IoError("each loop line needs 7 tensor components");
      loop.push_back(t);
    }
  }
  const auto lc = classify_loop(loop);
  std::cout << fmt::format("class={}\nholonomy={}\nsnap_distance={}\nmax_step={}\n", class_label(lc.cls),
                           to_string(lc.element), lc.snap_distance, lc.max_step);
  return 0;
}

int run_gen_frame(const std::vector<double>& quat, std::optional<double> mb_theta,
                  std::optional<unsigned long long> random_seed) {
  if (mb_theta) {
    const Frame f = mb_frame(*mb_theta);
    const Tensor2 t = tensor2_from_frame(f);
    for (int k = 0; k < 3; ++k) std::cout << fmt::format("a{}={} {}\n", k + 1, f.vectors(0, k), f.vectors(1, k));
    std::cout << fmt::format("q={} {}\n", t.q[0], t.q[1]);
    return 0;
  }
  Mat3 r = Mat3::Identity();
  if (random_seed) r = random_rotation3(*random_seed);
  else if (quat.size() == 4) r = rotation_of(Quat{quat[0], quat[1], quat[2], quat[3]}.normalized());
  else if (!quat.empty()) throw ConfigError("--quat expects four numbers");
  Frame f = standard_tetrahedron();
  f.vectors = r * f.vectors;
  const Tensor3 t = tensor3_from_frame(f);
  for (int k = 0; k < 4; ++k) std::cout << fmt::format("a{}={}\n", k + 1, vec(f.vectors.col(k)));
  std::cout << fmt::format("q={} {} {} {} {} {} {}\n", t.q[0], t.q[1], t.q[2], t.q[3], t.q[4], t.q[5], t.q[6]);
  return 0;
}

}  // namespace tfcli
