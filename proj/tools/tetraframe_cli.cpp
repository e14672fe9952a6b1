#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <iostream>

#include "commands.hpp"
#include "tetraframe/io.hpp"

namespace {

void add_common(CLI::App* sub, tfcli::CommonFlags& f, bool config_required) {
  auto* c = sub->add_option("--config", f.config, "key=value config file");
  if (config_required) c->required();
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--seed", f.seed, "RNG seed");
  sub->add_option("--checkpoint-every", f.checkpoint_every, "checkpoint stride in iterations");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor-valued frame fields: relaxation, recovery and topology tools"};
  app.require_subcommand(1);
  tfcli::CommonFlags flags;

  auto* r2 = app.add_subcommand("relax2d", "relax a 2D field (MB or tetrahedral target)");
  add_common(r2, flags, true);
  auto* r3 = app.add_subcommand("relax3d", "relax a 3D tetrahedral field");
  add_common(r3, flags, true);
  auto* an = app.add_subcommand("analyze", "singular set, loop classes and surface indices of a checkpoint");
  add_common(an, flags, true);

  auto* bc = app.add_subcommand("bentcore", "closed-form and numerical minimizers of the bent-core potential");
  add_common(bc, flags, false);
  std::optional<double> alpha, beta;
  bc->add_option("--alpha", alpha, "alpha (with --beta: single point)");
  bc->add_option("--beta", beta, "beta");

  auto* rc = app.add_subcommand("recover", "recover the frame of a tensor, or per-node frames of a checkpoint");
  std::vector<double> comps;
  std::string field;
  double w_threshold = 0.0;
  auto* comp_opt = rc->add_option("components", comps, "7 components (3D) or 2 (MB)");
  auto* field_opt = rc->add_option("--field", field, "checkpoint file; writes <out>/frames.csv");
  rc->add_option("--out", flags.out, "output directory");
  rc->add_option("--w-threshold", w_threshold, "singular threshold (0: half of W(0))");
  comp_opt->excludes(field_opt);

  auto* cl = app.add_subcommand("classify", "conjugacy class of a closed loop of tensors");
  std::string input, generator, cl_field, loop_spec;
  int samples = 200;
  auto* in_opt = cl->add_option("--input", input, "file with one 7-component tensor per line");
  auto* gen_opt = cl->add_option("--generator", generator, "classify T(G_sigma) for a 2T element (e.g. s, i, -1)");
  auto* cf_opt = cl->add_option("--field", cl_field, "checkpoint file, used with --loop");
  auto* loop_opt = cl->add_option("--loop", loop_spec, "'circle cx cy r', 'circle cx cy cz r nx ny nz' or 'boundary OFFSET [INDEX]'");
  cl->add_option("--samples", samples, "samples along a generator or circle loop");
  in_opt->excludes(gen_opt);
  cf_opt->excludes(in_opt)->excludes(gen_opt)->needs(loop_opt);
  loop_opt->needs(cf_opt);

  auto* gf = app.add_subcommand("gen-frame", "tetrahedral or MB frame and its tensor");
  std::vector<double> quat;
  std::optional<double> theta;
  std::optional<unsigned long long> rseed;
  gf->add_option("--quat", quat, "rotation quaternion w x y z")->expected(4);
  gf->add_option("--mb", theta, "MB frame angle");
  gf->add_option("--random", rseed, "Haar-random rotation from this seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*r2) return tfcli::run_relax(flags, false);
    if (*r3) return tfcli::run_relax(flags, true);
    if (*an) return tfcli::run_analyze(flags);
    if (*bc) return tfcli::run_bentcore(flags, alpha, beta);
    if (*rc) {
      if (!field.empty()) return tfcli::run_recover_field(field, flags.out, w_threshold);
      if (comps.empty()) throw tf::ConfigError("recover needs tensor components or --field");
      return tfcli::run_recover(comps);
    }
    if (*cl) {
      if (!cl_field.empty()) return tfcli::run_classify_field(cl_field, loop_spec, samples);
      if (input.empty() && generator.empty()) throw tf::ConfigError("classify needs --input, --generator or --field");
      return tfcli::run_classify(input, generator, samples);
    }
    if (*gf) return tfcli::run_gen_frame(quat, theta, rseed);
  } catch (const tf::ConfigError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
