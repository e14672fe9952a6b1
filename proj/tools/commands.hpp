#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tetraframe/config.hpp"
#include "tetraframe/solver.hpp"

namespace tfcli {

// Flags shared by the config-driven subcommands.
struct CommonFlags {
  std::string config;
  std::string out = ".";
  std::optional<int> threads;
  std::optional<unsigned long long> seed;
  std::optional<long> checkpoint_every;
  bool quiet = false;  // write report files without echoing them to stdout
};

using Report = std::vector<std::pair<std::string, std::string>>;

// Exit codes: 0 success, 1 run failure, 2 usage or configuration error.
int run_relax(const CommonFlags& flags, bool three_d);
int run_analyze(const CommonFlags& flags);
int run_bentcore(const CommonFlags& flags, std::optional<double> alpha, std::optional<double> beta);
int run_recover(const std::vector<double>& q);
// Per-node frames of a checkpoint to <out>/frames.csv; nodes with W >= threshold get singular=1.
int run_recover_field(const std::string& field, const std::string& out, double w_threshold);
int run_classify(const std::string& input, const std::string& generator, int samples);
// Loop spec: "circle cx cy r", "circle cx cy cz r nx ny nz" or "boundary OFFSET [INDEX]".
int run_classify_field(const std::string& field, const std::string& loop_spec, int samples);
int run_gen_frame(const std::vector<double>& quat, std::optional<double> mb_theta, std::optional<unsigned long long> random_seed);

// Loads a config, applies env and flag overrides, validates against the command schema.
tf::Config load_config(const CommonFlags& flags, const std::string& command);

// Singular-set, loop and surface diagnostics in key=value form.
Report analyze_field(const tf::TensorField& f, const tf::Config& cfg);

void write_report(const std::string& path, const Report& r);

}  // namespace tfcli
