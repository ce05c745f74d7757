#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cssa/solver.hpp"

namespace cssa {

/// Solver and preprocessing settings shared by the subcommands.
struct RunConfig {
  std::string structure = "l21";
  double lambda = 0.01;
  double gamma1 = 0.001;
  double gamma2 = 0.01;
  double rho = 10.0;
  int max_iter = 200;
  double tol = 1e-4;
  double lowpass_reg = 5.0;
  bool highpass = true;
  double zero_tol = 1e-8;
  std::uint64_t seed = 0;

  Regularizer regularizer() const;
  SolverOptions solver_options() const;
};

struct LearnArgs {
  RunConfig cfg;
  std::vector<std::string> inputs;  // set-major: set 0 modalities, set 1 modalities, ...
  std::size_t modalities = 1;
  std::size_t filters = 32;
  std::size_t side = 8;
  int outer_iters = 20;
  double dict_rho = 1.0;
  std::size_t crop = 0;  // centre crop side, 0 keeps full images
  std::string out;
  std::string report;  // optional CSV of per-alternation objective
};

struct EncodeArgs {
  RunConfig cfg;
  std::vector<std::string> inputs;
  std::string dict;
  std::string out;           // CSV, stdout when empty
  std::string recon_prefix;  // writes <prefix><n>.png when set
};

struct FuseNirVlArgs {
  RunConfig cfg;
  std::string vl, nir, dict, out;
  std::string report;  // metric CSV, stdout when empty
};

struct FuseMfArgs {
  RunConfig cfg;
  std::vector<std::string> inputs;
  std::string dict, out;
  std::string report;
};

struct MetricsArgs {
  std::string fused;
  std::vector<std::string> inputs;
  std::string out;
};

struct Table1Args {
  RunConfig cfg;
  std::vector<std::string> inputs;
  std::string dict;
  std::vector<std::string> structures{"l1", "l21", "linf1", "l1l21"};
  std::vector<double> lambda_grid{0.001, 0.01, 0.05, 0.1, 0.5};
  std::vector<std::pair<double, double>> gamma_grid{
      {0.001, 0.001}, {0.001, 0.01}, {0.01, 0.01}, {0.001, 0.1}, {0.01, 0.1}};
  std::string out;
};

/// Column layout of encode and report-table1 CSV output.
std::vector<std::string> table1_header();

// Each command returns 0 on success and throws IoError, ShapeError or
// ConfigError on failure. `log` receives human-readable progress and any
// CSV that has no output file.
int cmd_learn(const LearnArgs& args, std::ostream& log);
int cmd_encode(const EncodeArgs& args, std::ostream& log);
int cmd_fuse_nirvl(const FuseNirVlArgs& args, std::ostream& log);
int cmd_fuse_mf(const FuseMfArgs& args, std::ostream& log);
int cmd_metrics(const MetricsArgs& args, std::ostream& log);
int cmd_report_table1(const Table1Args& args, std::ostream& log);

/// Parses "g1:g2,g1:g2,..." into weight pairs.
std::vector<std::pair<double, double>> parse_gamma_grid(const std::string& text);

}  // namespace cssa
