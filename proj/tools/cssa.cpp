// Command-line front end: dictionary learning, encoding, fusion, metrics and
// the sparsity/support sweep report.

#include <CLI11.hpp>

#include <iostream>

#include "cssa/commands.hpp"
#include "cssa/errors.hpp"

namespace {

void add_solver_flags(CLI::App* cmd, cssa::RunConfig& cfg) {
  cmd->add_option("--structure", cfg.structure, "Sparsity structure")
      ->check(CLI::IsMember({"l1", "l21", "linf1", "l1l21"}))
      ->capture_default_str();
  cmd->add_option("--lambda", cfg.lambda, "Weight for l1, l21 and linf1")->capture_default_str();
  cmd->add_option("--gamma1", cfg.gamma1, "Elementwise weight for l1l21")->capture_default_str();
  cmd->add_option("--gamma2", cfg.gamma2, "Row weight for l1l21")->capture_default_str();
  cmd->add_option("--rho", cfg.rho, "ADMM penalty")->capture_default_str();
  cmd->add_option("--max-iter", cfg.max_iter, "ADMM iteration cap")->capture_default_str();
  cmd->add_option("--tol", cfg.tol, "Primal/dual residual tolerance per entry")->capture_default_str();
  cmd->add_option("--lowpass-reg", cfg.lowpass_reg, "Tikhonov lowpass regularization")->capture_default_str();
  cmd->add_option("--zero-tol", cfg.zero_tol, "Relative zero threshold for support statistics")
      ->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
}

void add_highpass_flag(CLI::App* cmd, cssa::RunConfig& cfg) {
  cmd->add_flag("--no-highpass", [&cfg](std::int64_t) { cfg.highpass = false; },
                "Encode full-band images instead of their highpass components");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convolutional simultaneous sparse approximation toolkit"};
  app.require_subcommand(1);

  cssa::LearnArgs learn;
  auto* learn_cmd = app.add_subcommand("learn", "Learn (multimodal) convolutional dictionaries");
  learn.cfg.structure = "l1l21";
  add_solver_flags(learn_cmd, learn.cfg);
  add_highpass_flag(learn_cmd, learn.cfg);
  learn_cmd->add_option("inputs", learn.inputs, "Training images, grouped per set in modality order")->required();
  learn_cmd->add_option("--modalities", learn.modalities, "Images per training set")->capture_default_str();
  learn_cmd->add_option("--filters", learn.filters, "Filters per dictionary")->capture_default_str();
  learn_cmd->add_option("--size", learn.side, "Filter side length")->capture_default_str();
  learn_cmd->add_option("--iters", learn.outer_iters, "Alternations")->capture_default_str();
  learn_cmd->add_option("--dict-rho", learn.dict_rho, "ADMM penalty of the filter update")->capture_default_str();
  learn_cmd->add_option("--crop", learn.crop, "Centre-crop training images to this side (0 = off)")
      ->capture_default_str();
  learn_cmd->add_option("--out", learn.out, "Output dictionary file")->required();
  learn_cmd->add_option("--report", learn.report, "CSV of the objective per alternation");

  cssa::EncodeArgs enc;
  auto* enc_cmd = app.add_subcommand("encode", "Sparse-code images and report support statistics");
  add_solver_flags(enc_cmd, enc.cfg);
  add_highpass_flag(enc_cmd, enc.cfg);
  enc_cmd->add_option("inputs", enc.inputs, "Input images")->required();
  enc_cmd->add_option("--dict", enc.dict, "Dictionary file")->required();
  enc_cmd->add_option("--out", enc.out, "Statistics CSV (stdout when omitted)");
  enc_cmd->add_option("--recon", enc.recon_prefix, "Write reconstructions as <prefix><n>.png");

  cssa::FuseNirVlArgs nirvl;
  auto* nirvl_cmd = app.add_subcommand("fuse-nirvl", "Fuse a visible-light RGB image with a NIR image");
  nirvl.cfg.structure = "l1l21";
  add_solver_flags(nirvl_cmd, nirvl.cfg);
  nirvl_cmd->add_option("--vl", nirvl.vl, "Visible-light colour image")->required();
  nirvl_cmd->add_option("--nir", nirvl.nir, "Near-infrared image")->required();
  nirvl_cmd->add_option("--dict", nirvl.dict, "Two-modality dictionary file (VL, NIR)")->required();
  nirvl_cmd->add_option("--out", nirvl.out, "Fused image")->required();
  nirvl_cmd->add_option("--report", nirvl.report, "Metric CSV (stdout when omitted)");

  cssa::FuseMfArgs mf;
  auto* mf_cmd = app.add_subcommand("fuse-mf", "Fuse two or more multifocus images");
  add_solver_flags(mf_cmd, mf.cfg);
  mf_cmd->add_option("inputs", mf.inputs, "Input images")->required();
  mf_cmd->add_option("--dict", mf.dict, "Single-modality dictionary file")->required();
  mf_cmd->add_option("--out", mf.out, "Fused image")->required();
  mf_cmd->add_option("--report", mf.report, "Metric CSV (stdout when omitted)");

  cssa::MetricsArgs met;
  auto* met_cmd = app.add_subcommand("metrics", "EN, PSNR, SSIM, SF and EI of a fused image");
  met_cmd->add_option("fused", met.fused, "Fused image")->required();
  met_cmd->add_option("inputs", met.inputs, "Source images")->required();
  met_cmd->add_option("--out", met.out, "Metric CSV (stdout when omitted)");

  cssa::Table1Args tab;
  std::string gamma_grid;
  auto* tab_cmd = app.add_subcommand("report-table1", "Sweep structures and weights over an input pair");
  add_solver_flags(tab_cmd, tab.cfg);
  add_highpass_flag(tab_cmd, tab.cfg);
  tab_cmd->add_option("inputs", tab.inputs, "Input images (typically a VL/NIR pair)")->required();
  tab_cmd->add_option("--dict", tab.dict, "Dictionary file (one shared or one per input)")->required();
  tab_cmd->add_option("--structures", tab.structures, "Structures to sweep")
      ->delimiter(',')
      ->check(CLI::IsMember({"l1", "l21", "linf1", "l1l21"}))
      ->capture_default_str();
  tab_cmd->add_option("--lambda-grid", tab.lambda_grid, "Weights for l1, l21, linf1")
      ->delimiter(',')
      ->capture_default_str();
  tab_cmd->add_option("--gamma-grid", gamma_grid, "l1l21 weight pairs as g1:g2,g1:g2,...");
  tab_cmd->add_option("--out", tab.out, "CSV output (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*learn_cmd) return cssa::cmd_learn(learn, std::cout);
    if (*enc_cmd) return cssa::cmd_encode(enc, std::cout);
    if (*nirvl_cmd) return cssa::cmd_fuse_nirvl(nirvl, std::cout);
    if (*mf_cmd) return cssa::cmd_fuse_mf(mf, std::cout);
    if (*met_cmd) return cssa::cmd_metrics(met, std::cout);
    if (*tab_cmd) {
      if (!gamma_grid.empty()) tab.gamma_grid = cssa::parse_gamma_grid(gamma_grid);
      return cssa::cmd_report_table1(tab, std::cout);
    }
  } catch (const cssa::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 2;
  } catch (const cssa::ShapeError& e) {
    std::cerr << "shape error: " << e.what() << '\n';
    return 3;
  } catch (const cssa::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
