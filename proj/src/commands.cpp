#include "cssa/commands.hpp"

#include <charconv>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "cssa/cdl.hpp"
#include "cssa/errors.hpp"
#include "cssa/fusion.hpp"
#include "cssa/io.hpp"
#include "cssa/metrics.hpp"

namespace cssa {

Regularizer RunConfig::regularizer() const {
  const Structure kind = parse_structure(structure);
  if (lambda < 0.0 || gamma1 < 0.0 || gamma2 < 0.0) throw ConfigError("regularization weights must be nonnegative");
  if (kind == Structure::L1L21) return Regularizer::l1_l21(gamma1, gamma2);
  return {kind, lambda, 0.0, 0.0};
}

SolverOptions RunConfig::solver_options() const {
  if (!(rho > 0.0)) throw ConfigError("--rho must be positive");
  if (max_iter < 1) throw ConfigError("--max-iter must be positive");
  if (!(tol > 0.0)) throw ConfigError("--tol must be positive");
  if (!(lowpass_reg > 0.0)) throw ConfigError("--lowpass-reg must be positive");
  SolverOptions opts;
  opts.rho = rho;
  opts.max_iter = max_iter;
  opts.tol_primal = tol;
  opts.tol_dual = tol;
  opts.zero_tol_rel = zero_tol;
  return opts;
}

std::vector<std::string> table1_header() {
  return {"structure", "lambda", "gamma1", "gamma2", "sparsity", "common_support_pct", "approx_error", "iterations"};
}

namespace {

// Output goes to `path` when given, otherwise to the fallback stream.
class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw IoError("cannot open '" + path + "' for writing");
    stream_ = file_.get();
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

Plane prepare(const Plane& luma, const RunConfig& cfg) {
  if (!cfg.highpass) return luma;
  return lowpass_decompose(luma, cfg.lowpass_reg).high;
}

std::vector<Plane> load_signals(const std::vector<std::string>& paths, const RunConfig& cfg) {
  std::vector<Plane> out;
  for (const auto& p : paths) out.push_back(prepare(to_luma(load_image(p)), cfg));
  for (const Plane& p : out)
    if (!p.same_shape(out.front())) throw ShapeError("input images differ in size");
  return out;
}

std::span<const Dictionary> dicts_for(const DictionarySet& set, std::size_t signals) {
  if (set.modalities() == 1 || set.modalities() == signals) return set.all();
  throw ShapeError("dictionary file has " + std::to_string(set.modalities()) + " modalities for " +
                   std::to_string(signals) + " inputs");
}

std::vector<std::string> table1_row(const Regularizer& reg, const EncodeDiagnostics& d) {
  return {std::string(to_string(reg.kind)), format_number(reg.lambda), format_number(reg.gamma1),
          format_number(reg.gamma2),        format_number(d.sparsity_ratio), format_number(d.common_support_pct),
          format_number(d.approx_error),    std::to_string(d.iterations)};
}

void write_metrics(const std::string& path, std::ostream& fallback, const MetricReport& m) {
  OutputTarget target(path, fallback);
  CsvWriter csv(target.stream(), {"en", "psnr", "ssim", "sf", "ei"});
  csv.row({format_number(m.en), format_number(m.psnr), format_number(m.ssim), format_number(m.sf),
           format_number(m.ei)});
}

Plane center_crop(const Plane& p, std::size_t side) {
  if (side == 0) return p;
  if (side > p.height() || side > p.width()) throw ShapeError("crop larger than training image");
  const std::size_t r0 = (p.height() - side) / 2, c0 = (p.width() - side) / 2;
  Plane out(side, side);
  for (std::size_t r = 0; r < side; ++r)
    for (std::size_t c = 0; c < side; ++c) out(r, c) = p(r0 + r, c0 + c);
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

}  // namespace

std::vector<std::pair<double, double>> parse_gamma_grid(const std::string& text) {
  std::vector<std::pair<double, double>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("gamma grid entries must look like g1:g2, got '" + item + "'");
    out.emplace_back(parse_double(item.substr(0, colon)), parse_double(item.substr(colon + 1)));
  }
  if (out.empty()) throw ConfigError("empty gamma grid");
  return out;
}

int cmd_learn(const LearnArgs& args, std::ostream& log) {
  if (args.out.empty()) throw ConfigError("learn needs --out");
  if (args.modalities == 0 || args.inputs.empty() || args.inputs.size() % args.modalities != 0)
    throw ConfigError("number of inputs must be a positive multiple of --modalities");
  if (args.filters == 0 || args.side == 0 || args.outer_iters < 1) throw ConfigError("invalid dictionary shape or iteration count");
  if (!(args.dict_rho > 0.0)) throw ConfigError("--dict-rho must be positive");

  std::vector<Plane> samples;
  for (const auto& path : args.inputs)
    samples.push_back(prepare(center_crop(to_luma(load_image(path)), args.crop), args.cfg));
  const TrainingBatch batch(args.inputs.size() / args.modalities, args.modalities, std::move(samples));

  CdlOptions opts;
  opts.filters = args.filters;
  opts.side = args.side;
  opts.outer_iters = args.outer_iters;
  opts.reg = args.cfg.regularizer();
  opts.sparse = args.cfg.solver_options();
  opts.dict.rho = args.dict_rho;
  opts.seed = args.cfg.seed;

  const LearnResult result = learn(batch, opts);
  save_dict(result.dicts, args.out);

  OutputTarget target(args.report, log);
  CsvWriter csv(target.stream(), {"alternation", "objective"});
  for (std::size_t i = 0; i < result.objective.size(); ++i)
    csv.row({std::to_string(i + 1), format_number(result.objective[i])});
  return 0;
}

int cmd_encode(const EncodeArgs& args, std::ostream& log) {
  if (args.inputs.empty()) throw ConfigError("encode needs at least one input image");
  const DictionarySet set = load_dict(args.dict);
  const Regularizer reg = args.cfg.regularizer();
  const SolverOptions opts = args.cfg.solver_options();
  const auto signals = load_signals(args.inputs, args.cfg);
  const auto dicts = dicts_for(set, signals.size());

  const EncodeResult res = encode(signals, dicts, reg, opts);
  {
    OutputTarget target(args.out, log);
    CsvWriter csv(target.stream(), table1_header());
    csv.row(table1_row(reg, res.diagnostics));
  }
  if (!args.recon_prefix.empty()) {
    const auto recon = reconstruct(res.X, dicts);
    for (std::size_t n = 0; n < recon.size(); ++n)
      save_image(clamp(recon[n]), args.recon_prefix + std::to_string(n) + ".png");
  }
  return 0;
}

int cmd_fuse_nirvl(const FuseNirVlArgs& args, std::ostream& log) {
  if (args.out.empty()) throw ConfigError("fuse-nirvl needs --out");
  const DictionarySet dicts = load_dict(args.dict);
  if (dicts.modalities() != 2) throw ShapeError("fuse-nirvl needs a two-modality (VL, NIR) dictionary file");

  const Image vl_img = load_image(args.vl);
  const auto* vl = std::get_if<RgbImage>(&vl_img);
  if (!vl) throw ShapeError("the visible-light image must be a colour image");
  const Plane nir = to_luma(load_image(args.nir));

  NirVlConfig cfg;
  cfg.lowpass_reg = args.cfg.lowpass_reg;
  cfg.reg = args.cfg.regularizer();
  cfg.solver = args.cfg.solver_options();
  const NirVlResult res = fuse_nir_vl(*vl, nir, dicts, cfg);
  save_image(res.image, args.out);

  const Plane fused = rgb_to_ycbcr(res.image).luma;
  const std::vector<Plane> refs{rgb_to_ycbcr(*vl).luma, nir};
  write_metrics(args.report, log, evaluate(fused, refs));
  return 0;
}

int cmd_fuse_mf(const FuseMfArgs& args, std::ostream& log) {
  if (args.out.empty()) throw ConfigError("fuse-mf needs --out");
  if (args.inputs.size() < 2) throw ConfigError("fuse-mf needs at least two input images");
  const DictionarySet set = load_dict(args.dict);
  if (set.modalities() != 1) throw ShapeError("fuse-mf needs a single-modality dictionary file");

  std::vector<Image> images;
  for (const auto& p : args.inputs) images.push_back(load_image(p));
  const bool color = std::holds_alternative<RgbImage>(images.front());
  for (const Image& img : images)
    if (std::holds_alternative<RgbImage>(img) != color) throw ShapeError("mixing colour and grayscale inputs");

  MultifocusConfig cfg;
  cfg.lowpass_reg = args.cfg.lowpass_reg;
  cfg.reg = args.cfg.regularizer();
  cfg.solver = args.cfg.solver_options();

  std::vector<Plane> refs;
  for (const Image& img : images) refs.push_back(to_luma(img));
  Plane fused;
  if (color) {
    std::vector<RgbImage> rgb;
    for (const Image& img : images) rgb.push_back(std::get<RgbImage>(img));
    const MultifocusColorResult res = fuse_multifocus(rgb, set[0], cfg);
    save_image(res.image, args.out);
    fused = rgb_to_ycbcr(res.image).luma;
  } else {
    const MultifocusResult res = fuse_multifocus(refs, set[0], cfg);
    fused = clamp(res.luma);
    save_image(fused, args.out);
  }
  write_metrics(args.report, log, evaluate(fused, refs));
  return 0;
}

int cmd_metrics(const MetricsArgs& args, std::ostream& log) {
  if (args.inputs.empty()) throw ConfigError("metrics needs at least one input image");
  const Plane fused = to_luma(load_image(args.fused));
  std::vector<Plane> refs;
  for (const auto& p : args.inputs) refs.push_back(to_luma(load_image(p)));
  write_metrics(args.out, log, evaluate(fused, refs));
  return 0;
}

int cmd_report_table1(const Table1Args& args, std::ostream& log) {
  if (args.inputs.size() < 2) throw ConfigError("report-table1 needs at least two input images");
  const DictionarySet set = load_dict(args.dict);
  const auto signals = load_signals(args.inputs, args.cfg);
  const auto dicts = dicts_for(set, signals.size());
  const SolverOptions opts = args.cfg.solver_options();

  OutputTarget target(args.out, log);
  CsvWriter csv(target.stream(), table1_header());
  for (const std::string& name : args.structures) {
    const Structure kind = parse_structure(name);
    std::vector<Regularizer> grid;
    if (kind == Structure::L1L21) {
      for (const auto& [g1, g2] : args.gamma_grid) grid.push_back(Regularizer::l1_l21(g1, g2));
    } else {
      for (double l : args.lambda_grid) grid.push_back({kind, l, 0.0, 0.0});
    }
    for (const Regularizer& reg : grid) {
      if (reg.lambda < 0.0 || reg.gamma1 < 0.0 || reg.gamma2 < 0.0) throw ConfigError("grid weights must be nonnegative");
      const EncodeResult res = encode(signals, dicts, reg, opts);
      csv.row(table1_row(reg, res.diagnostics));
    }
  }
  return 0;
}

}  // namespace cssa
