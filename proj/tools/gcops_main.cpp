#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gcops/colocalization.hpp"
#include "gcops/error.hpp"
#include "gcops/io/image_io.hpp"
#include "gcops/io/report.hpp"
#include "gcops/oracles.hpp"
#include "gcops/segmentation.hpp"
#include "gcops/simulators.hpp"
#include "gcops/window_scan.hpp"

namespace fs = std::filesystem;
using namespace gcops;

namespace {

enum Exit { kOk = 0, kIo = 1, kDegenerate = 2, kInvalid = 3 };

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io:
      return kIo;
    case ErrorCode::EmptyRegion:
    case ErrorCode::DegenerateChannel:
    case ErrorCode::ZeroVariance:
    case ErrorCode::NonPositiveVariance:
    case ErrorCode::DegenerateHistogram:
    case ErrorCode::NoScores:
      return kDegenerate;
    default:
      return kInvalid;
  }
}

// ---------------------------------------------------------------------------
// Options shared by the subcommands that read a pair of channels.

struct ChannelOptions {
  bool binary = false;
  std::optional<double> threshold;
  std::string region;
  std::string layout;
  std::size_t depth = 0;
};

struct AnalysisOptions {
  std::optional<int> max_lag;
  std::optional<double> delta;
  double delta_threshold = 0.1;
  bool contiguous = false;
  bool no_size_warning = false;

  TestOptions test_options() const {
    TestOptions o;
    o.max_lag = max_lag;
    o.delta = delta;
    o.delta_threshold = delta_threshold;
    o.delta_rule = contiguous ? DeltaRule::ContiguousBall : DeltaRule::MaxQualifying;
    o.size_warning = !no_size_warning;
    return o;
  }
};

void add_channel_options(CLI::App* cmd, ChannelOptions& c) {
  cmd->add_flag("--binary", c.binary, "Inputs are masks: foreground is any non-zero value");
  cmd->add_option("--threshold", c.threshold,
                   "Intensity threshold for both channels (default: Otsu per channel)");
  cmd->add_option("--region", c.region, "Mask image restricting the analysis (non-zero = inside)");
  cmd->add_option("--layout", c.layout, "Page layout: plane, zstack or sequence (default: sidecar)")
      ->check(CLI::IsMember({"plane", "zstack", "sequence"}));
  cmd->add_option("--depth", c.depth, "Pages per frame in a sequence (default: sidecar or 1)");
}

void add_analysis_options(CLI::App* cmd, AnalysisOptions& a) {
  cmd->add_option("--max-lag", a.max_lag, "Radius of the stored lag ball");
  cmd->add_option("--delta", a.delta, "Fixed truncation radius of the variance sum");
  cmd->add_option("--delta-threshold", a.delta_threshold,
                  "Normalised autocovariance level for the range rule")
      ->capture_default_str();
  cmd->add_flag("--contiguous", a.contiguous, "Use the contiguous-ball range rule");
  cmd->add_flag("--no-size-warning", a.no_size_warning, "Skip the region-size check");
}

// Fills options not given on the command line from a key=value file.
void apply_config(CLI::App* cmd, const std::string& path) {
  if (path.empty()) return;
  for (const auto& [key, value] : io::read_key_values(path)) {
    const std::string name = key.starts_with("--") ? key : "--" + key;
    if (name == "--config") continue;
    CLI::Option* opt = cmd->get_option_no_throw(name);
    if (!opt)
      throw Error(ErrorCode::InvalidArgument,
                  "unknown key '" + key + "' in " + path + " for '" + cmd->get_name() + "'");
    if (opt->count() > 0) continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

std::string resolve_layout(const ChannelOptions& c, const io::Stack& st,
                           const std::optional<io::Sidecar>& meta) {
  if (!c.layout.empty()) return c.layout;
  if (meta && meta->contains("layout")) return meta->at("layout");
  return st.pages > 1 ? "zstack" : "plane";
}

std::size_t resolve_depth(const ChannelOptions& c, const std::optional<io::Sidecar>& meta) {
  if (c.depth > 0) return c.depth;
  if (meta && meta->contains("depth") && meta->contains("layout") &&
      meta->at("layout") == "sequence")
    return std::stoul(meta->at("depth"));
  return 1;
}

struct Channel {
  std::vector<ScalarField> frames;
  double tau = 0.0;
};

std::vector<std::uint8_t> load_region(const std::string& path, const Shape& shape) {
  if (path.empty()) return {};
  const auto f = io::to_field(io::read_image(path));
  if (!(f.shape == shape))
    throw Error(ErrorCode::ShapeMismatch, "region " + path + " is " + f.shape.str() +
                                              ", frames are " + shape.str());
  std::vector<std::uint8_t> region(f.values.size());
  for (std::size_t i = 0; i < region.size(); ++i) region[i] = f.values[i] != 0.0;
  return region;
}

// One threshold per channel, shared by every frame of a sequence.
Channel load_channel(const fs::path& path, const ChannelOptions& c) {
  const auto st = io::read_image(path);
  const auto meta = io::read_sidecar(path);
  Channel ch;
  if (resolve_layout(c, st, meta) == "sequence")
    ch.frames = io::split_frames(st, resolve_depth(c, meta));
  else
    ch.frames = {io::to_field(st)};
  if (c.binary)
    ch.tau = 0.0;
  else if (c.threshold)
    ch.tau = *c.threshold;
  else
    ch.tau = otsu(ch.frames.size() == 1 ? ch.frames[0] : io::to_field(st));
  return ch;
}

struct ChannelPair {
  std::vector<BinaryField> a, b;
  double tau_a = 0.0, tau_b = 0.0;
};

ChannelPair load_pair(const fs::path& pa, const fs::path& pb, const ChannelOptions& c) {
  const auto a = load_channel(pa, c), b = load_channel(pb, c);
  if (a.frames.size() != b.frames.size() || !(a.frames[0].shape == b.frames[0].shape))
    throw Error(ErrorCode::ShapeMismatch,
                pa.string() + " has " + std::to_string(a.frames.size()) + " frame(s) of " +
                    a.frames[0].shape.str() + ", " + pb.string() + " has " +
                    std::to_string(b.frames.size()) + " of " + b.frames[0].shape.str());
  const auto region = load_region(c.region, a.frames[0].shape);
  ChannelPair out;
  out.tau_a = a.tau;
  out.tau_b = b.tau;
  for (std::size_t k = 0; k < a.frames.size(); ++k) {
    for (auto [src, tau, dst, name] :
         {std::tuple{&a.frames[k], a.tau, &out.a, pa}, std::tuple{&b.frames[k], b.tau, &out.b, pb}}) {
      auto seg = threshold(*src, tau, region);
      for (const auto& w : seg.warnings)
        std::cerr << "warning: " << name.string() << " frame " << k << ": " << w << '\n';
      dst->push_back(std::move(seg.field));
    }
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (!path.empty()) io::write_file_atomic(path, text);
}

// ---------------------------------------------------------------------------
// test

struct TestArgs {
  std::string a, b, out, csv, config;
  ChannelOptions channel;
  AnalysisOptions analysis;
};

int run_test(const TestArgs& args) {
  const auto pair = load_pair(args.a, args.b, args.channel);
  const auto opts = args.analysis.test_options();
  io::Csv table;
  table.header = io::report_columns();

  if (pair.a.size() == 1) {
    const auto report = colocalization_test(pair.a[0], pair.b[0], opts);
    std::ostringstream os;
    if (!args.channel.binary)
      os << "threshold_a=" << io::format_float(pair.tau_a)
         << "\nthreshold_b=" << io::format_float(pair.tau_b) << '\n';
    os << io::to_key_value(report);
    std::cout << os.str();
    write_text(args.out, os.str());
    table.rows.push_back(io::report_row(report));
    write_text(args.csv, table.str());
    return kOk;
  }

  // Sequence: one row per frame; frames that cannot be tested are recorded.
  table.header.insert(table.header.begin(), "frame");
  table.header.push_back("skip");
  std::size_t scored = 0;
  for (std::size_t k = 0; k < pair.a.size(); ++k) {
    std::vector<std::string> row;
    try {
      row = io::report_row(colocalization_test(pair.a[k], pair.b[k], opts));
      row.push_back("");
      ++scored;
    } catch (const Error& e) {
      row.assign(io::report_columns().size(), "");
      row.push_back(std::string(to_string(e.code())));
    }
    row.insert(row.begin(), std::to_string(k));
    table.rows.push_back(std::move(row));
  }
  std::cout << table.str();
  write_text(args.out, table.str());
  write_text(args.csv, table.str());
  return scored > 0 ? kOk : kDegenerate;
}

// ---------------------------------------------------------------------------
// scan / map

struct ScanArgs {
  std::string a, b, out, hits, preview, config;
  std::string window;
  std::size_t stride = 25;
  std::size_t random = 0;
  std::uint64_t seed = 0;
  double level = 0.05;
  double bandwidth = 5.0;
  ChannelOptions channel;
  AnalysisOptions analysis;
};

ScanResult run_windows(const ScanArgs& args, const ChannelPair& pair) {
  if (pair.a.size() != 1)
    throw Error(ErrorCode::InvalidArgument, "scan and map take a single plane or volume");
  const int dims = pair.a[0].shape().dims;
  WindowSpec spec = WindowSpec::defaults(dims);
  if (!args.window.empty()) spec.size = Shape::parse(args.window);
  spec.stride = args.stride;
  if (args.random > 0) {
    spec.placement = Placement::Random;
    spec.count = args.random;
    spec.seed = args.seed;
  }
  return scan(pair.a[0], pair.b[0], spec, args.level, args.analysis.test_options());
}

io::Csv window_table(const ScanResult& r) {
  io::Csv t;
  t.header = {"origin_x", "origin_y", "origin_z", "centre_x", "centre_y", "centre_z", "hit", "skip"};
  const auto cols = io::report_columns();
  t.header.insert(t.header.end(), cols.begin(), cols.end());
  for (const auto& e : r.entries) {
    std::vector<std::string> row;
    for (auto v : e.origin) row.push_back(std::to_string(v));
    for (double v : e.centre) row.push_back(io::format_float(v));
    row.push_back(e.report && e.report->p_coloc < r.level ? "1" : "0");
    row.push_back(e.skip_reason);
    if (e.report) {
      const auto rep = io::report_row(*e.report);
      row.insert(row.end(), rep.begin(), rep.end());
    } else {
      row.resize(t.header.size());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

io::Csv hit_table(const ScanResult& r) {
  io::Csv t;
  t.header = {"x", "y", "z"};
  for (const auto& c : r.hits)
    t.rows.push_back({io::format_float(c[0]), io::format_float(c[1]), io::format_float(c[2])});
  return t;
}

void print_scan_summary(const ScanResult& r) {
  std::size_t scored = 0;
  for (const auto& e : r.entries) scored += e.report.has_value();
  std::cout << "windows=" << r.entries.size() << "\nscored=" << scored
            << "\nskipped=" << r.entries.size() - scored << "\nhits=" << r.hits.size()
            << "\nundersized_windows=" << r.undersized_windows << '\n';
}

int run_scan(const ScanArgs& args) {
  const auto pair = load_pair(args.a, args.b, args.channel);
  const auto result = run_windows(args, pair);
  print_scan_summary(result);
  if (!args.out.empty()) io::write_file_atomic(args.out, window_table(result).str());
  if (!args.hits.empty()) io::write_file_atomic(args.hits, hit_table(result).str());
  return kOk;
}

// Diverging blue-white-red colour map, symmetric about zero, averaged over z.
std::vector<std::uint8_t> preview_rgb(const ScalarField& f) {
  const std::size_t nx = f.shape.nx(), ny = f.shape.ny(), nz = f.shape.nz();
  std::vector<double> plane(nx * ny, 0.0);
  for (std::size_t z = 0; z < nz; ++z)
    for (std::size_t i = 0; i < nx * ny; ++i) plane[i] += f.values[z * nx * ny + i] / double(nz);
  double scale = 0.0;
  for (double v : plane) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) scale = 1.0;
  std::vector<std::uint8_t> rgb(3 * plane.size());
  for (std::size_t i = 0; i < plane.size(); ++i) {
    const double u = std::clamp(plane[i] / scale, -1.0, 1.0);
    const auto fade = std::uint8_t(std::lround(255.0 * (1.0 - std::abs(u))));
    rgb[3 * i] = u < 0 ? fade : 255;
    rgb[3 * i + 1] = fade;
    rgb[3 * i + 2] = u > 0 ? fade : 255;
  }
  return rgb;
}

int run_map(const ScanArgs& args) {
  const auto pair = load_pair(args.a, args.b, args.channel);
  const auto result = run_windows(args, pair);
  print_scan_summary(result);
  const auto smoothed = smooth_scores(result, args.bandwidth);
  io::write_tiff(args.out, io::from_field(smoothed), io::SampleType::F32,
                 "smoothed colocalisation score, bandwidth " + io::format_float(args.bandwidth));
  fs::path preview = args.preview;
  if (preview.empty()) preview = fs::path(args.out).replace_extension(".png");
  io::write_png_rgb(preview, smoothed.shape.nx(), smoothed.shape.ny(), preview_rgb(smoothed));
  if (!args.hits.empty()) io::write_file_atomic(args.hits, hit_table(result).str());
  std::cout << "map=" << args.out << "\npreview=" << preview.string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// shift

struct ShiftArgs {
  std::string a, b, out, config;
  int max_shift = 20;
  ChannelOptions channel;
  AnalysisOptions analysis;
};

int run_shift(ShiftArgs args) {
  if (args.channel.layout.empty()) args.channel.layout = "sequence";
  const auto pair = load_pair(args.a, args.b, args.channel);
  const auto curve = shift_scan(pair.a, pair.b, args.max_shift, args.analysis.test_options());
  io::Csv t;
  t.header = {"shift", "mean_score", "pairs"};
  for (std::size_t s = 0; s < curve.shifts.size(); ++s)
    t.rows.push_back({std::to_string(curve.shifts[s]), io::format_float(curve.means[s]),
                      std::to_string(curve.scores[s].size())});
  std::cout << t.str();
  write_text(args.out, t.str());
  return kOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string prefix, config;
  std::string shape;
  std::uint64_t seed = 0;
  // level sets
  std::optional<double> alpha, alpha_x, alpha_y, alpha_eps, tau, tau1, tau2;
  double sigma0 = 1.0;
  double rho0 = 0.0;
  // spots
  int n_red = 100, n_green = 100;
  double forced = 0.0;
  double distance = 1.0;
  double spot_radius = 2.0;
  double noise_sd = 0.2;
  std::vector<int> shift;
};

io::Sidecar layout_meta(const Shape& s) {
  if (s.dims == 3) return {{"layout", "zstack"}, {"depth", std::to_string(s.nz())}};
  return {{"layout", "plane"}, {"depth", "1"}};
}

void write_channel(const std::string& path, const io::Stack& st, io::SampleType type,
                   const io::Sidecar& meta) {
  io::write_tiff(path, st, type, "gcops simulate");
  io::write_sidecar(path, meta);
  std::cout << "wrote=" << path << '\n';
}

int run_simulate_levelsets(const SimulateArgs& args) {
  LevelSetParams p;
  if (!args.shape.empty()) p.shape = Shape::parse(args.shape);
  const double alpha = args.alpha.value_or(p.alpha_x);
  p.alpha_x = args.alpha_x.value_or(alpha);
  p.alpha_y = args.alpha_y.value_or(alpha);
  p.alpha_eps = args.alpha_eps.value_or(alpha);
  const double tau = args.tau.value_or(p.tau1);
  p.tau1 = args.tau1.value_or(tau);
  p.tau2 = args.tau2.value_or(tau);
  p.sigma0 = args.sigma0;
  p.rho0 = args.rho0;
  p.seed = args.seed;
  p.validate();
  const auto s = simulate_level_sets(p);

  auto meta = layout_meta(p.shape);
  meta.merge(io::Sidecar{
      {"kind", "levelsets"},
      {"shape", p.shape.str()},
      {"alpha_x", io::format_float(p.alpha_x)},
      {"alpha_y", io::format_float(p.alpha_y)},
      {"alpha_eps", io::format_float(p.alpha_eps)},
      {"sigma0", io::format_float(p.sigma0)},
      {"rho0", io::format_float(p.rho0)},
      {"tau1", io::format_float(p.tau1)},
      {"tau2", io::format_float(p.tau2)},
      {"seed", std::to_string(p.seed)},
      {"analytic_p1", io::format_float(s.analytic.p1)},
      {"analytic_p2", io::format_float(s.analytic.p2)},
      {"analytic_rho", io::format_float(s.analytic.rho)},
  });
  write_channel(args.prefix + "_a.tif", io::from_mask(s.first), io::SampleType::U8, meta);
  write_channel(args.prefix + "_b.tif", io::from_mask(s.second), io::SampleType::U8, meta);
  std::cout << "analytic_p1=" << io::format_float(s.analytic.p1)
            << "\nanalytic_p2=" << io::format_float(s.analytic.p2)
            << "\nanalytic_rho=" << io::format_float(s.analytic.rho) << '\n';
  return kOk;
}

int run_simulate_spots(const SimulateArgs& args) {
  SpotParams p;
  if (!args.shape.empty()) p.shape = Shape::parse(args.shape);
  p.n_red = args.n_red;
  p.n_green = args.n_green;
  p.forced_fraction = args.forced;
  p.neighbor_distance = args.distance;
  p.spot_radius = args.spot_radius;
  p.noise_sd = args.noise_sd;
  if (args.shift.size() > 3)
    throw Error(ErrorCode::InvalidArgument, "--shift takes at most three components");
  for (std::size_t i = 0; i < args.shift.size(); ++i) p.shift[i] = args.shift[i];
  p.seed = args.seed;
  p.validate();
  const auto s = simulate_spots(p);

  auto meta = layout_meta(p.shape);
  meta.merge(io::Sidecar{
      {"kind", "spots"},
      {"shape", p.shape.str()},
      {"n_red", std::to_string(p.n_red)},
      {"n_green", std::to_string(p.n_green)},
      {"forced_fraction", io::format_float(p.forced_fraction)},
      {"neighbor_distance", io::format_float(p.neighbor_distance)},
      {"spot_radius", io::format_float(p.spot_radius)},
      {"noise_sd", io::format_float(p.noise_sd)},
      {"shift", std::to_string(p.shift[0]) + "," + std::to_string(p.shift[1]) + "," +
                    std::to_string(p.shift[2])},
      {"seed", std::to_string(p.seed)},
      {"coverage_red_mask", io::format_float(coverage(s.red_mask))},
      {"coverage_green_mask", io::format_float(coverage(s.green_mask))},
  });
  write_channel(args.prefix + "_a.tif", io::from_field(s.red), io::SampleType::F32, meta);
  write_channel(args.prefix + "_b.tif", io::from_field(s.green), io::SampleType::F32, meta);
  write_channel(args.prefix + "_a_mask.tif", io::from_mask(s.red_mask), io::SampleType::U8, meta);
  write_channel(args.prefix + "_b_mask.tif", io::from_mask(s.green_mask), io::SampleType::U8,
                meta);
  return kOk;
}

// ---------------------------------------------------------------------------
// segment

struct SegmentArgs {
  std::string image, out, region, config;
  std::optional<double> threshold;
};

int run_segment(const SegmentArgs& args) {
  const auto st = io::read_image(args.image);
  const auto field = io::to_field(st);
  const auto region = load_region(args.region, field.shape);
  const double tau = args.threshold ? *args.threshold : otsu(field, region);
  const auto seg = threshold(field, tau, region);
  std::cout << "threshold=" << io::format_float(tau)
            << "\ncoverage=" << io::format_float(coverage(seg.field))
            << "\ncomponents=" << count_components(seg.field) << '\n';
  for (std::size_t i = 0; i < seg.warnings.size(); ++i)
    std::cout << "warning." << i << '=' << seg.warnings[i] << '\n';
  io::write_tiff(args.out, io::from_mask(seg.field), io::SampleType::U8, "threshold " + io::format_float(tau));
  if (const auto meta = io::read_sidecar(args.image)) io::write_sidecar(args.out, *meta);
  return kOk;
}

// ---------------------------------------------------------------------------
// oracle

struct OracleArgs {
  std::string a, b, method = "permutation", block = "2x2", config;
  std::size_t reps = 1000;
  std::uint64_t seed = 0;
  ChannelOptions channel;
  AnalysisOptions analysis;
};

int run_oracle(const OracleArgs& args) {
  const auto pair = load_pair(args.a, args.b, args.channel);
  if (pair.a.size() != 1)
    throw Error(ErrorCode::InvalidArgument, "oracle takes a single plane or volume");
  const auto& a = pair.a[0];
  const auto& b = pair.b[0];
  std::cout << "method=" << args.method << '\n';
  if (args.method == "pearson") {
    std::cout << "r=" << io::format_float(pearson(a, b)) << '\n';
  } else if (args.method == "permutation") {
    const auto r = permutation_test(a, b, Shape::parse(args.block), args.reps, args.seed);
    std::cout << "note=block permutation baseline, faithful in spirit only\n"
              << "observed_r=" << io::format_float(r.observed_r)
              << "\np_value=" << io::format_float(r.p_value) << "\nblocks=" << r.blocks
              << "\nreps=" << r.reps << '\n';
  } else {
    // Same statistic with the direct-sum autocovariance in place of the FFT.
    const auto fast = colocalization_test(a, b, args.analysis.test_options());
    const auto c1 = autocov_bruteforce(a, fast.max_lag_used);
    const auto c2 = autocov_bruteforce(b, fast.max_lag_used);
    const double s = s_hat(c1, c2, fast.delta);
    const double t = std::sqrt(double(fast.stats.n)) * fast.stats.d_hat / std::sqrt(s);
    std::cout << "delta=" << io::format_float(fast.delta)
              << "\ns_hat_bruteforce=" << io::format_float(s)
              << "\ns_hat_fft=" << io::format_float(fast.s_hat)
              << "\nt_bruteforce=" << io::format_float(t)
              << "\nt_fft=" << io::format_float(fast.t) << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Independence test for two binary images (GcoPS colocalisation)"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "gcops 1.0");

  TestArgs test;
  auto* test_cmd = app.add_subcommand("test", "Test two channels for colocalisation");
  test_cmd->add_option("a", test.a, "First channel image")->required();
  test_cmd->add_option("b", test.b, "Second channel image")->required();
  test_cmd->add_option("-o,--out", test.out, "Write the key=value report here");
  test_cmd->add_option("--csv", test.csv, "Write the machine-readable record here");
  test_cmd->add_option("--config", test.config, "key=value file with option defaults");
  add_channel_options(test_cmd, test.channel);
  add_analysis_options(test_cmd, test.analysis);

  ScanArgs scan_args, map_args;
  auto add_window_options = [](CLI::App* cmd, ScanArgs& s) {
    cmd->add_option("a", s.a, "First channel image")->required();
    cmd->add_option("b", s.b, "Second channel image")->required();
    cmd->add_option("--window", s.window, "Window size, e.g. 50x50 or 50x50x10");
    cmd->add_option("--stride", s.stride, "Grid stride in pixels")->capture_default_str();
    cmd->add_option("--random", s.random, "Number of randomly placed windows instead of a grid");
    cmd->add_option("--seed", s.seed, "Seed for random placement")->capture_default_str();
    cmd->add_option("--level", s.level, "One-sided level for hits")->capture_default_str();
    cmd->add_option("--hits", s.hits, "CSV of hit window centres");
    cmd->add_option("--config", s.config, "key=value file with option defaults");
    add_channel_options(cmd, s.channel);
    add_analysis_options(cmd, s.analysis);
  };
  auto* scan_cmd = app.add_subcommand("scan", "Run the test in windows");
  add_window_options(scan_cmd, scan_args);
  scan_cmd->add_option("-o,--out", scan_args.out, "CSV with one row per window");
  auto* map_cmd = app.add_subcommand("map", "Kernel-smoothed map of window scores");
  add_window_options(map_cmd, map_args);
  map_cmd->add_option("-o,--out", map_args.out, "Float32 TIFF of the smoothed scores")
      ->required();
  map_cmd->add_option("--preview", map_args.preview, "Colour PNG preview (default: <out>.png)");
  map_cmd->add_option("--bandwidth", map_args.bandwidth, "Kernel bandwidth in pixels")
      ->capture_default_str();

  ShiftArgs shift;
  auto* shift_cmd = app.add_subcommand("shift", "Mean score against temporal shift");
  shift_cmd->add_option("a", shift.a, "First channel sequence")->required();
  shift_cmd->add_option("b", shift.b, "Second channel sequence")->required();
  shift_cmd->add_option("--max-shift", shift.max_shift, "Largest shift in frames")
      ->capture_default_str();
  shift_cmd->add_option("-o,--out", shift.out, "CSV with one row per shift");
  shift_cmd->add_option("--config", shift.config, "key=value file with option defaults");
  add_channel_options(shift_cmd, shift.channel);
  add_analysis_options(shift_cmd, shift.analysis);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Write simulated channel pairs");
  sim_cmd->require_subcommand(1);
  auto add_common_sim = [&sim](CLI::App* cmd) {
    cmd->add_option("-o,--out-prefix", sim.prefix, "Output prefix: <prefix>_a.tif, <prefix>_b.tif")
        ->required();
    cmd->add_option("--shape", sim.shape, "Image shape, e.g. 250x250 or 250x250x60");
    cmd->add_option("--seed", sim.seed)->capture_default_str();
    cmd->add_option("--config", sim.config, "key=value file with option defaults");
  };
  auto* levelsets_cmd = sim_cmd->add_subcommand("levelsets", "Thresholded Gaussian fields");
  add_common_sim(levelsets_cmd);
  levelsets_cmd->add_option("--alpha", sim.alpha, "Scale of all three fields (default 8)");
  levelsets_cmd->add_option("--alpha-x", sim.alpha_x);
  levelsets_cmd->add_option("--alpha-y", sim.alpha_y);
  levelsets_cmd->add_option("--alpha-eps", sim.alpha_eps);
  levelsets_cmd->add_option("--tau", sim.tau, "Threshold of both channels (default 1)");
  levelsets_cmd->add_option("--tau1", sim.tau1);
  levelsets_cmd->add_option("--tau2", sim.tau2);
  levelsets_cmd->add_option("--sigma0", sim.sigma0)->capture_default_str();
  levelsets_cmd->add_option("--rho0", sim.rho0, "Weight of the shared field")
      ->capture_default_str();
  auto* spots_cmd = sim_cmd->add_subcommand("spots", "Gaussian spots with forced neighbours");
  add_common_sim(spots_cmd);
  spots_cmd->add_option("--red", sim.n_red, "Spots in the first channel")->capture_default_str();
  spots_cmd->add_option("--green", sim.n_green, "Spots in the second channel")
      ->capture_default_str();
  spots_cmd->add_option("--forced", sim.forced, "Share of second-channel spots placed as neighbours")
      ->capture_default_str();
  spots_cmd->add_option("--distance", sim.distance, "Neighbour distance in pixels")
      ->capture_default_str();
  spots_cmd->add_option("--spot-radius", sim.spot_radius, "Spot profile sd in pixels")
      ->capture_default_str();
  spots_cmd->add_option("--noise-sd", sim.noise_sd, "Additive noise sd")->capture_default_str();
  spots_cmd->add_option("--shift", sim.shift, "Translation of the second channel, e.g. 3,0")
      ->delimiter(',');

  SegmentArgs seg;
  auto* seg_cmd = app.add_subcommand("segment", "Threshold a grayscale image into a mask");
  seg_cmd->add_option("image", seg.image)->required();
  seg_cmd->add_option("-o,--out", seg.out, "Mask TIFF")->required();
  seg_cmd->add_option("--threshold", seg.threshold, "Intensity threshold (default: Otsu)");
  seg_cmd->add_option("--region", seg.region, "Mask image restricting the histogram and output");
  seg_cmd->add_option("--config", seg.config, "key=value file with option defaults");

  OracleArgs oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "Baseline statistics for comparison");
  oracle_cmd->add_option("a", oracle.a)->required();
  oracle_cmd->add_option("b", oracle.b)->required();
  oracle_cmd->add_option("--method", oracle.method)
      ->check(CLI::IsMember({"pearson", "permutation", "bruteforce"}))
      ->capture_default_str();
  oracle_cmd->add_option("--block", oracle.block, "Permutation block size")
      ->capture_default_str();
  oracle_cmd->add_option("--reps", oracle.reps, "Permutations")->capture_default_str();
  oracle_cmd->add_option("--seed", oracle.seed)->capture_default_str();
  oracle_cmd->add_option("--config", oracle.config, "key=value file with option defaults");
  add_channel_options(oracle_cmd, oracle.channel);
  add_analysis_options(oracle_cmd, oracle.analysis);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInvalid;
  }

  try {
    if (test_cmd->parsed()) {
      apply_config(test_cmd, test.config);
      return run_test(test);
    }
    if (scan_cmd->parsed()) {
      apply_config(scan_cmd, scan_args.config);
      return run_scan(scan_args);
    }
    if (map_cmd->parsed()) {
      apply_config(map_cmd, map_args.config);
      return run_map(map_args);
    }
    if (shift_cmd->parsed()) {
      apply_config(shift_cmd, shift.config);
      return run_shift(shift);
    }
    if (levelsets_cmd->parsed()) {
      apply_config(levelsets_cmd, sim.config);
      return run_simulate_levelsets(sim);
    }
    if (spots_cmd->parsed()) {
      apply_config(spots_cmd, sim.config);
      return run_simulate_spots(sim);
    }
    if (seg_cmd->parsed()) {
      apply_config(seg_cmd, seg.config);
      return run_segment(seg);
    }
    if (oracle_cmd->parsed()) {
      apply_config(oracle_cmd, oracle.config);
      return run_oracle(oracle);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kInvalid;
}
