#pragma once

// Command-line front end: phantom generation, subdivision, roundtrip
// evaluation, metrics, ROI extraction and slice export.

#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "voxsub/config.hpp"
#include "voxsub/metrics.hpp"
#include "voxsub/phantom.hpp"
#include "voxsub/pipeline.hpp"
#include "voxsub/subdivide3d.hpp"
#include "voxsub/volume_io.hpp"

namespace voxsub::cli {

namespace detail {

inline IVec3 parse_triple(const std::string& s, const char* flag) {
  IVec3 out;
  char extra;
  long long a, b, c;
  const int n = std::sscanf(s.c_str(), "%lld,%lld,%lld%c", &a, &b, &c, &extra);
  if (n != 3) throw CLI::ValidationError(flag, "expected three comma-separated integers");
  out = {a, b, c};
  return out;
}

inline SubdivisionMode parse_mode(const std::string& s, const char* flag) {
  if (s == "linear") return SubdivisionMode::Linear;
  if (s == "nonlinear") return SubdivisionMode::Nonlinear;
  throw CLI::ValidationError(flag, "expected 'linear' or 'nonlinear'");
}

inline BoundaryPolicy parse_boundary(const std::string& s, const char* flag) {
  if (s == "mirror") return BoundaryPolicy::Mirror;
  if (s == "periodic") return BoundaryPolicy::Periodic;
  throw CLI::ValidationError(flag, "expected 'mirror' or 'periodic'");
}

inline int default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Resolve mode/tau flags into a config; --tau is only valid with
/// --mode nonlinear and defaults to 2 there.
inline SubdivisionConfig make_config(const std::string& mode_str, std::optional<double> tau,
                                     const std::string& boundary_str) {
  SubdivisionConfig cfg;
  cfg.mode = parse_mode(mode_str, "--mode");
  cfg.boundary = parse_boundary(boundary_str, "--boundary");
  if (cfg.mode == SubdivisionMode::Linear && tau.has_value())
    throw CLI::ValidationError("--tau", "only valid with --mode nonlinear");
  cfg.tau = tau.value_or(2.0);
  cfg.workers = default_threads();
  return cfg;
}

inline void write_report(const MetricsReport& m, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open report '" + path + "' for writing");
  out << serialize_report(m);
  if (!out) throw std::runtime_error("write failed on '" + path + "'");
}

}  // namespace detail

/// Execute one CLI invocation; returns the process exit status.
inline int run(const std::vector<std::string>& args) {
  CLI::App app{"volumetric subdivision toolkit"};
  app.require_subcommand(1);

  // phantom
  auto* cmd_phantom = app.add_subcommand("phantom", "generate the synthetic test volume");
  index_t ph_dims = 256;
  std::string ph_out;
  cmd_phantom->add_option("--dims", ph_dims, "cubic edge length")->required();
  cmd_phantom->add_option("--out", ph_out, "output volume path")->required();

  // subdivide
  auto* cmd_sub = app.add_subcommand("subdivide", "one refinement step, output dims doubled");
  std::string sub_in, sub_out, sub_mode, sub_boundary = "mirror", sub_tile;
  std::optional<double> sub_tau;
  std::optional<index_t> sub_halo;
  std::optional<int> sub_threads;
  cmd_sub->add_option("--in", sub_in)->required();
  cmd_sub->add_option("--out", sub_out)->required();
  cmd_sub->add_option("--mode", sub_mode, "linear|nonlinear")->required();
  cmd_sub->add_option("--tau", sub_tau, "tension parameter (nonlinear only, default 2)");
  cmd_sub->add_option("--boundary", sub_boundary, "mirror|periodic");
  cmd_sub->add_option("--tile", sub_tile, "tile dims X,Y,Z");
  cmd_sub->add_option("--halo", sub_halo, "per-side tile input extension");
  cmd_sub->add_option("--threads", sub_threads, "worker threads");

  // roundtrip
  auto* cmd_rt = app.add_subcommand("roundtrip", "downsample, refine back up, report metrics");
  std::string rt_in, rt_mode, rt_report;
  std::optional<double> rt_tau;
  cmd_rt->add_option("--in", rt_in)->required();
  cmd_rt->add_option("--mode", rt_mode, "linear|nonlinear")->required();
  cmd_rt->add_option("--tau", rt_tau, "tension parameter (nonlinear only, default 2)");
  cmd_rt->add_option("--report", rt_report)->required();

  // metrics
  auto* cmd_metrics = app.add_subcommand("metrics", "compare two volumes");
  std::string me_ref, me_test, me_report;
  cmd_metrics->add_option("--ref", me_ref)->required();
  cmd_metrics->add_option("--test", me_test)->required();
  cmd_metrics->add_option("--report", me_report)->required();

  // roi
  auto* cmd_roi = app.add_subcommand("roi", "extract an axis-aligned region");
  std::string roi_in, roi_out, roi_origin, roi_dims;
  cmd_roi->add_option("--in", roi_in)->required();
  cmd_roi->add_option("--origin", roi_origin, "X,Y,Z")->required();
  cmd_roi->add_option("--dims", roi_dims, "A,B,C")->required();
  cmd_roi->add_option("--out", roi_out)->required();

  // slice
  auto* cmd_slice = app.add_subcommand("slice", "export a slice as an 8-bit graymap");
  std::string sl_in, sl_axis, sl_out;
  index_t sl_index = 0;
  double sl_gamma = 1.0;
  cmd_slice->add_option("--in", sl_in)->required();
  cmd_slice->add_option("--axis", sl_axis, "x|y|z")->required();
  cmd_slice->add_option("--index", sl_index)->required();
  cmd_slice->add_option("--out", sl_out)->required();
  cmd_slice->add_option("--gamma", sl_gamma, "contrast exponent, > 0");

  std::vector<const char*> argv;
  argv.push_back("voxsub");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (cmd_phantom->parsed()) {
      const Volume v = generate_phantom({ph_dims, ph_dims, ph_dims}, PhantomSpec::default_spec());
      write_volume(v, ph_out, VolumeDtype::F32LE);
    } else if (cmd_sub->parsed()) {
      SubdivisionConfig cfg = detail::make_config(sub_mode, sub_tau, sub_boundary);
      if (!sub_tile.empty()) cfg.tile_dims = detail::parse_triple(sub_tile, "--tile");
      if (sub_halo) cfg.halo = *sub_halo;
      if (sub_threads) cfg.workers = *sub_threads;
      const VolumeHeader h = read_header(sub_in);
      const Volume v = read_volume(sub_in);
      const Volume out = subdivide3d_tiled(v, cfg);
      write_volume(out, sub_out, h.dtype);
    } else if (cmd_rt->parsed()) {
      const SubdivisionConfig cfg = detail::make_config(rt_mode, rt_tau, "mirror");
      const Volume v = read_volume(rt_in);
      detail::write_report(roundtrip_metrics(v, cfg), rt_report);
    } else if (cmd_metrics->parsed()) {
      const Volume ref = read_volume(me_ref);
      const Volume test = read_volume(me_test);
      detail::write_report(compute_metrics(ref, test), me_report);
    } else if (cmd_roi->parsed()) {
      const VolumeHeader h = read_header(roi_in);
      const Volume v = read_volume(roi_in);
      const Volume out = extract_roi(v, detail::parse_triple(roi_origin, "--origin"),
                                     detail::parse_triple(roi_dims, "--dims"));
      write_volume(out, roi_out, h.dtype);
    } else if (cmd_slice->parsed()) {
      int axis;
      if (sl_axis == "x") axis = 0;
      else if (sl_axis == "y") axis = 1;
      else if (sl_axis == "z") axis = 2;
      else throw CLI::ValidationError("--axis", "expected x, y or z");
      const Volume v = read_volume(sl_in);
      export_slice(v, axis, sl_index, sl_out, sl_gamma);
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace voxsub::cli
