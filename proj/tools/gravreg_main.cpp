// Command-line front end: correspondence-based registration, the
// correspondence-free mode, synthetic instance generation, and benchmark
// campaigns.
//
// Exit codes: 0 success, 1 usage/parse/IO errors, 2 no consensus.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gravreg/bench.hpp"
#include "gravreg/geometry.hpp"
#include "gravreg/io.hpp"
#include "gravreg/pipeline.hpp"
#include "gravreg/spcr.hpp"
#include "gravreg/synth.hpp"

namespace {

using namespace gravreg;

Vec3 parse_triple(const std::string& text, const std::string& flag) {
  std::istringstream ss(text);
  double v[3];
  char sep1 = 0, sep2 = 0;
  if (!(ss >> v[0] >> sep1 >> v[1] >> sep2 >> v[2]) || sep1 != ',' ||
      sep2 != ',') {
    throw CLI::ValidationError(flag, "expected x,y,z");
  }
  return Vec3(v[0], v[1], v[2]);
}

struct ThresholdFlags {
  double sigma = -1.0;
  double delta = -1.0;
  double tau = -1.0;
  bool tau_auto = false;
  int bins = 360;
  double gamma_min = -1.0;
  double w_min = 1e-6;
  int threads = 1;
};

void add_threshold_flags(CLI::App* cmd, ThresholdFlags* f) {
  cmd->add_option("--sigma", f->sigma,
                  "noise standard deviation; derives delta/tau defaults");
  cmd->add_option("--delta", f->delta, "stage-I inlier threshold (meters)");
  cmd->add_option("--tau", f->tau, "stage-II point-line inlier threshold");
  cmd->add_flag("--tau-auto", f->tau_auto,
                "accept the sigma-calibrated tau default");
  cmd->add_option("--s", f->bins, "stage-III angle grid size (default 360)");
  cmd->add_option("--gamma-min", f->gamma_min,
                  "BnB minimum branch half-side (radians)");
  cmd->add_option("--w-min", f->w_min, "pole-at-infinity threshold");
  const char* env_threads = std::getenv("GRAVREG_THREADS");
  if (env_threads != nullptr) f->threads = std::atoi(env_threads);
  cmd->add_option("--threads", f->threads, "worker pool size");
}

RegistrationConfig resolve_config(const ThresholdFlags& f) {
  RegistrationConfig cfg;
  if (f.sigma >= 0.0) cfg = config_for_sigma(f.sigma);
  if (f.delta > 0.0) cfg.delta = f.delta;
  if (f.tau > 0.0) cfg.tau = f.tau;
  if (f.sigma < 0.0 && f.delta <= 0.0) {
    throw CLI::ValidationError("--delta",
                               "required unless --sigma is given");
  }
  if (f.tau <= 0.0 && !f.tau_auto) {
    throw CLI::ValidationError(
        "--tau", "required unless the calibrated default is accepted "
                 "with --tau-auto");
  }
  if (f.tau <= 0.0 && f.tau_auto && f.sigma < 0.0) {
    throw CLI::ValidationError("--tau-auto", "needs --sigma");
  }
  cfg.angle_bins = f.bins;
  if (f.gamma_min > 0.0) cfg.gamma_min = f.gamma_min;
  cfg.w_min = f.w_min;
  cfg.threads = std::max(1, f.threads);
  return cfg;
}

void print_summary(const RegistrationResult& result) {
  std::cout << "theta_star_rad " << result.theta_star << "\n"
            << "l_star_m " << result.l_star << "\n"
            << "inliers " << result.inliers_stage1.size() << " -> "
            << result.inliers_stage2.size() << " -> "
            << result.inliers_stage3.size() << "\n"
            << "bnb_branches " << result.pole.stats.branches_expanded << "\n"
            << "time_ms " << result.timings.total_s * 1e3 << "\n";
}

void report_truth(const RegistrationResult& result,
                  const std::string& truth_path) {
  const RigidTransform truth = read_truth(truth_path);
  std::cout << "re_deg "
            << rotation_error_deg(truth.rotation, result.transform.rotation)
            << "\n"
            << "te_m "
            << translation_error(truth.translation,
                                 result.transform.translation)
            << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"4-DOF point cloud registration with gravity prior"};
  app.require_subcommand(1);

  // --- register ------------------------------------------------------------
  auto* reg = app.add_subcommand(
      "register", "correspondence-based registration from a file");
  std::string corr_path, source_path, target_path, out_path = "result.txt";
  std::string gravity_p = "0,0,-1", gravity_q = "0,0,-1", truth_path;
  std::size_t min_inliers = 3;
  bool emit_timings = false;
  ThresholdFlags reg_flags;
  reg->add_option("--corr", corr_path,
                  "correspondence file (6-column, or 2-column indices)")
      ->required();
  reg->add_option("--source", source_path,
                  "source cloud (for 2-column index files)");
  reg->add_option("--target", target_path,
                  "target cloud (for 2-column index files)");
  reg->add_option("--gravity-p", gravity_p, "source gravity direction x,y,z");
  reg->add_option("--gravity-q", gravity_q, "target gravity direction x,y,z");
  reg->add_option("--out", out_path, "result file path");
  reg->add_option("--truth", truth_path, "report RE/TE against this truth");
  reg->add_option("--min-inliers", min_inliers,
                  "final consensus below this exits with code 2");
  reg->add_flag("--emit-timings", emit_timings,
                "include (non-deterministic) timings in the result file");
  add_threshold_flags(reg, &reg_flags);

  // --- register-spcr ---------------------------------------------------------
  auto* spcr =
      app.add_subcommand("register-spcr", "correspondence-free registration");
  std::string spcr_source, spcr_target, spcr_out = "result.txt";
  std::string spcr_gravity_p = "0,0,-1", spcr_gravity_q = "0,0,-1";
  std::string spcr_truth;
  double voxel = 0.0;
  std::size_t spcr_min_inliers = 3;
  bool spcr_emit_timings = false;
  ThresholdFlags spcr_flags;
  spcr->add_option("--source", spcr_source, "source cloud (xyz or ply)")
      ->required();
  spcr->add_option("--target", spcr_target, "target cloud (xyz or ply)")
      ->required();
  spcr->add_option("--gravity-p", spcr_gravity_p,
                   "source gravity direction x,y,z");
  spcr->add_option("--gravity-q", spcr_gravity_q,
                   "target gravity direction x,y,z");
  spcr->add_option("--out", spcr_out, "result file path");
  spcr->add_option("--truth", spcr_truth, "report RE/TE against this truth");
  spcr->add_option("--voxel", voxel, "voxel downsampling resolution (0 = off)");
  spcr->add_option("--min-inliers", spcr_min_inliers,
                   "final consensus below this exits with code 2");
  spcr->add_flag("--emit-timings", spcr_emit_timings,
                 "include (non-deterministic) timings in the result file");
  add_threshold_flags(spcr, &spcr_flags);

  // --- synth -----------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "generate a synthetic instance");
  SynthConfig synth_cfg;
  std::string synth_mode = "corr", synth_axis = "0,0,1";
  std::string prefix = "instance";
  bool emit_labels = false;
  synth->add_option("--n", synth_cfg.n, "correspondence count");
  synth->add_option("--eta", synth_cfg.eta, "outlier rate [0,1)");
  synth->add_option("--sigma", synth_cfg.sigma, "noise standard deviation");
  synth->add_option("--seed", synth_cfg.seed, "seed");
  synth->add_option("--mode", synth_mode, "corr | spcr");
  synth->add_option("--m", synth_cfg.m, "source size (spcr)");
  synth->add_option("--rho", synth_cfg.rho, "overlap rate (spcr)");
  synth->add_option("--axis", synth_axis, "rotation axis x,y,z");
  synth->add_option("--translation-half-width",
                    synth_cfg.translation_half_width,
                    "translation cube half-width");
  synth->add_option("--gravity-noise-deg", synth_cfg.gravity_noise_deg,
                    "gravity direction perturbation (degrees)");
  synth->add_option("--out-prefix", prefix, "output file prefix");
  synth->add_flag("--emit-labels", emit_labels, "write inlier labels");

  // --- bench -------------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "run a benchmark campaign");
  std::string spec_path, csv_path = "bench.csv";
  int bench_threads = 1;
  bench->add_option("--spec", spec_path, "campaign spec (json)")->required();
  bench->add_option("--out", csv_path, "output CSV path");
  bench->add_option("--threads", bench_threads, "parallel trials");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (reg->parsed()) {
    const RegistrationConfig cfg = resolve_config(reg_flags);
    std::vector<Vec3> source, target;
    const bool have_clouds = !source_path.empty() && !target_path.empty();
    if (have_clouds) {
      source = read_cloud(source_path);
      target = read_cloud(target_path);
    }
    CorrespondenceSet c = read_correspondences(
        corr_path, have_clouds ? &source : nullptr,
        have_clouds ? &target : nullptr);
    if (c.pairs.empty()) {
      std::cerr << "error: " << corr_path << " contains no correspondences\n";
      return 1;
    }
    c.gravity.v_p = parse_triple(gravity_p, "--gravity-p").normalized();
    c.gravity.v_q = parse_triple(gravity_q, "--gravity-q").normalized();
    const RegistrationResult result = solve_register(c, cfg);
    write_result(to_record(result), out_path, emit_timings);
    print_summary(result);
    if (!truth_path.empty()) report_truth(result, truth_path);
    if (result.inliers_stage3.size() < min_inliers) {
      std::cerr << "no consensus: " << result.inliers_stage3.size()
                << " final inliers (< " << min_inliers << ")\n";
      return 2;
    }
    return 0;
  }

  if (spcr->parsed()) {
    SpcrConfig cfg;
    cfg.reg = resolve_config(spcr_flags);
    cfg.voxel_resolution = voxel;
    PointCloudPair pair;
    pair.source = read_cloud(spcr_source);
    pair.target = read_cloud(spcr_target);
    pair.gravity.v_p =
        parse_triple(spcr_gravity_p, "--gravity-p").normalized();
    pair.gravity.v_q =
        parse_triple(spcr_gravity_q, "--gravity-q").normalized();
    const RegistrationResult result = solve_spcr(pair, cfg);
    write_result(to_record(result), spcr_out, spcr_emit_timings);
    print_summary(result);
    if (!spcr_truth.empty()) report_truth(result, spcr_truth);
    if (result.inliers_stage3.size() < spcr_min_inliers) {
      std::cerr << "no consensus: " << result.inliers_stage3.size()
                << " final inliers (< " << spcr_min_inliers << ")\n";
      return 2;
    }
    return 0;
  }

  if (synth->parsed()) {
    if (synth_mode == "corr") {
      synth_cfg.mode = SynthMode::kCorrespondences;
    } else if (synth_mode == "spcr") {
      synth_cfg.mode = SynthMode::kSpcr;
    } else {
      std::cerr << "error: --mode must be corr or spcr\n";
      return 1;
    }
    synth_cfg.axis = parse_triple(synth_axis, "--axis").normalized();
    const SynthInstance inst = generate(synth_cfg);
    write_truth(prefix + ".truth", inst.truth);
    if (inst.mode == SynthMode::kCorrespondences) {
      write_correspondences(prefix + ".corr", inst.correspondences);
      std::cout << "wrote " << prefix << ".corr (n=" << synth_cfg.n << ")\n";
    } else {
      write_cloud_xyz(prefix + "_source.xyz", inst.clouds.source);
      write_cloud_xyz(prefix + "_target.xyz", inst.clouds.target);
      std::cout << "wrote " << prefix << "_source.xyz / _target.xyz (m="
                << synth_cfg.m << ", rho=" << synth_cfg.rho << ")\n";
    }
    if (emit_labels) {
      std::ofstream labels(prefix + ".labels");
      for (bool b : inst.inlier_label) labels << (b ? 1 : 0) << '\n';
    }
    std::cout << "wrote " << prefix << ".truth\n";
    return 0;
  }

  if (bench->parsed()) {
    const CampaignSpec campaign = load_campaign(spec_path);
    const std::vector<TrialRow> rows =
        run_campaign(campaign, std::max(1, bench_threads));
    write_csv(rows, csv_path);
    std::size_t successes = 0;
    for (const TrialRow& r : rows) successes += r.success ? 1 : 0;
    for (const CellSummary& c : summarize(rows)) {
      std::cout << c.scenario << " N=" << c.n << " eta=" << c.eta
                << " sigma=" << c.sigma;
      if (c.rho) std::cout << " rho=" << *c.rho;
      std::cout << ": success " << 100.0 * c.success_rate << "% of "
                << c.trials << ", median " << c.median_total_ms
                << " ms, median RE " << c.median_re_deg << " deg, median TE "
                << c.median_te_m << " m\n";
    }
    std::cout << "wrote " << csv_path << ": " << rows.size() << " trials, "
              << successes << " successes\n";
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NoConsensus& e) {
    std::cerr << "no consensus: " << e.what() << "\n";
    return 2;
  } catch (const EmptyInput& e) {
    std::cerr << "no consensus: " << e.what() << "\n";
    return 2;
  } catch (const RegistrationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
