#pragma once

#include <optional>
#include <string>

#include "gravreg/pipeline.hpp"
#include "gravreg/synth.hpp"
#include "gravreg/types.hpp"

namespace gravreg {

/// One sweep: the cross product of the parameter lists, `trials` seeded
/// repetitions per cell.
struct ScenarioSpec {
  std::string name = "scenario";
  SynthMode mode = SynthMode::kCorrespondences;
  std::string method = "pipeline";  // "pipeline" or "ransac"
  std::vector<std::size_t> n = {2000};
  std::vector<double> eta = {0.0};
  std::vector<double> sigma = {0.005};
  std::vector<double> rho = {1.0};  // SPCR mode
  int trials = 50;
  std::uint64_t seed0 = 1;
  double success_re_deg = 1.0;
  double success_te_m = 0.01;
  Vec3 axis = Vec3(0.0, 0.0, 1.0);
  double gravity_noise_deg = 0.0;
  std::optional<double> delta;  // overrides the sigma-derived default
  std::optional<double> tau;
  std::uint64_t ransac_iterations = 10'000;
};

struct CampaignSpec {
  std::vector<ScenarioSpec> scenarios;
};

/// JSON campaign file, e.g.
///   {"scenarios": [{"name": "outlier_sweep", "n": [2000],
///                   "eta": [0.9, 0.94, 0.98], "sigma": [0.005],
///                   "trials": 50, "seed0": 1}]}
CampaignSpec load_campaign(const std::string& path);

struct TrialRow {
  std::string scenario;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  double eta = 0.0;
  double sigma = 0.0;
  std::optional<double> rho;
  double stage1_ms = 0.0;
  double stage2_ms = 0.0;
  double stage3_ms = 0.0;
  double total_ms = 0.0;
  double re_deg = 0.0;
  double te_m = 0.0;
  bool success = false;
  std::size_t inliers1 = 0;
  std::size_t inliers2 = 0;
  std::size_t inliers3 = 0;
  std::uint64_t bnb_branches = 0;
};

/// Runs every (cell, trial) job; independent trials may run on the worker
/// pool, rows always come back in deterministic job order. Trial seeds are
/// seed0 + 1000003 * cell_index + trial_index.
std::vector<TrialRow> run_campaign(const CampaignSpec& campaign, int threads);

/// Schema:
/// scenario,seed,N,eta,sigma,rho,stage1_ms,stage2_ms,stage3_ms,total_ms,
/// re_deg,te_m,success,inliers1,inliers2,inliers3,bnb_branches
void write_csv(const std::vector<TrialRow>& rows, const std::string& path);

/// Per-cell aggregates (cells keyed by scenario/N/eta/sigma/rho, in first
/// appearance order).
struct CellSummary {
  std::string scenario;
  std::size_t n = 0;
  double eta = 0.0;
  double sigma = 0.0;
  std::optional<double> rho;
  int trials = 0;
  double success_rate = 0.0;
  double median_total_ms = 0.0;
  double median_re_deg = 0.0;
  double median_te_m = 0.0;
};

std::vector<CellSummary> summarize(const std::vector<TrialRow>& rows);

}  // namespace gravreg
