#include "gravreg/bench.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "gravreg/ransac.hpp"
#include "gravreg/spcr.hpp"

namespace gravreg {

namespace {

using nlohmann::json;

ScenarioSpec parse_scenario(const json& j) {
  ScenarioSpec spec;
  spec.name = j.value("name", spec.name);
  const std::string mode = j.value("mode", std::string("corr"));
  if (mode == "corr") {
    spec.mode = SynthMode::kCorrespondences;
  } else if (mode == "spcr") {
    spec.mode = SynthMode::kSpcr;
  } else {
    throw ParseError("campaign", 0, "unknown mode '" + mode + "'");
  }
  spec.method = j.value("method", spec.method);
  if (spec.method != "pipeline" && spec.method != "ransac") {
    throw ParseError("campaign", 0, "unknown method '" + spec.method + "'");
  }
  if (j.contains("n")) spec.n = j.at("n").get<std::vector<std::size_t>>();
  if (j.contains("eta")) spec.eta = j.at("eta").get<std::vector<double>>();
  if (j.contains("sigma"))
    spec.sigma = j.at("sigma").get<std::vector<double>>();
  if (j.contains("rho")) spec.rho = j.at("rho").get<std::vector<double>>();
  spec.trials = j.value("trials", spec.trials);
  spec.seed0 = j.value("seed0", spec.seed0);
  spec.success_re_deg = j.value("success_re_deg", spec.success_re_deg);
  spec.success_te_m = j.value("success_te_m", spec.success_te_m);
  if (j.contains("axis")) {
    const auto a = j.at("axis").get<std::vector<double>>();
    if (a.size() != 3) throw ParseError("campaign", 0, "axis needs 3 values");
    spec.axis = Vec3(a[0], a[1], a[2]);
  }
  spec.gravity_noise_deg = j.value("gravity_noise_deg", 0.0);
  if (j.contains("delta")) spec.delta = j.at("delta").get<double>();
  if (j.contains("tau")) spec.tau = j.at("tau").get<double>();
  spec.ransac_iterations =
      j.value("ransac_iterations", spec.ransac_iterations);
  return spec;
}

struct Job {
  const ScenarioSpec* spec;
  std::size_t n;
  double eta;
  double sigma;
  double rho;
  std::uint64_t seed;
};

TrialRow run_job(const Job& job) {
  const ScenarioSpec& spec = *job.spec;

  SynthConfig synth_cfg;
  synth_cfg.mode = spec.mode;
  synth_cfg.n = job.n;
  synth_cfg.m = job.n;
  synth_cfg.eta = job.eta;
  synth_cfg.sigma = job.sigma;
  synth_cfg.rho = job.rho;
  synth_cfg.seed = job.seed;
  synth_cfg.axis = spec.axis;
  synth_cfg.gravity_noise_deg = spec.gravity_noise_deg;
  const SynthInstance inst = generate(synth_cfg);

  TrialRow row;
  row.scenario = spec.name;
  row.seed = job.seed;
  row.n = job.n;
  row.eta = job.eta;
  row.sigma = job.sigma;
  if (spec.mode == SynthMode::kSpcr) row.rho = job.rho;

  RegistrationConfig reg = config_for_sigma(job.sigma);
  if (spec.delta) reg.delta = *spec.delta;
  if (spec.tau) reg.tau = *spec.tau;

  Mat3 r_est;
  Vec3 t_est;
  if (spec.method == "ransac") {
    RansacConfig rc;
    rc.epsilon = 2.0 * reg.delta;  // 3-D residual threshold from sigma
    rc.max_iterations = spec.ransac_iterations;
    rc.seed = job.seed;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const RansacResult res = ransac_baseline(inst.correspondences, rc);
      r_est = res.transform.rotation;
      t_est = res.transform.translation;
      row.inliers1 = res.inliers.size();
    } catch (const NoConsensus&) {
      r_est = Mat3::Identity();
      t_est = Vec3::Zero();
    }
    row.total_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  } else {
    RegistrationResult res;
    if (spec.mode == SynthMode::kCorrespondences) {
      res = solve_register(inst.correspondences, reg);
    } else {
      SpcrConfig spcr_cfg;
      spcr_cfg.reg = reg;
      res = solve_spcr(inst.clouds, spcr_cfg);
    }
    r_est = res.transform.rotation;
    t_est = res.transform.translation;
    row.stage1_ms = res.timings.stage1_s * 1e3;
    row.stage2_ms = res.timings.stage2_s * 1e3;
    row.stage3_ms = res.timings.stage3_s * 1e3;
    row.total_ms = res.timings.total_s * 1e3;
    row.inliers1 = res.inliers_stage1.size();
    row.inliers2 = res.inliers_stage2.size();
    row.inliers3 = res.inliers_stage3.size();
    row.bnb_branches = res.pole.stats.branches_expanded;
  }

  row.re_deg = rotation_error_deg(inst.truth.rotation, r_est);
  row.te_m = translation_error(inst.truth.translation, t_est);
  row.success =
      row.re_deg <= spec.success_re_deg && row.te_m <= spec.success_te_m;
  return row;
}

}  // namespace

CampaignSpec load_campaign(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("no such file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path, 0, e.what());
  }
  CampaignSpec campaign;
  if (!j.contains("scenarios") || !j.at("scenarios").is_array() ||
      j.at("scenarios").empty()) {
    throw ParseError(path, 0, "campaign needs a non-empty 'scenarios' array");
  }
  for (const json& scenario : j.at("scenarios")) {
    campaign.scenarios.push_back(parse_scenario(scenario));
  }
  return campaign;
}

std::vector<TrialRow> run_campaign(const CampaignSpec& campaign, int threads) {
  std::vector<Job> jobs;
  for (const ScenarioSpec& spec : campaign.scenarios) {
    std::size_t cell = 0;
    for (std::size_t n : spec.n) {
      for (double eta : spec.eta) {
        for (double sigma : spec.sigma) {
          for (double rho : spec.rho) {
            for (int trial = 0; trial < spec.trials; ++trial) {
              jobs.push_back({&spec, n, eta, sigma, rho,
                              spec.seed0 + 1000003ULL * cell +
                                  static_cast<std::uint64_t>(trial)});
            }
            ++cell;
          }
        }
      }
    }
  }

  std::vector<TrialRow> rows(jobs.size());
  const int workers = std::max(1, threads);
  if (workers == 1) {
    for (std::size_t k = 0; k < jobs.size(); ++k) rows[k] = run_job(jobs[k]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        while (true) {
          const std::size_t k = next.fetch_add(1);
          if (k >= jobs.size()) break;
          rows[k] = run_job(jobs[k]);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  return rows;
}

std::vector<CellSummary> summarize(const std::vector<TrialRow>& rows) {
  std::vector<CellSummary> cells;
  std::vector<std::vector<const TrialRow*>> members;
  for (const TrialRow& row : rows) {
    std::size_t cell = cells.size();
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const CellSummary& c = cells[k];
      if (c.scenario == row.scenario && c.n == row.n && c.eta == row.eta &&
          c.sigma == row.sigma && c.rho == row.rho) {
        cell = k;
        break;
      }
    }
    if (cell == cells.size()) {
      CellSummary c;
      c.scenario = row.scenario;
      c.n = row.n;
      c.eta = row.eta;
      c.sigma = row.sigma;
      c.rho = row.rho;
      cells.push_back(c);
      members.emplace_back();
    }
    members[cell].push_back(&row);
  }

  const auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  for (std::size_t k = 0; k < cells.size(); ++k) {
    CellSummary& c = cells[k];
    std::vector<double> times, res, tes;
    std::size_t successes = 0;
    for (const TrialRow* row : members[k]) {
      times.push_back(row->total_ms);
      res.push_back(row->re_deg);
      tes.push_back(row->te_m);
      successes += row->success ? 1 : 0;
    }
    c.trials = static_cast<int>(members[k].size());
    c.success_rate = static_cast<double>(successes) / c.trials;
    c.median_total_ms = median(std::move(times));
    c.median_re_deg = median(std::move(res));
    c.median_te_m = median(std::move(tes));
  }
  return cells;
}

void write_csv(const std::vector<TrialRow>& rows, const std::string& path) {
  const std::string tmp = path + ".tmp";
  std::ofstream out(tmp);
  if (!out) throw IoError("cannot open " + tmp + " for writing");
  out << "scenario,seed,N,eta,sigma,rho,stage1_ms,stage2_ms,stage3_ms,"
         "total_ms,re_deg,te_m,success,inliers1,inliers2,inliers3,"
         "bnb_branches\n";
  char buf[64];
  const auto num = [&](double v, const char* fmt) {
    std::snprintf(buf, sizeof(buf), fmt, v);
    return std::string(buf);
  };
  for (const TrialRow& r : rows) {
    out << r.scenario << ',' << r.seed << ',' << r.n << ','
        << num(r.eta, "%.6g") << ',' << num(r.sigma, "%.6g") << ','
        << (r.rho ? num(*r.rho, "%.6g") : std::string()) << ','
        << num(r.stage1_ms, "%.3f") << ',' << num(r.stage2_ms, "%.3f") << ','
        << num(r.stage3_ms, "%.3f") << ',' << num(r.total_ms, "%.3f") << ','
        << num(r.re_deg, "%.9g") << ',' << num(r.te_m, "%.9g") << ','
        << (r.success ? 1 : 0) << ',' << r.inliers1 << ',' << r.inliers2
        << ',' << r.inliers3 << ',' << r.bnb_branches << '\n';
  }
  out.flush();
  if (!out) throw IoError("write failed for " + tmp);
  out.close();
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp + " to " + path);
}

}  // namespace gravreg
