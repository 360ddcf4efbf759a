// erwlab: config-driven command line for the excited-random-walk Monte Carlo lab.
//
// Subcommands: simulate, speed, sweep, derivative, cut-moments, range,
// return-prob, oracle, verify. Every run writes CSV tables plus one JSON
// summary carrying the canonical config, its hash and the seed, so any row can
// be reproduced bit-for-bit.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "erw/acceptance.hpp"
#include "erw/config.hpp"
#include "erw/estimators.hpp"
#include "erw/oracle.hpp"
#include "erw/records.hpp"
#include "erw/version.hpp"
#include "erw/walker.hpp"

namespace fs = std::filesystem;
using erw::ExperimentConfig;
using erw::fmt_g17;
using nlohmann::json;

namespace {

std::chrono::steady_clock::time_point g_start;

struct FlagSet {
  CLI::App* cmd;
  std::vector<std::pair<std::string, std::shared_ptr<std::string>>> values;
  std::string config_path;

  explicit FlagSet(CLI::App* c) : cmd(c) {
    cmd->add_option("--config", config_path, "config file (key = value lines)");
    // every config key is exposed as a string flag; typed validation happens
    // when the merged map is parsed
    for (const auto& [key, value] : ExperimentConfig{}.to_map()) {
      auto holder = std::make_shared<std::string>();
      cmd->add_option("--" + key, *holder, "config key " + key + " (default " + value + ")");
      values.emplace_back(key, holder);
    }
  }

  ExperimentConfig resolve(const std::string& experiment) const {
    std::vector<std::pair<std::string, std::string>> overrides;
    overrides.emplace_back("experiment", experiment);
    for (const auto& [key, holder] : values) {
      if (cmd->count("--" + key) > 0) overrides.emplace_back(key, *holder);
    }
    return ExperimentConfig::load(config_path, overrides);
  }
};

json config_json(const ExperimentConfig& cfg) {
  json j;
  for (const auto& [key, value] : cfg.to_map()) j[key] = value;
  return j;
}

void write_summary(const ExperimentConfig& cfg, const std::vector<std::string>& outputs,
                   const json& results) {
  json j;
  j["config"] = config_json(cfg);
  j["config_hash"] = cfg.hash();
  j["outputs"] = outputs;
  j["results"] = results;
  j["seed"] = cfg.seed;
  j["subcommand"] = cfg.experiment;
  j["tool_version"] = erw::kVersion;
  j["wall_clock_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - g_start).count();
  fs::path path = fs::path(cfg.out_dir) / (cfg.experiment + "_summary.json");
  std::ofstream out(path);
  out << j.dump(2) << "\n";
  std::cout << "wrote " << path.string() << "\n";
}

erw::RunOpts run_opts(const ExperimentConfig& cfg) {
  erw::RunOpts opts;
  opts.threads = cfg.threads;
  opts.max_rejection_attempts = cfg.max_rejection_attempts;
  opts.ess_warn_fraction = cfg.ess_warn_fraction;
  return opts;
}

std::string out_file(const ExperimentConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / name).string();
}

erw::ResultRecord base_record(const ExperimentConfig& cfg, const std::string& method) {
  erw::ResultRecord r;
  r.method = method;
  r.d = cfg.d;
  r.m = cfg.m == erw::kInfiniteCookies ? "inf" : std::to_string(cfg.m);
  r.seed = cfg.seed;
  r.config_hash = cfg.hash();
  r.window = cfg.window.future;
  return r;
}

int cmd_simulate(const ExperimentConfig& cfg) {
  erw::CookieEnvironment env = cfg.environment();
  erw::CsvTable csv([&] {
    std::vector<std::string> hdr = {"replicate", "time"};
    for (int i = 0; i < cfg.d; ++i) hdr.push_back("c" + std::to_string(i));
    hdr.insert(hdr.end(), {"E", "eta", "k", "cookie"});
    return hdr;
  }());
  for (std::int64_t r = 0; r < cfg.replicates; ++r) {
    erw::SeedSpec seed{erw::derive_phase_seed(cfg.seed, "simulate"),
                       cfg.stream0 + static_cast<std::uint64_t>(r)};
    erw::Trajectory traj = cfg.mechanism == "constructed"
                               ? erw::simulate_constructed(env, cfg.d, cfg.horizon, seed)
                               : erw::simulate_direct(env, cfg.d, cfg.horizon, seed);
    for (std::size_t j = 0; j < traj.length(); ++j) {
      std::vector<std::string> row = {std::to_string(r), std::to_string(j)};
      for (int i = 0; i < cfg.d; ++i) row.push_back(std::to_string(traj.site(j)[i]));
      row.push_back(std::to_string(static_cast<int>(traj.horiz_increments[j])));
      row.push_back(std::to_string(static_cast<int>(traj.move_flags[j])));
      row.push_back(std::to_string(traj.visit_index[j]));
      row.push_back(fmt_g17(traj.cookie_used[j]));
      csv.add_row(row);
    }
  }
  std::string path = out_file(cfg, "trajectories.csv");
  csv.write(path);
  json res;
  res["replicates"] = cfg.replicates;
  res["steps_per_replicate"] = cfg.horizon;
  write_summary(cfg, {path}, res);
  return 0;
}

int cmd_speed(const ExperimentConfig& cfg) {
  erw::CookieEnvironment env = cfg.environment();
  erw::SeedSpec seed{cfg.seed, cfg.stream0};
  erw::SpeedEstimate lln =
      erw::speed_lln(env, cfg.d, cfg.horizon, cfg.replicates, seed, run_opts(cfg));
  erw::CutRatioResult ratio =
      erw::speed_cut_ratio(env, cfg.d, cfg.window, cfg.replicates, seed, run_opts(cfg));

  erw::CsvTable csv({erw::result_csv_header()});
  csv.add_row({erw::result_csv_row(erw::record_of(lln, cfg.seed, cfg.hash()))});
  csv.add_row({erw::result_csv_row(erw::record_of(ratio.est, cfg.seed, cfg.hash()))});
  std::string path = out_file(cfg, "speed.csv");
  csv.write(path);

  json res;
  res["lln"] = {{"value", lln.value}, {"stderr", lln.se}};
  res["cut_ratio"] = {{"value", ratio.est.value},
                      {"stderr", ratio.est.se},
                      {"stderr_jackknife", ratio.se_jackknife},
                      {"acceptance_rate", ratio.acceptance_rate}};
  write_summary(cfg, {path}, res);
  std::cout << "lln      " << lln.value << " +- " << lln.se << "\n";
  std::cout << "cutratio " << ratio.est.value << " +- " << ratio.est.se << "\n";
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg) {
  erw::SeedSpec seed{cfg.seed, cfg.stream0};
  erw::SweepResult sweep = erw::speed_girsanov_sweep(cfg.d, cfg.m, cfg.beta_grid, cfg.window,
                                                     cfg.replicates, seed, run_opts(cfg));
  erw::CsvTable csv({"beta", "v_xt", "v_xt_stderr", "v_numv", "v_numv_stderr", "ess", "ess_low",
                     "denominator", "denominator_stderr", "truncation_rate", "seed",
                     "config_hash"});
  for (const erw::SweepPoint& pt : sweep.points) {
    csv.add_row({fmt_g17(pt.beta), fmt_g17(pt.v_xt.value), fmt_g17(pt.v_xt.se),
                 fmt_g17(pt.v_numv.value), fmt_g17(pt.v_numv.se), fmt_g17(pt.ess),
                 pt.ess_low ? "1" : "0", fmt_g17(sweep.denom.value), fmt_g17(sweep.denom.se),
                 fmt_g17(sweep.truncation_rate), std::to_string(cfg.seed), cfg.hash()});
  }
  std::string path = out_file(cfg, "sweep.csv");
  csv.write(path);
  json res;
  res["denominator"] = sweep.denom.value;
  res["points"] = json::array();
  for (const erw::SweepPoint& pt : sweep.points)
    res["points"].push_back({{"beta", pt.beta}, {"v", pt.v_xt.value}, {"stderr", pt.v_xt.se}});
  write_summary(cfg, {path}, res);
  for (const erw::SweepPoint& pt : sweep.points)
    std::cout << "beta " << pt.beta << "  v " << pt.v_xt.value << " +- " << pt.v_xt.se
              << "  ess " << pt.ess << (pt.ess_low ? "  [low ESS]" : "") << "\n";
  return 0;
}

int cmd_derivative(const ExperimentConfig& cfg) {
  erw::SeedSpec seed{cfg.seed, cfg.stream0};
  erw::CsvTable csv({"mode", "d", "m", "beta_or_t", "estimate", "stderr", "term1", "term2", "ess",
                     "truncation_rate", "seed", "config_hash"});
  json res;
  std::string ms = cfg.m == erw::kInfiniteCookies ? "inf" : std::to_string(cfg.m);
  if (cfg.mode == "zero") {
    erw::DerivativeAtZeroResult dz =
        erw::derivative_at_zero(cfg.d, cfg.window, cfg.replicates, seed, run_opts(cfg));
    csv.add_row({"zero", std::to_string(cfg.d), "1", "0", fmt_g17(dz.value.value),
                 fmt_g17(dz.value.se), "", "", "", fmt_g17(dz.truncation_rate),
                 std::to_string(cfg.seed), cfg.hash()});
    res["value"] = dz.value.value;
    res["stderr"] = dz.value.se;
  } else if (cfg.mode == "mbeta") {
    erw::MDerivativeResult md = erw::derivative_v_m_beta(cfg.d, cfg.m, cfg.beta, cfg.window,
                                                         cfg.replicates, seed, run_opts(cfg));
    csv.add_row({"mbeta", std::to_string(cfg.d), ms, fmt_g17(cfg.beta), fmt_g17(md.total.value),
                 fmt_g17(md.total.se), fmt_g17(md.term1.value), fmt_g17(md.term2.value),
                 fmt_g17(md.ess), fmt_g17(md.truncation_rate), std::to_string(cfg.seed),
                 cfg.hash()});
    res["value"] = md.total.value;
    res["stderr"] = md.total.se;
    res["ess"] = md.ess;
  } else if (cfg.mode == "coupled") {
    erw::CookieEnvironment pair = cfg.environment();
    erw::CoupledDerivativeResult cd =
        erw::coupled_derivative(pair, cfg.t, cfg.d, cfg.window, cfg.env_draws,
                                cfg.replicates_per_env, seed, run_opts(cfg));
    csv.add_row({"coupled", std::to_string(cfg.d), ms, fmt_g17(cfg.t), fmt_g17(cd.total.value),
                 fmt_g17(cd.total.se), fmt_g17(cd.term1.value), fmt_g17(cd.term2.value),
                 fmt_g17(cd.ess_min), fmt_g17(cd.truncation_rate), std::to_string(cfg.seed),
                 cfg.hash()});
    res["value"] = cd.total.value;
    res["stderr"] = cd.total.se;
    res["between_variance"] = cd.between_variance;
    res["within_variance"] = cd.within_variance;
    res["term2_ge"] = cd.term2_ge.value;
    res["term2_ge_stderr"] = cd.term2_ge.se;
  } else {
    throw std::invalid_argument("derivative: mode must be zero | mbeta | coupled");
  }
  std::string path = out_file(cfg, "derivative.csv");
  csv.write(path);
  write_summary(cfg, {path}, res);
  std::cout << "derivative(" << cfg.mode << ") = " << res["value"] << " +- " << res["stderr"]
            << "\n";
  return 0;
}

int cmd_cut_moments(const ExperimentConfig& cfg) {
  erw::SeedSpec seed{cfg.seed, cfg.stream0};
  erw::CutMomentsResult res =
      erw::palm_T_moments(cfg.d, cfg.window, cfg.replicates, seed, cfg.threads);
  erw::CsvTable csv({"quantity", "d", "window", "replicates", "estimate", "stderr",
                     "truncation_rate", "seed", "config_hash"});
  auto row = [&](const std::string& name, double est, double se) {
    csv.add_row({name, std::to_string(cfg.d), std::to_string(cfg.window.future),
                 std::to_string(cfg.replicates), fmt_g17(est), fmt_g17(se),
                 fmt_g17(res.palm_truncation_rate()), std::to_string(cfg.seed), cfg.hash()});
  };
  row("palm_E_T", res.palm_T.mean(), res.palm_T.stderr_mean());
  row("palm_E_T2", res.palm_T2.mean(), res.palm_T2.stderr_mean());
  row("palm_E_T3", res.palm_T3.mean(), res.palm_T3.stderr_mean());
  row("P_zero_cut", res.p_cut(), res.p_cut_se());
  row("E_T_indicator", res.T_indicator.mean(), res.T_indicator.stderr_mean());
  row("E_T", res.uncond_T.mean(), res.uncond_T.stderr_mean());
  row("E_T2", res.uncond_T2.mean(), res.uncond_T2.stderr_mean());
  std::string path = out_file(cfg, "cut_moments.csv");
  csv.write(path);

  json jr;
  jr["palm_E_T"] = res.palm_T.mean();
  jr["P_zero_cut"] = res.p_cut();
  jr["E_T_indicator"] = res.T_indicator.mean();
  jr["palm_truncation_rate"] = res.palm_truncation_rate();
  write_summary(cfg, {path}, jr);
  std::cout << "hatE(T) " << res.palm_T.mean() << "  P(0 in D) " << res.p_cut()
            << "  E[T 1_D] " << res.T_indicator.mean() << "\n";
  return 0;
}

int cmd_range(const ExperimentConfig& cfg) {
  erw::SeedSpec seed{cfg.seed, cfg.stream0};
  std::int64_t palm_reps = cfg.d >= 6 ? cfg.replicates : 0;
  erw::RangeConstantResult res = erw::range_constant(cfg.d, cfg.horizon, cfg.replicates,
                                                     cfg.window, palm_reps, seed, run_opts(cfg));
  erw::CsvTable csv({"method", "d", "horizon", "replicates", "estimate", "stderr", "seed",
                     "config_hash"});
  csv.add_row({"range_lln", std::to_string(cfg.d), std::to_string(cfg.horizon),
               std::to_string(cfg.replicates), fmt_g17(res.lln.value), fmt_g17(res.lln.se),
               std::to_string(cfg.seed), cfg.hash()});
  if (palm_reps > 0)
    csv.add_row({"range_palm", std::to_string(cfg.d), std::to_string(cfg.window.future),
                 std::to_string(palm_reps), fmt_g17(res.palm.value), fmt_g17(res.palm.se),
                 std::to_string(cfg.seed), cfg.hash()});
  std::string path = out_file(cfg, "range.csv");
  csv.write(path);
  json jr;
  jr["lln"] = res.lln.value;
  jr["palm"] = res.palm.value;
  write_summary(cfg, {path}, jr);
  std::cout << "R(0) lln " << res.lln.value << " +- " << res.lln.se << "\n";
  return 0;
}

int cmd_return_prob(const ExperimentConfig& cfg) {
  erw::CsvTable csv({"dim", "eps", "n", "method", "value"});
  for (int n = 0; n <= cfg.n; ++n) {
    double q = erw::return_probability(cfg.dim, cfg.eps, n, erw::ReturnProbMethod::Quadrature);
    csv.add_row({std::to_string(cfg.dim), fmt_g17(cfg.eps), std::to_string(n), "quadrature",
                 fmt_g17(q)});
    double side = 2.0 * n + 1.0;
    if (cfg.dim <= 6 && std::pow(side, cfg.dim) <= 4.5e7) {
      double c = erw::return_probability(cfg.dim, cfg.eps, n, erw::ReturnProbMethod::Convolution);
      csv.add_row({std::to_string(cfg.dim), fmt_g17(cfg.eps), std::to_string(n), "convolution",
                   fmt_g17(c)});
    }
  }
  std::string path = out_file(cfg, "return_prob.csv");
  csv.write(path);
  json jr;
  jr["rows"] = 2 * (cfg.n + 1);
  write_summary(cfg, {path}, jr);
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_oracle(const ExperimentConfig& cfg) {
  erw::CookieEnvironment env = cfg.environment();
  auto atoms = erw::oracle::enumerate_paths(cfg.d, cfg.n, env);
  erw::CsvTable csv({"path", "probability"});
  for (const erw::oracle::PathAtom& a : atoms) {
    std::string code;
    for (std::uint8_t c : a.path) {
      if (!code.empty()) code += ".";
      code += std::to_string(static_cast<int>(c));
    }
    csv.add_row({code, fmt_g17(a.probability)});
  }
  std::string path = out_file(cfg, "oracle.csv");
  csv.write(path);
  json jr;
  jr["paths"] = atoms.size();
  write_summary(cfg, {path}, jr);
  std::cout << "wrote " << path << " (" << atoms.size() << " paths)\n";
  return 0;
}

int cmd_verify(const ExperimentConfig& cfg) {
  erw::AcceptanceOptions opts;
  opts.threads = cfg.threads;
  opts.seed = cfg.seed;
  std::ostringstream captured;
  struct Tee : std::streambuf {
    std::streambuf *a, *b;
    int overflow(int ch) override {
      a->sputc(static_cast<char>(ch));
      b->sputc(static_cast<char>(ch));
      return ch;
    }
  } tee;
  tee.a = std::cout.rdbuf();
  tee.b = captured.rdbuf();
  std::ostream log(&tee);

  auto results = erw::run_acceptance(opts, log);
  bool ok = erw::all_passed(results);
  log << (ok ? "VERIFY: all criteria passed" : "VERIFY: FAILURES present") << std::endl;

  fs::create_directories(cfg.out_dir);
  std::ofstream out(fs::path(cfg.out_dir) / "verify.txt");
  out << captured.str();
  json jr;
  jr["passed"] = ok;
  jr["criteria"] = json::array();
  for (const auto& r : results)
    jr["criteria"].push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}});
  write_summary(cfg, {(fs::path(cfg.out_dir) / "verify.txt").string()}, jr);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"erwlab: excited random walks, cut times and Girsanov estimators"};
  app.require_subcommand(1);

  std::vector<std::pair<std::string, std::unique_ptr<FlagSet>>> subs;
  for (const char* name : {"simulate", "speed", "sweep", "derivative", "cut-moments", "range",
                           "return-prob", "oracle", "verify"}) {
    CLI::App* cmd = app.add_subcommand(name);
    subs.emplace_back(name, std::make_unique<FlagSet>(cmd));
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (auto& [name, flags] : subs) {
      if (!flags->cmd->parsed()) continue;
      ExperimentConfig cfg = flags->resolve(name);
      g_start = std::chrono::steady_clock::now();
      int rc;
      if (name == "simulate") rc = cmd_simulate(cfg);
      else if (name == "speed") rc = cmd_speed(cfg);
      else if (name == "sweep") rc = cmd_sweep(cfg);
      else if (name == "derivative") rc = cmd_derivative(cfg);
      else if (name == "cut-moments") rc = cmd_cut_moments(cfg);
      else if (name == "range") rc = cmd_range(cfg);
      else if (name == "return-prob") rc = cmd_return_prob(cfg);
      else if (name == "oracle") rc = cmd_oracle(cfg);
      else rc = cmd_verify(cfg);
      auto t1 = std::chrono::steady_clock::now();
      std::cerr << "elapsed " << std::chrono::duration<double>(t1 - g_start).count() << "s\n";
      return rc;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 2;
}
