#include "erw/estimators.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "erw/parallel.hpp"
#include "erw/site_map.hpp"
#include "erw/walker.hpp"

namespace erw {

const char* speed_method_name(SpeedMethod m) {
  switch (m) {
    case SpeedMethod::LLN: return "lln";
    case SpeedMethod::CutRatio: return "cut-ratio";
    case SpeedMethod::Girsanov: return "girsanov";
  }
  return "?";
}

namespace {

SeedSpec phase_spec(SeedSpec seed, std::string_view phase) {
  return {derive_phase_seed(seed.master_seed, phase), seed.stream_id};
}

void check_common(int d, std::int64_t replicates) {
  if (d < 2) throw std::invalid_argument("estimator: d >= 2 required");
  if (replicates < 2) throw std::invalid_argument("estimator: replicates >= 2 required");
}

/// Effective sample size of the weights exp(lw) over contributing samples.
struct EssAccum {
  double max_lw = -std::numeric_limits<double>::infinity();
  long double wsum = 0.0L, w2sum = 0.0L;
  std::int64_t n = 0;

  void scan_max(double lw) { max_lw = std::max(max_lw, lw); }
  void add(double lw) {
    long double w = std::exp(static_cast<long double>(lw) - max_lw);
    wsum += w;
    w2sum += w * w;
    ++n;
  }
  double ess() const {
    return w2sum > 0.0L ? static_cast<double>(wsum * wsum / w2sum) : 0.0;
  }
};

}  // namespace

// --- LLN speed -----------------------------------------------------------------------

SpeedEstimate speed_lln(const CookieEnvironment& env, int d, std::int64_t horizon,
                        std::int64_t replicates, SeedSpec seed, const RunOpts& opts) {
  check_common(d, replicates);
  if (horizon < 1) throw std::invalid_argument("speed_lln: horizon >= 1 required");
  SeedSpec ps = phase_spec(seed, "lln");
  std::uint64_t env_phase = derive_phase_seed(seed.master_seed, "lln-env");
  bool resample_env = env.kind() != EnvKind::Deterministic;

  // Infinite identical cookies never exhaust: the walk is a plain biased walk
  // and needs no visit bookkeeping.
  bool fast_biased = env.kind() == EnvKind::Deterministic && env.infinite_m();

  std::vector<MeanVar> partial(static_cast<std::size_t>(num_chunks_for(replicates)));
  parallel_chunks(replicates, opts.threads, [&](std::int64_t ci, std::int64_t b, std::int64_t e) {
    WalkState state(d);
    std::int32_t zero[kMaxDim] = {};
    for (std::int64_t r = b; r < e; ++r) {
      std::uint64_t sid = ps.stream_id + static_cast<std::uint64_t>(r);
      RandomStream rng({ps.master_seed, sid});
      double xn;
      if (fast_biased) {
        double bias = env.beta(zero, d, 1);
        std::int64_t x = 0;
        for (std::int64_t j = 0; j < horizon; ++j) {
          double u = rng.next_double() * (2.0 * d);
          if (u < 1.0 + bias)
            ++x;
          else if (u < 2.0)
            --x;
        }
        xn = static_cast<double>(x);
      } else if (resample_env) {
        CookieEnvironment env_r = env.with_seed(mix64(env_phase ^ sid));
        walk_direct(env_r, d, horizon, rng, state, [](const StepEvent&) {});
        xn = static_cast<double>(state.pos()[0]);
      } else {
        walk_direct(env, d, horizon, rng, state, [](const StepEvent&) {});
        xn = static_cast<double>(state.pos()[0]);
      }
      partial[static_cast<std::size_t>(ci)].add(xn / static_cast<double>(horizon));
    }
  });
  MeanVar mv;
  for (const MeanVar& p : partial) mv.merge(p);

  SpeedEstimate est;
  est.method = SpeedMethod::LLN;
  est.d = d;
  est.m = env.m();
  est.beta_or_t = env.kind() == EnvKind::CoupledPair ? env.t() : 0.0;
  est.value = mv.mean();
  est.se = mv.stderr_mean();
  est.replicates = replicates;
  est.horizon = horizon;
  return est;
}

// --- cut-ratio speed -----------------------------------------------------------------

CutRatioResult speed_cut_ratio(const CookieEnvironment& env, int d, Window window,
                               std::int64_t replicates, SeedSpec seed, const RunOpts& opts) {
  check_common(d, replicates);
  SeedSpec ps = phase_spec(seed, "cut-ratio");
  std::uint64_t env_phase = derive_phase_seed(seed.master_seed, "cut-ratio-env");
  bool resample_env = env.kind() != EnvKind::Deterministic;
  const LazyWalkSpec vert = LazyWalkSpec::vertical_of(d);

  std::int64_t chunks = num_chunks_for(replicates);
  struct ChunkAcc {
    CrossMoments<2> xt_t;
    std::int64_t attempts = 0;
    double sum_x = 0.0, sum_t = 0.0;
  };
  std::vector<ChunkAcc> partial(static_cast<std::size_t>(chunks));

  parallel_chunks(replicates, opts.threads, [&](std::int64_t ci, std::int64_t b, std::int64_t e) {
    ChunkAcc& acc = partial[static_cast<std::size_t>(ci)];
    VerticalPath path(d - 1, window.past, window.future);
    CutDetector detector(d - 1);
    CutRecord rec;
    SiteHashMap<std::int32_t> visits(d);
    std::vector<std::int32_t> site(static_cast<std::size_t>(d), 0);
    for (std::int64_t r = b; r < e; ++r) {
      std::uint64_t sid = ps.stream_id + static_cast<std::uint64_t>(r);
      RandomStream rng({ps.master_seed, sid});
      CookieEnvironment env_r = resample_env ? env.with_seed(mix64(env_phase ^ sid)) : env;
      acc.attempts += sample_palm(vert, rng, path, detector, rec, opts.max_rejection_attempts);

      visits.clear();
      std::fill(site.begin(), site.end(), 0);
      std::int32_t x = 0;
      visits[site.data()] = 1;
      std::int32_t k = 1;
      for (std::int64_t j = 0; j < rec.T; ++j) {
        if (path.hold(j)) {
          double bcookie = env_r.beta(site.data(), d, k);
          int ej = rng.next_bernoulli(0.5 * (1.0 + bcookie)) ? +1 : -1;
          x += ej;
        }
        site[0] = x;
        std::memcpy(site.data() + 1, path.at(j + 1), sizeof(std::int32_t) * (d - 1));
        k = ++visits[site.data()];
      }
      double comps[2] = {static_cast<double>(x), static_cast<double>(rec.T)};
      acc.xt_t.add(comps);
      acc.sum_x += comps[0];
      acc.sum_t += comps[1];
    }
  });

  CrossMoments<2> cm;
  std::vector<double> chunk_x, chunk_t;
  std::int64_t attempts = 0;
  for (const ChunkAcc& acc : partial) {
    cm.merge(acc.xt_t);
    chunk_x.push_back(acc.sum_x);
    chunk_t.push_back(acc.sum_t);
    attempts += acc.attempts;
  }

  CutRatioResult res;
  Estimate ratio = ratio_of_means(cm, 0, 1);
  res.est.method = SpeedMethod::CutRatio;
  res.est.d = d;
  res.est.m = env.m();
  res.est.value = ratio.value;
  res.est.se = ratio.se;
  res.est.replicates = replicates;
  res.est.window = window;
  res.se_jackknife = chunk_x.size() >= 2 ? jackknife_ratio_se(chunk_x, chunk_t) : 0.0;
  res.acceptance_rate = attempts > 0 ? static_cast<double>(replicates) / static_cast<double>(attempts) : 0.0;
  res.attempts = attempts;
  return res;
}

// --- the shared P_0 batch ------------------------------------------------------------

P0Batch run_p0_batch(int d, int m, Window window, std::int64_t replicates, SeedSpec seed,
                     const RunOpts& opts) {
  check_common(d, replicates);
  if (m < 1) throw std::invalid_argument("run_p0_batch: m >= 1 required");
  P0Batch batch;
  batch.d = d;
  batch.m = m;
  batch.window = window;
  batch.replicates = replicates;
  batch.samples.assign(static_cast<std::size_t>(replicates), P0Sample{});
  const LazyWalkSpec vert = LazyWalkSpec::vertical_of(d);

  std::int64_t chunks = num_chunks_for(replicates);
  struct Counts {
    std::int64_t zero_cut = 0, zero_trunc = 0;
  };
  std::vector<Counts> partial(static_cast<std::size_t>(chunks));

  parallel_chunks(replicates, opts.threads, [&](std::int64_t ci, std::int64_t b, std::int64_t e) {
    Counts& cnt = partial[static_cast<std::size_t>(ci)];
    VerticalPath path(d - 1, window.past, window.future);
    CutDetector detector(d - 1);
    SiteHashMap<std::int32_t> visits(d);
    std::vector<std::int32_t> site(static_cast<std::size_t>(d), 0);
    for (std::int64_t r = b; r < e; ++r) {
      RandomStream rng({seed.master_seed, seed.stream_id + static_cast<std::uint64_t>(r)});
      generate_two_sided(vert, rng, path);
      CutRecord rec = detector.detect(path);
      P0Sample& s = batch.samples[static_cast<std::size_t>(r)];
      if (!rec.zero_is_cut) continue;
      s.zero_cut = 1;
      ++cnt.zero_cut;
      if (rec.truncated) {
        s.truncated = 1;
        ++cnt.zero_trunc;
        continue;
      }
      s.T = static_cast<std::int32_t>(rec.T);

      visits.clear();
      std::fill(site.begin(), site.end(), 0);
      std::int32_t x = 0;
      visits[site.data()] = 1;
      std::int32_t k = 1;
      for (std::int64_t j = 0; j < rec.T; ++j) {
        if (path.hold(j)) {
          int ej = rng.next_bernoulli(0.5) ? +1 : -1;
          if (visited_fewer_than(k, m)) {
            if (ej > 0)
              ++s.n_plus;
            else
              ++s.n_minus;
          }
          x += ej;
        }
        if (j == rec.T - 1) s.range_T = static_cast<std::int32_t>(visits.size());
        site[0] = x;
        std::memcpy(site.data() + 1, path.at(j + 1), sizeof(std::int32_t) * (d - 1));
        k = ++visits[site.data()];
      }
      s.x_T = x;
    }
  });
  for (const Counts& cnt : partial) {
    batch.n_zero_cut += cnt.zero_cut;
    batch.n_zero_trunc += cnt.zero_trunc;
  }
  return batch;
}

// --- Girsanov sweep ------------------------------------------------------------------

SweepResult sweep_from_batch(const P0Batch& batch, const std::vector<double>& beta_grid,
                             const RunOpts& opts) {
  SweepResult res;
  res.d = batch.d;
  res.m = batch.m;
  res.window = batch.window;
  res.replicates = batch.replicates;
  res.truncation_rate = batch.truncation_rate();

  {
    MeanVar den;
    for (const P0Sample& s : batch.samples)
      den.add(s.zero_cut && !s.truncated ? static_cast<double>(s.T) : 0.0);
    res.denom = {den.mean(), den.stderr_mean()};
  }

  for (double beta : beta_grid) {
    if (!(beta >= 0.0 && beta < 1.0))
      throw std::invalid_argument("sweep: beta grid must lie in [0,1)");
    double lp = std::log1p(beta), lm = std::log1p(-beta);
    CrossMoments<2> cm_xt, cm_nv;
    EssAccum ess;
    for (const P0Sample& s : batch.samples)
      if (s.zero_cut && !s.truncated) ess.scan_max(s.n_plus * lp + s.n_minus * lm);
    for (const P0Sample& s : batch.samples) {
      double den = 0.0, num_xt = 0.0, num_nv = 0.0;
      if (s.zero_cut && !s.truncated) {
        den = static_cast<double>(s.T);
        double lw = s.n_plus * lp + s.n_minus * lm;
        double w = std::exp(lw);
        num_xt = s.x_T * w;
        num_nv = beta * static_cast<double>(s.n_plus + s.n_minus) * w;
        ess.add(lw);
      }
      double a[2] = {num_xt, den};
      cm_xt.add(a);
      double b[2] = {num_nv, den};
      cm_nv.add(b);
    }
    SweepPoint pt;
    pt.beta = beta;
    pt.v_xt = ratio_of_means(cm_xt, 0, 1);
    pt.v_numv = ratio_of_means(cm_nv, 0, 1);
    pt.ess = ess.ess();
    pt.ess_low = pt.ess < opts.ess_warn_fraction * static_cast<double>(ess.n);
    res.points.push_back(pt);
  }
  return res;
}

SweepResult speed_girsanov_sweep(int d, int m, const std::vector<double>& beta_grid, Window window,
                                 std::int64_t replicates, SeedSpec seed, const RunOpts& opts) {
  P0Batch batch = run_p0_batch(d, m, window, replicates, phase_spec(seed, "sweep"), opts);
  return sweep_from_batch(batch, beta_grid, opts);
}

// --- derivative at zero ----------------------------------------------------------------

DerivativeAtZeroResult derivative_at_zero_from_batch(const P0Batch& batch) {
  if (batch.m != 1) throw std::invalid_argument("derivative_at_zero: batch must use m = 1");
  MeanVar mv;
  for (const P0Sample& s : batch.samples) {
    // N_T 1_D / d = (n_plus + n_minus) on the event, 0 off it
    mv.add(s.zero_cut && !s.truncated ? static_cast<double>(s.n_plus + s.n_minus) : 0.0);
  }
  DerivativeAtZeroResult res;
  res.value = {mv.mean(), mv.stderr_mean()};
  res.window = batch.window;
  res.replicates = batch.replicates;
  res.truncation_rate = batch.truncation_rate();
  return res;
}

DerivativeAtZeroResult derivative_at_zero(int d, Window window, std::int64_t replicates,
                                          SeedSpec seed, const RunOpts& opts) {
  P0Batch batch = run_p0_batch(d, 1, window, replicates, phase_spec(seed, "deriv0"), opts);
  return derivative_at_zero_from_batch(batch);
}

// --- range constant ---------------------------------------------------------------------

RangeConstantResult range_constant(int d, std::int64_t horizon, std::int64_t replicates,
                                   Window window, std::int64_t palm_replicates, SeedSpec seed,
                                   const RunOpts& opts) {
  if (d < 1) throw std::invalid_argument("range_constant: d >= 1 required");
  if (horizon < 1 || replicates < 2) throw std::invalid_argument("range_constant: bad budget");
  SeedSpec ps = phase_spec(seed, "range");

  std::vector<MeanVar> partial(static_cast<std::size_t>(num_chunks_for(replicates)));
  parallel_chunks(replicates, opts.threads, [&](std::int64_t ci, std::int64_t b, std::int64_t e) {
    SiteHashMap<std::int32_t> visits(d);
    std::vector<std::int32_t> pos(static_cast<std::size_t>(d), 0);
    for (std::int64_t r = b; r < e; ++r) {
      RandomStream rng({ps.master_seed, ps.stream_id + static_cast<std::uint64_t>(r)});
      visits.clear();
      std::fill(pos.begin(), pos.end(), 0);
      visits.insert(pos.data());
      for (std::int64_t j = 1; j < horizon; ++j) {
        std::uint32_t mv = rng.next_index(static_cast<std::uint32_t>(2 * d));
        pos[mv >> 1] += (mv & 1) ? -1 : +1;
        visits.insert(pos.data());
      }
      partial[static_cast<std::size_t>(ci)].add(static_cast<double>(visits.size()) /
                                                static_cast<double>(horizon));
    }
  });
  MeanVar lln;
  for (const MeanVar& p : partial) lln.merge(p);

  RangeConstantResult res;
  res.lln = {lln.mean(), lln.stderr_mean()};
  res.horizon = horizon;
  res.replicates = replicates;
  res.palm_replicates = palm_replicates;
  if (palm_replicates >= 2) {
    if (d < 2) throw std::invalid_argument("range_constant: palm form needs d >= 2");
    P0Batch batch =
        run_p0_batch(d, 1, window, palm_replicates, phase_spec(seed, "range-palm"), opts);
    MeanVar mv;
    for (const P0Sample& s : batch.samples)
      mv.add(s.zero_cut && !s.truncated ? static_cast<double>(s.range_T) : 0.0);
    res.palm = {mv.mean(), mv.stderr_mean()};
  }
  return res;
}

RangeVsNResult range_vs_n_statistic(int d, std::int64_t horizon, std::int64_t replicates,
                                    SeedSpec seed, const RunOpts& opts) {
  check_common(d, replicates);
  SeedSpec ps = phase_spec(seed, "range-vs-n");
  std::int64_t chunks = num_chunks_for(replicates);
  struct Acc {
    CrossMoments<2> rn_nn;
  };
  std::vector<Acc> partial(static_cast<std::size_t>(chunks));
  parallel_chunks(replicates, opts.threads, [&](std::int64_t ci, std::int64_t b, std::int64_t e) {
    SiteHashMap<std::int32_t> visits(d);
    std::vector<std::int32_t> pos(static_cast<std::size_t>(d), 0);
    for (std::int64_t r = b; r < e; ++r) {
      RandomStream rng({ps.master_seed, ps.stream_id + static_cast<std::uint64_t>(r)});
      visits.clear();
      std::fill(pos.begin(), pos.end(), 0);
      visits[pos.data()] = 1;
      std::int32_t k = 1;
      double rn = 0.0, nn = 0.0;
      for (std::int64_t j = 0; j < horizon; ++j) {
        bool fresh = k == 1;
        if (fresh) rn += 1.0;
        std::uint32_t mv = rng.next_index(static_cast<std::uint32_t>(2 * d));
        if (fresh && (mv >> 1) == 0) nn += 1.0;  // horizontal step at a fresh site
        pos[mv >> 1] += (mv & 1) ? -1 : +1;
        k = ++visits[pos.data()];
      }
      double comps[2] = {rn, static_cast<double>(d) * nn};
      partial[static_cast<std::size_t>(ci)].rn_nn.add(comps);
    }
  });
  CrossMoments<2> cm;
  for (const Acc& acc : partial) cm.merge(acc.rn_nn);
  RangeVsNResult res;
  double se_r = std::sqrt(cm.cov(0, 0) / static_cast<double>(cm.n));
  double se_n = std::sqrt(cm.cov(1, 1) / static_cast<double>(cm.n));
  res.r_n = {cm.mean(0), se_r};
  res.n_n = {cm.mean(1), se_n};
  return res;
}

// --- dv/dbeta(m, beta) -------------------------------------------------------------------

MDerivativeResult m_derivative_from_batch(const P0Batch& batch, double beta, const RunOpts& opts) {
  if (!(beta >= 0.0 && beta < 1.0))
    throw std::invalid_argument("derivative_v_m_beta: beta in [0,1) required");
  double lp = std::log1p(beta), lm = std::log1p(-beta);
  double d = static_cast<double>(batch.d);

  CrossMoments<3> cm;  // A = N M 1_D, B = N M U 1_D, C = T 1_D
  EssAccum ess;
  for (const P0Sample& s : batch.samples)
    if (s.zero_cut && !s.truncated) ess.scan_max(s.n_plus * lp + s.n_minus * lm);
  for (const P0Sample& s : batch.samples) {
    double comps[3] = {0.0, 0.0, 0.0};
    if (s.zero_cut && !s.truncated) {
      double lw = s.n_plus * lp + s.n_minus * lm;
      double w = std::exp(lw);
      double N = d * static_cast<double>(s.n_plus + s.n_minus);
      double U = s.n_plus / (1.0 + beta) - s.n_minus / (1.0 - beta);
      comps[0] = N * w;
      comps[1] = N * w * U;
      comps[2] = static_cast<double>(s.T);
      ess.add(lw);
    }
    cm.add(comps);
  }

  MDerivativeResult res;
  double A = cm.mean(0), B = cm.mean(1), C = cm.mean(2);
  if (C == 0.0) throw std::runtime_error("derivative_v_m_beta: no accepted samples");
  res.total.value = (A + beta * B) / (d * C);
  double grad[3] = {1.0 / (d * C), beta / (d * C), -(A + beta * B) / (d * C * C)};
  res.total.se = delta_se(cm, grad);
  Estimate t1 = ratio_of_means(cm, 0, 2);
  Estimate t2 = ratio_of_means(cm, 1, 2);
  res.term1 = {t1.value / d, t1.se / d};
  res.term2 = {beta * t2.value / d, beta * t2.se / d};
  res.ess = ess.ess();
  res.ess_low = res.ess < opts.ess_warn_fraction * static_cast<double>(ess.n);
  res.truncation_rate = batch.truncation_rate();
  res.replicates = batch.replicates;
  return res;
}

MDerivativeResult derivative_v_m_beta(int d, int m, double beta, Window window,
                                      std::int64_t replicates, SeedSpec seed,
                                      const RunOpts& opts) {
  P0Batch batch = run_p0_batch(d, m, window, replicates, phase_spec(seed, "mderiv"), opts);
  return m_derivative_from_batch(batch, beta, opts);
}

// --- coupled df/dt -----------------------------------------------------------------------

CoupledDerivativeResult coupled_derivative(const CookieEnvironment& pair, double t, int d,
                                           Window window, std::int64_t env_draws,
                                           std::int64_t replicates_per_env, SeedSpec seed,
                                           const RunOpts& opts) {
  if (pair.kind() != EnvKind::CoupledPair)
    throw std::invalid_argument("coupled_derivative: environment must be a coupled pair");
  if (!(pair.sigma_bound() < 1.0))
    throw std::invalid_argument("coupled_derivative: bounded pair (sigma < 1) required");
  check_common(d, env_draws * replicates_per_env);
  if (env_draws < 2) throw std::invalid_argument("coupled_derivative: env_draws >= 2 required");
  const CookieEnvironment env_t = pair.at_t(t);
  const int m = pair.m();
  const LazyWalkSpec vert = LazyWalkSpec::vertical_of(d);
  SeedSpec ps = phase_spec(seed, "coupled");
  std::uint64_t env_phase = derive_phase_seed(seed.master_seed, "coupled-env");

  struct EnvAcc {
    CrossMoments<4> cm;  // t1 M 1_D, N U M 1_D, (i<j part) M 1_D, T 1_D
    MeanVar num_total;   // per-sample t1 + t2 contribution (for the variance split)
    EssAccum ess;
    std::int64_t zero_cut = 0, zero_trunc = 0;
  };
  std::vector<EnvAcc> envs(static_cast<std::size_t>(env_draws));

  parallel_chunks(
      env_draws * replicates_per_env, opts.threads,
      [&](std::int64_t ci, std::int64_t b, std::int64_t e) {
        EnvAcc& acc = envs[static_cast<std::size_t>(ci)];
        CookieEnvironment env_e =
            env_t.with_seed(mix64(env_phase ^ static_cast<std::uint64_t>(ci)));
        VerticalPath path(d - 1, window.past, window.future);
        CutDetector detector(d - 1);
        SiteHashMap<std::int32_t> visits(d);
        std::vector<std::int32_t> site(static_cast<std::size_t>(d), 0);
        struct Sample {
          double t1 = 0.0, t2 = 0.0, t2lt = 0.0, den = 0.0, lw = 0.0;
          bool contributing = false;
        };
        std::vector<Sample> local;
        local.reserve(static_cast<std::size_t>(e - b));

        for (std::int64_t idx = b; idx < e; ++idx) {
          std::int64_t r = idx - ci * replicates_per_env;
          std::uint64_t sid = ps.stream_id + (static_cast<std::uint64_t>(ci) << 32) +
                              static_cast<std::uint64_t>(r);
          RandomStream rng({ps.master_seed, sid});
          generate_two_sided(vert, rng, path);
          CutRecord rec = detector.detect(path);
          Sample smp;
          if (rec.zero_is_cut) {
            ++acc.zero_cut;
            if (rec.truncated) {
              ++acc.zero_trunc;
            } else {
              visits.clear();
              std::fill(site.begin(), site.end(), 0);
              std::int32_t x = 0;
              visits[site.data()] = 1;
              std::int32_t k = 1;
              double lw = 0.0;
              double term1_raw = 0.0, coeff_sum = 0.0, u_sum = 0.0, lt = 0.0;
              for (std::int64_t j = 0; j < rec.T; ++j) {
                if (path.hold(j)) {
                  int ej = rng.next_bernoulli(0.5) ? +1 : -1;
                  if (visited_fewer_than(k, m)) {
                    auto [b1, b2] = env_e.beta_pair(site.data(), d, k);
                    double bt = (1.0 - t) * b1 + t * b2;
                    double diff = b2 - b1;
                    lw += std::log1p(ej * bt);
                    term1_raw += diff;
                    lt += bt * u_sum;  // pairs i < j
                    coeff_sum += bt;
                    u_sum += diff * ej / (1.0 + bt * ej);
                  }
                  x += ej;
                }
                site[0] = x;
                std::memcpy(site.data() + 1, path.at(j + 1), sizeof(std::int32_t) * (d - 1));
                k = ++visits[site.data()];
              }
              double w = std::exp(lw);
              smp.t1 = term1_raw * w;
              smp.t2 = coeff_sum * u_sum * w;
              smp.t2lt = lt * w;
              smp.den = static_cast<double>(rec.T);
              smp.lw = lw;
              smp.contributing = true;
            }
          }
          local.push_back(smp);
        }

        for (const Sample& smp : local)
          if (smp.contributing) acc.ess.scan_max(smp.lw);
        for (const Sample& smp : local) {
          double comps[4] = {smp.t1, smp.t2, smp.t2lt, smp.den};
          acc.cm.add(comps);
          acc.num_total.add(smp.t1 + smp.t2);
          if (smp.contributing) acc.ess.add(smp.lw);
        }
      },
      /*chunk=*/replicates_per_env);

  // Cluster-level (per-environment) means feed the errors: samples within one
  // environment draw share that draw and are not independent.
  CrossMoments<4> lvl;  // per-env means of (t1, t2, t2lt, den)
  MeanVar between;
  double within = 0.0;
  double ess_min = std::numeric_limits<double>::infinity();
  std::int64_t zero_cut = 0, zero_trunc = 0;
  for (const EnvAcc& acc : envs) {
    double comps[4] = {acc.cm.mean(0), acc.cm.mean(1), acc.cm.mean(2), acc.cm.mean(3)};
    lvl.add(comps);
    between.add(comps[0] + comps[1]);
    within += acc.num_total.variance() / static_cast<double>(replicates_per_env);
    ess_min = std::min(ess_min, acc.ess.ess());
    zero_cut += acc.zero_cut;
    zero_trunc += acc.zero_trunc;
  }
  within /= static_cast<double>(env_draws);

  CoupledDerivativeResult res;
  double m1 = lvl.mean(0), m2 = lvl.mean(1), m3 = lvl.mean(2), m4 = lvl.mean(3);
  if (m4 == 0.0) throw std::runtime_error("coupled_derivative: no accepted samples");
  res.total.value = (m1 + m2) / m4;
  {
    double grad[4] = {1.0 / m4, 1.0 / m4, 0.0, -(m1 + m2) / (m4 * m4)};
    res.total.se = delta_se(lvl, grad);
  }
  res.term1 = ratio_of_means(lvl, 0, 3);
  res.term2 = ratio_of_means(lvl, 1, 3);
  res.term2_lt = ratio_of_means(lvl, 2, 3);
  {
    double grad[4] = {0.0, 1.0 / m4, -1.0 / m4, -(m2 - m3) / (m4 * m4)};
    res.term2_ge = {(m2 - m3) / m4, delta_se(lvl, grad)};
  }
  {
    double se = lvl.n >= 2 ? std::sqrt(lvl.cov(3, 3) / static_cast<double>(lvl.n)) : 0.0;
    res.denom = {m4, se};
  }
  res.between_variance = between.variance();
  res.within_variance = within;
  res.ess_min = ess_min;
  res.ess_low = ess_min < opts.ess_warn_fraction * static_cast<double>(replicates_per_env);
  res.truncation_rate =
      zero_cut > 0 ? static_cast<double>(zero_trunc) / static_cast<double>(zero_cut) : 0.0;
  res.env_draws = env_draws;
  res.replicates_per_env = replicates_per_env;
  return res;
}

}  // namespace erw
