#include "erw/acceptance.hpp"

#include <cmath>
#include <sstream>

#include "erw/config.hpp"
#include "erw/estimators.hpp"
#include "erw/girsanov.hpp"
#include "erw/oracle.hpp"
#include "erw/records.hpp"
#include "erw/walker.hpp"

namespace erw {

namespace {

struct Ctx {
  AcceptanceOptions opts;
  RunOpts run;
  SeedSpec seed(std::string_view phase) const {
    return {derive_phase_seed(opts.seed, phase), 0};
  }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Check {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED: ") + what;
  }
};

std::string pm(double v, double se) { return fmt(v) + "+-" + fmt(se); }

// 1. Oracle exactness: direct rule, construction pushforward and reweighted P_0
// agree pairwise to TV < 1e-12 on d=2, n=3, m=1, beta=0.5.
CriterionResult c1_oracle_exactness(const Ctx&) {
  const int d = 2, n = 3;
  CookieEnvironment env = CookieEnvironment::deterministic(0.5, 1);
  CookieEnvironment p0 = CookieEnvironment::deterministic(0.0, 1);

  auto direct = oracle::enumerate_paths(d, n, env);
  auto constructed = oracle::enumerate_constructed(d, n, env);
  auto reweighted = oracle::enumerate_paths(d, n, p0);
  for (oracle::PathAtom& a : reweighted) {
    Trajectory traj = oracle::replay(d, a.path);
    a.probability *= weight(traj, env, static_cast<std::size_t>(n)).value();
  }

  double tv_dc = oracle::total_variation(direct, constructed);
  double tv_dr = oracle::total_variation(direct, reweighted);
  double tv_cr = oracle::total_variation(constructed, reweighted);
  Check ck;
  ck.require(tv_dc < 1e-12, "TV(direct,constructed)=" + fmt(tv_dc));
  ck.require(tv_dr < 1e-12, "TV(direct,reweighted)=" + fmt(tv_dr));
  ck.require(tv_cr < 1e-12, "TV(constructed,reweighted)=" + fmt(tv_cr));
  return {1, "oracle exactness (three path laws, TV < 1e-12)", ck.pass, ck.detail};
}

// 2. E_0[M_n(beta)] = 1: exact on enumeration, 3 sigma by Monte Carlo at n=50.
CriterionResult c2_density_normalization(const Ctx& ctx) {
  Check ck;
  for (double beta : {0.3, 0.7}) {
    CookieEnvironment env = CookieEnvironment::deterministic(beta, 1);
    auto p0 = oracle::enumerate_paths(2, 3, CookieEnvironment::deterministic(0.0, 1));
    double em = oracle::oracle_expectation(
        p0,
        [&](const Trajectory& t) { return weight(t, env, t.length()).value(); },
        2);
    ck.require(std::fabs(em - 1.0) < 1e-12,
               "enum d=2 n=3 beta=" + fmt(beta) + ": E0[M]=" + fmt(em));
  }
  int case_id = 0;
  for (int d : {2, 6}) {
    for (double beta : {0.3, 0.7}) {
      const std::int64_t n = 50, reps = 60000;
      CookieEnvironment env = CookieEnvironment::deterministic(beta, 1);
      CookieEnvironment p0 = CookieEnvironment::deterministic(0.0, 1);
      SeedSpec seed = ctx.seed("c2-" + std::to_string(case_id++));
      std::vector<MeanVar> partial(static_cast<std::size_t>(num_chunks_for(reps)));
      parallel_chunks(reps, ctx.opts.threads, [&](std::int64_t ci, std::int64_t b, std::int64_t e) {
        WalkState state(d);
        for (std::int64_t r = b; r < e; ++r) {
          RandomStream rng({seed.master_seed, static_cast<std::uint64_t>(r)});
          LogWeight w;
          walk_direct(p0, d, n, rng, state, [&](const StepEvent& ev) {
            if (ev.e != 0 && ev.visit_k <= env.m())
              w.mul_factor(1.0 + ev.e * env.beta(ev.site, d, ev.visit_k));
          });
          partial[static_cast<std::size_t>(ci)].add(w.value());
        }
      });
      MeanVar mv;
      for (const MeanVar& p : partial) mv.merge(p);
      bool ok = within_sigma(mv.mean(), mv.stderr_mean(), 1.0, 0.0);
      ck.require(ok, "MC d=" + std::to_string(d) + " beta=" + fmt(beta) + ": E0[M_50]=" +
                         pm(mv.mean(), mv.stderr_mean()));
    }
  }
  return {2, "density normalization E0[M_n(beta)] = 1", ck.pass, ck.detail};
}

// 3. Palm identities at d in {6,8} (+ (ET3) at d=10), truncation < 1%,
// window-doubling stability.
CriterionResult c3_palm_identities(const Ctx& ctx) {
  Check ck;
  const Window w1{10000, 10000};
  const Window w2{20000, 20000};
  for (int d : {6, 8, 10}) {
    const std::int64_t reps = d == 10 ? 30000 : 24000;
    SeedSpec seed_a = ctx.seed("c3a-d" + std::to_string(d));
    SeedSpec seed_b = ctx.seed("c3b-d" + std::to_string(d));
    CutMomentsResult a = palm_T_moments(d, w1, reps, seed_a, ctx.opts.threads);
    CutMomentsResult b = palm_T_moments(d, w1, reps, seed_b, ctx.opts.threads);
    std::string tag = "d=" + std::to_string(d) + " ";

    // E[T 1_{0 in D}] = 1
    ck.require(within_sigma(a.T_indicator.mean(), a.T_indicator.stderr_mean(), 1.0, 0.0),
               tag + "E[T 1_D]=" + pm(a.T_indicator.mean(), a.T_indicator.stderr_mean()));

    // hat-E(T) * P(0 in D) = 1 (conditional mean and acceptance rate are
    // uncorrelated, so the delta variance has no cross term)
    {
      double et = a.palm_T.mean(), set = a.palm_T.stderr_mean();
      double p = a.p_cut(), sep = a.p_cut_se();
      double prod = et * p;
      double se = std::sqrt(p * p * set * set + et * et * sep * sep);
      ck.require(within_sigma(prod, se, 1.0, 0.0), tag + "hatE(T)*P(0inD)=" + pm(prod, se));
    }

    // display (7): hatE(T) * E(T) = hatE((T^2+T)/2), E(T) from the independent batch
    {
      double het = a.palm_T.mean();
      double et = b.uncond_T.mean();
      double lhs = het * et;
      double rhs = 0.5 * (a.palm_powers.mean(1) + a.palm_powers.mean(0));
      double ka = static_cast<double>(a.palm_powers.n);
      double var_het = a.palm_powers.cov(0, 0) / ka;
      double var_rhs =
          0.25 * (a.palm_powers.cov(1, 1) + 2.0 * a.palm_powers.cov(0, 1) + a.palm_powers.cov(0, 0)) /
          ka;
      double cov_het_rhs = 0.5 * (a.palm_powers.cov(0, 1) + a.palm_powers.cov(0, 0)) / ka;
      double var_et = b.uncond_T.variance() / static_cast<double>(b.uncond_T.n);
      double var_diff =
          et * et * var_het + het * het * var_et + var_rhs - 2.0 * et * cov_het_rhs;
      double se = std::sqrt(std::max(var_diff, 0.0));
      ck.require(std::fabs(lhs - rhs) <= 3.0 * se,
                 tag + "(7): " + fmt(lhs) + " vs " + fmt(rhs) + " (se " + fmt(se) + ")");
    }

    // display (ET3) at d=10: hatE(T) * E(T^2) = hatE(T(T+1)(2T+1)/6)
    if (d == 10) {
      double het = a.palm_T.mean();
      double et2 = b.uncond_T2.mean();
      double lhs = het * et2;
      double rhs = (2.0 * a.palm_powers.mean(2) + 3.0 * a.palm_powers.mean(1) +
                    a.palm_powers.mean(0)) /
                   6.0;
      double ka = static_cast<double>(a.palm_powers.n);
      double var_het = a.palm_powers.cov(0, 0) / ka;
      auto cv = [&a, ka](int i, int j) { return a.palm_powers.cov(i, j) / ka; };
      double var_rhs = (4.0 * cv(2, 2) + 9.0 * cv(1, 1) + cv(0, 0) + 12.0 * cv(1, 2) +
                        4.0 * cv(0, 2) + 6.0 * cv(0, 1)) /
                       36.0;
      double cov_het_rhs = (2.0 * cv(0, 2) + 3.0 * cv(0, 1) + cv(0, 0)) / 6.0;
      double var_et2 = b.uncond_T2.variance() / static_cast<double>(b.uncond_T2.n);
      double var_diff =
          et2 * et2 * var_het + het * het * var_et2 + var_rhs - 2.0 * et2 * cov_het_rhs;
      double se = std::sqrt(std::max(var_diff, 0.0));
      ck.require(std::fabs(lhs - rhs) <= 3.0 * se,
                 tag + "(ET3): " + fmt(lhs) + " vs " + fmt(rhs) + " (se " + fmt(se) + ")");
    }

    ck.require(a.palm_truncation_rate() < 0.01,
               tag + "truncation=" + fmt(a.palm_truncation_rate()));

    // window doubling moves hatE(T) by less than one combined sigma
    {
      CutMomentsResult a2 = palm_T_moments(d, w2, reps, seed_a, ctx.opts.threads);
      double diff = std::fabs(a2.palm_T.mean() - a.palm_T.mean());
      double se = std::sqrt(a.palm_T.stderr_mean() * a.palm_T.stderr_mean() +
                            a2.palm_T.stderr_mean() * a2.palm_T.stderr_mean());
      ck.require(diff < se, tag + "window doubling shift=" + fmt(diff) + " (1sigma " + fmt(se) + ")");
    }
  }
  return {3, "Palm identities (Ecutime), (7), (ET3)", ck.pass, ck.detail};
}

// 4. Lazy-walk thinning identities at d=8 (dim 7).
CriterionResult c4_lazy_identities(const Ctx& ctx) {
  Check ck;
  const int dim = 7;
  const Window w{10000, 10000};
  const std::int64_t reps = 30000;
  CutMomentsResult tilde =
      lazy_walk_T({dim, 1.0}, w, reps, ctx.seed("c4-tilde"), ctx.opts.threads);
  double et = tilde.uncond_T.mean();
  double et2 = tilde.uncond_T2.mean();
  double n_t = static_cast<double>(tilde.uncond_powers.n);
  double var_et = tilde.uncond_powers.cov(0, 0) / n_t;
  double var_et2 = tilde.uncond_powers.cov(1, 1) / n_t;
  double cov_e = tilde.uncond_powers.cov(0, 1) / n_t;

  for (double eps : {0.5, 0.875}) {
    CutMomentsResult lazy =
        lazy_walk_T({dim, eps}, w, reps, ctx.seed("c4-eps" + fmt(eps)), ctx.opts.threads);
    std::string tag = "eps=" + fmt(eps) + " ";
    {
      double lhs = lazy.uncond_T.mean();
      double se_l = lazy.uncond_T.stderr_mean();
      double rhs = et / eps;
      double se_r = std::sqrt(var_et) / eps;
      ck.require(within_sigma(lhs, se_l, rhs, se_r),
                 tag + "E(T_eps)=" + pm(lhs, se_l) + " vs E(T~)/eps=" + pm(rhs, se_r));
    }
    {
      double lhs = lazy.uncond_T2.mean();
      double se_l = lazy.uncond_T2.stderr_mean();
      double rhs = (et2 + (1.0 - eps) * et) / (eps * eps);
      double var_r =
          (var_et2 + (1.0 - eps) * (1.0 - eps) * var_et + 2.0 * (1.0 - eps) * cov_e) /
          (eps * eps * eps * eps);
      double se_r = std::sqrt(std::max(var_r, 0.0));
      ck.require(within_sigma(lhs, se_l, rhs, se_r),
                 tag + "E(T_eps^2)=" + pm(lhs, se_l) + " vs thinned=" + pm(rhs, se_r));
    }
  }
  return {4, "lazy-walk identities E(T_eps)=E(T~)/eps etc.", ck.pass, ck.detail};
}

// 5. Return-probability monotonicity + method agreement to 1e-10.
CriterionResult c5_return_probability(const Ctx&) {
  Check ck;
  const double eps = 0.9;
  const int n = 10;
  double prev = 2.0;
  for (int dim : {2, 3, 4, 5}) {
    double q = return_probability(dim, eps, n, ReturnProbMethod::Quadrature);
    double c = return_probability(dim, eps, n, ReturnProbMethod::Convolution);
    ck.require(std::fabs(q - c) < 1e-10,
               "dim=" + std::to_string(dim) + " quad=" + fmt(q) + " conv=" + fmt(c));
    ck.require(q < prev, "dim=" + std::to_string(dim) + " strictly decreasing");
    prev = q;
  }
  return {5, "return-probability monotonicity and 1e-10 method agreement", ck.pass, ck.detail};
}

// 6. m = infinity: speed beta/d, derivative 1/d.
CriterionResult c6_simple_walk_limit(const Ctx& ctx) {
  Check ck;
  struct Case {
    int d;
    double beta;
  };
  for (Case c : {Case{4, 0.3}, Case{8, 0.6}}) {
    CookieEnvironment env = CookieEnvironment::deterministic(c.beta, kInfiniteCookies);
    SpeedEstimate est = speed_lln(env, c.d, 100000, 2000,
                                  ctx.seed("c6-lln-d" + std::to_string(c.d)), ctx.run);
    double target = c.beta / c.d;
    ck.require(within_sigma(est.value, est.se, target, 0.0),
               "v(inf," + fmt(c.beta) + ") d=" + std::to_string(c.d) + ": " +
                   pm(est.value, est.se) + " vs " + fmt(target));
  }
  {
    MDerivativeResult res = derivative_v_m_beta(8, kInfiniteCookies, 0.6, {10000, 10000}, 30000,
                                                ctx.seed("c6-deriv"), ctx.run);
    ck.require(within_sigma(res.total.value, res.total.se, 1.0 / 8.0, 0.0),
               "dv/dbeta(inf,0.6) d=8: " + pm(res.total.value, res.total.se) + " vs 0.125");
  }
  return {6, "simple-walk limit: v = beta/d and dv/dbeta = 1/d at m=inf", ck.pass, ck.detail};
}

// 7. Derivative at zero vs range constant and finite difference (d=8).
CriterionResult c7_derivative_at_zero(const Ctx& ctx) {
  Check ck;
  const int d = 8;
  DerivativeAtZeroResult dz =
      derivative_at_zero(d, {10000, 10000}, 60000, ctx.seed("c7-zero"), ctx.run);
  RangeConstantResult rc = range_constant(d, 1000000, 120, {10000, 10000}, 30000,
                                          ctx.seed("c7-range"), ctx.run);
  double r_over_d = rc.lln.value / d;
  double r_over_d_se = rc.lln.se / d;
  ck.require(within_sigma(dz.value.value, dz.value.se, r_over_d, r_over_d_se),
             "deriv0=" + pm(dz.value.value, dz.value.se) + " vs R(0)/d=" + pm(r_over_d, r_over_d_se));

  SweepResult sweep = speed_girsanov_sweep(d, 1, {0.05}, {10000, 10000}, 120000,
                                           ctx.seed("c7-sweep"), ctx.run);
  double fd = sweep.points[0].v_xt.value / 0.05;
  double fd_se = sweep.points[0].v_xt.se / 0.05;
  ck.require(within_sigma(dz.value.value, dz.value.se, fd, fd_se, 3.0, 0.01),
             "deriv0 vs v(0.05)/0.05=" + pm(fd, fd_se) + " (+0.01 slack)");
  return {7, "derivative at zero: R(0)/d and finite-difference checks", ck.pass, ck.detail};
}

// 8. Cross-estimator speed consistency at d=6, m=1, beta=0.5.
CriterionResult c8_cross_estimator(const Ctx& ctx) {
  Check ck;
  const int d = 6;
  CookieEnvironment env = CookieEnvironment::deterministic(0.5, 1);
  SpeedEstimate lln = speed_lln(env, d, 100000, 1500, ctx.seed("c8-lln"), ctx.run);
  CutRatioResult ratio = speed_cut_ratio(env, d, {10000, 10000}, 30000, ctx.seed("c8-cut"), ctx.run);
  SweepResult sweep =
      speed_girsanov_sweep(d, 1, {0.5}, {10000, 10000}, 120000, ctx.seed("c8-gir"), ctx.run);
  const Estimate gir = sweep.points[0].v_xt;

  ck.require(within_sigma(lln.value, lln.se, ratio.est.value, ratio.est.se),
             "lln=" + pm(lln.value, lln.se) + " vs cut-ratio=" + pm(ratio.est.value, ratio.est.se));
  ck.require(within_sigma(lln.value, lln.se, gir.value, gir.se),
             "lln vs girsanov=" + pm(gir.value, gir.se));
  ck.require(within_sigma(ratio.est.value, ratio.est.se, gir.value, gir.se),
             "cut-ratio vs girsanov");
  return {8, "cross-estimator speed consistency (d=6, m=1, beta=0.5)", ck.pass, ck.detail};
}

// 9. Monotonicity trend of the sweep at d=10.
CriterionResult c9_monotonicity(const Ctx& ctx) {
  Check ck;
  SweepResult sweep = speed_girsanov_sweep(10, 1, {0.0, 0.2, 0.4, 0.6, 0.8}, {10000, 10000},
                                           150000, ctx.seed("c9"), ctx.run);
  std::vector<double> v, wts, se;
  for (const SweepPoint& pt : sweep.points) {
    v.push_back(pt.v_xt.value);
    se.push_back(pt.v_xt.se);
    wts.push_back(1.0 / (pt.v_xt.se * pt.v_xt.se));
  }
  std::vector<double> fit = isotonic_fit(v, wts);
  double chi2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double z = (v[i] - fit[i]) / se[i];
    chi2 += z * z;
  }
  double p = chi_square_sf(chi2, static_cast<int>(v.size()) - 1);
  ck.require(p > 0.01, "isotonic residual chi2=" + fmt(chi2) + " p=" + fmt(p));

  double slope = sweep.points[1].v_xt.value / 0.2;
  double slope_se = sweep.points[1].v_xt.se / 0.2;
  ck.require(slope > 3.0 * slope_se, "slope at 0: " + pm(slope, slope_se));
  std::string grid_detail;
  for (const SweepPoint& pt : sweep.points)
    grid_detail += " v(" + fmt(pt.beta) + ")=" + fmt(pt.v_xt.value);
  ck.require(true, "grid:" + grid_detail);
  return {9, "Girsanov sweep monotone at d=10 (isotonic + positive slope)", ck.pass, ck.detail};
}

// 10. Coupled derivative: exact zero, deterministic-pair reduction, positivity.
CriterionResult c10_coupled(const Ctx& ctx) {
  Check ck;
  {
    MarginalLaw law = MarginalLaw::atoms({{0.1, 0.5}, {0.3, 0.5}});
    CookieEnvironment lo = CookieEnvironment::iid(7, law, 1, true);
    CookieEnvironment pair = CookieEnvironment::coupled(lo, lo, 0.5);
    CoupledDerivativeResult res =
        coupled_derivative(pair, 0.5, 8, {4000, 4000}, 4, 300, ctx.seed("c10-zero"), ctx.run);
    ck.require(res.total.value == 0.0 && res.term1.value == 0.0 && res.term2.value == 0.0,
               "beta1=beta2 gives df/dt=" + fmt(res.total.value) + " exactly");
  }
  {
    const int d = 8, m = 1;
    const double c = 0.5, t = 0.6;
    CookieEnvironment pair = CookieEnvironment::coupled(
        CookieEnvironment::deterministic(0.0, m), CookieEnvironment::deterministic(c, m), t);
    CoupledDerivativeResult cd =
        coupled_derivative(pair, t, d, {10000, 10000}, 40, 1500, ctx.seed("c10-red"), ctx.run);
    MDerivativeResult md =
        derivative_v_m_beta(d, m, t * c, {10000, 10000}, 60000, ctx.seed("c10-md"), ctx.run);
    // f(t) for the pair (0, c) is v(t c), so df/dt = c * dv/dbeta(m, t c).
    double lhs = cd.total.value, lhs_se = cd.total.se;
    double rhs = c * md.total.value;
    double rhs_se = c * md.total.se;
    ck.require(within_sigma(lhs, lhs_se, rhs, rhs_se),
               "pair(0,0.5) df/dt=" + pm(lhs, lhs_se) + " vs c*dv/dbeta=" + pm(rhs, rhs_se));
  }
  {
    MarginalLaw lo_law = MarginalLaw::atoms({{0.05, 0.5}, {0.1, 0.5}});
    MarginalLaw hi_law = MarginalLaw::atoms({{0.15, 0.5}, {0.3, 0.5}});
    CookieEnvironment lo = CookieEnvironment::iid(3, lo_law, 1, true);
    CookieEnvironment hi = CookieEnvironment::iid(3, hi_law, 1, true);
    CookieEnvironment pair = CookieEnvironment::coupled(lo, hi, 0.5);
    CoupledDerivativeResult res =
        coupled_derivative(pair, 0.5, 12, {10000, 10000}, 50, 1200, ctx.seed("c10-pos"), ctx.run);
    ck.require(res.total.value > 3.0 * res.total.se,
               "d=12 sigma=0.3 df/dt=" + pm(res.total.value, res.total.se) + " > 0 at 3sigma");
  }
  return {10, "coupled derivative: zero pair, reduction, positivity", ck.pass, ck.detail};
}

// 11. hatE(T^2) bounded across d = 8..12.
CriterionResult c11_moment_boundedness(const Ctx& ctx) {
  Check ck;
  double base = 0.0;
  std::string detail;
  for (int d = 8; d <= 12; ++d) {
    CutMomentsResult res = palm_T_moments(d, {10000, 10000}, 15000,
                                          ctx.seed("c11-d" + std::to_string(d)), ctx.opts.threads);
    double et2 = res.palm_T2.mean();
    if (d == 8) base = et2;
    detail += " d" + std::to_string(d) + "=" + fmt(et2);
    if (d > 8) ck.require(et2 < 2.0 * base, "hatE(T^2) d=" + std::to_string(d) + " below 2x d=8");
  }
  ck.require(true, "values:" + detail);
  return {11, "hatE(T^2) for d=8..12 below twice the d=8 value", ck.pass, ck.detail};
}

// 12. Engineering: byte-identical reruns across thread counts.
CriterionResult c12_engineering(const Ctx& ctx) {
  Check ck;
  auto sweep_csv = [&](int threads) {
    RunOpts run = ctx.run;
    run.threads = threads;
    SweepResult sweep =
        speed_girsanov_sweep(8, 1, {0.0, 0.2, 0.4}, {2000, 2000}, 6000, ctx.seed("c12"), run);
    CsvTable csv({"beta", "estimate", "stderr", "denominator"});
    for (const SweepPoint& pt : sweep.points)
      csv.add_row({fmt_g17(pt.beta), fmt_g17(pt.v_xt.value), fmt_g17(pt.v_xt.se),
                   fmt_g17(sweep.denom.value)});
    return csv.text();
  };
  std::string t1 = sweep_csv(1);
  std::string t8 = sweep_csv(8);
  ck.require(t1 == t8, "sweep CSV byte-identical for --threads 1 vs 8");

  auto palm_line = [&](int threads) {
    CutMomentsResult res = palm_T_moments(6, {2000, 2000}, 6000, ctx.seed("c12b"), threads);
    return fmt_g17(res.palm_T.mean()) + "," + fmt_g17(res.T_indicator.mean()) + "," +
           std::to_string(res.n_zero_cut);
  };
  ck.require(palm_line(1) == palm_line(8), "palm moments byte-identical for --threads 1 vs 8");
  return {12, "engineering: thread-count invariance of results", ck.pass, ck.detail};
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts, std::ostream& log) {
  Ctx ctx;
  ctx.opts = opts;
  ctx.run.threads = opts.threads;

  std::vector<CriterionResult (*)(const Ctx&)> criteria = {
      c1_oracle_exactness, c2_density_normalization, c3_palm_identities, c4_lazy_identities,
      c5_return_probability, c6_simple_walk_limit, c7_derivative_at_zero, c8_cross_estimator,
      c9_monotonicity, c10_coupled, c11_moment_boundedness, c12_engineering};

  std::vector<CriterionResult> results;
  for (auto* fn : criteria) {
    CriterionResult res;
    try {
      res = fn(ctx);
    } catch (const std::exception& ex) {
      res.id = static_cast<int>(results.size()) + 1;
      res.name = "criterion " + std::to_string(res.id);
      res.pass = false;
      res.detail = std::string("exception: ") + ex.what();
    }
    log << (res.pass ? "[PASS] " : "[FAIL] ") << res.id << ". " << res.name;
    if (!res.detail.empty()) log << " | " << res.detail;
    log << std::endl;
    results.push_back(std::move(res));
  }
  return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  for (const CriterionResult& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace erw
