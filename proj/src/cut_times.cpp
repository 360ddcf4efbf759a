#include "erw/cut_times.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "erw/parallel.hpp"

namespace erw {

void generate_two_sided(const LazyWalkSpec& spec, RandomStream& rng, VerticalPath& path) {
  if (spec.dim < 1) throw std::invalid_argument("lazy walk: dim >= 1 required");
  if (!(spec.eps > 0.0 && spec.eps <= 1.0)) throw std::invalid_argument("lazy walk: eps in (0,1]");
  const int dim = path.dim();
  const std::uint32_t moves = static_cast<std::uint32_t>(2 * dim);
  std::memset(path.row(0), 0, sizeof(std::int32_t) * dim);
  auto advance = [&](std::int32_t* cur, const std::int32_t* prev) {
    std::memcpy(cur, prev, sizeof(std::int32_t) * dim);
    if (spec.eps >= 1.0 || rng.next_bernoulli(spec.eps)) {
      std::uint32_t mv = rng.next_index(moves);
      cur[mv >> 1] += (mv & 1) ? -1 : +1;
    }
  };
  for (std::int64_t n = 1; n <= path.w_future(); ++n) advance(path.row(n), path.row(n - 1));
  for (std::int64_t n = -1; n >= -path.w_past(); --n) advance(path.row(n), path.row(n + 1));
}

CutRecord CutDetector::detect_window(const VerticalPath& path, std::int64_t w_past,
                                     std::int64_t w_future, bool collect_all) {
  if (w_past > path.w_past() || w_future > path.w_future())
    throw std::invalid_argument("detect_window: window exceeds path");
  const std::int64_t L = w_past + w_future;
  if (L < 1) throw std::invalid_argument("detect_window: empty window");

  sites_.clear();
  for (std::int64_t i = 0; i <= L; ++i) {
    auto [fl, fresh] = sites_.insert(path.at(i - w_past));
    if (fresh) fl->first = static_cast<std::int32_t>(i);
    fl->last = static_cast<std::int32_t>(i);
  }
  // t is blocked iff some site is visited both before t and at/after t,
  // i.e. t lies in (first, last] for that site.
  coverage_.assign(static_cast<std::size_t>(L + 2), 0);
  sites_.for_each_value([this](const FirstLast& fl) {
    if (fl.first < fl.last) {
      ++coverage_[static_cast<std::size_t>(fl.first) + 1];
      --coverage_[static_cast<std::size_t>(fl.last) + 1];
    }
  });

  CutRecord rec;
  rec.w_past = w_past;
  rec.w_future = w_future;
  std::int32_t cov = 0;
  for (std::int64_t t = 1; t <= L; ++t) {
    cov += coverage_[static_cast<std::size_t>(t)];
    if (cov != 0) continue;
    std::int64_t n = t - w_past;
    if (collect_all) rec.window_cut_times.push_back(n);
    if (n == 0) rec.zero_is_cut = true;
    if (n > 0 && rec.truncated) {
      rec.T = n;
      rec.truncated = false;
      if (!collect_all) break;  // n > 0 comes after n = 0, so zero status is final
    }
  }
  return rec;
}

CutMomentsResult cut_time_moments(const LazyWalkSpec& spec, Window window, std::int64_t replicates,
                                  SeedSpec seed, int threads) {
  CutMomentsResult total;
  total.spec = spec;
  total.window = window;
  total.replicates = replicates;

  std::int64_t chunks = num_chunks_for(replicates);
  std::vector<CutMomentsResult> partial(static_cast<std::size_t>(chunks));
  parallel_chunks(replicates, threads, [&](std::int64_t ci, std::int64_t b, std::int64_t e) {
    CutMomentsResult& acc = partial[static_cast<std::size_t>(ci)];
    VerticalPath path(spec.dim, window.past, window.future);
    CutDetector detector(spec.dim);
    for (std::int64_t r = b; r < e; ++r) {
      RandomStream rng({seed.master_seed, seed.stream_id + static_cast<std::uint64_t>(r)});
      generate_two_sided(spec, rng, path);
      CutRecord rec = detector.detect(path);
      double T = static_cast<double>(rec.T);
      if (rec.zero_is_cut) {
        ++acc.n_zero_cut;
        if (rec.truncated) {
          ++acc.n_zero_cut_truncated;
          acc.T_indicator.add(0.0);
        } else {
          acc.palm_T.add(T);
          acc.palm_T2.add(T * T);
          acc.palm_T3.add(T * T * T);
          acc.T_indicator.add(T);
          double powers[3] = {T, T * T, T * T * T};
          acc.palm_powers.add(powers);
        }
      } else {
        acc.T_indicator.add(0.0);
      }
      if (rec.truncated) {
        ++acc.n_truncated;
      } else {
        acc.uncond_T.add(T);
        acc.uncond_T2.add(T * T);
        double powers[2] = {T, T * T};
        acc.uncond_powers.add(powers);
      }
    }
  });
  for (const CutMomentsResult& acc : partial) {
    total.palm_T.merge(acc.palm_T);
    total.palm_T2.merge(acc.palm_T2);
    total.palm_T3.merge(acc.palm_T3);
    total.uncond_T.merge(acc.uncond_T);
    total.uncond_T2.merge(acc.uncond_T2);
    total.T_indicator.merge(acc.T_indicator);
    total.palm_powers.merge(acc.palm_powers);
    total.uncond_powers.merge(acc.uncond_powers);
    total.n_zero_cut += acc.n_zero_cut;
    total.n_zero_cut_truncated += acc.n_zero_cut_truncated;
    total.n_truncated += acc.n_truncated;
  }
  return total;
}

std::int64_t sample_palm(const LazyWalkSpec& spec, RandomStream& rng, VerticalPath& path,
                         CutDetector& detector, CutRecord& rec, std::int64_t max_attempts) {
  for (std::int64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    generate_two_sided(spec, rng, path);
    rec = detector.detect(path);
    if (rec.zero_is_cut && !rec.truncated) return attempt;
  }
  throw std::runtime_error(
      "sample_palm: rejection budget exhausted (window too small or dimension too low)");
}

SegmentEstimate segment_palm_estimate(const LazyWalkSpec& spec, std::int64_t run_length,
                                      std::int64_t burn_in, std::int64_t tail_guard,
                                      std::int64_t min_segments, SeedSpec seed,
                                      const std::function<double(const SegmentView&)>& f) {
  VerticalPath path(spec.dim, 0, run_length);
  RandomStream rng(seed);
  generate_two_sided(spec, rng, path);
  CutDetector detector(spec.dim);
  CutRecord rec = detector.detect(path, /*collect_all=*/true);

  std::vector<std::int64_t> cuts;
  for (std::int64_t n : rec.window_cut_times)
    if (n >= burn_in && n <= run_length - tail_guard) cuts.push_back(n);
  std::int64_t segments = static_cast<std::int64_t>(cuts.size()) - 1;
  if (segments < min_segments)
    throw std::runtime_error("segment_palm_estimate: fewer segments than required");

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(segments));
  MeanVar all;
  for (std::int64_t i = 0; i + 1 < static_cast<std::int64_t>(cuts.size()); ++i) {
    double v = f(SegmentView{&path, cuts[static_cast<std::size_t>(i)],
                             cuts[static_cast<std::size_t>(i + 1)]});
    values.push_back(v);
    all.add(v);
  }

  // Batch means over the (weakly dependent) segment sequence.
  std::int64_t batches = std::clamp<std::int64_t>(segments / 32, 2, 64);
  std::int64_t per = segments / batches;
  MeanVar batch_stats;
  for (std::int64_t bi = 0; bi < batches; ++bi) {
    double s = 0.0;
    for (std::int64_t i = bi * per; i < (bi + 1) * per; ++i)
      s += values[static_cast<std::size_t>(i)];
    batch_stats.add(s / static_cast<double>(per));
  }
  SegmentEstimate est;
  est.value = all.mean();
  est.se = batch_stats.stderr_mean();
  est.segments = segments;
  return est;
}

// --- exact return probabilities ---------------------------------------------------

namespace {

double return_prob_convolution(int dim, double eps, int n) {
  std::int64_t side = 2 * static_cast<std::int64_t>(n) + 1;
  double cells_d = std::pow(static_cast<double>(side), dim);
  if (dim > 6 || cells_d > 4.5e7)
    throw std::invalid_argument("return_probability: convolution instance too large");
  std::size_t cells = static_cast<std::size_t>(cells_d);

  std::vector<std::int64_t> stride(static_cast<std::size_t>(dim));
  stride[0] = 1;
  for (int a = 1; a < dim; ++a) stride[static_cast<std::size_t>(a)] = stride[static_cast<std::size_t>(a - 1)] * side;

  std::vector<double> cur(cells, 0.0), next(cells, 0.0);
  std::size_t origin = 0;
  for (int a = 0; a < dim; ++a) origin += static_cast<std::size_t>(stride[static_cast<std::size_t>(a)]) * static_cast<std::size_t>(n);
  cur[origin] = 1.0;

  const double hold = 1.0 - eps;
  const double move = eps / (2.0 * dim);
  std::vector<std::int64_t> digit(static_cast<std::size_t>(dim), 0);
  for (int step = 0; step < n; ++step) {
    std::fill(digit.begin(), digit.end(), 0);
    for (std::size_t idx = 0; idx < cells; ++idx) {
      double v = hold * cur[idx];
      for (int a = 0; a < dim; ++a) {
        std::int64_t d = digit[static_cast<std::size_t>(a)];
        std::int64_t s = stride[static_cast<std::size_t>(a)];
        if (d > 0) v += move * cur[idx - static_cast<std::size_t>(s)];
        if (d < side - 1) v += move * cur[idx + static_cast<std::size_t>(s)];
      }
      next[idx] = v;
      for (int a = 0; a < dim; ++a) {
        if (++digit[static_cast<std::size_t>(a)] < side) break;
        digit[static_cast<std::size_t>(a)] = 0;
      }
    }
    cur.swap(next);
  }
  return cur[origin];
}

// Characteristic-function route: P(Z^eps_n = 0) equals the [-pi,pi]^dim average
// of ((1/dim) sum_i (eps cos t_i + 1 - eps))^n. With i.i.d. axes the tensorized
// Gauss-Legendre sum factorizes through per-axis moments G_j, so the full
// tensor value is n! [t^n] (sum_j G_j t^j / j!)^dim / dim^n.
double return_prob_quadrature(int dim, double eps, int n) {
  if (n > 64 || dim > 64) throw std::invalid_argument("return_probability: quadrature instance too large");
  constexpr int kNodes = 64;
  std::vector<double> x, w;
  gauss_legendre(kNodes, x, w);

  std::vector<long double> g(static_cast<std::size_t>(n + 1), 0.0L);
  for (int k = 0; k < kNodes; ++k) {
    long double base = eps * std::cos(M_PI * x[static_cast<std::size_t>(k)]) + (1.0 - eps);
    long double pw = 1.0L;
    long double half_w = 0.5L * static_cast<long double>(w[static_cast<std::size_t>(k)]);
    for (int j = 0; j <= n; ++j) {
      g[static_cast<std::size_t>(j)] += half_w * pw;
      pw *= base;
    }
  }

  std::vector<long double> a(static_cast<std::size_t>(n + 1));
  long double fact = 1.0L;
  for (int j = 0; j <= n; ++j) {
    if (j > 0) fact *= j;
    a[static_cast<std::size_t>(j)] = g[static_cast<std::size_t>(j)] / fact;
  }

  // (sum a_j t^j)^dim truncated at degree n, by binary exponentiation.
  auto mul = [n](const std::vector<long double>& p, const std::vector<long double>& q) {
    std::vector<long double> r(static_cast<std::size_t>(n + 1), 0.0L);
    for (int i = 0; i <= n; ++i) {
      if (p[static_cast<std::size_t>(i)] == 0.0L) continue;
      for (int j = 0; i + j <= n; ++j)
        r[static_cast<std::size_t>(i + j)] += p[static_cast<std::size_t>(i)] * q[static_cast<std::size_t>(j)];
    }
    return r;
  };
  std::vector<long double> result(static_cast<std::size_t>(n + 1), 0.0L);
  result[0] = 1.0L;
  std::vector<long double> base = a;
  int e = dim;
  while (e > 0) {
    if (e & 1) result = mul(result, base);
    base = mul(base, base);
    e >>= 1;
  }

  long double nfact = 1.0L;
  for (int j = 2; j <= n; ++j) nfact *= j;
  long double dimn = std::pow(static_cast<long double>(dim), static_cast<long double>(n));
  return static_cast<double>(nfact * result[static_cast<std::size_t>(n)] / dimn);
}

}  // namespace

double return_probability(int dim, double eps, int n, ReturnProbMethod method) {
  if (dim < 1) throw std::invalid_argument("return_probability: dim >= 1 required");
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("return_probability: eps in (0,1]");
  if (n < 0) throw std::invalid_argument("return_probability: n >= 0 required");
  if (n == 0) return 1.0;
  return method == ReturnProbMethod::Convolution ? return_prob_convolution(dim, eps, n)
                                                 : return_prob_quadrature(dim, eps, n);
}

}  // namespace erw
