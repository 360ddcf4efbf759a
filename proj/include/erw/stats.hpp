#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace erw {

/// Plain-sum accumulator. merge() is associative, so chunked parallel reductions
/// combined in a fixed chunk order are bit-reproducible regardless of scheduling.
struct MeanVar {
  std::int64_t n = 0;
  double sum = 0.0;
  double sumsq = 0.0;

  void add(double x) {
    ++n;
    sum += x;
    sumsq += x * x;
  }
  void merge(const MeanVar& o) {
    n += o.n;
    sum += o.sum;
    sumsq += o.sumsq;
  }
  double mean() const { return n > 0 ? sum / static_cast<double>(n) : 0.0; }
  double variance() const {
    if (n < 2) return 0.0;
    double m = mean();
    double v = (sumsq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
    return v > 0.0 ? v : 0.0;
  }
  double stderr_mean() const { return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

/// Accumulates sums and cross products of a fixed-size vector of components;
/// feeds the delta-method error for ratios of means.
template <int K>
struct CrossMoments {
  std::int64_t n = 0;
  double s[K] = {};
  double p[K][K] = {};

  void add(const double (&x)[K]) {
    ++n;
    for (int i = 0; i < K; ++i) {
      s[i] += x[i];
      for (int j = i; j < K; ++j) p[i][j] += x[i] * x[j];
    }
  }
  void merge(const CrossMoments& o) {
    n += o.n;
    for (int i = 0; i < K; ++i) {
      s[i] += o.s[i];
      for (int j = i; j < K; ++j) p[i][j] += o.p[i][j];
    }
  }
  double mean(int i) const { return n > 0 ? s[i] / static_cast<double>(n) : 0.0; }
  double cov(int i, int j) const {
    if (n < 2) return 0.0;
    if (i > j) std::swap(i, j);
    return (p[i][j] - static_cast<double>(n) * mean(i) * mean(j)) / static_cast<double>(n - 1);
  }
};

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

/// Delta-method standard error of g(means) given the gradient of g.
template <int K>
double delta_se(const CrossMoments<K>& m, const double (&grad)[K]) {
  if (m.n < 2) return 0.0;
  double v = 0.0;
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) v += grad[i] * grad[j] * m.cov(i, j);
  v /= static_cast<double>(m.n);
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

/// Delta-method estimate and standard error of mean(A)/mean(B).
template <int K>
Estimate ratio_of_means(const CrossMoments<K>& m, int a, int b) {
  double A = m.mean(a), B = m.mean(b);
  Estimate e;
  if (m.n < 2 || B == 0.0) return e;
  e.value = A / B;
  double n = static_cast<double>(m.n);
  double v = (m.cov(a, a) - 2.0 * e.value * m.cov(a, b) + e.value * e.value * m.cov(b, b)) /
             (B * B * n);
  e.se = v > 0.0 ? std::sqrt(v) : 0.0;
  return e;
}

/// |x - y| within 3 combined standard errors.
inline bool within_sigma(double x, double sx, double y, double sy, double nsigma = 3.0,
                         double slack = 0.0) {
  return std::fabs(x - y) <= nsigma * std::sqrt(sx * sx + sy * sy) + slack;
}

// Regularized incomplete gamma functions (series + continued fraction).
double gamma_p(double a, double x);  // P(a,x)
double gamma_q(double a, double x);  // Q(a,x) = 1 - P(a,x)

/// Upper tail of the chi-square distribution with dof degrees of freedom.
double chi_square_sf(double x, int dof);

/// Pearson chi-square upper-tail p-value for observed vs expected counts.
double chi_square_test(const std::vector<double>& observed, const std::vector<double>& expected,
                       int dof_reduction = 0);

/// Kolmogorov distribution upper tail Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_sf(double lambda);

/// Two-sample Kolmogorov-Smirnov p-value (asymptotic) for integer samples.
double ks_two_sample_p(std::vector<double> a, std::vector<double> b);

/// Weighted isotonic regression (pool adjacent violators), nondecreasing fit.
std::vector<double> isotonic_fit(const std::vector<double>& y, const std::vector<double>& w);

/// Grouped (delete-one-chunk) jackknife standard error of A_total/B_total from
/// per-chunk partial sums.
double jackknife_ratio_se(const std::vector<double>& chunk_a, const std::vector<double>& chunk_b);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace erw
