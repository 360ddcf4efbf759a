#include "erw/stats.hpp"

#include <algorithm>
#include <stdexcept>

namespace erw {

namespace {

double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_contfrac(a, x);
}

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_contfrac(a, x);
}

double chi_square_sf(double x, int dof) {
  if (dof < 1) throw std::invalid_argument("chi_square_sf: dof < 1");
  return gamma_q(0.5 * dof, 0.5 * x);
}

double chi_square_test(const std::vector<double>& observed, const std::vector<double>& expected,
                       int dof_reduction) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::invalid_argument("chi_square_test: size mismatch");
  double stat = 0.0;
  int cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) continue;
    double d = observed[i] - expected[i];
    stat += d * d / expected[i];
    ++cells;
  }
  int dof = cells - 1 - dof_reduction;
  if (dof < 1) dof = 1;
  return chi_square_sf(stat, dof);
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-16) break;
  }
  double p = 2.0 * sum;
  return std::clamp(p, 0.0, 1.0);
}

double ks_two_sample_p(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample_p: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  double ne = std::sqrt(na * nb / (na + nb));
  return kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d);
}

std::vector<double> isotonic_fit(const std::vector<double>& y, const std::vector<double>& w) {
  if (y.size() != w.size()) throw std::invalid_argument("isotonic_fit: size mismatch");
  struct Block {
    double mean, weight;
    int count;
  };
  std::vector<Block> blocks;
  blocks.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    blocks.push_back({y[i], w[i], 1});
    while (blocks.size() >= 2 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
      Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      double tw = a.weight + b.weight;
      a.mean = (a.mean * a.weight + b.mean * b.weight) / tw;
      a.weight = tw;
      a.count += b.count;
    }
  }
  std::vector<double> fit;
  fit.reserve(y.size());
  for (const Block& b : blocks) fit.insert(fit.end(), b.count, b.mean);
  return fit;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double xi = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * xi * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (xi * p0 - p1) / (xi * xi - 1.0);
      double dx = p0 / pp;
      xi -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    nodes[static_cast<std::size_t>(i)] = -xi;
    nodes[static_cast<std::size_t>(n - 1 - i)] = xi;
    double wi = 2.0 / ((1.0 - xi * xi) * pp * pp);
    weights[static_cast<std::size_t>(i)] = wi;
    weights[static_cast<std::size_t>(n - 1 - i)] = wi;
  }
}

double jackknife_ratio_se(const std::vector<double>& chunk_a, const std::vector<double>& chunk_b) {
  std::size_t g = chunk_a.size();
  if (g != chunk_b.size() || g < 2) throw std::invalid_argument("jackknife_ratio_se: need >= 2 chunks");
  double ta = 0.0, tb = 0.0;
  for (std::size_t i = 0; i < g; ++i) {
    ta += chunk_a[i];
    tb += chunk_b[i];
  }
  double full = ta / tb;
  double ss = 0.0;
  for (std::size_t i = 0; i < g; ++i) {
    double r = (ta - chunk_a[i]) / (tb - chunk_b[i]);
    double d = r - full;
    ss += d * d;
  }
  double gf = static_cast<double>(g);
  return std::sqrt((gf - 1.0) / gf * ss);
}

}  // namespace erw
