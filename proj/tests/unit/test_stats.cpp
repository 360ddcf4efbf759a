#include <doctest.h>

#include <cmath>

#include "erw/rng.hpp"
#include "erw/stats.hpp"

using namespace erw;

TEST_CASE("mean/variance accumulator matches closed forms") {
  MeanVar mv;
  for (double x : {1.0, 2.0, 3.0, 4.0}) mv.add(x);
  CHECK(mv.mean() == doctest::Approx(2.5));
  CHECK(mv.variance() == doctest::Approx(5.0 / 3.0));
  CHECK(mv.stderr_mean() == doctest::Approx(std::sqrt(5.0 / 12.0)));

  MeanVar a, b;
  a.add(1.0);
  a.add(2.0);
  b.add(3.0);
  b.add(4.0);
  a.merge(b);
  CHECK(a.mean() == doctest::Approx(mv.mean()));
  CHECK(a.variance() == doctest::Approx(mv.variance()));
}

TEST_CASE("regularized incomplete gamma against known chi-square tails") {
  // chi2 upper tails: P(X > x) for dof=1 at x=3.841 is 0.05; dof=5 at 15.086 is 0.01
  CHECK(chi_square_sf(3.841, 1) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(chi_square_sf(15.086, 5) == doctest::Approx(0.01).epsilon(1e-2));
  CHECK(chi_square_sf(0.0, 3) == doctest::Approx(1.0));
}

TEST_CASE("chi-square test accepts matching counts and rejects gross mismatch") {
  RandomStream rng({21, 0});
  std::vector<double> expected(10, 1000.0);
  std::vector<double> observed(10, 0.0);
  for (int i = 0; i < 10000; ++i) observed[rng.next_index(10)] += 1.0;
  CHECK(chi_square_test(observed, expected) > 0.01);

  std::vector<double> biased = observed;
  biased[0] += 500.0;
  CHECK(chi_square_test(biased, expected) < 1e-6);
}

TEST_CASE("two-sample KS on equal and shifted laws") {
  RandomStream rng({22, 0});
  std::vector<double> a, b, c;
  for (int i = 0; i < 4000; ++i) {
    a.push_back(rng.next_double());
    b.push_back(rng.next_double());
    c.push_back(rng.next_double() + 0.2);
  }
  CHECK(ks_two_sample_p(a, b) > 0.01);
  CHECK(ks_two_sample_p(a, c) < 1e-6);
}

TEST_CASE("isotonic fit pools violators") {
  std::vector<double> y = {1.0, 3.0, 2.0, 4.0};
  std::vector<double> w = {1.0, 1.0, 1.0, 1.0};
  auto fit = isotonic_fit(y, w);
  CHECK(fit[0] == doctest::Approx(1.0));
  CHECK(fit[1] == doctest::Approx(2.5));
  CHECK(fit[2] == doctest::Approx(2.5));
  CHECK(fit[3] == doctest::Approx(4.0));
  for (std::size_t i = 1; i < fit.size(); ++i) CHECK(fit[i] >= fit[i - 1]);
}

TEST_CASE("delta-method ratio matches jackknife on a smooth sample") {
  RandomStream rng({23, 0});
  CrossMoments<2> cm;
  std::vector<double> chunk_a(20, 0.0), chunk_b(20, 0.0);
  for (int i = 0; i < 20000; ++i) {
    double x = 2.0 + rng.next_double();
    double y = 1.0 + 0.5 * rng.next_double();
    double comps[2] = {x, y};
    cm.add(comps);
    chunk_a[i / 1000] += x;
    chunk_b[i / 1000] += y;
  }
  Estimate ratio = ratio_of_means(cm, 0, 1);
  double jk = jackknife_ratio_se(chunk_a, chunk_b);
  CHECK(ratio.se == doctest::Approx(jk).epsilon(0.25));
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  std::vector<double> x, w;
  gauss_legendre(16, x, w);
  double integral = 0.0;
  for (int i = 0; i < 16; ++i) integral += w[i] * (3.0 * x[i] * x[i] + x[i]);
  CHECK(integral == doctest::Approx(2.0).epsilon(1e-12));  // int_{-1}^{1} 3x^2+x dx = 2
}
