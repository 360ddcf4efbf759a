#include <doctest.h>

#include "erw/config.hpp"

using namespace erw;

TEST_CASE("config text round-trips through parse and emit") {
  ExperimentConfig c;
  c.experiment = "sweep";
  c.d = 10;
  c.m = kInfiniteCookies;
  c.beta_grid = {0.0, 0.2, 0.4, 0.6, 0.8};
  c.env = "iid(seed=3,m=1,iden=1,law=uniform(-0.25,0.25))";
  c.window = {20000, 20000};
  c.seed = 99;
  std::string text = c.emit();
  ExperimentConfig back = ExperimentConfig::parse_text(text);
  CHECK(back.emit() == text);
  CHECK(back.m == kInfiniteCookies);
  CHECK(back.beta_grid.size() == 5);
  CHECK(back.hash() == c.hash());
}

TEST_CASE("comments, blanks and overrides") {
  std::string text = "# experiment file\nexperiment = speed\n\nd = 8   # dimension\nseed = 5\n";
  ExperimentConfig c = ExperimentConfig::parse_text(text);
  CHECK(c.experiment == "speed");
  CHECK(c.d == 8);
  CHECK(c.seed == 5);

  ExperimentConfig o = ExperimentConfig::load("", {{"d", "12"}, {"beta", "0.25"}});
  CHECK(o.d == 12);
  CHECK(o.beta == 0.25);
}

TEST_CASE("validation rejects bad values") {
  CHECK_THROWS(ExperimentConfig::parse_text("d = 0\n"));
  CHECK_THROWS(ExperimentConfig::parse_text("beta = 1.5\n"));
  CHECK_THROWS(ExperimentConfig::parse_text("t = -0.1\n"));
  CHECK_THROWS(ExperimentConfig::parse_text("eps = 0\n"));
  CHECK_THROWS(ExperimentConfig::parse_text("unknown_key = 3\n"));
  CHECK_THROWS(ExperimentConfig::parse_text("d = 4\nd = 5\n"));
  CHECK_THROWS(ExperimentConfig::parse_text("env = bogus(3)\n"));
}

TEST_CASE("hash tracks content") {
  ExperimentConfig a, b;
  CHECK(a.hash() == b.hash());
  b.replicates += 1;
  CHECK(a.hash() != b.hash());
  CHECK(a.hash().size() == 16);
}

TEST_CASE("beta grid formatting round-trips") {
  std::vector<double> grid = {0.0, 0.2, 0.123456789012345};
  CHECK(parse_beta_grid(format_beta_grid(grid)) == grid);
}
