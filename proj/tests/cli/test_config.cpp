#include <gtest/gtest.h>

#include "config.hpp"
#include "hardy/errors.hpp"
#include "record.hpp"

using namespace hardy;
using namespace hardy::cli;

TEST(Config, Defaults) {
  const ExperimentConfig c = parse_config("", "spectral");
  EXPECT_EQ(c.kind, "spectral");
  EXPECT_EQ(c.domain.dim, 3);
  EXPECT_EQ(c.symmetry, "none");
  EXPECT_EQ(c.refine, 0);
  EXPECT_GT(c.h, 0.0);
}

TEST(Config, ParsesBlocksAndComments) {
  const ExperimentConfig c = parse_config(
      "# comment\n"
      "domain.dim = 5   # trailing\n"
      "domain.sigma_kind = sphere\n"
      "domain.k = 1\n"
      "domain.r_sigma = 0.5\n"
      "\n"
      "spectral.mu = 0.25\n"
      "grid.h = 0.1\n"
      "grid.refine = 2\n"
      "grid.symmetry = axis\n"
      "experiment.seed = 99\n"
      "experiment.p_list = 1.5, 2,2.5\n"
      "experiment.atom = 0.4,0,0,0,0\n",
      "sweep");
  EXPECT_EQ(c.domain.dim, 5);
  EXPECT_EQ(c.domain.k, 1);
  EXPECT_DOUBLE_EQ(c.domain.r_sigma, 0.5);
  EXPECT_DOUBLE_EQ(c.mu, 0.25);
  EXPECT_EQ(c.refine, 2);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_DOUBLE_EQ(c.level_h(2), 0.025);
  EXPECT_EQ(c.list("p_list", {}), (std::vector<double>{1.5, 2.0, 2.5}));
  const Point a = c.point("atom", Point(5));
  EXPECT_DOUBLE_EQ(a[0], 0.4);
  EXPECT_EQ(c.num("rel_tol", 7.0), 7.0);
}

TEST(Config, PointListsSplitOnSemicolons) {
  const ExperimentConfig c = parse_config("experiment.points = 0.1,0,0; 0,0.2,0;\n", "capacity");
  const auto pts = c.points("points");
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_DOUBLE_EQ(pts[1][1], 0.2);
}

TEST(Config, Rejections) {
  EXPECT_THROW(parse_config("foo.bar = 1\n", "spectral"), ConfigurationError);
  EXPECT_THROW(parse_config("experiment.p = 2\n", "spectral"), ConfigurationError);
  EXPECT_THROW(parse_config("grid.h = 0.1\ngrid.h = 0.2\n", "spectral"), ConfigurationError);
  EXPECT_THROW(parse_config("grid.h\n", "spectral"), ConfigurationError);
  EXPECT_THROW(parse_config("grid.h = \n", "spectral"), ConfigurationError);
  EXPECT_THROW(parse_config("grid.h = 0.1x\n", "spectral"), ConfigurationError);
  EXPECT_THROW(parse_config("grid.h = -1\n", "spectral"), ConfigurationError);
  EXPECT_THROW(parse_config("grid.refine = 9\n", "spectral"), ConfigurationError);
  EXPECT_THROW(parse_config("grid.symmetry = some\n", "spectral"), ConfigurationError);
  EXPECT_THROW(parse_config("domain.dim = 2\n", "spectral"), ConfigurationError);
  EXPECT_THROW(parse_config("domain.sigma_kind = sphere\n", "spectral"), ConfigurationError);
  EXPECT_THROW(parse_config("domain.k = 1\n", "spectral"), ConfigurationError);
  EXPECT_THROW(parse_config("experiment.kind = sweep\n", "spectral"), ConfigurationError);
  EXPECT_THROW(parse_config("", "nonsense"), ConfigurationError);
  EXPECT_THROW(parse_config("", ""), ConfigurationError);
  EXPECT_THROW(parse_config("experiment.seed = -3\n", "spectral"), ConfigurationError);
}

TEST(Config, KindFromFile) {
  EXPECT_EQ(parse_config("experiment.kind = iterate\n", "").kind, "iterate");
  EXPECT_EQ(parse_config("experiment.kind = iterate\n", "iterate").kind, "iterate");
}

TEST(Config, TypedGettersValidate) {
  const ExperimentConfig c = parse_config("experiment.dump_fields = maybe\nexperiment.atom = 1,2\n", "iterate");
  EXPECT_THROW(c.flag("dump_fields", false), ConfigurationError);
  EXPECT_THROW(c.point("atom", Point(3)), ConfigurationError);
  EXPECT_THROW(c.str("p"), ConfigurationError);
}

TEST(Config, SymmetrySpecs) {
  EXPECT_THROW(parse_config("domain.dim = 4\ndomain.sigma_kind = sphere\ndomain.k = 1\ndomain.r_sigma = 0.5\n"
                            "grid.symmetry = full\n",
                            "spectral")
                   .symmetry_spec(),
               ConfigurationError);
  const auto full = parse_config("grid.symmetry = full\n", "spectral").symmetry_spec();
  const auto axis = parse_config("grid.symmetry = axis\n", "spectral").symmetry_spec();
  EXPECT_EQ(full.mirror_mask, 0b111u);
  EXPECT_EQ(full.perm_begin, 0);
  EXPECT_EQ(full.perm_end, 3);
  EXPECT_EQ(axis.mirror_mask, 0b110u);
  EXPECT_EQ(axis.perm_begin, 1);
  EXPECT_EQ(axis.perm_end, 3);
  const auto sphere = parse_config("domain.dim = 5\ndomain.sigma_kind = sphere\ndomain.k = 1\n"
                                   "domain.r_sigma = 0.5\ngrid.symmetry = axis\n",
                                   "spectral")
                          .symmetry_spec();
  EXPECT_EQ(sphere.mirror_mask, 0b11110u);
  EXPECT_EQ(sphere.perm_begin, 2);
  EXPECT_TRUE(parse_config("", "spectral").symmetry_spec().trivial());
}

TEST(Record, NumbersRoundTrip) {
  EXPECT_EQ(format_number(0.125), "0.125");
  EXPECT_EQ(std::stod(format_number(0.1)), 0.1);
  CsvTable t({"a", "b"});
  t.add({1, "x"});
  EXPECT_EQ(t.str(), "a,b\n1,x\n");
}
