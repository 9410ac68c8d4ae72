#include <doctest.h>

#include <cmath>
#include <sstream>

#include "regsamp/errors.hpp"
#include "regsamp/population.hpp"
#include "regsamp/stats.hpp"

using namespace regsamp;

namespace {

RegionPool column_pool(std::initializer_list<double> values) {
  CpiMatrix m(static_cast<Eigen::Index>(values.size()), 1);
  Eigen::Index i = 0;
  for (const double v : values) m(i++, 0) = v;
  return RegionPool("test", {"base"}, m);
}

std::string error_of(const std::string& csv) {
  std::istringstream in(csv);
  try {
    load_pool_csv(in);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("population") {
  TEST_CASE("load a small CSV") {
    std::istringstream in("region_id,base,new\nr0,1.0,2.0\nr1,3.0,4.0\n");
    const auto pool = load_pool_csv(in, "app");
    CHECK(pool.region_count() == 2);
    CHECK(pool.config_count() == 2);
    CHECK(pool.config_labels() == std::vector<std::string>{"base", "new"});
    CHECK(pool.values()(0, 0) == 1.0);
    CHECK(pool.values()(0, 1) == 2.0);
    CHECK(pool.values()(1, 0) == 3.0);
    CHECK(pool.values()(1, 1) == 4.0);
    CHECK(pool.instructions_per_region() == 1'000'000);
  }

  TEST_CASE("CRLF line endings and trailing blank lines are accepted") {
    std::istringstream in("region_id,base\r\nr0,1.5\r\nr1,2.5\r\n\r\n");
    const auto pool = load_pool_csv(in);
    CHECK(pool.region_count() == 2);
    CHECK(pool.values()(1, 0) == 2.5);
  }

  TEST_CASE("a pool with 964 regions") {
    std::ostringstream csv;
    csv << "region_id,base\n";
    for (int i = 0; i < 964; ++i) csv << "r" << i << "," << 1.0 + i * 0.001 << "\n";
    std::istringstream in(csv.str());
    CHECK(load_pool_csv(in).region_count() == 964);
  }

  TEST_CASE("ingestion errors name the offending location") {
    const auto neg = error_of("region_id,base,new\nr0,1.0,2.0\nr1,-0.5,4.0\n");
    CHECK(neg.find("line 3") != std::string::npos);
    CHECK(neg.find("column 2") != std::string::npos);
    CHECK(neg.find("positive") != std::string::npos);

    const auto nan_cell = error_of("region_id,base\nr0,abc\n");
    CHECK(nan_cell.find("non-numeric") != std::string::npos);
    CHECK(nan_cell.find("line 2") != std::string::npos);

    CHECK(error_of("region_id,base,new\nr0,1.0\n").find("ragged") != std::string::npos);
    CHECK(error_of("id,base\nr0,1.0\n").find("header") != std::string::npos);
    CHECK(error_of("region_id,base\n").find("no data rows") != std::string::npos);
    CHECK(error_of("").find("empty") != std::string::npos);
    CHECK(error_of("region_id,base\nr0,0\n").find("positive") != std::string::npos);
    CHECK(error_of("region_id,base\nr0,1.0x\n").find("non-numeric") != std::string::npos);
  }

  TEST_CASE("constructor enforces invariants") {
    CpiMatrix m(2, 1);
    m << 1.0, std::nan("");
    CHECK_THROWS_AS(RegionPool("x", {"a"}, m), ValidationError);
    CpiMatrix ok(2, 1);
    ok << 1.0, 2.0;
    CHECK_THROWS_AS(RegionPool("x", {"a", "b"}, ok), ValidationError);
    CHECK_THROWS_AS(RegionPool("x", {"a"}, ok, 0), ValidationError);
  }

  TEST_CASE("round trip through the CSV writer is bit exact") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      auto spec = default_synthetic_spec();
      spec.region_count = 200;
      const auto pool = generate_synthetic(spec, seed);
      std::stringstream buf;
      write_pool_csv(buf, pool);
      const auto back = load_pool_csv(buf, pool.app_label());
      CHECK(back.config_labels() == pool.config_labels());
      CHECK((back.values().array() == pool.values().array()).all());
    }
  }

  TEST_CASE("pool summary") {
    const auto s = pool_summary(column_pool({1.0, 2.0, 3.0})).configs.at(0);
    CHECK(s.true_mean == 2.0);
    CHECK(*s.true_std == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.count == 3);

    const auto constant = pool_summary(column_pool({1.7, 1.7, 1.7, 1.7})).configs.at(0);
    CHECK(constant.true_mean == doctest::Approx(1.7));
    CHECK(*constant.true_std == 0.0);

    // Hand computation: deviations -1,-0.5,0.5,1 -> ss 2.5, var 2.5/3.
    const auto four = pool_summary(column_pool({1.0, 1.5, 2.5, 3.0})).configs.at(0);
    CHECK(four.true_mean == 2.0);
    CHECK(*four.true_std == doctest::Approx(std::sqrt(2.5 / 3.0)).epsilon(1e-14));
    CHECK(*four.true_std == doctest::Approx(0.9129).epsilon(1e-4));

    const auto single = pool_summary(column_pool({2.5})).configs.at(0);
    CHECK(single.true_mean == 2.5);
    CHECK_FALSE(single.true_std.has_value());
  }

  TEST_CASE("true_mean projects the summary and checks the index") {
    CpiMatrix m(2, 2);
    m << 1.0, 2.0, 3.0, 4.0;
    const RegionPool pool("x", {"a", "b"}, m);
    CHECK(true_mean(pool, 0) == 2.0);
    CHECK(true_mean(pool, 1) == 3.0);
    CHECK_THROWS_AS(true_mean(pool, 2), ValidationError);
    CHECK_THROWS_AS(true_mean(pool, -1), ValidationError);
  }

  TEST_CASE("zero-sigma spec reproduces the means exactly") {
    SyntheticSpec spec;
    spec.config_means = {1.25, 0.8};
    spec.std_slope = 0.0;
    spec.std_intercept = 0.0;
    spec.coupling = {0.5};
    spec.region_count = 50;
    const auto pool = generate_synthetic(spec, 3);
    CHECK((pool.values().col(0).array() == 1.25).all());
    CHECK((pool.values().col(1).array() == 0.8).all());
    CHECK(pool.config_labels() == std::vector<std::string>{"config_0", "config_1"});
  }

  TEST_CASE("full coupling gives identical rankings across configs") {
    SyntheticSpec spec;
    spec.config_means = {1.0, 0.7, 0.5};
    spec.std_slope = 0.2;
    spec.std_intercept = 0.0;
    spec.coupling = {1.0};
    spec.region_count = 1000;
    const auto pool = generate_synthetic(spec, 11);
    CHECK(*spearman(pool.values().col(0), pool.values().col(1)) == doctest::Approx(1.0));
    CHECK(*spearman(pool.values().col(0), pool.values().col(2)) == doctest::Approx(1.0));
  }

  TEST_CASE("large-sample moments match the spec") {
    SyntheticSpec spec;
    spec.config_means = {1.0};
    spec.std_slope = 0.3;
    spec.std_intercept = 0.0;
    spec.coupling = {1.0};
    spec.region_count = 10'000;
    const auto pool = generate_synthetic(spec, 5);
    const auto s = pool_summary(pool).configs.at(0);
    CHECK(std::abs(s.true_mean - 1.0) < 0.01);
    CHECK(std::abs(*s.true_std - 0.3) < 0.3 * 0.05);
  }

  TEST_CASE("generated means stay within 2% for every default config") {
    auto spec = default_synthetic_spec();
    spec.region_count = 10'000;
    for (std::uint64_t seed : {7ULL, 8ULL}) {
      const auto pool = generate_synthetic(spec, seed);
      for (std::size_t c = 0; c < spec.config_means.size(); ++c) {
        CHECK(std::abs(true_mean(pool, static_cast<Eigen::Index>(c)) / spec.config_means[c] - 1.0) < 0.02);
      }
    }
  }

  TEST_CASE("generation is a pure function of spec and seed") {
    const auto spec = default_synthetic_spec();
    const auto a = generate_synthetic(spec, 99);
    const auto b = generate_synthetic(spec, 99);
    const auto c = generate_synthetic(spec, 100);
    CHECK((a.values().array() == b.values().array()).all());
    CHECK_FALSE((a.values().array() == c.values().array()).all());
  }

  TEST_CASE("rank correlation increases with coupling") {
    double previous = -2.0;
    for (const double rho : {0.0, 0.5, 0.9, 1.0}) {
      SyntheticSpec spec;
      spec.config_means = {1.0, 0.6};
      spec.std_slope = 0.25;
      spec.std_intercept = 0.0;
      spec.coupling = {rho};
      spec.region_count = 10'000;
      const auto pool = generate_synthetic(spec, 21);
      const double r = *spearman(pool.values().col(0), pool.values().col(1));
      CHECK(r > previous);
      previous = r;
    }
  }

  TEST_CASE("spec validation") {
    SyntheticSpec spec = default_synthetic_spec();
    spec.region_count = 1;
    CHECK_THROWS_AS(spec.validate(), ValidationError);
    spec = default_synthetic_spec();
    spec.coupling = {1.2};
    CHECK_THROWS_AS(spec.validate(), ValidationError);
    spec = default_synthetic_spec();
    spec.std_slope = -1.0;
    CHECK_THROWS_AS(spec.validate(), ValidationError);
    spec = default_synthetic_spec();
    spec.floor_fraction = 1.0;
    CHECK_THROWS_AS(spec.validate(), ValidationError);
    spec = default_synthetic_spec();
    spec.config_means[2] = 0.0;
    CHECK_THROWS_AS(spec.validate(), ValidationError);
    // Negative slope is allowed as long as every sigma stays non-negative.
    spec = default_synthetic_spec();
    spec.std_slope = -0.05;
    spec.std_intercept = 0.2;
    CHECK_NOTHROW(spec.validate());
  }

  TEST_CASE("default suite spans the expected performance range") {
    const auto spec = default_synthetic_spec();
    REQUIRE(spec.config_means.size() == 7);
    CHECK(1.0 / spec.config_means.front() == doctest::Approx(1.52));
    CHECK(1.0 / spec.config_means.back() == doctest::Approx(2.56));
    CHECK(spec.config_means.front() / spec.config_means.back() == doctest::Approx(2.56 / 1.52));
  }
}
