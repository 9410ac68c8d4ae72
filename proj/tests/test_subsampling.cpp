#include <doctest.h>

#include <cmath>
#include <limits>

#include "regsamp/errors.hpp"
#include "regsamp/estimators.hpp"
#include "regsamp/random.hpp"
#include "regsamp/subsampling.hpp"
#include "test_helpers.hpp"

using namespace regsamp;
using namespace regsamp::testing;

namespace {

const RegionPool& default_pool() {
  static const RegionPool pool = generate_synthetic(default_synthetic_spec(), 51);
  return pool;
}

double error_on(const RegionPool& pool, const SampleDraw& d, Eigen::Index c) {
  return relative_error(sample_mean(pool, d, c), true_mean(pool, c));
}

}  // namespace

TEST_SUITE("subsampling") {
  TEST_CASE("a single candidate equals one draw with the derived seed") {
    const auto& pool = default_pool();
    const auto set = generate_candidates(pool, SrsSpec{30, 0}, 1, 9);
    REQUIRE(set.draws.size() == 1);
    CHECK(set.draws[0] == draw_srs(pool, {30, derive_seed(9, SeedPurpose::kCandidate, 0)}));
  }

  TEST_CASE("candidate generation at the default size is deterministic") {
    const auto& pool = default_pool();
    const auto a = generate_candidates(pool, SrsSpec{30, 0}, kDefaultCandidateTrials, 10);
    CHECK(a.draws.size() == 1000);
    for (const auto& d : a.draws) CHECK(d.region_indices.size() == 30);
    CHECK(a == generate_candidates(pool, SrsSpec{30, 0}, 1000, 10));
    CHECK(a == generate_candidates(pool, SrsSpec{30, 0}, 1000, 10, 4));
    const auto rss = generate_candidates(pool, RssSpec{1, 30, 0, 0}, 50, 10);
    CHECK(rss == generate_candidates(pool, RssSpec{1, 30, 0, 0}, 50, 10, 3));
    CHECK_THROWS_AS(generate_candidates(pool, SrsSpec{30, 0}, 0, 10), ValidationError);
    CHECK_THROWS_AS(generate_candidates(pool, RssSpec{3, 30, 0, 0}, 5, 10), ValidationError);
  }

  TEST_CASE("Chebyshev walk-through on a toy pool") {
    const auto pool = toy_selection_pool();
    const auto report = select_subsample(pool, toy_candidates(), ChebyshevRelative{{0, 1, 2}});
    CHECK(report.winner_index == 2);
    CHECK(report.criterion == "chebyshev");
    CHECK(report.criterion_value == doctest::Approx(0.04).epsilon(1e-12));
    REQUIRE(report.training_errors.size() == 3);
    REQUIRE(report.test_errors.size() == 4);
    CHECK(report.test_errors[0].config == 3);
    CHECK(report.max_test_error() == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(report.test_errors[0].relative_error == doctest::Approx(0.05).epsilon(1e-12));
    // The per-candidate training maxima are the encoded 8%, 7%, 4%.
    const Eigen::VectorXd truth = pool.values().colwise().mean().transpose();
    const auto scores = score_candidates(candidate_means(pool, toy_candidates()), truth, ChebyshevRelative{{0, 1, 2}});
    CHECK(scores(0) == doctest::Approx(0.08).epsilon(1e-12));
    CHECK(scores(1) == doctest::Approx(0.07).epsilon(1e-12));
    CHECK(scores(2) == doctest::Approx(0.04).epsilon(1e-12));
  }

  TEST_CASE("baseline selection on the toy pool uses config 0 only") {
    const auto pool = toy_selection_pool();
    const auto report = select_subsample(pool, toy_candidates(), BaselineMean{0});
    CHECK(report.winner_index == 1);  // |-2%| is the smallest config-0 error
    CHECK(report.training_errors.size() == 1);
    CHECK(report.test_errors.size() == 6);
  }

  TEST_CASE("a single candidate wins under every criterion") {
    const auto& pool = default_pool();
    const auto set = generate_candidates(pool, SrsSpec{30, 0}, 1, 12);
    for (const SelectionCriterion& c : {SelectionCriterion{BaselineMean{0}}, SelectionCriterion{ChebyshevRelative{{0, 1, 2}}},
                                        SelectionCriterion{CorrelationMax{{0, 1, 2}}}}) {
      const auto report = select_subsample(pool, set, c);
      CHECK(report.winner_index == 0);
      CHECK(report.winner == set.draws[0]);
      for (const auto& e : report.training_errors) CHECK(e.relative_error == doctest::Approx(error_on(pool, set.draws[0], e.config)));
      for (const auto& e : report.test_errors) CHECK(e.relative_error == doctest::Approx(error_on(pool, set.draws[0], e.config)));
    }
  }

  TEST_CASE("baseline selection over all pairs of four regions") {
    const auto pool = make_pool({1.0, 1.7, 2.6, 4.1});
    std::vector<SampleDraw> pairs;
    for (RegionIndex a = 0; a < 4; ++a) {
      for (RegionIndex b = a + 1; b < 4; ++b) pairs.push_back({{a, b}, SrsSpec{2, 0}, {}, {}});
    }
    REQUIRE(pairs.size() == 6);
    // Brute force: pair mean closest to the pool mean (2.35).
    const double truth = (1.0 + 1.7 + 2.6 + 4.1) / 4.0;
    std::size_t best = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto& idx = pairs[i].region_indices;
      const double gap = std::abs((pool.values()(idx[0], 0) + pool.values()(idx[1], 0)) / 2.0 - truth);
      if (gap < best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    const auto report = select_subsample(pool, pairs, BaselineMean{0});
    CHECK(report.winner_index == static_cast<std::int64_t>(best));
    CHECK(report.winner.region_indices == std::vector<RegionIndex>{0, 3});
  }

  TEST_CASE("ties go to the lowest candidate index") {
    const auto pool = make_pool({1.0, 3.0, 2.0, 2.0});
    const std::vector<SampleDraw> cands = {{{0}, SrsSpec{1, 0}, {}, {}}, {{2}, SrsSpec{1, 0}, {}, {}},
                                           {{3}, SrsSpec{1, 0}, {}, {}}};
    CHECK(select_subsample(pool, cands, BaselineMean{0}).winner_index == 1);
    CHECK(best_candidate(Eigen::Vector3d(0.5, 0.2, 0.2), false) == 1);
    CHECK(best_candidate(Eigen::Vector3d(0.9, 0.2, 0.9), true) == 0);
  }

  TEST_CASE("winner is optimal under an exhaustive re-scan") {
    const auto& pool = default_pool();
    const auto set = generate_candidates(pool, SrsSpec{30, 0}, 1000, 13);
    const Eigen::VectorXd truth = pool.values().colwise().mean().transpose();
    for (const SelectionCriterion& c : {SelectionCriterion{BaselineMean{0}}, SelectionCriterion{ChebyshevRelative{{0, 1, 2}}},
                                        SelectionCriterion{CorrelationMax{{0, 1, 2}}}}) {
      const auto report = select_subsample(pool, set, c);
      for (const auto& d : set.draws) {
        const Eigen::RowVectorXd means = pool.values()(d.region_indices, Eigen::all).colwise().mean();
        double value = 0.0;
        if (std::holds_alternative<CorrelationMax>(c)) {
          const Eigen::VectorXd m = means.transpose();
          value = *pearson(m({0, 1, 2}), truth({0, 1, 2}));
          CHECK(report.criterion_value >= value - 1e-12);
        } else {
          for (const auto k : training_configs(c)) value = std::max(value, std::abs(means(k) - truth(k)) / truth(k));
          CHECK(report.criterion_value <= value + 1e-15);
        }
      }
    }
  }

  TEST_CASE("baseline winner attains the minimum baseline error") {
    const auto& pool = default_pool();
    const auto set = generate_candidates(pool, RssSpec{1, 30, 0, 0}, 1000, 14);
    const auto report = select_subsample(pool, set, BaselineMean{0});
    double minimum = std::numeric_limits<double>::infinity();
    for (const auto& d : set.draws) minimum = std::min(minimum, error_on(pool, d, 0));
    CHECK(report.training_errors.at(0).relative_error == doctest::Approx(minimum).epsilon(1e-12));
  }

  TEST_CASE("Chebyshev with one training config matches baseline") {
    const auto& pool = default_pool();
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      const auto set = generate_candidates(pool, SrsSpec{30, 0}, 500, seed);
      for (const Eigen::Index c : {0, 4}) {
        CHECK(select_subsample(pool, set, ChebyshevRelative{{c}}).winner_index ==
              select_subsample(pool, set, BaselineMean{c}).winner_index);
      }
    }
  }

  TEST_CASE("growing the candidate set never worsens the winner") {
    const auto& pool = default_pool();
    const auto set = generate_candidates(pool, SrsSpec{30, 0}, 400, 15);
    for (const SelectionCriterion& c : {SelectionCriterion{BaselineMean{0}}, SelectionCriterion{ChebyshevRelative{{0, 1, 2}}},
                                        SelectionCriterion{CorrelationMax{{0, 1, 2}}}}) {
      double previous = criterion_maximizes(c) ? -std::numeric_limits<double>::infinity()
                                               : std::numeric_limits<double>::infinity();
      for (const std::size_t size : {1u, 10u, 50u, 100u, 400u}) {
        const std::vector<SampleDraw> prefix(set.draws.begin(), set.draws.begin() + static_cast<std::ptrdiff_t>(size));
        const double value = select_subsample(pool, prefix, c).criterion_value;
        if (criterion_maximizes(c)) {
          CHECK(value >= previous);
        } else {
          CHECK(value <= previous);
        }
        previous = value;
      }
    }
  }

  TEST_CASE("baseline winner generalizes better than a typical single draw") {
    const auto& pool = default_pool();
    const auto set = generate_candidates(pool, SrsSpec{30, 0}, 1000, 16);
    const auto report = select_subsample(pool, set, BaselineMean{0});
    for (const auto& e : report.test_errors) {
      const auto ci = empirical_ci(pool, SrsSpec{30, 0}, e.config, 1000, 0.95, 16);
      CHECK(e.relative_error <= ci.relative_half_width);
    }
  }

  TEST_CASE("generalization error on a flat config is zero") {
    CpiMatrix m(40, 2);
    SplitMix64 rng(3);
    for (Eigen::Index r = 0; r < 40; ++r) {
      m(r, 0) = 0.5 + rng.uniform();
      m(r, 1) = 1.25;
    }
    const RegionPool pool("flat", {"a", "b"}, m);
    const auto report = select_subsample(pool, generate_candidates(pool, SrsSpec{5, 0}, 20, 1), BaselineMean{0});
    const auto errors = evaluate_generalization(pool, report, {1});
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].relative_error == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(evaluate_generalization(pool, report, {2}), ValidationError);
  }

  TEST_CASE("fully coupled proportional configs share relative errors") {
    // sigma = 0.1*mu with coupling 1: config 1 is an exact affine image of
    // config 0, and the 5% floor sits ~9.5 sd below the mean so never binds.
    SyntheticSpec spec;
    spec.config_means = {1.0, 0.6};
    spec.std_slope = 0.1;
    spec.std_intercept = 0.0;
    spec.coupling = {1.0};
    spec.region_count = 2000;
    const auto pool = generate_synthetic(spec, 17);
    REQUIRE((pool.values().col(0).array() > 0.05).all());
    const auto report = select_subsample(pool, generate_candidates(pool, SrsSpec{30, 0}, 200, 17), BaselineMean{0});
    const auto test = evaluate_generalization(pool, report, {1});
    CHECK(std::abs(test[0].relative_error - report.training_errors[0].relative_error) < 1e-6);
    CHECK(test[0].relative_error == doctest::Approx(report.test_errors[0].relative_error).epsilon(1e-9));
  }

  TEST_CASE("correlation criterion") {
    const auto& pool = default_pool();
    const auto set = generate_candidates(pool, SrsSpec{30, 0}, 200, 18);
    const auto report = select_subsample(pool, set, CorrelationMax{{0, 3, 6}});
    CHECK(report.criterion == "correlation");
    CHECK(report.criterion_value <= 1.0);
    CHECK(report.criterion_value > 0.9);
    CHECK_THROWS_AS(select_subsample(pool, set, CorrelationMax{{0}}), ValidationError);

    // Equal true means across the training configs: correlation undefined.
    const auto flat = make_pool({1, 2, 2, 1, 3, 3, 2, 2}, {"a", "b"});
    CHECK_THROWS_AS(select_subsample(flat, generate_candidates(flat, SrsSpec{2, 0}, 10, 1), CorrelationMax{{0, 1}}),
                    ValidationError);
  }

  TEST_CASE("criterion validation") {
    const auto& pool = default_pool();
    const auto set = generate_candidates(pool, SrsSpec{30, 0}, 5, 19);
    CHECK_THROWS_AS(select_subsample(pool, set, ChebyshevRelative{{}}), ValidationError);
    CHECK_THROWS_AS(select_subsample(pool, set, ChebyshevRelative{{0, 0}}), ValidationError);
    CHECK_THROWS_AS(select_subsample(pool, set, BaselineMean{7}), ValidationError);
    CHECK_THROWS_AS(select_subsample(pool, std::vector<SampleDraw>{}, BaselineMean{0}), ValidationError);
  }
}
