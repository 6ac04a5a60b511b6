#include "dhira/stats.hpp"

#include <cmath>
#include <vector>

#include <doctest.h>

#include "dhira/errors.hpp"
#include "dhira/rng.hpp"
#include "../support/oracles.hpp"

using namespace dhira;
using stats::ScorePair;

namespace {

std::vector<ScorePair> zip(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<ScorePair> pairs;
  for (std::size_t i = 0; i < x.size(); ++i) pairs.push_back({x[i], y[i]});
  return pairs;
}

// Random score vectors on a 0.25 grid so ties are common.
std::vector<ScorePair> random_pairs(Rng& rng, std::size_t n) {
  std::vector<ScorePair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    pairs.push_back({static_cast<double>(rng.below(21)) * 0.25,
                     static_cast<double>(rng.below(21)) * 0.25});
  }
  return pairs;
}

bool degenerate(const std::vector<ScorePair>& pairs) {
  bool cx = true, cy = true;
  for (const auto& p : pairs) {
    cx = cx && p.truth == pairs[0].truth;
    cy = cy && p.predicted == pairs[0].predicted;
  }
  return cx || cy;
}

}  // namespace

TEST_CASE("probit matches the known 97.5% quantile") {
  CHECK(std::abs(stats::probit(0.975) - 1.959963985) < 1e-7);
  CHECK(std::abs(stats::probit(0.5)) < 1e-12);
  CHECK(stats::probit(0.975) == doctest::Approx(-stats::probit(0.025)).epsilon(1e-9));
  CHECK_THROWS_AS(stats::probit(0.0), DataError);
}

TEST_CASE("spearman: perfect monotone and reversed") {
  CHECK(stats::spearman_rho(zip({1, 2, 3, 4}, {1, 2, 3, 4})) == doctest::Approx(1.0));
  CHECK(stats::spearman_rho(zip({1, 2, 3, 4}, {4, 3, 2, 1})) == doctest::Approx(-1.0));
}

TEST_CASE("spearman tie example agrees with the oracle") {
  const auto pairs = zip({1, 2, 2, 4}, {1, 3, 2, 4});
  const double expect = oracles::spearman(pairs);
  CHECK(std::abs(stats::spearman_rho(pairs) - expect) < 1e-12);
  // Hand value: ranks (1, 2.5, 2.5, 4) vs (1, 3, 2, 4).
  CHECK(stats::spearman_rho(pairs) == doctest::Approx(0.9486832980505138).epsilon(1e-12));
}

TEST_CASE("spearman rejects constant vectors") {
  CHECK_THROWS_AS(stats::spearman_rho(zip({2, 2, 2}, {1, 2, 3})), DataError);
  CHECK_THROWS_AS(stats::spearman_rho(zip({1}, {1})), DataError);
}

TEST_CASE("kendall tau-b: enumerated example and edges") {
  CHECK(stats::kendall_tau_b(zip({1, 2, 3}, {1, 3, 2})) == doctest::Approx(1.0 / 3.0));
  CHECK(stats::kendall_tau_b(zip({1, 2, 3, 4}, {1, 2, 3, 4})) == doctest::Approx(1.0));
  // No ties, half the pairs discordant.
  CHECK(stats::kendall_tau_b(zip({1, 2, 3, 4}, {2, 4, 1, 3})) == doctest::Approx(0.0));
  CHECK_THROWS_AS(stats::kendall_tau_b(zip({1, 1, 1}, {1, 2, 3})), DataError);
}

TEST_CASE("rank metrics match brute-force oracles on 200 random tied vectors") {
  Rng rng(20250810);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(199);
    const auto pairs = random_pairs(rng, n);
    if (degenerate(pairs)) continue;
    CHECK(std::abs(stats::spearman_rho(pairs) - oracles::spearman(pairs)) < 1e-9);
    CHECK(std::abs(stats::kendall_tau_b(pairs) - oracles::tau_b(pairs)) < 1e-9);
  }
}

TEST_CASE("rank metrics are invariant under strictly increasing transforms") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto pairs = random_pairs(rng, 50);
    for (auto& p : pairs) {
      p.truth += 0.5;  // keep positive so x^3 is strictly increasing
      p.predicted += 0.5;
    }
    if (degenerate(pairs)) continue;
    auto cubed = pairs;
    for (auto& p : cubed) p.truth = p.truth * p.truth * p.truth;
    CHECK(std::abs(stats::spearman_rho(pairs) - stats::spearman_rho(cubed)) < 1e-12);
    CHECK(std::abs(stats::kendall_tau_b(pairs) - stats::kendall_tau_b(cubed)) < 1e-12);

    auto swapped = pairs;
    for (auto& p : swapped) std::swap(p.truth, p.predicted);
    CHECK(std::abs(stats::spearman_rho(pairs) - stats::spearman_rho(swapped)) < 1e-12);
    CHECK(std::abs(stats::kendall_tau_b(pairs) - stats::kendall_tau_b(swapped)) < 1e-12);
  }
}

TEST_CASE("mae") {
  CHECK(stats::mae(zip({1, 2}, {2, 4})) == doctest::Approx(1.5));
  CHECK(stats::mae(zip({1, 2, 3}, {1, 2, 3})) == 0.0);
  CHECK_THROWS_AS(stats::mae({}), DataError);

  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto pairs = random_pairs(rng, 30);
    const bool equal = [&]() {
      for (const auto& p : pairs) {
        if (p.truth != p.predicted) return false;
      }
      return true;
    }();
    CHECK((stats::mae(pairs) == 0.0) == equal);
  }
}

TEST_CASE("weighted kappa: agreement, anti-agreement, oracle") {
  const std::vector<int> same = {0, 1, 2, 3, 4, 5, 2, 2};
  CHECK(stats::weighted_kappa(same, same) == doctest::Approx(1.0));

  const std::vector<int> r1 = {0, 0, 5, 5};
  const std::vector<int> r2 = {5, 5, 0, 0};
  CHECK(stats::weighted_kappa(r1, r2, stats::KappaWeights::linear) ==
        doctest::Approx(oracles::weighted_kappa(r1, r2, false)));
  CHECK(stats::weighted_kappa(r1, r2, stats::KappaWeights::linear) == doctest::Approx(-1.0));
  CHECK(stats::weighted_kappa(r1, r2, stats::KappaWeights::quadratic) ==
        doctest::Approx(oracles::weighted_kappa(r1, r2, true)));

  // Both raters constant and equal: defined as 1.
  const std::vector<int> constant = {3, 3, 3};
  CHECK(stats::weighted_kappa(constant, constant) == 1.0);

  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> a, b;
    const std::size_t n = 1 + rng.below(40);
    for (std::size_t i = 0; i < n; ++i) {
      a.push_back(static_cast<int>(rng.below(6)));
      b.push_back(static_cast<int>(rng.below(6)));
    }
    const double k = stats::weighted_kappa(a, b);
    CHECK(k <= 1.0 + 1e-12);
    CHECK(k == doctest::Approx(oracles::weighted_kappa(a, b, false)).epsilon(1e-12));
    const double kq = stats::weighted_kappa(a, b, stats::KappaWeights::quadratic);
    CHECK(kq == doctest::Approx(oracles::weighted_kappa(a, b, true)).epsilon(1e-12));
  }
}

TEST_CASE("chi-squared with N-1 correction") {
  CHECK(stats::chi2_n_minus_1({10, 10, 20, 20}) == doctest::Approx(0.0));
  CHECK(stats::chi2_n_minus_1({10, 0, 0, 10}) == doctest::Approx(19.0));

  // Doubling all cells doubles the underlying Pearson statistic.
  const double c1 = stats::chi2_n_minus_1({10, 0, 0, 10});
  const double c2 = stats::chi2_n_minus_1({20, 0, 0, 20});
  const double pearson1 = c1 * 20.0 / 19.0;
  const double pearson2 = c2 * 40.0 / 39.0;
  CHECK(pearson2 == doctest::Approx(2.0 * pearson1));

  CHECK_THROWS_AS(stats::chi2_n_minus_1({0, 0, 5, 5}), DataError);
  CHECK_THROWS_AS(stats::chi2_n_minus_1({0, 5, 0, 5}), DataError);
  CHECK(stats::chi2_n_minus_1({3, 7, 9, 1}) >= 0.0);
}

TEST_CASE("evaluate bundles the three metrics") {
  const auto report = stats::evaluate(zip({1, 2, 3, 4}, {1, 2, 3, 4}));
  CHECK(report.rho == doctest::Approx(1.0));
  CHECK(report.tau_b == doctest::Approx(1.0));
  CHECK(report.mae == doctest::Approx(0.0));
  CHECK(report.to_csv_line() == "1,1,0");
  CHECK(report.to_text_block().find("spearman") != std::string::npos);
}
