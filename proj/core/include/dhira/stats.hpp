#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dhira::stats {

// One (truth, predicted) score pair on the 0-5 scale.
struct ScorePair {
  double truth = 0.0;
  double predicted = 0.0;
};

struct EvaluationReport {
  double rho = 0.0;
  double tau_b = 0.0;
  double mae = 0.0;
  std::size_t n = 0;

  // One-line CSV "rho,tau_b,mae" with shortest round-trip floats.
  std::string to_csv_line() const;
  std::string to_text_block() const;
};

struct ContingencyTable2x2 {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t c = 0;
  std::int64_t d = 0;
};

enum class KappaWeights { linear, quadratic };

// Standard-normal quantile (inverse CDF). Acklam's rational approximation
// with one Halley refinement step; absolute error well under 1e-9.
double probit(double p);

// Mean ranks for a score vector; ties receive the mean of the ranks they
// span. Ranks are 1-based.
std::vector<double> mean_ranks(std::span<const double> values);

// Spearman's rho as the product-moment correlation of mean ranks (the
// tie-correct form). Throws DataError when fewer than 2 pairs or when either
// side is constant.
double spearman_rho(std::span<const ScorePair> pairs);

// Kendall's tau-b: (C - D) / sqrt((C+D+Tx)(C+D+Ty)) by O(n^2) pair
// enumeration. Throws DataError when fewer than 2 pairs or when either side
// is entirely tied.
double kendall_tau_b(std::span<const ScorePair> pairs);

// Mean absolute error. Throws DataError on empty input.
double mae(std::span<const ScorePair> pairs);

// Cohen's weighted kappa over ordinal labels 0..5. Both raters constant and
// in perfect agreement is defined as kappa = 1.
double weighted_kappa(std::span<const int> rater1, std::span<const int> rater2,
                      KappaWeights weights = KappaWeights::linear);

// Pearson chi-squared with the N-1 correction: chi2 * (N-1)/N, df = 1.
// Throws DataError when a marginal row or column is zero.
double chi2_n_minus_1(const ContingencyTable2x2& t);

EvaluationReport evaluate(std::span<const ScorePair> pairs);

}  // namespace dhira::stats
