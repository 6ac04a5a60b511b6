#include "dhira/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dhira/errors.hpp"
#include "dhira/textio.hpp"

namespace dhira::stats {

namespace {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double pearson(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    throw DataError("correlation undefined: constant score vector");
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double probit(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DataError("probit requires p in (0,1)");

  // Acklam's rational approximation.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Halley step against the exact CDF.
  const double e = std_normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

std::vector<double> mean_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

double spearman_rho(std::span<const ScorePair> pairs) {
  if (pairs.size() < 2) throw DataError("spearman_rho requires at least 2 pairs");
  std::vector<double> x(pairs.size()), y(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    x[i] = pairs[i].truth;
    y[i] = pairs[i].predicted;
  }
  const std::vector<double> rx = mean_ranks(x);
  const std::vector<double> ry = mean_ranks(y);
  return pearson(rx, ry);
}

double kendall_tau_b(std::span<const ScorePair> pairs) {
  const std::size_t n = pairs.size();
  if (n < 2) throw DataError("kendall_tau_b requires at least 2 pairs");
  std::int64_t concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = pairs[i].truth - pairs[j].truth;
      const double dy = pairs[i].predicted - pairs[j].predicted;
      if (dx == 0.0 && dy == 0.0) continue;  // tied in both, counted nowhere
      if (dx == 0.0) {
        ++ties_x;
      } else if (dy == 0.0) {
        ++ties_y;
      } else if ((dx > 0.0) == (dy > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double cd = static_cast<double>(concordant + discordant);
  const double denom =
      std::sqrt((cd + static_cast<double>(ties_x)) * (cd + static_cast<double>(ties_y)));
  if (denom == 0.0) throw DataError("kendall_tau_b undefined: all pairs tied on one side");
  return static_cast<double>(concordant - discordant) / denom;
}

double mae(std::span<const ScorePair> pairs) {
  if (pairs.empty()) throw DataError("mae requires at least 1 pair");
  double total = 0.0;
  for (const auto& p : pairs) total += std::abs(p.truth - p.predicted);
  return total / static_cast<double>(pairs.size());
}

double weighted_kappa(std::span<const int> rater1, std::span<const int> rater2,
                      KappaWeights weights) {
  if (rater1.size() != rater2.size() || rater1.empty()) {
    throw DataError("weighted_kappa requires equal-length nonempty label vectors");
  }
  constexpr int kCategories = 6;
  double observed[kCategories][kCategories] = {};
  double marginal1[kCategories] = {};
  double marginal2[kCategories] = {};
  const double n = static_cast<double>(rater1.size());
  for (std::size_t i = 0; i < rater1.size(); ++i) {
    const int r1 = rater1[i];
    const int r2 = rater2[i];
    if (r1 < 0 || r1 >= kCategories || r2 < 0 || r2 >= kCategories) {
      throw DataError("weighted_kappa labels must be in 0..5");
    }
    observed[r1][r2] += 1.0;
    marginal1[r1] += 1.0;
    marginal2[r2] += 1.0;
  }
  double weighted_observed = 0.0;
  double weighted_expected = 0.0;
  for (int i = 0; i < kCategories; ++i) {
    for (int j = 0; j < kCategories; ++j) {
      const double diff = static_cast<double>(i - j);
      const double w = weights == KappaWeights::linear ? std::abs(diff) / 5.0
                                                       : diff * diff / 25.0;
      weighted_observed += w * observed[i][j] / n;
      weighted_expected += w * (marginal1[i] / n) * (marginal2[j] / n);
    }
  }
  if (weighted_expected == 0.0) {
    // Both raters constant and equal: perfect agreement by definition.
    return 1.0;
  }
  return 1.0 - weighted_observed / weighted_expected;
}

double chi2_n_minus_1(const ContingencyTable2x2& t) {
  const double a = static_cast<double>(t.a);
  const double b = static_cast<double>(t.b);
  const double c = static_cast<double>(t.c);
  const double d = static_cast<double>(t.d);
  if (t.a < 0 || t.b < 0 || t.c < 0 || t.d < 0) throw DataError("chi2: negative cell");
  const double n = a + b + c + d;
  if (n < 2) throw DataError("chi2 requires N >= 2");
  const double r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
  if (r1 == 0.0 || r2 == 0.0 || c1 == 0.0 || c2 == 0.0) {
    throw DataError("chi2 undefined: zero marginal row or column");
  }
  const double det = a * d - b * c;
  const double pearson_chi2 = n * det * det / (r1 * r2 * c1 * c2);
  return pearson_chi2 * (n - 1.0) / n;
}

EvaluationReport evaluate(std::span<const ScorePair> pairs) {
  EvaluationReport report;
  report.rho = spearman_rho(pairs);
  report.tau_b = kendall_tau_b(pairs);
  report.mae = mae(pairs);
  report.n = pairs.size();
  return report;
}

std::string EvaluationReport::to_csv_line() const {
  return format_double(rho) + "," + format_double(tau_b) + "," + format_double(mae);
}

std::string EvaluationReport::to_text_block() const {
  std::string out;
  out += "pairs:          " + std::to_string(n) + "\n";
  out += "spearman rho:   " + format_double(rho) + "\n";
  out += "kendall tau-b:  " + format_double(tau_b) + "\n";
  out += "mae:            " + format_double(mae) + "\n";
  return out;
}

}  // namespace dhira::stats
