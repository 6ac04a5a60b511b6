// Independent brute-force oracles for the rank metrics and kappa. These
// deliberately take different algebraic routes than the library:
//   - ranks by per-element counting instead of sorting,
//   - Pearson via explicit two-pass covariance,
//   - tau-b via the sign/tie-group formula instead of C/D/Tx/Ty counting,
//   - kappa via explicit 6x6 observed/expected matrices.
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "dhira/stats.hpp"

namespace oracles {

inline std::vector<double> mean_ranks(std::span<const double> v) {
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t less = 0, equal = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) ++less;
      if (v[j] == v[i]) ++equal;
    }
    ranks[i] = static_cast<double>(less) + (static_cast<double>(equal) + 1.0) / 2.0;
  }
  return ranks;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double cov = 0.0, vx = 0.0, vy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cov += (x[i] - mx) * (y[i] - my);
    vx += (x[i] - mx) * (x[i] - mx);
    vy += (y[i] - my) * (y[i] - my);
  }
  return cov / std::sqrt(vx * vy);
}

inline double spearman(std::span<const dhira::stats::ScorePair> pairs) {
  std::vector<double> x, y;
  for (const auto& p : pairs) {
    x.push_back(p.truth);
    y.push_back(p.predicted);
  }
  const std::vector<double> rx = mean_ranks(x);
  const std::vector<double> ry = mean_ranks(y);
  return pearson(rx, ry);
}

inline double tau_b(std::span<const dhira::stats::ScorePair> pairs) {
  const std::size_t n = pairs.size();
  double numerator = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = pairs[i].truth - pairs[j].truth;
      const double dy = pairs[i].predicted - pairs[j].predicted;
      const double sx = dx > 0 ? 1.0 : (dx < 0 ? -1.0 : 0.0);
      const double sy = dy > 0 ? 1.0 : (dy < 0 ? -1.0 : 0.0);
      numerator += sx * sy;
    }
  }
  const auto tie_term = [&](bool use_truth) {
    double total = 0.0;
    std::vector<bool> seen(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      if (seen[i]) continue;
      double count = 0.0;
      for (std::size_t j = i; j < n; ++j) {
        const double vi = use_truth ? pairs[i].truth : pairs[i].predicted;
        const double vj = use_truth ? pairs[j].truth : pairs[j].predicted;
        if (vi == vj) {
          count += 1.0;
          seen[j] = true;
        }
      }
      total += count * (count - 1.0) / 2.0;
    }
    return total;
  };
  const double n0 = static_cast<double>(n) * (static_cast<double>(n) - 1.0) / 2.0;
  const double n1 = tie_term(true);
  const double n2 = tie_term(false);
  return numerator / std::sqrt((n0 - n1) * (n0 - n2));
}

inline double weighted_kappa(std::span<const int> r1, std::span<const int> r2, bool quadratic) {
  double observed[6][6] = {};
  double p1[6] = {}, p2[6] = {};
  const double n = static_cast<double>(r1.size());
  for (std::size_t i = 0; i < r1.size(); ++i) {
    observed[r1[i]][r2[i]] += 1.0 / n;
    p1[r1[i]] += 1.0 / n;
    p2[r2[i]] += 1.0 / n;
  }
  double wo = 0.0, we = 0.0;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      const double w = quadratic ? (i - j) * (i - j) / 25.0 : std::abs(i - j) / 5.0;
      wo += w * observed[i][j];
      we += w * p1[i] * p2[j];
    }
  }
  if (we == 0.0) return 1.0;
  return 1.0 - wo / we;
}

}  // namespace oracles
