#include "hqnn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hqnn::stats {

SampleSummary summarize(std::span<const double> xs) {
  SampleSummary s;
  s.n = xs.size();
  if (s.n == 0) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(s.n);
  if (s.n >= 2) {
    double ss = 0.0;
    for (double x : xs) {
      const double d = x - s.mean;
      ss += d * d;
    }
    s.variance = ss / static_cast<double>(s.n - 1);
  }
  return s;
}

double auroc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("stats: auroc input lengths differ");
  }
  std::size_t n_pos = 0, n_neg = 0;
  for (int l : labels) {
    if (l == 1) ++n_pos;
    else if (l == 0) ++n_neg;
    else throw std::invalid_argument("stats: auroc labels must be 0 or 1");
  }
  if (n_pos == 0 || n_neg == 0) {
    throw std::invalid_argument("stats: auroc undefined with a single class");
  }

  // Average ranks over ties, then the Mann-Whitney U statistic.
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return scores[i] < scores[j]; });

  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
    }
    i = j + 1;
  }
  const double u = rank_sum_pos -
                   static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

namespace {

// Continued fraction for I_x(a, b), evaluated with modified Lentz.
double beta_cf(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-12;
  constexpr int kMaxIter = 300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) {
    throw std::invalid_argument("stats: incomplete_beta requires a, b > 0");
  }
  if (x < 0.0 || x > 1.0) {
    throw std::invalid_argument("stats: incomplete_beta requires x in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double t_survival(double t, double df) {
  if (!(df > 0.0)) {
    throw std::invalid_argument("stats: t_survival requires df > 0");
  }
  if (!std::isfinite(t)) {
    throw std::invalid_argument("stats: t_survival requires finite t");
  }
  const double x = df / (df + t * t);
  const double half_tail = 0.5 * incomplete_beta(df / 2.0, 0.5, x);
  return (t >= 0.0) ? half_tail : 1.0 - half_tail;
}

WelchResult welch_one_tailed(std::span<const double> a, std::span<const double> b,
                             TailDirection direction) {
  const SampleSummary sa = summarize(a);
  const SampleSummary sb = summarize(b);
  if (sa.n < 2 || sb.n < 2) {
    throw std::invalid_argument("stats: Welch test requires n >= 2 in both samples");
  }
  const double va_n = sa.variance / static_cast<double>(sa.n);
  const double vb_n = sb.variance / static_cast<double>(sb.n);
  const double se_sq = va_n + vb_n;
  if (se_sq <= 0.0) {
    if (sa.mean == sb.mean) {
      throw std::invalid_argument("stats: degenerate samples, zero variance and equal means");
    }
    throw std::invalid_argument("stats: degenerate samples, zero pooled variance");
  }
  WelchResult r;
  r.t_statistic = (sa.mean - sb.mean) / std::sqrt(se_sq);
  // Welch-Satterthwaite; kept non-integer.
  r.degrees_of_freedom =
      se_sq * se_sq /
      (va_n * va_n / static_cast<double>(sa.n - 1) + vb_n * vb_n / static_cast<double>(sb.n - 1));
  const double t = (direction == TailDirection::a_greater) ? r.t_statistic : -r.t_statistic;
  r.p_one_tailed = t_survival(t, r.degrees_of_freedom);
  return r;
}

}  // namespace hqnn::stats
