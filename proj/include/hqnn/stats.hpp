#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hqnn::stats {

struct SampleSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased, divisor n-1; zero when n < 2
};

SampleSummary summarize(std::span<const double> xs);

// Tie-aware AUROC (Mann-Whitney normalization): the fraction of
// (positive, negative) pairs ranked correctly, ties counted half.
// Throws std::invalid_argument when only one class is present.
double auroc(std::span<const double> scores, std::span<const int> labels);

// Regularized incomplete beta function I_x(a, b), Lentz-style continued
// fraction with the symmetry switch at x = (a+1)/(a+b+2).
double incomplete_beta(double a, double b, double x);

// Student-t upper tail P(T > t) for df > 0 (df need not be integer).
double t_survival(double t, double df);

enum class TailDirection { a_greater, a_less };

struct WelchResult {
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_one_tailed = 0.0;
};

// One-tailed Welch unequal-variance t-test. `direction` names the
// alternative hypothesis: a_greater tests mean(a) > mean(b).
WelchResult welch_one_tailed(std::span<const double> a, std::span<const double> b,
                             TailDirection direction);

}  // namespace hqnn::stats
