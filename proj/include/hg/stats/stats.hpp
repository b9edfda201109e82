#pragma once

#include <span>

namespace hg::stats {

// Regularized incomplete beta I_x(a, b), continued fraction (modified Lentz).
double incomplete_beta(double a, double b, double x);

// Two-tailed tail mass P(|T| >= |t|) for Student's t with `df` degrees.
double student_t_two_tailed(double t, double df);

// t such that P(T <= t) = p, for p in (0, 1).
double student_t_quantile(double p, double df);

double mean(std::span<const double> x);
// Sample standard deviation (n - 1 denominator).
double stddev(std::span<const double> x);

// Throws kLengthMismatch, kTooFew (n < 3), kZeroVariance.
double pearson(std::span<const double> x, std::span<const double> y);

// Tau-b. Throws kLengthMismatch, kTooFew (n < 3), kAllTied.
double kendall_tau(std::span<const double> x, std::span<const double> y);

struct TTest {
  double t = 0;
  double df = 0;
  double p_two_tailed = 1;
};

// Paired on d_i = a_i - b_i. Throws kLengthMismatch, kTooFew (n < 2),
// kDegenerateDifferences when the differences have zero spread.
TTest paired_t_test(std::span<const double> a, std::span<const double> b);

// mean(a - b) / sd(a - b). Same errors as paired_t_test.
double cohens_d_paired(std::span<const double> a, std::span<const double> b);

struct Interval {
  double low = 0;
  double high = 0;
};

// mean +- t(0.975, n-1) * sd / sqrt(n). Throws kTooFew, kZeroVariance.
Interval ci95_mean(std::span<const double> x);

}  // namespace hg::stats
