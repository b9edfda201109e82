#include "hg/stats/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hg/common/error.hpp"

namespace hg::stats {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) {
    fail(ErrorCode::kLengthMismatch,
         "lengths " + std::to_string(a) + " and " + std::to_string(b) + " differ");
  }
}

void check_min(std::size_t n, std::size_t min) {
  if (n < min) {
    fail(ErrorCode::kTooFew, "need at least " + std::to_string(min) + " values, got " +
                                 std::to_string(n));
  }
}

struct DiffStats {
  double mean;
  double sd;
  std::size_t n;
};

DiffStats differences(std::span<const double> a, std::span<const double> b) {
  check_lengths(a.size(), b.size());
  check_min(a.size(), 2);
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double sd = stddev(d);
  if (!(sd > 0.0)) fail(ErrorCode::kDegenerateDifferences, "differences have zero variance");
  return {mean(d), sd, d.size()};
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0 && b > 0) || !(x >= 0 && x <= 1)) {
    fail(ErrorCode::kInvalidArgument, "incomplete_beta outside its domain");
  }
  if (x == 0.0 || x == 1.0) return x;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The fraction converges fastest on the side of the mean.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_tailed(double t, double df) {
  if (!(df > 0)) fail(ErrorCode::kInvalidArgument, "degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return incomplete_beta(df / 2.0, 0.5, x);
}

double student_t_quantile(double p, double df) {
  if (!(p > 0 && p < 1)) fail(ErrorCode::kInvalidArgument, "quantile probability outside (0, 1)");
  if (p == 0.5) return 0.0;
  // Solve I_x(df/2, 1/2) = 2 min(p, 1-p) for x by bisection; x is monotone in |t|.
  const double tail = 2.0 * std::min(p, 1.0 - p);
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (incomplete_beta(df / 2.0, 0.5, mid) < tail) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double x = 0.5 * (lo + hi);
  const double t = std::sqrt(df * (1.0 - x) / x);
  return p < 0.5 ? -t : t;
}

double mean(std::span<const double> x) {
  if (x.empty()) fail(ErrorCode::kTooFew, "mean of no values");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) {
  check_min(x.size(), 2);
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double pearson(std::span<const double> x, std::span<const double> y) {
  check_lengths(x.size(), y.size());
  check_min(x.size(), 3);
  const double mx = mean(x), my = mean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) fail(ErrorCode::kZeroVariance, "a sample is constant");
  const double r = sxy / (std::sqrt(sxx) * std::sqrt(syy));
  return std::clamp(r, -1.0, 1.0);
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  check_lengths(x.size(), y.size());
  check_min(x.size(), 3);
  // O(n^2) pair scan; inputs are study-sized.
  long long concordant = 0, discordant = 0, x_only = 0, y_only = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const int sx = (x[i] > x[j]) - (x[i] < x[j]);
      const int sy = (y[i] > y[j]) - (y[i] < y[j]);
      if (sx != 0 && sy != 0) {
        (sx == sy ? concordant : discordant)++;
      } else if (sx != 0) {
        ++y_only;
      } else if (sy != 0) {
        ++x_only;
      }
    }
  }
  const double denom = static_cast<double>(concordant + discordant + x_only) *
                       static_cast<double>(concordant + discordant + y_only);
  if (denom == 0.0) fail(ErrorCode::kAllTied, "no untied pair in one of the samples");
  return static_cast<double>(concordant - discordant) / std::sqrt(denom);
}

TTest paired_t_test(std::span<const double> a, std::span<const double> b) {
  const DiffStats d = differences(a, b);
  TTest out;
  out.t = d.mean / (d.sd / std::sqrt(static_cast<double>(d.n)));
  out.df = static_cast<double>(d.n - 1);
  out.p_two_tailed = student_t_two_tailed(out.t, out.df);
  return out;
}

double cohens_d_paired(std::span<const double> a, std::span<const double> b) {
  const DiffStats d = differences(a, b);
  return d.mean / d.sd;
}

Interval ci95_mean(std::span<const double> x) {
  check_min(x.size(), 2);
  const double sd = stddev(x);
  if (!(sd > 0.0)) fail(ErrorCode::kZeroVariance, "constant sample has no interval");
  const double m = mean(x);
  const double half = student_t_quantile(0.975, static_cast<double>(x.size() - 1)) * sd /
                      std::sqrt(static_cast<double>(x.size()));
  return {m - half, m + half};
}

}  // namespace hg::stats
