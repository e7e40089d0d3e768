#include "spaql/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spaql {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean: empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("sample_variance: need n >= 2");
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

namespace {
// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr double kFpMin = 1e-300;
  constexpr double kEps = 3e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}
}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete beta: a, b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("incomplete beta: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  // Use the symmetry that converges fastest.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
  if (!(dof > 0.0)) throw std::invalid_argument("student_t_cdf: dof must be positive");
  if (std::isinf(t)) return t > 0.0 ? 1.0 : 0.0;
  const double x = dof / (dof + t * t);
  const double two_tail = regularized_incomplete_beta(0.5 * dof, 0.5, x);  // P(|T| > |t|)
  return t > 0.0 ? 1.0 - 0.5 * two_tail : 0.5 * two_tail;
}

double student_t_critical(double alpha, double dof) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("student_t_critical: alpha in (0,1)");
  if (!(dof > 0.0)) throw std::invalid_argument("student_t_critical: dof must be positive");
  auto two_tail = [dof](double t) {
    return regularized_incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
  };
  double hi = 1.0;
  while (two_tail(hi) > alpha) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (two_tail(mid) > alpha)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

ConfidenceInterval ci95(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("ci95: need n >= 2");
  const double m = mean(xs);
  const double v = sample_variance(xs);
  const double n = static_cast<double>(xs.size());
  const double half = v > 0.0 ? student_t_critical(0.05, n - 1.0) * std::sqrt(v / n) : 0.0;
  return {m - half, m + half};
}

WelchResult welch_test(std::span<const double> a, std::span<const double> b, Sided sided) {
  WelchResult r;
  if (a.size() < 2 || b.size() < 2) return {0.0, 0.0, 1.0};
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = mean(a);
  const double mb = mean(b);
  const double sa = sample_variance(a) / na;
  const double sb = sample_variance(b) / nb;
  const double se2 = sa + sb;
  if (se2 == 0.0) {
    r.dof = na + nb - 2.0;
    if (ma == mb) return {0.0, r.dof, 1.0};
    r.t = ma > mb ? std::numeric_limits<double>::infinity()
                  : -std::numeric_limits<double>::infinity();
    if (sided == Sided::kTwo) r.p = 0.0;
    else r.p = ma > mb ? 0.0 : 1.0;
    return r;
  }
  r.t = (ma - mb) / std::sqrt(se2);
  r.dof = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  if (sided == Sided::kTwo)
    r.p = regularized_incomplete_beta(0.5 * r.dof, 0.5, r.dof / (r.dof + r.t * r.t));
  else
    r.p = 1.0 - student_t_cdf(r.t, r.dof);  // H1: mean(a) > mean(b)
  return r;
}

bool solved_check(std::span<const double> returns) {
  if (returns.size() != 100)
    throw std::invalid_argument("solved_check: requires exactly 100 evaluation returns");
  return mean(returns) >= 195.0;
}

}  // namespace spaql
