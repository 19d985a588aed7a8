#include "segbench/special_functions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "segbench/error.hpp"

namespace segbench {

namespace {

constexpr int kNodes = 20;

struct GaussLegendre {
  std::array<double, kNodes> x{};
  std::array<double, kNodes> w{};
};

// Roots of P_20 by Newton iteration from the Chebyshev-like initial guess.
GaussLegendre make_rule() {
  GaussLegendre rule;
  const int n = kNodes;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-16) break;
    }
    rule.x[i] = -z;
    rule.x[n - 1 - i] = z;
    rule.w[i] = rule.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return rule;
}

const GaussLegendre& rule() {
  static const GaussLegendre r = make_rule();
  return r;
}

double panel(const std::function<double(double)>& f, double a, double b) {
  const auto& r = rule();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int i = 0; i < kNodes; ++i) sum += r.w[i] * f(mid + half * r.x[i]);
  return sum * half;
}

double adapt(const std::function<double(double)>& f, double a, double b, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double left = panel(f, a, m);
  const double right = panel(f, m, b);
  if (depth <= 0 || std::fabs(left + right - whole) <= tol) return left + right;
  return adapt(f, a, m, left, tol / 2.0, depth - 1) + adapt(f, m, b, right, tol / 2.0, depth - 1);
}

// Continued fraction for I_x(a, b) (modified Lentz); converges for x < (a+1)/(a+b+2).
double beta_fraction(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 100000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  throw InternalError("incomplete beta continued fraction did not converge");
}

// {I_x(a, b), 1 - I_x(a, b)} with xc = 1 - x supplied by the caller; the
// smaller tail is always evaluated directly.
std::pair<double, double> beta_tails(double x, double xc, double a, double b) {
  const double front =
      std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log(xc));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    const double lower = front * beta_fraction(x, a, b) / a;
    return {lower, 1.0 - lower};
  }
  const double upper = front * beta_fraction(xc, b, a) / b;
  return {1.0 - upper, upper};
}

void check_f_args(double x, double d1, double d2) {
  if (std::isnan(x) || x < 0.0) throw ArgumentError("F distribution argument must be >= 0");
  if (!(d1 > 0.0) || !(d2 > 0.0) || !std::isfinite(d1) || !std::isfinite(d2)) {
    throw ArgumentError("F distribution degrees of freedom must be positive and finite");
  }
}

void check_range_args(double q, int k, double nu) {
  if (std::isnan(q) || q < 0.0) throw ArgumentError("studentized range argument must be >= 0");
  if (k < 2) throw ArgumentError("studentized range needs k >= 2");
  if (std::isnan(nu) || !(nu > 0.0)) throw ArgumentError("studentized range degrees of freedom must be positive");
}

// Phi(u) - Phi(u - w), evaluated in whichever tail keeps precision.
double normal_band(double u, double w) {
  if (u - 0.5 * w > 0.0) return normal_sf(u - w) - normal_sf(u);
  return normal_cdf(u) - normal_cdf(u - w);
}

// P(range of k iid standard normals <= w).
double range_cdf_known_sigma(double w, int k) {
  if (w <= 0.0) return 0.0;
  if (std::isinf(w)) return 1.0;
  auto f = [w, k](double u) { return normal_pdf(u) * std::pow(normal_band(u, w), k - 1); };
  const double lo = -8.5;
  const double hi = 8.5;
  const double value = k * integrate(f, lo, hi, 1e-13);
  return std::min(1.0, std::max(0.0, value));
}

}  // namespace

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw ArgumentError("incomplete beta needs a, b > 0");
  if (std::isnan(x) || x < 0.0 || x > 1.0) throw ArgumentError("incomplete beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  return beta_tails(x, 1.0 - x, a, b).first;
}

double f_cdf(double x, double d1, double d2) {
  check_f_args(x, d1, d2);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  // z = d1 x / (d1 x + d2); 1 - z computed separately to avoid cancellation.
  const double num = d1 * x;
  const double z = num / (num + d2);
  const double zc = d2 / (num + d2);
  return beta_tails(z, zc, d1 / 2.0, d2 / 2.0).first;
}

double f_sf(double x, double d1, double d2) {
  check_f_args(x, d1, d2);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double num = d1 * x;
  const double z = num / (num + d2);
  const double zc = d2 / (num + d2);
  return beta_tails(z, zc, d1 / 2.0, d2 / 2.0).second;
}

double t_two_sided_p(double t, double df) {
  if (std::isnan(t)) throw ArgumentError("t statistic is NaN");
  if (!(df > 0.0)) throw ArgumentError("t distribution degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  const double t2 = t * t;
  return beta_tails(df / (df + t2), t2 / (df + t2), df / 2.0, 0.5).first;
}

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  return adapt(f, a, b, panel(f, a, b), abs_tol, max_depth);
}

double studentized_range_cdf(double q, int k, double nu) {
  check_range_args(q, k, nu);
  if (q == 0.0) return 0.0;
  if (std::isinf(q)) return 1.0;
  if (std::isinf(nu)) return range_cdf_known_sigma(q, k);

  // S = sqrt(chi2_nu / nu) has log-density log_c + (nu - 1) log s - nu s^2 / 2.
  const double log_c = 0.5 * nu * std::log(nu) - std::lgamma(0.5 * nu) - (0.5 * nu - 1.0) * std::log(2.0);
  auto log_density = [&](double s) { return log_c + (nu - 1.0) * std::log(s) - 0.5 * nu * s * s; };
  const double mode = nu > 1.0 ? std::sqrt((nu - 1.0) / nu) : 0.0;
  const double peak = nu > 1.0 ? log_density(mode) : log_density(1.0);
  constexpr double drop = 50.0;

  // Integration limits where the density has fallen e^-50 below its peak.
  auto bisect = [&](double inside, double outside) {
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (inside + outside);
      if (log_density(mid) > peak - drop) inside = mid;
      else outside = mid;
    }
    return outside;
  };
  double hi_out = std::max(2.0, 2.0 * mode);
  const double hi_in = nu > 1.0 ? mode : 1.0;
  while (log_density(hi_out) > peak - drop) hi_out *= 2.0;
  const double hi = bisect(hi_in, hi_out);
  const double lo = nu > 1.0 ? bisect(mode, 0.0) : 0.0;

  double value = 0.0;
  if (nu < 2.0) {
    // s = t^(1/nu) removes the s^(nu-1) singularity at the origin.
    const double inv = 1.0 / nu;
    auto g = [&](double t) {
      if (t <= 0.0) return 0.0;
      const double s = std::pow(t, inv);
      return std::exp(log_c - 0.5 * nu * s * s) * inv * range_cdf_known_sigma(q * s, k);
    };
    value = integrate(g, std::pow(lo, nu), std::pow(hi, nu), 1e-11);
  } else {
    auto g = [&](double s) { return std::exp(log_density(s)) * range_cdf_known_sigma(q * s, k); };
    value = integrate(g, lo, hi, 1e-11);
  }
  return std::min(1.0, std::max(0.0, value));
}

double studentized_range_sf(double q, int k, double nu) { return 1.0 - studentized_range_cdf(q, k, nu); }

}  // namespace segbench
