#include "ggmlrt/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ggmlrt/error.hpp"

namespace ggmlrt {
namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 100000;
constexpr double kTiny = 1e-300;

double lower_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - ln_gamma(a));
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double upper_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - ln_gamma(a)) * h;
}

void check_gamma_args(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("incomplete gamma requires a > 0");
  if (!(x >= 0.0) || std::isnan(x)) throw DomainError("incomplete gamma requires x >= 0");
}

void check_dof(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("chi-square requires k > 0");
}

double log_poisson(double mean, int j) {
  return -mean + j * std::log(mean) - ln_gamma(j + 1.0);
}

// Poisson index window whose complement carries less than 1e-12 of the mass.
std::pair<int, int> poisson_window(double mean) {
  const double spread = 12.0 * std::sqrt(mean) + 12.0;
  const int lo = static_cast<int>(std::max(0.0, std::floor(mean - spread)));
  const int hi = static_cast<int>(std::ceil(mean + spread));
  return {lo, hi};
}

}  // namespace

double ln_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("ln_gamma requires x > 0");
  return std::lgamma(x);
}

double reg_gamma_lower(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return std::clamp(lower_series(a, x), 0.0, 1.0);
  return std::clamp(1.0 - upper_fraction(a, x), 0.0, 1.0);
}

double reg_gamma_upper(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return std::clamp(1.0 - lower_series(a, x), 0.0, 1.0);
  return std::clamp(upper_fraction(a, x), 0.0, 1.0);
}

double chi2_sf(double x, double k) {
  check_dof(k);
  if (std::isnan(x)) throw DomainError("chi2_sf of NaN");
  if (x <= 0.0) return 1.0;
  return reg_gamma_upper(0.5 * k, 0.5 * x);
}

double chi2_cdf(double x, double k) {
  check_dof(k);
  if (std::isnan(x)) throw DomainError("chi2_cdf of NaN");
  if (x <= 0.0) return 0.0;
  return reg_gamma_lower(0.5 * k, 0.5 * x);
}

double chi2_pdf(double x, double k) {
  check_dof(k);
  if (x < 0.0) return 0.0;
  if (x == 0.0) {
    if (k < 2.0) return std::numeric_limits<double>::infinity();
    return k == 2.0 ? 0.5 : 0.0;
  }
  const double h = 0.5 * k;
  return std::exp((h - 1.0) * std::log(x) - 0.5 * x - h * std::log(2.0) - ln_gamma(h));
}

double chi2_quantile(double u, double k) {
  check_dof(k);
  if (!(u > 0.0 && u < 1.0)) throw DomainError("chi2_quantile requires u in (0, 1)");

  // Work on whichever tail is smaller so that 1 - u does not lose digits.
  const bool upper = u > 0.5;
  const double target = upper ? 1.0 - u : u;
  auto residual = [&](double x) { return upper ? chi2_sf(x, k) - target : chi2_cdf(x, k) - target; };
  // residual is monotone: decreasing in x for the upper tail, increasing otherwise.
  auto below_root = [&](double x) { return upper ? residual(x) > 0.0 : residual(x) < 0.0; };

  double lo = 0.0;
  double hi = std::max(1.0, k);
  while (below_root(hi)) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 400 && (hi - lo) > 1e-3 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (below_root(mid) ? lo : hi) = mid;
  }

  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 60; ++i) {
    const double f = residual(x);
    const double slope = upper ? -chi2_pdf(x, k) : chi2_pdf(x, k);
    double next = (slope != 0.0 && std::isfinite(slope)) ? x - f / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    (below_root(next) ? lo : hi) = next;
    if (std::abs(next - x) <= 1e-14 * std::max(1.0, x)) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

double noncentral_chi2_sf(double x, double k, double lambda) {
  check_dof(k);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DomainError("noncentrality must be finite and nonnegative");
  }
  if (lambda == 0.0) return chi2_sf(x, k);
  if (x <= 0.0) return 1.0;
  const double mean = 0.5 * lambda;
  const auto [lo, hi] = poisson_window(mean);
  double sum = 0.0;
  for (int j = lo; j <= hi; ++j) {
    sum += std::exp(log_poisson(mean, j)) * chi2_sf(x, k + 2.0 * j);
  }
  return std::clamp(sum, 0.0, 1.0);
}

double noncentral_chi2_pdf(double x, double k, double lambda) {
  check_dof(k);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DomainError("noncentrality must be finite and nonnegative");
  }
  if (lambda == 0.0) return chi2_pdf(x, k);
  if (x < 0.0) return 0.0;
  const double mean = 0.5 * lambda;
  const auto [lo, hi] = poisson_window(mean);
  double sum = 0.0;
  for (int j = lo; j <= hi; ++j) {
    sum += std::exp(log_poisson(mean, j)) * chi2_pdf(x, k + 2.0 * j);
  }
  return sum;
}

}  // namespace ggmlrt
