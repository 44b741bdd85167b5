#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "pilotcap/errors.hpp"
#include "pilotcap/numerics.hpp"

namespace pilotcap {

namespace {

// Reference log I0: positive-term power series below 30, asymptotic
// expansion above (truncation error ~ e^{-2x}). Used to build the fast tables.
double log_i0_reference(double x) {
  if (x <= 30.0) {
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 400; ++k) {
      term *= q / (static_cast<double>(k) * k);
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return std::log(sum);
  }
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
    if (next > term) break;
    term = next;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(sum);
}

constexpr int kChebTerms = 40;
constexpr double kSplit = 8.0;

// Chebyshev expansions of e^{-x} I0(x) on [0, 8] in u = x/4 - 1 and of
// sqrt(x) e^{-x} I0(x) on [8, inf) in u = 16/x - 1.
struct I0Tables {
  std::array<double, kChebTerms> lo{}, hi{};

  I0Tables() {
    fit(lo, [](double u) {
      const double x = 4.0 * (u + 1.0);
      return std::exp(log_i0_reference(x) - x);
    });
    fit(hi, [](double u) {
      if (u <= -1.0) return 1.0 / std::sqrt(2.0 * std::numbers::pi);
      const double x = 16.0 / (u + 1.0);
      return std::exp(log_i0_reference(x) - x + 0.5 * std::log(x));
    });
  }

  template <class F>
  static void fit(std::array<double, kChebTerms>& c, F f) {
    constexpr int n = 2 * kChebTerms;
    std::array<double, n> v{};
    for (int k = 0; k < n; ++k) v[k] = f(std::cos(std::numbers::pi * (k + 0.5) / n));
    for (int j = 0; j < kChebTerms; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += v[k] * std::cos(std::numbers::pi * j * (k + 0.5) / n);
      c[j] = 2.0 * s / n;
    }
    c[0] *= 0.5;
  }
};

// Truncation lengths keep the dropped coefficients below 1e-15.
constexpr int kLoTerms = 28;
constexpr int kHiTerms = 20;

double clenshaw(const std::array<double, kChebTerms>& c, int terms, double u) {
  double b1 = 0.0, b2 = 0.0;
  for (int j = terms - 1; j >= 1; --j) {
    const double b0 = 2.0 * u * b1 - b2 + c[j];
    b2 = b1;
    b1 = b0;
  }
  return u * b1 - b2 + c[0];
}

const I0Tables& i0_tables() {
  static const I0Tables t;
  return t;
}

}  // namespace

double log_bessel_i0(double x) {
  if (!(x >= 0.0)) throw DomainError("log_bessel_i0: argument must be nonnegative");
  if (std::isinf(x)) return x;
  if (x < 0.5) {
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 0.0;
    for (int k = 1; k < 12; ++k) {
      term *= q / (static_cast<double>(k) * k);
      sum += term;
    }
    return std::log1p(sum);
  }
  const auto& t = i0_tables();
  if (x <= kSplit) return x + std::log(clenshaw(t.lo, kLoTerms, 0.25 * x - 1.0));
  return x - 0.5 * std::log(x) + std::log(clenshaw(t.hi, kHiTerms, 16.0 / x - 1.0));
}

double expint_e1_scaled(double x) {
  if (!(x > 0.0)) throw DomainError("expint_e1_scaled: argument must be positive");
  if (x <= 1.0) {
    // E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    double sum = 0.0, term = 1.0;
    for (int k = 1; k < 100; ++k) {
      term *= -x / k;
      double add = term / k;
      sum += add;
      if (std::abs(add) < 1e-18) break;
    }
    return std::exp(x) * (-std::numbers::egamma - std::log(x) - sum);
  }
  // Modified Lentz evaluation of the continued fraction for e^x E1(x).
  constexpr double tiny = 1e-300;
  double b = x + 1.0, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 1000; ++i) {
    double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h;
}

double log_sum_exp(std::span<const double> v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  double mx = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

}  // namespace pilotcap
