#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace pilotcap {

enum class RuleKind { GaussLaguerre, GaussLegendre, AdaptiveSegment };

/// Fixed quadrature rule. For GaussLaguerre the e^{-x} weight is folded into
/// the weights, so sum_i w_i f(x_i) approximates E f(X) with X ~ Exp(1).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  RuleKind kind;

  template <class F>
  double apply(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

/// n-point Gauss-Laguerre rule, 1 <= n <= 512. Nodes whose weight underflows
/// a double are dropped, so for large n the rule may hold fewer than n points.
QuadratureRule gauss_laguerre(int n);

/// n-point Gauss-Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Cached rules; the returned reference stays valid for the program lifetime.
const QuadratureRule& cached_gauss_laguerre(int n);
const QuadratureRule& cached_gauss_legendre_unit(int n);  // on [0, 1]

/// log I0(x) for x >= 0.
double log_bessel_i0(double x);

/// e^x E1(x) for x > 0.
double expint_e1_scaled(double x);

/// log(sum exp(v)); -inf for an empty input.
double log_sum_exp(std::span<const double> v);

/// Streaming log-sum-exp accumulator.
class LogSumAcc {
 public:
  void add(double log_term) {
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (log_term <= max_) {
      sum_ += std::exp(log_term - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    }
  }
  double value() const { return sum_ > 0.0 ? max_ + std::log(sum_) : -std::numeric_limits<double>::infinity(); }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

using ScalarFn = std::function<double(double)>;

struct IntegralResult {
  double value;
  double error;
  int intervals;
};

/// Adaptive Gauss-Kronrod (7/15) integration on a finite interval to an
/// absolute tolerance. Throws NumericalError after max_intervals subdivisions.
IntegralResult adaptive_integrate(const ScalarFn& f, double a, double b, double tol, int max_intervals = 4000);

inline double adaptive_integral(const ScalarFn& f, double a, double b, double tol) {
  return adaptive_integrate(f, a, b, tol).value;
}

struct GoldenResult {
  double x;
  double fx;
  bool boundary;  // minimum of the bracket scan sat on an endpoint
  int evaluations;
};

/// Scan f on scan_points equispaced points of [lo, hi], then golden-section
/// refine around the best interior point until the bracket is below
/// tol*(hi-lo). A scan minimum at an endpoint is returned as-is with
/// boundary = true.
GoldenResult golden_min(const ScalarFn& f, double lo, double hi, double tol, int scan_points = 16);

/// Golden-section search on [lo, hi] with no scan; f assumed unimodal.
GoldenResult golden_section(const ScalarFn& f, double lo, double hi, double abs_tol);

}  // namespace pilotcap
