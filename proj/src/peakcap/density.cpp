#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "pilotcap/errors.hpp"
#include "pilotcap/numerics.hpp"
#include "pilotcap/peakcap.hpp"

namespace pilotcap {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kWindowDepth = 46.0;  // e^-46 ~ 1e-20 relative to the peak

struct AIntegrand {
  int p;  // exponent m-3 of (1-a)
  double lam;
  double b;

  double operator()(double a) const {
    double h = lam * a;
    if (p > 0) h += p * std::log1p(-a);
    if (b > 0.0) h += log_bessel_i0(b * std::sqrt(a));
    return h;
  }
};

template <class H>
double log_gl_sum(const H& h, const QuadratureRule& rule, double lo, double hi) {
  const std::size_t n = rule.nodes.size();
  std::array<double, 256> vals{};
  double mx = kNegInf;
  const double width = hi - lo;
  for (std::size_t i = 0; i < n; ++i) {
    vals[i] = h(lo + width * rule.nodes[i]);
    mx = std::max(mx, vals[i]);
  }
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += rule.weights[i] * std::exp(vals[i] - mx);
  return mx + std::log(s * width);
}

// log int_0^1 (1-a)^p e^{lam a} I0(b sqrt a) da
double log_a_integral(int p, double lam, double b, const InfoSettings& s) {
  const AIntegrand h{p, lam, b};
  const auto& rule = cached_gauss_legendre_unit(std::min(s.a_nodes, 256));
  if (lam + b <= s.a_bandwidth) return log_gl_sum(h, rule, 0.0, 1.0);

  // h is concave in a. Its peak is estimated from the derivative with
  // I1/I0(z) replaced by z / (1 + sqrt(1 + z^2)); each window edge is pushed
  // out until the exact h sits kWindowDepth below the estimated peak value,
  // which by concavity bounds everything outside the window.
  auto slope = [&](double a) {
    double d = lam - (p > 0 ? p / (1.0 - a) : 0.0);
    if (b > 0.0) d += 0.5 * b * b / (1.0 + std::sqrt(1.0 + b * b * a));
    return d;
  };
  auto curvature = [&](double a) {
    double c = p > 0 ? -p / ((1.0 - a) * (1.0 - a)) : 0.0;
    if (b > 0.0) {
      const double s = std::sqrt(1.0 + b * b * a);
      c -= 0.25 * b * b * b * b / (s * (1.0 + s) * (1.0 + s));
    }
    return c;
  };
  double apk;
  if (slope(0.0) <= 0.0) {
    apk = 0.0;
  } else if (p == 0 && slope(1.0) >= 0.0) {
    apk = 1.0;
  } else {
    // Safeguarded Newton on the decreasing slope.
    double lo = 0.0, hi = 1.0;
    apk = 0.5;
    for (int it = 0; it < 100; ++it) {
      const double d = slope(apk);
      (d > 0.0 ? lo : hi) = apk;
      double next = apk - d / curvature(apk);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - apk) <= 1e-12 * (hi - lo + 1e-300) || hi - lo < 1e-14) {
        apk = next;
        break;
      }
      apk = next;
    }
  }
  const double curv = std::abs(curvature(apk));
  double step = curv > 0.0 ? 1.05 * std::sqrt(2.0 * kWindowDepth / curv) : 1.0;
  if (apk == 0.0 || apk == 1.0) step = std::min(step, kWindowDepth / std::max(std::abs(slope(apk)), 1e-300));
  step = std::clamp(step, 1e-12, 1.0);
  const double thresh = h(apk) - kWindowDepth;

  auto edge = [&](double dir) {
    double d = step;
    for (int it = 0; it < 200; ++it) {
      const double a = apk + dir * d;
      if (a <= 0.0) return 0.0;
      if (a >= 1.0) return 1.0;
      if (h(a) <= thresh) return a;
      d *= 1.6;
    }
    return dir < 0 ? 0.0 : 1.0;
  };
  const double left = apk > 0.0 ? edge(-1.0) : 0.0;
  const double right = apk < 1.0 ? edge(1.0) : 1.0;
  if (!(right > left)) return log_gl_sum(h, rule, 0.0, 1.0);
  return log_gl_sum(h, rule, left, right);
}

void check_finite(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0) throw DomainError(std::string(what) + " must be finite and nonnegative");
}

}  // namespace

double log_g_single(int m, double r, double K, double R, const InfoSettings& s) {
  const double r2 = r * r;
  const double t = 1.0 + r2;
  if (m == 2) {
    double b = 2.0 * std::sqrt(K * R) * r / t;
    return -(R + K * r2) / t - std::log1p(r2) + log_bessel_i0(b);
  }
  if (r == 0.0) return -R;
  const double c = r2 / t;
  const double b = 2.0 * std::sqrt(K * R) * r / t;
  return std::log(m - 2.0) - R - K * c - std::log1p(r2) + log_a_integral(m - 3, c * R, b, s);
}

double log_density_r_given_rk(int m, double r, double K, double R) {
  if (m < 2) throw DomainError("kernel dimension m must be >= 2");
  check_finite(r, "r");
  check_finite(K, "K");
  check_finite(R, "R");
  double lg = log_g_single(m, r, K, R);
  if (m == 2) return lg;
  if (R == 0.0) return kNegInf;
  return (m - 2) * std::log(R) - std::lgamma(m - 1.0) + lg;
}

double density_r_given_rk(int m, double r, double K, double R) {
  return std::exp(log_density_r_given_rk(m, r, K, R));
}

double log_mixture_g(int m, const MagnitudeDistribution& dist, double K, double R) {
  if (m < 2) throw DomainError("kernel dimension m must be >= 2");
  check_finite(K, "K");
  check_finite(R, "R");
  LogSumAcc acc;
  for (std::size_t j = 0; j < dist.points.size(); ++j) {
    acc.add(std::log(dist.probs[j]) + log_g_single(m, dist.points[j], K, R));
  }
  return acc.value();
}

double mixture_g(int m, const MagnitudeDistribution& dist, double K, double R) {
  return std::exp(log_mixture_g(m, dist, K, R));
}

double log_mixture_bound(int m, double L, double K, double R) {
  double lead = m > 2 ? std::log(m - 2.0) : 0.0;
  return lead - R / (1.0 + L) + std::sqrt(K * R);
}

MagnitudeDistribution MagnitudeDistribution::single(double r, double peak_L) {
  return MagnitudeDistribution{{r}, {1.0}, peak_L};
}

void MagnitudeDistribution::validate() const {
  if (points.empty() || points.size() != probs.size()) throw DomainError("distribution: points/probs size mismatch");
  if (!(peak_L > 0.0) || !std::isfinite(peak_L)) throw DomainError("distribution: peak L must be positive");
  const double top = std::sqrt(peak_L) * (1.0 + 1e-12);
  double sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(probs[i] > 0.0)) throw DomainError("distribution: probabilities must be positive");
    if (!(points[i] >= 0.0) || points[i] > top) throw DomainError("distribution: mass point outside [0, sqrt(L)]");
    if (i > 0 && !(points[i] > points[i - 1])) throw DomainError("distribution: points must be strictly increasing");
    sum += probs[i];
  }
  if (std::abs(sum - 1.0) > 1e-12) throw DomainError("distribution: probabilities must sum to one");
}

}  // namespace pilotcap
