#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <string>

#include "pilotcap/errors.hpp"
#include "pilotcap/numerics.hpp"

namespace pilotcap {

namespace {

// Laguerre recurrence carried with a separate log scale so that it survives
// n = 512 at x ~ 2000.
struct ScaledLaguerre {
  double pn;       // L_n(x) * exp(-log_scale)
  double pn1;      // L_{n-1}(x) * exp(-log_scale)
  double log_scale;
};

ScaledLaguerre laguerre_eval(int n, double x) {
  double p0 = 1.0, p1 = 1.0 - x, ls = 0.0;
  if (n == 0) return {p0, 0.0, 0.0};
  for (int k = 1; k < n; ++k) {
    double p2 = ((2.0 * k + 1.0 - x) * p1 - k * p0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
    double a = std::abs(p1);
    if (a > 1e150) {
      p0 /= a;
      p1 /= a;
      ls += std::log(a);
    }
  }
  return {p1, p0, ls};
}

}  // namespace

QuadratureRule gauss_laguerre(int n) {
  if (n < 1 || n > 512) throw ConfigError("gauss_laguerre: n must be in [1, 512], got " + std::to_string(n));
  QuadratureRule rule{{}, {}, RuleKind::GaussLaguerre};
  if (n == 1) {
    rule.nodes = {1.0};
    rule.weights = {1.0};
    return rule;
  }
  Eigen::VectorXd diag(n), sub(n - 1);
  for (int i = 0; i < n; ++i) diag(i) = 2.0 * i + 1.0;
  for (int i = 0; i < n - 1; ++i) sub(i) = i + 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();

  for (int i = 0; i < n; ++i) {
    double x = ev(i);
    for (int it = 0; it < 50; ++it) {
      auto s = laguerre_eval(n, x);
      double dp = n * (s.pn - s.pn1) / x;  // derivative in the same scale
      double dx = s.pn / dp;
      x -= dx;
      if (std::abs(dx) <= 4e-16 * x) break;
    }
    // w = x / ((n+1)^2 L_{n+1}(x)^2)
    auto s = laguerre_eval(n + 1, x);
    double log_w = std::log(x) - 2.0 * std::log(n + 1.0) - 2.0 * (std::log(std::abs(s.pn)) + s.log_scale);
    double w = std::exp(log_w);
    if (!(w > 0.0)) continue;
    rule.nodes.push_back(x);
    rule.weights.push_back(w);
  }
  return rule;
}

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1 || n > 4096) throw ConfigError("gauss_legendre: n must be in [1, 4096]");
  if (!(a < b)) throw ConfigError("gauss_legendre: need a < b");
  QuadratureRule rule{std::vector<double>(n), std::vector<double>(n), RuleKind::GaussLegendre};
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = mid - half * z;
    rule.nodes[n - 1 - i] = mid + half * z;
    rule.weights[i] = rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

const QuadratureRule& cached_gauss_laguerre(int n) {
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_laguerre(n)).first;
  return it->second;
}

const QuadratureRule& cached_gauss_legendre_unit(int n) {
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_legendre(n, 0.0, 1.0)).first;
  return it->second;
}

namespace {

constexpr std::array<double, 8> kXgk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const ScalarFn& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fc = f(c);
  double rk = fc * kWgk[7], rg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    double dx = h * kXgk[j];
    double s = f(c - dx) + f(c + dx);
    rk += kWgk[j] * s;
    if (j % 2 == 1) rg += kWg[j / 2] * s;
  }
  return {a, b, rk * h, std::abs((rk - rg) * h)};
}

}  // namespace

IntegralResult adaptive_integrate(const ScalarFn& f, double a, double b, double tol, int max_intervals) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw ConfigError("adaptive_integrate: need finite a < b");
  if (!(tol > 0.0)) throw ConfigError("adaptive_integrate: tolerance must be positive");
  std::priority_queue<Segment> heap;
  Segment s0 = gk15(f, a, b);
  double total = s0.value, err = s0.error;
  heap.push(s0);
  int count = 1;
  // Running totals drift when a huge segment is replaced; re-sum from the
  // heap periodically and before accepting convergence.
  auto resum = [&] {
    auto copy = heap;
    total = err = 0.0;
    while (!copy.empty()) {
      total += copy.top().value;
      err += copy.top().error;
      copy.pop();
    }
  };
  for (;;) {
    if (err <= tol) {
      resum();
      if (err <= tol) break;
    }
    if (count >= max_intervals) {
      throw NumericalError("adaptive_integrate: no convergence after " + std::to_string(count) + " intervals", total,
                           err);
    }
    Segment top = heap.top();
    heap.pop();
    double mid = 0.5 * (top.a + top.b);
    Segment l = gk15(f, top.a, mid), r = gk15(f, mid, top.b);
    total += l.value + r.value - top.value;
    err += l.error + r.error - top.error;
    heap.push(l);
    heap.push(r);
    ++count;
    if (count % 64 == 0) resum();
  }
  return {total, err, count};
}

}  // namespace pilotcap
