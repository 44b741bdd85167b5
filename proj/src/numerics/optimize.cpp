#include <cmath>
#include <vector>

#include "pilotcap/errors.hpp"
#include "pilotcap/numerics.hpp"

namespace pilotcap {

namespace {
constexpr double kInvPhi = 0.6180339887498949;
}

GoldenResult golden_section(const ScalarFn& f, double lo, double hi, double abs_tol) {
  if (!(lo < hi)) throw ConfigError("golden_section: need lo < hi");
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  int evals = 2;
  while (b - a > abs_tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
    ++evals;
  }
  return f1 <= f2 ? GoldenResult{x1, f1, false, evals} : GoldenResult{x2, f2, false, evals};
}

GoldenResult golden_min(const ScalarFn& f, double lo, double hi, double tol, int scan_points) {
  if (!(lo < hi)) throw ConfigError("golden_min: need lo < hi");
  if (!(tol > 0.0)) throw ConfigError("golden_min: tolerance must be positive");
  if (scan_points < 3) scan_points = 3;
  std::vector<double> xs(scan_points), fs(scan_points);
  int best = 0;
  for (int i = 0; i < scan_points; ++i) {
    xs[i] = lo + (hi - lo) * i / (scan_points - 1);
    fs[i] = f(xs[i]);
    if (fs[i] < fs[best]) best = i;
  }
  if (best == 0 || best == scan_points - 1) return {xs[best], fs[best], true, scan_points};
  GoldenResult r = golden_section(f, xs[best - 1], xs[best + 1], tol * (hi - lo));
  r.evaluations += scan_points;
  if (fs[best] < r.fx) {
    r.x = xs[best];
    r.fx = fs[best];
  }
  return r;
}

}  // namespace pilotcap
