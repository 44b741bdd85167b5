#include <algorithm>
#include <cmath>
#include <limits>

#include "pilotcap/errors.hpp"
#include "pilotcap/numerics.hpp"
#include "pilotcap/parallel.hpp"
#include "pilotcap/peakcap.hpp"
#include "peakcap_internal.hpp"

namespace pilotcap {

namespace {

constexpr double kPrune = 1e-8;

MagnitudeDistribution make_dist(const std::vector<double>& pts, const std::vector<double>& probs, double L) {
  return MagnitudeDistribution{pts, probs, L};
}

// Weight solve followed by removal of negligible masses.
double solve_weights(const InfoFunctional& fn, std::vector<double>& pts, std::vector<double>& probs, double tol) {
  for (;;) {
    InfoFunctional::WeightSolver ws(fn, pts);
    probs = ws.optimize(probs, tol);
    std::vector<double> np, nq;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (probs[j] >= kPrune) {
        np.push_back(pts[j]);
        nq.push_back(probs[j]);
      }
    }
    if (np.size() == pts.size()) {
      auto dens = ws.densities(probs);
      double info = 0.0;
      for (std::size_t j = 0; j < pts.size(); ++j) info += probs[j] * dens[j];
      return info;
    }
    double z = 0.0;
    for (double q : nq) z += q;
    for (double& q : nq) q /= z;
    pts = std::move(np);
    probs = std::move(nq);
  }
}

// Moves interior masses to the local maximum of i(r; F) between the
// midpoints to their neighbours.
void refine_locations(const InfoFunctional& fn, std::vector<double>& pts, const std::vector<double>& probs) {
  const double top = std::sqrt(fn.model().peak_L);
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (pts[j] == 0.0 || pts[j] == top) continue;
    const double lo = j == 0 ? 0.0 : 0.5 * (pts[j - 1] + pts[j]);
    const double hi = j + 1 == pts.size() ? top : 0.5 * (pts[j] + pts[j + 1]);
    auto dist = make_dist(pts, probs, fn.model().peak_L);
    auto neg = [&](double r) {
      auto d = dist;
      d.points[j] = r;
      return -fn.info_density(r, d);
    };
    auto g = golden_section(neg, lo, hi, 1e-6 * top);
    double best = g.x, fbest = g.fx;
    for (double edge : {lo, hi}) {
      if ((edge == 0.0 || edge == top) && neg(edge) < fbest) {
        fbest = neg(edge);
        best = edge;
      }
    }
    pts[j] = best;
  }
  // Merge masses that collapsed onto each other.
  std::vector<double> np;
  for (double r : pts) {
    if (np.empty() || r - np.back() > 1e-6 * top) np.push_back(r);
  }
  pts = np;
}

// Position near a coarse-grid minimum of the gap that maximizes i(r; F).
// The ends of [0, sqrt(L)] are candidates in their own right.
double polish_new_point(const InfoFunctional& fn, const MagnitudeDistribution& dist, double lo, double hi) {
  auto neg = [&](double r) { return -fn.info_density(r, dist); };
  auto g = golden_section(neg, lo, hi, 1e-6 * (hi - lo + 1e-12));
  double best = g.x, fbest = g.fx;
  const double top = std::sqrt(dist.peak_L);
  for (double edge : {lo, hi}) {
    if (edge == 0.0 || edge == top) {
      const double fe = neg(edge);
      if (fe < fbest) {
        fbest = fe;
        best = edge;
      }
    }
  }
  return best;
}

void insert_point(std::vector<double>& pts, std::vector<double>& probs, double r) {
  auto it = std::lower_bound(pts.begin(), pts.end(), r);
  std::size_t idx = it - pts.begin();
  const double top = pts.empty() ? 1.0 : std::max(pts.back(), r);
  if (it != pts.end() && std::abs(*it - r) <= 1e-9 * top) return;
  if (idx > 0 && std::abs(pts[idx - 1] - r) <= 1e-9 * top) return;
  pts.insert(it, r);
  probs.insert(probs.begin() + idx, 0.1);
  double z = 0.0;
  for (double q : probs) z += q;
  for (double& q : probs) q /= z;
}

}  // namespace

OptimizedDist optimize_from(const InfoFunctional& fn, std::vector<double> pts, std::vector<double> probs,
                            const OptimizerOptions& opt) {
  const double L = fn.model().peak_L;
  const double top = std::sqrt(L);
  const double eps = opt.eps_kt;
  OptimizedDist best;
  bool have = false;
  for (int round = 0; round < opt.max_rounds; ++round) {
    double info = solve_weights(fn, pts, probs, 1e-3 * eps);
    bool interior = false;
    for (double r : pts) interior |= (r > 0.0 && r < top);
    if (interior) {
      // Location moves are not guaranteed to help, so each pass is kept only
      // if the optimized information grows.
      for (int pass = 0; pass < 3; ++pass) {
        auto np = pts;
        auto nq = probs;
        refine_locations(fn, np, nq);
        if (np.size() != nq.size()) nq.assign(np.size(), 1.0 / np.size());
        const double ninfo = solve_weights(fn, np, nq, 1e-3 * eps);
        if (!(ninfo > info)) break;
        double shift = 0.0;
        if (np.size() == pts.size()) {
          for (std::size_t j = 0; j < pts.size(); ++j) shift = std::max(shift, std::abs(np[j] - pts[j]));
        } else {
          shift = top;
        }
        pts = std::move(np);
        probs = std::move(nq);
        info = ninfo;
        if (shift <= 1e-5 * top) break;
      }
    }
    auto dist = make_dist(pts, probs, L);
    best = {dist, {}, info};
    have = true;

    // Coarse scan for a violated condition.
    const int nc = std::max(opt.coarse_grid, 3);
    std::vector<double> rs(nc), gaps(nc);
    for (int i = 0; i < nc; ++i) rs[i] = top * i / (nc - 1);
    parallel_for(nc, opt.threads, [&](int i) { gaps[i] = info - fn.info_density(rs[i], dist); });
    // Every local minimum of the gap below threshold contributes a point.
    std::vector<double> fresh;
    for (int i = 0; i < nc; ++i) {
      if (gaps[i] >= -0.5 * eps) continue;
      if ((i > 0 && gaps[i - 1] < gaps[i]) || (i + 1 < nc && gaps[i + 1] < gaps[i])) continue;
      fresh.push_back(polish_new_point(fn, dist, rs[std::max(i - 1, 0)], rs[std::min(i + 1, nc - 1)]));
    }
    if (!fresh.empty() && round + 1 < opt.max_rounds) {
      for (double r : fresh) insert_point(pts, probs, r);
      continue;
    }
    if (!opt.final_certify) {
      best.report = kt_report(fn, dist, eps, nc, opt.threads);
      break;
    }
    best.report = kt_report(fn, dist, eps, opt.final_grid, opt.threads);
    if (best.report.certified || round + 1 >= opt.max_rounds) break;
    auto worst = std::min_element(best.report.gap_grid.begin(), best.report.gap_grid.end(),
                                  [](const auto& a, const auto& b) { return a.second < b.second; });
    const double step = top / (opt.final_grid - 1);
    insert_point(pts, probs,
                 polish_new_point(fn, dist, std::max(0.0, worst->first - step), std::min(top, worst->first + step)));
  }
  if (!have) throw NumericalError("optimize_magnitude_dist: no iterations performed", 0.0, 0.0);
  best.info_block = best.report.info_block;
  return best;
}

OptimizedDist optimize_magnitude_dist(const PeakModel& model, const OptimizerOptions& opt) {
  InfoFunctional fn(model, opt.settings);
  return optimize_from(fn, {std::sqrt(model.peak_L)}, {1.0}, opt);
}

OptimizedDist optimize_magnitude_dist(int m, double delta, double snr, double eps_kt, const OptimizerOptions& opt) {
  auto o = opt;
  o.eps_kt = eps_kt;
  auto res = optimize_magnitude_dist(peak_model(m, delta, snr), o);
  res.report.c_delta = res.info_block / m;
  return res;
}

}  // namespace pilotcap
