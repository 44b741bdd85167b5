#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "pilotcap/errors.hpp"
#include "pilotcap/numerics.hpp"
#include "pilotcap/parallel.hpp"
#include "pilotcap/peakcap.hpp"

namespace pilotcap {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTailWidths[] = {4.0, 8.0, 16.0, 32.0};

struct RGrid {
  std::vector<double> R;
  std::vector<double> w;
};

// Quadrature nodes for int_0^inf dR against f_{R|r,K}: Gauss-Legendre panels
// over mean +- core_sigmas * sd, then geometrically widening tail panels in
// units of the largest gamma scale 1+r^2.
void build_r_grid(int m, double r, double K, const InfoSettings& s, RGrid& g) {
  g.R.clear();
  g.w.clear();
  const double r2 = r * r, tau = 1.0 + r2;
  const double mu = (1.0 + K) * r2 + m - 1.0;
  const double sd = std::sqrt(tau * tau + 2.0 * K * r2 * tau + (m - 2.0));
  const double lo = std::max(0.0, mu - s.core_sigmas * sd);
  const double hi = mu + s.core_sigmas * sd;
  const auto& core = cached_gauss_legendre_unit(s.core_nodes);
  auto panel = [&](double a, double width) {
    for (std::size_t i = 0; i < core.nodes.size(); ++i) {
      g.R.push_back(a + width * core.nodes[i]);
      g.w.push_back(width * core.weights[i]);
    }
  };
  // The unit-variance noise puts structure on a scale of one near the origin,
  // which wide panels cannot resolve when the gamma scale is large.
  double start = lo;
  if (lo == 0.0) {
    for (double b = 1.0; b < (hi - start) / s.core_panels; b *= 4.0) {
      panel(start, b - start);
      start = b;
    }
  }
  const double pw = (hi - start) / s.core_panels;
  for (int p = 0; p < s.core_panels; ++p) panel(start + p * pw, pw);
  const auto& tail = cached_gauss_legendre_unit(s.tail_nodes);
  double a = hi;
  for (double mult : kTailWidths) {
    const double width = mult * tau;
    for (std::size_t i = 0; i < tail.nodes.size(); ++i) {
      g.R.push_back(a + width * tail.nodes[i]);
      g.w.push_back(width * tail.weights[i]);
    }
    a += width;
  }
}

double log_r_power(int m, double R, double lgm1) {
  if (m == 2) return 0.0;
  return (m - 2) * std::log(R) - lgm1;
}

}  // namespace

PeakModel peak_model(int m, double delta, double snr) {
  if (m < 2) throw DomainError("block length m must be >= 2");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("pilot fraction delta must lie in (0,1)");
  if (!(snr > 0.0) || !std::isfinite(snr)) throw DomainError("snr must be positive and finite");
  const double ms = m * snr;
  return {m, delta * ms, (1.0 - delta) * ms / (delta * ms + 1.0)};
}

InfoFunctional::InfoFunctional(const PeakModel& model, const InfoSettings& settings)
    : model_(model), settings_(settings) {
  if (model.m < 2) throw DomainError("kernel dimension must be >= 2");
  if (!(model.peak_L > 0.0)) throw DomainError("peak L must be positive");
  if (!(model.mean_k >= 0.0)) throw DomainError("E{K} must be nonnegative");
  if (model.mean_k == 0.0) {
    k_nodes_ = {0.0};
    k_weights_ = {1.0};
    return;
  }
  const auto& gl = cached_gauss_laguerre(settings.k_nodes);
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    if (gl.weights[i] < 1e-18) continue;
    k_nodes_.push_back(model.mean_k * gl.nodes[i]);
    k_weights_.push_back(gl.weights[i]);
  }
}

double InfoFunctional::info_density(double r, const MagnitudeDistribution& dist) const {
  const int m = model_.m;
  const double lgm1 = std::lgamma(m - 1.0);
  const std::size_t nm = dist.points.size();
  std::vector<double> logp(nm);
  for (std::size_t j = 0; j < nm; ++j) logp[j] = std::log(dist.probs[j]);
  RGrid grid;
  double total = 0.0;
  for (std::size_t k = 0; k < k_nodes_.size(); ++k) {
    const double K = k_nodes_[k];
    build_r_grid(m, r, K, settings_, grid);
    double z = 0.0, e_logg = 0.0, kl = 0.0;
    for (std::size_t i = 0; i < grid.R.size(); ++i) {
      const double R = grid.R[i];
      const double lg = log_g_single(m, r, K, R, settings_);
      const double wf = grid.w[i] * std::exp(log_r_power(m, R, lgm1) + lg);
      if (wf == 0.0) continue;
      LogSumAcc acc;
      for (std::size_t j = 0; j < nm; ++j) {
        acc.add(logp[j] + (dist.points[j] == r ? lg : log_g_single(m, dist.points[j], K, R, settings_)));
      }
      z += wf;
      e_logg += wf * lg;
      kl += wf * (lg - acc.value());
    }
    const double d = -e_logg / z - std::log1p(r * r) - (m - 1.0);
    total += k_weights_[k] * (d + kl / z);
  }
  return total;
}

double InfoFunctional::mutual_info(const MagnitudeDistribution& dist) const {
  double s = 0.0;
  for (std::size_t j = 0; j < dist.points.size(); ++j) s += dist.probs[j] * info_density(dist.points[j], dist);
  return s;
}

double InfoFunctional::mutual_info_direct(const MagnitudeDistribution& dist) const {
  const int m = model_.m;
  const double lgm1 = std::lgamma(m - 1.0);
  RGrid grid;
  double integral = 0.0, log_term = 0.0;
  for (std::size_t j = 0; j < dist.points.size(); ++j) {
    const double r = dist.points[j];
    log_term += dist.probs[j] * std::log1p(r * r);
    for (std::size_t k = 0; k < k_nodes_.size(); ++k) {
      const double K = k_nodes_[k];
      build_r_grid(m, r, K, settings_, grid);
      double s = 0.0;
      for (std::size_t i = 0; i < grid.R.size(); ++i) {
        const double R = grid.R[i];
        const double f = std::exp(log_r_power(m, R, lgm1) + log_g_single(m, r, K, R, settings_));
        if (f == 0.0) continue;
        s += grid.w[i] * f * log_mixture_g(m, dist, K, R);
      }
      integral += dist.probs[j] * k_weights_[k] * s;
    }
  }
  return -integral - log_term - (m - 1.0);
}

InfoFunctional::WeightSolver::WeightSolver(const InfoFunctional& fn, std::vector<double> points)
    : n_(static_cast<int>(points.size())) {
  const int m = fn.model_.m;
  const auto& s = fn.settings_;
  const double lgm1 = std::lgamma(m - 1.0);
  const std::size_t nk = fn.k_nodes_.size();
  kweight_ = fn.k_weights_;
  base_.assign(n_, 0.0);
  offset_.resize(nk * n_);
  count_.resize(nk * n_);
  RGrid grid;
  std::vector<double> lg(n_);
  for (std::size_t k = 0; k < nk; ++k) {
    const double K = fn.k_nodes_[k];
    for (int j = 0; j < n_; ++j) {
      const double r = points[j];
      build_r_grid(m, r, K, s, grid);
      const std::size_t off = wf_.size();
      offset_[k * n_ + j] = off;
      double z = 0.0, e_logg = 0.0;
      for (std::size_t i = 0; i < grid.R.size(); ++i) {
        const double R = grid.R[i];
        for (int l = 0; l < n_; ++l) lg[l] = log_g_single(m, points[l], K, R, s);
        const double wf = grid.w[i] * std::exp(log_r_power(m, R, lgm1) + lg[j]);
        if (wf == 0.0) continue;
        z += wf;
        e_logg += wf * lg[j];
        wf_.push_back(wf);
        logg_.insert(logg_.end(), lg.begin(), lg.end());
      }
      for (std::size_t i = off; i < wf_.size(); ++i) wf_[i] /= z;
      count_[k * n_ + j] = wf_.size() - off;
      base_[j] += kweight_[k] * (-e_logg / z - std::log1p(r * r) - (m - 1.0));
    }
  }
  nr_total_ = wf_.size();
}

std::vector<double> InfoFunctional::WeightSolver::densities(const std::vector<double>& probs) const {
  return evaluate(probs, nullptr);
}

std::vector<double> InfoFunctional::WeightSolver::densities(const std::vector<double>& probs,
                                                            std::vector<double>& hessian) const {
  hessian.assign(static_cast<std::size_t>(n_) * n_, 0.0);
  return evaluate(probs, &hessian);
}

std::vector<double> InfoFunctional::WeightSolver::evaluate(const std::vector<double>& probs,
                                                           std::vector<double>* hessian) const {
  std::vector<double> logp(n_);
  for (int l = 0; l < n_; ++l) logp[l] = probs[l] > 0.0 ? std::log(probs[l]) : kNegInf;
  std::vector<double> out(base_);
  std::vector<double> ratio(n_), hrow(n_);
  const std::size_t nk = kweight_.size();
  for (std::size_t k = 0; k < nk; ++k) {
    for (int j = 0; j < n_; ++j) {
      const std::size_t off = offset_[k * n_ + j], cnt = count_[k * n_ + j];
      double s = 0.0;
      std::fill(hrow.begin(), hrow.end(), 0.0);
      for (std::size_t i = off; i < off + cnt; ++i) {
        const double* row = &logg_[i * n_];
        double mx = kNegInf;
        for (int l = 0; l < n_; ++l) mx = std::max(mx, logp[l] + row[l]);
        double acc = 0.0;
        for (int l = 0; l < n_; ++l) {
          if (logp[l] != kNegInf) acc += std::exp(logp[l] + row[l] - mx);
        }
        s += wf_[i] * (row[j] - mx - std::log(acc));
        if (hessian) {
          for (int l = 0; l < n_; ++l) hrow[l] += wf_[i] * std::exp(row[l] - mx) / acc;
        }
      }
      out[j] += kweight_[k] * s;
      if (hessian) {
        for (int l = 0; l < n_; ++l) (*hessian)[j * n_ + l] -= kweight_[k] * hrow[l];
      }
    }
  }
  return out;
}

namespace {

double expected(const std::vector<double>& p, const std::vector<double>& d) {
  double s = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) s += p[j] * d[j];
  return s;
}

// Solves the equality-constrained Newton system on the index set `free`:
// [H 1; 1' 0] [dx; mu] = [-g; 0]. Returns false if singular.
bool newton_direction(const std::vector<double>& H, const std::vector<double>& g, const std::vector<int>& free,
                      int n, std::vector<double>& dx) {
  const int f = static_cast<int>(free.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(f + 1, f + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(f + 1);
  double tr = 0.0;
  for (int a = 0; a < f; ++a) tr += std::abs(H[free[a] * n + free[a]]);
  for (int a = 0; a < f; ++a) {
    for (int c = 0; c < f; ++c) A(a, c) = H[free[a] * n + free[c]];
    A(a, a) -= 1e-10 * tr / f;  // keeps nearly coincident masses solvable
    A(a, f) = A(f, a) = 1.0;
    b(a) = -g[free[a]];
  }
  Eigen::VectorXd x = A.fullPivLu().solve(b);
  if (!x.allFinite()) return false;
  dx.assign(n, 0.0);
  for (int a = 0; a < f; ++a) dx[free[a]] = x(a);
  return true;
}

}  // namespace

std::vector<double> InfoFunctional::WeightSolver::optimize(std::vector<double> probs, double tol, int max_iter) const {
  std::vector<double> H, dx;
  for (int it = 0; it < max_iter; ++it) {
    auto dens = densities(probs, H);
    const double info = expected(probs, dens);
    double mx = kNegInf;
    for (int j = 0; j < n_; ++j) mx = std::max(mx, dens[j]);
    if (mx - info <= tol) break;

    // Masses at zero weight join the step only if they would grow.
    std::vector<int> free;
    for (int j = 0; j < n_; ++j) {
      if (probs[j] > 0.0 || dens[j] > info) free.push_back(j);
    }
    bool improved = false;
    if (newton_direction(H, dens, free, n_, dx)) {
      double tmax = 1.0;
      for (int j = 0; j < n_; ++j) {
        if (dx[j] < 0.0) tmax = std::min(tmax, probs[j] / -dx[j]);
      }
      for (double t = tmax; t > 1e-6 * tmax && !improved; t *= 0.5) {
        std::vector<double> trial(probs);
        double z = 0.0;
        for (int j = 0; j < n_; ++j) {
          trial[j] = t == tmax && dx[j] < 0.0 && probs[j] / -dx[j] == tmax ? 0.0 : std::max(0.0, probs[j] + t * dx[j]);
          z += trial[j];
        }
        for (auto& q : trial) q /= z;
        if (expected(trial, densities(trial)) > info) {
          probs = std::move(trial);
          improved = true;
        }
      }
    }
    if (improved) continue;
    double z = 0.0;
    for (int j = 0; j < n_; ++j) {
      probs[j] *= std::exp(dens[j] - mx);
      z += probs[j];
    }
    for (auto& p : probs) p /= z;
  }
  return probs;
}

double kt_gap(const InfoFunctional& fn, const MagnitudeDistribution& dist, double info_block, double r) {
  return info_block - fn.info_density(r, dist);
}

KTReport kt_report(const InfoFunctional& fn, const MagnitudeDistribution& dist, double eps_kt, int grid_points,
                   int threads) {
  dist.validate();
  KTReport rep;
  rep.eps_kt = eps_kt;
  const auto& masses = dist.points;
  std::vector<double> mass_dens(masses.size());
  parallel_for(static_cast<int>(masses.size()), threads,
               [&](int j) { mass_dens[j] = fn.info_density(masses[j], dist); });
  double info = 0.0;
  for (std::size_t j = 0; j < masses.size(); ++j) info += dist.probs[j] * mass_dens[j];
  rep.info_block = info;
  rep.c_delta = info / fn.model().m;

  const double top = std::sqrt(fn.model().peak_L);
  const int n = std::max(grid_points, 2);
  std::vector<double> rs(n), gaps(n);
  for (int i = 0; i < n; ++i) rs[i] = top * i / (n - 1);
  parallel_for(n, threads, [&](int i) {
    // Grid points that coincide with a mass reuse its density.
    auto it = std::find(masses.begin(), masses.end(), rs[i]);
    gaps[i] = it != masses.end() ? info - mass_dens[it - masses.begin()] : kt_gap(fn, dist, info, rs[i]);
  });
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    rep.gap_grid.emplace_back(rs[i], gaps[i]);
    rep.min_gap = std::min(rep.min_gap, gaps[i]);
  }
  rep.max_abs_gap_at_masses = 0.0;
  for (std::size_t j = 0; j < masses.size(); ++j) {
    const double g = info - mass_dens[j];
    rep.min_gap = std::min(rep.min_gap, g);
    rep.max_abs_gap_at_masses = std::max(rep.max_abs_gap_at_masses, std::abs(g));
  }
  rep.certified = rep.min_gap >= -eps_kt && rep.max_abs_gap_at_masses <= eps_kt;
  return rep;
}

}  // namespace pilotcap
