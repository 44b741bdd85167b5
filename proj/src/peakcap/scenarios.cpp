#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pilotcap/errors.hpp"
#include "pilotcap/numerics.hpp"
#include "pilotcap/peakcap.hpp"
#include "peakcap_internal.hpp"

namespace pilotcap {

namespace {

void check_snr(double snr) {
  if (!(snr > 0.0) || !std::isfinite(snr)) throw DomainError("snr must be positive and finite");
}

// Rate at one delta with the support shape held fixed: masses sit at
// u_j sqrt(L) and only the weights are re-optimized.
double rate_with_support(int m, double delta, double snr, const std::vector<double>& u, const InfoSettings& s,
                         double tol) {
  const auto model = peak_model(m, delta, snr);
  InfoFunctional fn(model, s);
  const double top = std::sqrt(model.peak_L);
  std::vector<double> pts;
  for (double x : u) pts.push_back(x * top);
  InfoFunctional::WeightSolver ws(fn, pts);
  auto probs = ws.optimize(std::vector<double>(pts.size(), 1.0 / pts.size()), tol);
  auto dens = ws.densities(probs);
  double info = 0.0;
  for (std::size_t j = 0; j < pts.size(); ++j) info += probs[j] * dens[j];
  return info / m;
}

}  // namespace

double mutual_info_peak(int m, double delta, double snr, const MagnitudeDistribution& dist, const InfoSettings& s) {
  const auto model = peak_model(m, delta, snr);
  if (std::abs(dist.peak_L - model.peak_L) > 1e-9 * model.peak_L) {
    throw DomainError("mutual_info_peak: distribution peak L inconsistent with (delta, snr)");
  }
  dist.validate();
  return InfoFunctional(model, s).mutual_info(dist);
}

double single_mass_rate(int m, double delta, double snr, const InfoSettings& s) {
  const auto model = peak_model(m, delta, snr);
  return InfoFunctional(model, s).mutual_info(MagnitudeDistribution::single(std::sqrt(model.peak_L), model.peak_L));
}

PeakCapacity capacity_peak(int m, double snr, double delta_tol, const OptimizerOptions& opt) {
  if (m < 2) throw DomainError("block length m must be >= 2");
  check_snr(snr);
  if (!(delta_tol > 0.0)) throw ConfigError("capacity_peak: delta tolerance must be positive");
  constexpr double lo = 1e-3, hi = 0.5;
  constexpr int kScan = 20;
  const double wtol = 1e-3 * opt.eps_kt;
  std::vector<double> shape{1.0};
  PeakCapacity out;
  for (int attempt = 0; attempt < 3; ++attempt) {
    std::vector<double> ds(kScan), vals(kScan);
    for (int i = 0; i < kScan; ++i) {
      ds[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (kScan - 1));
      vals[i] = rate_with_support(m, ds[i], snr, shape, opt.settings, wtol);
    }
    // Every local maximum of the scan gets its own golden refinement, so a
    // non-unimodal profile still yields the global best.
    GoldenResult g{0.0, std::numeric_limits<double>::infinity(), false, 0};
    for (int i = 0; i < kScan; ++i) {
      if ((i > 0 && vals[i] < vals[i - 1]) || (i + 1 < kScan && vals[i] < vals[i + 1])) continue;
      const double a = ds[std::max(i - 1, 0)], b = ds[std::min(i + 1, kScan - 1)];
      auto gi = golden_section([&](double d) { return -rate_with_support(m, d, snr, shape, opt.settings, wtol); },
                               a, b, delta_tol);
      if (-vals[i] < gi.fx) gi = {ds[i], -vals[i], false, 0};
      if (gi.fx < g.fx) g = gi;
    }
    const double delta = g.x;
    const auto model = peak_model(m, delta, snr);
    InfoFunctional fn(model, opt.settings);
    const double top = std::sqrt(model.peak_L);
    std::vector<double> pts;
    for (double x : shape) pts.push_back(x * top);
    auto res = optimize_from(fn, pts, std::vector<double>(pts.size(), 1.0 / pts.size()), opt);
    out.delta_star = delta;
    out.dist = res.dist;
    out.report = res.report;
    out.report.c_delta = res.info_block / m;
    out.rate = RateResult::from_rate(snr, res.info_block / m);
    std::vector<double> found;
    for (double r : res.dist.points) found.push_back(r / top);
    if (found.size() == shape.size()) break;
    shape = found;
  }
  return out;
}

OptimizedDist interleaved_inner(int m, double snr, int l, const OptimizerOptions& opt) {
  check_snr(snr);
  if (l < 1 || l >= m) throw InfeasibleError("interleaved: pilot count must satisfy 1 <= l < m");
  const double ls = l * snr;
  auto res = optimize_magnitude_dist(PeakModel{2, ls, snr / (ls + 1.0)}, opt);
  res.report.c_delta = (m - l) / static_cast<double>(m) * res.info_block;
  return res;
}

InterleavedCapacity interleaved_capacity(int m, double snr, const OptimizerOptions& opt) {
  if (m < 2) throw DomainError("block length m must be >= 2");
  InterleavedCapacity out;
  double best = -1.0;
  for (int l = 1; l < m; ++l) {
    auto res = interleaved_inner(m, snr, l, opt);
    const double rate = res.report.c_delta;
    if (rate > best) {
      best = rate;
      out.l_star = l;
      out.dist = res.dist;
      out.report = res.report;
    }
  }
  out.rate = RateResult::from_rate(snr, best);
  return out;
}

OptimizedDist noncoherent_interleaved(double snr, const OptimizerOptions& opt) {
  check_snr(snr);
  auto res = optimize_magnitude_dist(PeakModel{2, 0.0, snr}, opt);
  res.report.c_delta = res.info_block;
  return res;
}

double OokConfig::r0(int m, double snr) const {
  return std::sqrt((1.0 - delta) * m * nu / (delta * m * snr + 1.0));
}

double ook_rate(int m, const OokConfig& cfg, double snr, const InfoSettings& s) {
  if (m < 2) throw DomainError("block length m must be >= 2");
  check_snr(snr);
  if (!(cfg.delta >= 0.0 && cfg.delta < 1.0)) throw DomainError("ook: delta must lie in [0,1)");
  if (!(cfg.nu > 0.0)) throw DomainError("ook: nu must be positive");
  const double p0 = cfg.p0(snr);
  if (p0 > 1.0) throw InfeasibleError("ook: on-probability snr/nu exceeds one");
  const double r0 = cfg.r0(m, snr);
  const PeakModel model{m, cfg.delta * m * snr, r0 * r0};
  InfoFunctional fn(model, s);
  if (p0 == 1.0) return fn.mutual_info(MagnitudeDistribution::single(r0, r0 * r0));
  return fn.mutual_info(MagnitudeDistribution{{0.0, r0}, {1.0 - p0, p0}, r0 * r0});
}

double ook_limit_bit_energy(int m, double delta, double nu) {
  if (m < 2) throw DomainError("block length m must be >= 2");
  if (!(delta >= 0.0 && delta < 1.0)) throw DomainError("ook: delta must lie in [0,1)");
  if (!(nu > 0.0)) throw DomainError("ook: nu must be positive");
  const double x = (1.0 - delta) * m * nu;
  const double den = (1.0 - delta) - std::log1p(x) / (m * nu);
  if (!(den > 0.0)) throw NumericalError("ook_limit_bit_energy: nonpositive slope", den, 0.0);
  return 10.0 * std::log10(std::numbers::ln2 / den);
}

NoncoherentCapacity noncoherent_capacity(int m, double snr, const OptimizerOptions& opt) {
  if (m < 1) throw DomainError("block length m must be >= 1");
  check_snr(snr);
  auto res = optimize_magnitude_dist(PeakModel{m + 1, 0.0, m * snr}, opt);
  NoncoherentCapacity out;
  out.dist = res.dist;
  out.report = res.report;
  out.report.c_delta = res.info_block / m;
  out.rate = RateResult::from_rate(snr, res.info_block / m);
  return out;
}

}  // namespace pilotcap
