#include <algorithm>
#include <cmath>
#include <numbers>

#include "pilotcap/errors.hpp"
#include "pilotcap/mc_oracle.hpp"
#include "pilotcap/numerics.hpp"
#include "pilotcap/parallel.hpp"
#include "pilotcap/worstcase.hpp"

namespace pilotcap {

std::vector<TrainingSample> simulate_training_block(const ChannelConfig& cfg, double training_energy, int n,
                                                    SimStream& stream) {
  if (n < 1) throw DomainError("simulate_training_block: n must be >= 1");
  if (!(training_energy >= 0.0) || std::isinf(training_energy)) {
    throw DomainError("training energy must be finite and nonnegative");
  }
  const double g2 = cfg.gamma2(), n0 = cfg.n0(), et = training_energy;
  const double gain = g2 / (g2 * et + n0);
  const double xt = std::sqrt(et);  // single pilot symbol carrying all training energy
  std::vector<TrainingSample> out(n);
  for (int i = 0; i < n; ++i) {
    const auto h = stream.cnormal(g2);
    const auto noise = stream.cnormal(n0);
    const auto y = xt * h + noise;
    const auto hhat = gain * xt * y;
    out[i] = {hhat, h - hhat};
  }
  return out;
}

std::vector<TrainingSample> simulate_training_block(const ChannelConfig& cfg, const TrainingPlan& plan, int n,
                                                    SimStream& stream) {
  return simulate_training_block(cfg, plan.training_energy(cfg), n, stream);
}

AnalyticRCdf::AnalyticRCdf(int m, double r, double K, int cells) {
  if (cells < 10) throw ConfigError("AnalyticRCdf: too few cells");
  const double r2 = r * r, tau = 1.0 + r2;
  const double mu = (1.0 + K) * r2 + m - 1.0;
  const double sd = std::sqrt(tau * tau + 2.0 * K * r2 * tau + (m - 2.0));
  lo_ = std::max(0.0, mu - 12.0 * sd);
  hi_ = mu + 12.0 * sd + 60.0 * tau;
  step_ = (hi_ - lo_) / cells;
  const auto& gl = cached_gauss_legendre_unit(6);
  cdf_.assign(cells + 1, 0.0);
  for (int c = 0; c < cells; ++c) {
    const double a = lo_ + c * step_;
    double s = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      s += gl.weights[i] * density_r_given_rk(m, r, K, a + step_ * gl.nodes[i]);
    }
    cdf_[c + 1] = cdf_[c] + s * step_;
  }
}

double AnalyticRCdf::operator()(double R) const {
  if (R <= lo_) return 0.0;
  if (R >= hi_) return cdf_.back();
  const double x = (R - lo_) / step_;
  const auto i = static_cast<std::size_t>(x);
  const double t = x - i;
  return cdf_[i] + t * (cdf_[i + 1] - cdf_[i]);
}

double ks_statistic(std::vector<double> samples, const AnalyticRCdf& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double empirical_r_check(int m, double r, double K, int n, SimStream& stream) {
  if (m < 2) throw DomainError("empirical_r_check: m must be >= 2");
  if (n < 1) throw DomainError("empirical_r_check: n must be positive");
  if (!(r >= 0.0) || !(K >= 0.0)) throw DomainError("empirical_r_check: r and K must be nonnegative");
  const int dim = m - 1;
  // Unit-variance estimation error and noise; x has squared norm r^2 along a
  // random fixed direction, hhat has |hhat|^2 = K.
  std::vector<std::complex<double>> x(dim);
  double norm = 0.0;
  for (auto& xi : x) {
    xi = stream.cnormal();
    norm += std::norm(xi);
  }
  for (auto& xi : x) xi *= r / std::sqrt(norm);
  const std::complex<double> hhat(std::sqrt(K), 0.0);
  std::vector<double> samples(n);
  for (int s = 0; s < n; ++s) {
    const auto h = hhat + stream.cnormal();
    double R = 0.0;
    for (int i = 0; i < dim; ++i) R += std::norm(h * x[i] + stream.cnormal());
    samples[s] = R;
  }
  return ks_statistic(std::move(samples), AnalyticRCdf(m, r, K));
}

McEstimate mc_log1p_mean(double f, int n, SimStream& stream) {
  if (n < 1) throw DomainError("mc_log1p_mean: n must be positive");
  if (!(f >= 0.0)) throw DomainError("mc_log1p_mean: f must be nonnegative");
  if (f == 0.0) return {0.0, 0.0};
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = std::log1p(f * stream.exponential());
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  const double var = std::max(0.0, sum2 / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

McEstimate mc_worstcase_capacity(int m, double snr, int n, SimStream& stream) {
  const double f = worstcase_params(m, snr).f;
  const double scale = (m - 1.0) / m;
  auto e = mc_log1p_mean(f, n, stream);
  return {scale * e.estimate, scale * e.stderr_};
}

namespace {

// log of (1/N) sum_k exp(kappa cos(phi_k + theta)) over an N-point uniform
// phase grid; the trapezoid rule is spectrally accurate for this periodic
// integrand once N comfortably exceeds kappa.
double log_phase_average(double kappa, double theta) {
  const int n = std::max(64, static_cast<int>(kappa + 10.0 * std::sqrt(kappa) + 32.0));
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    s += std::exp(kappa * (std::cos(2.0 * std::numbers::pi * k / n + theta) - 1.0));
  }
  return kappa + std::log(s / n);
}

}  // namespace

McEstimate mc_mutual_info_m2(double delta, double snr, const MagnitudeDistribution& dist, long n,
                             std::uint64_t seed, int threads) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("mc_mutual_info_m2: delta must lie in (0,1)");
  if (!(snr > 0.0)) throw DomainError("mc_mutual_info_m2: snr must be positive");
  if (n < 1) throw DomainError("mc_mutual_info_m2: n must be positive");
  dist.validate();
  const int m = 2;
  const double et = delta * m * snr;  // gamma2 = N0 = 1, P = snr
  const double var_tilde = 1.0 / (et + 1.0);
  const std::size_t nm = dist.points.size();
  std::vector<double> amp(nm), logp(nm), cum(nm);
  double c = 0.0;
  for (std::size_t j = 0; j < nm; ++j) {
    amp[j] = dist.points[j] / std::sqrt(var_tilde);  // |x| so that r^2 = var_tilde |x|^2
    logp[j] = std::log(dist.probs[j]);
    c += dist.probs[j];
    cum[j] = c;
  }
  constexpr int kChunks = 16;
  std::vector<double> sums(kChunks), sums2(kChunks);
  parallel_for(kChunks, threads, [&](int ch) {
    const long count = n / kChunks + (ch < n % kChunks ? 1 : 0);
    SimStream st(seed, static_cast<std::uint64_t>(ch));
    double s1 = 0.0, s2 = 0.0;
    for (long i = 0; i < count; ++i) {
      const auto h = st.cnormal();
      const auto pilot_noise = st.cnormal();
      const auto hhat = (et * h + std::sqrt(et) * pilot_noise) / (et + 1.0);
      const double u = st.uniform();
      std::size_t j = 0;
      while (j + 1 < nm && u > cum[j]) ++j;
      const double phi = 2.0 * std::numbers::pi * st.uniform();
      const auto x = std::polar(amp[j], phi);
      const auto y = h * x + st.cnormal();
      const double sj = var_tilde * amp[j] * amp[j] + 1.0;
      const double log_cond = -std::norm(y - hhat * x) / sj - std::log(std::numbers::pi * sj);
      LogSumAcc acc;
      const double ay = std::abs(y), ah = std::abs(hhat);
      const double theta = std::arg(y) - std::arg(hhat);
      for (std::size_t l = 0; l < nm; ++l) {
        const double sl = var_tilde * amp[l] * amp[l] + 1.0;
        const double kappa = 2.0 * amp[l] * ay * ah / sl;
        acc.add(logp[l] - (ay * ay + ah * ah * amp[l] * amp[l]) / sl - std::log(std::numbers::pi * sl) +
                log_phase_average(kappa, theta));
      }
      const double val = log_cond - acc.value();
      s1 += val;
      s2 += val * val;
    }
    sums[ch] = s1;
    sums2[ch] = s2;
  });
  double s1 = 0.0, s2 = 0.0;
  for (int ch = 0; ch < kChunks; ++ch) {
    s1 += sums[ch];
    s2 += sums2[ch];
  }
  const double mean = s1 / n;
  const double var = std::max(0.0, s2 / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

}  // namespace pilotcap
