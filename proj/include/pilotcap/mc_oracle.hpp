#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "pilotcap/core_model.hpp"
#include "pilotcap/peakcap.hpp"

namespace pilotcap {

/// Philox4x32-10 counter-based generator (Salmon et al. 2011).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

/// Reproducible random stream keyed by (seed, stream_id). Two streams with
/// the same key produce bit-identical sequences; distinct stream ids never
/// share counter space.
class SimStream {
 public:
  SimStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint32_t next_u32();
  /// Uniform on (0, 1) with 53 random bits; never returns 0.
  double uniform();
  double normal();
  /// CN(0, var): real and imaginary parts each have variance var/2.
  std::complex<double> cnormal(double var = 1.0);
  /// Exp(1).
  double exponential();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct TrainingSample {
  std::complex<double> hhat;
  std::complex<double> htilde;
};

/// n independent training blocks: h ~ CN(0, gamma2), pilot noise
/// ~ CN(0, N0 E_t), MMSE estimate hhat = gamma2 / (gamma2 E_t + N0) x_t^H y_t.
std::vector<TrainingSample> simulate_training_block(const ChannelConfig& cfg, double training_energy, int n,
                                                    SimStream& stream);
std::vector<TrainingSample> simulate_training_block(const ChannelConfig& cfg, const TrainingPlan& plan, int n,
                                                    SimStream& stream);

/// Simulates R = ||y||^2 / N0 for the data phase with fixed K and r and
/// returns the Kolmogorov-Smirnov distance to the analytic conditional CDF.
double empirical_r_check(int m, double r, double K, int n, SimStream& stream);

/// Tabulated analytic CDF of R given (r, K), linear between nodes.
class AnalyticRCdf {
 public:
  AnalyticRCdf(int m, double r, double K, int cells = 2000);
  double operator()(double R) const;

 private:
  double lo_, hi_, step_;
  std::vector<double> cdf_;
};

double ks_statistic(std::vector<double> samples, const AnalyticRCdf& cdf);

struct McEstimate {
  double estimate;
  double stderr_;
};

/// Sample mean of ((m-1)/m) log(1 + f |w|^2), |w|^2 ~ Exp(1).
McEstimate mc_worstcase_capacity(int m, double snr, int n, SimStream& stream);

/// Sample mean of log(1 + f w); exactly zero when f = 0.
McEstimate mc_log1p_mean(double f, int n, SimStream& stream);

/// Monte Carlo estimate of I(F|hhat) in nats per block for m = 2: simulates
/// pilot, estimate, isotropic data and noise, and averages the log ratio of
/// the conditional output density to the phase-averaged mixture.
McEstimate mc_mutual_info_m2(double delta, double snr, const MagnitudeDistribution& dist, long n,
                             std::uint64_t seed, int threads = 1);

}  // namespace pilotcap
