#pragma once

#include <utility>
#include <vector>

#include "pilotcap/worstcase.hpp"

namespace pilotcap {

/// Discrete distribution of the normalized data magnitude r on [0, sqrt(L)].
struct MagnitudeDistribution {
  std::vector<double> points;
  std::vector<double> probs;
  double peak_L = 0.0;

  static MagnitudeDistribution single(double r, double peak_L);

  /// Throws DomainError unless probabilities are positive and sum to one,
  /// points are strictly increasing and lie in [0, sqrt(L)].
  void validate() const;
};

struct KTReport {
  double info_block = 0.0;  // I(F) in nats per block
  double c_delta = 0.0;     // info_block under the scenario's per-symbol normalization
  std::vector<std::pair<double, double>> gap_grid;
  double min_gap = 0.0;
  double max_abs_gap_at_masses = 0.0;
  double eps_kt = 1e-4;
  bool certified = false;
};

/// Quadrature orders for the information functional.
struct InfoSettings {
  int k_nodes = 64;        // Gauss-Laguerre nodes for E_K
  int core_panels = 8;     // panels across mean +- core_sigmas
  int core_nodes = 12;     // Gauss-Legendre nodes per core panel
  double core_sigmas = 8.0;
  int tail_nodes = 12;     // per tail panel (4, 8, 16, 32 tau)
  int a_nodes = 48;        // fixed a-integral order for smooth integrands
  double a_bandwidth = 30.0;  // above this cR + b the windowed a-rule is used

  static InfoSettings accurate() { return {}; }
  static InfoSettings fast() { return {32, 6, 10, 8.0, 8, 32, 30.0}; }
};

// ---------------------------------------------------------------- density

/// log of the single-mass mixture kernel g(R, delta_r, K). m is the kernel
/// dimension (number of data symbols plus one).
double log_g_single(int m, double r, double K, double R, const InfoSettings& s = InfoSettings::accurate());

/// log f_{R|r,K}(R).
double log_density_r_given_rk(int m, double r, double K, double R);

/// f_{R|r,K}(R).
double density_r_given_rk(int m, double r, double K, double R);

/// log g(R, F, K) for a discrete magnitude distribution.
double log_mixture_g(int m, const MagnitudeDistribution& dist, double K, double R);

double mixture_g(int m, const MagnitudeDistribution& dist, double K, double R);

/// log[(m-2) e^{-R/(1+L) + sqrt(KR)}], the envelope of every mixture g.
/// The factor m-2 is replaced by 1 when m = 2.
double log_mixture_bound(int m, double L, double K, double R);

// ---------------------------------------------------------------- model

/// Channel instance seen by the information functional: kernel dimension
/// m, mean of the exponential estimate-quality variable K, squared peak L.
struct PeakModel {
  int m;
  double mean_k;
  double peak_L;
};

/// Model of a pilot-assisted block: E{K} = delta m snr,
/// L = (1-delta) m snr / (delta m snr + 1).
PeakModel peak_model(int m, double delta, double snr);

/// Evaluates the information density i(r; F) and mutual information I(F)
/// (nats per block) for one model.
class InfoFunctional {
 public:
  InfoFunctional(const PeakModel& model, const InfoSettings& settings = InfoSettings::accurate());

  const PeakModel& model() const noexcept { return model_; }
  const InfoSettings& settings() const noexcept { return settings_; }

  /// i(r; F) = -E_K int f_r log g_F dR - log(1+r^2) - (m-1).
  double info_density(double r, const MagnitudeDistribution& dist) const;

  /// I(F) = sum_j p_j i(r_j; F).
  double mutual_info(const MagnitudeDistribution& dist) const;

  /// Same quantity evaluated literally as
  /// -E_{K,r} int f log g dR - E_r log(1+r^2) - (m-1); reference form.
  double mutual_info_direct(const MagnitudeDistribution& dist) const;

  /// Information densities of every point in `points` against the mixture
  /// with weights `probs` over the same points. Kernel tensors are built
  /// once so repeated weight updates are cheap.
  class WeightSolver;

 private:
  friend class WeightSolver;
  PeakModel model_;
  InfoSettings settings_;
  std::vector<double> k_nodes_;
  std::vector<double> k_weights_;
};

class InfoFunctional::WeightSolver {
 public:
  WeightSolver(const InfoFunctional& fn, std::vector<double> points);

  /// i(r_j; F_p) for all j.
  std::vector<double> densities(const std::vector<double>& probs) const;

  /// Densities plus the Hessian of I(p), H_jl = -int f_j f_l / f_p, row-major.
  std::vector<double> densities(const std::vector<double>& probs, std::vector<double>& hessian) const;

  /// Newton steps on the simplex (Blahut-Arimoto when a step fails to
  /// improve) until max_j i_j - I <= tol.
  std::vector<double> optimize(std::vector<double> probs, double tol, int max_iter = 500) const;

 private:
  std::vector<double> evaluate(const std::vector<double>& probs, std::vector<double>* hessian) const;

  int n_ = 0;
  std::size_t nr_total_ = 0;
  // For each (K node, evaluation point j): offset into the flattened arrays.
  std::vector<std::size_t> offset_;
  std::vector<std::size_t> count_;
  std::vector<double> wf_;      // quadrature weight times f_{r_j}
  std::vector<double> logg_;    // log g_{r_l}(R), layout [node][l]
  std::vector<double> base_;    // E_K d(r_j, K)
  std::vector<double> kweight_;
};

// ---------------------------------------------------------------- KT / optimizer

/// Phi(r) = I(F) - i(r; F), where I(F) = m C_delta is passed in nats per block.
double kt_gap(const InfoFunctional& fn, const MagnitudeDistribution& dist, double info_block, double r);

/// Samples the gap on grid_points equispaced points of [0, sqrt(L)] plus the
/// mass points and fills a report.
KTReport kt_report(const InfoFunctional& fn, const MagnitudeDistribution& dist, double eps_kt, int grid_points = 512,
                   int threads = 1);

struct OptimizerOptions {
  double eps_kt = 1e-4;
  int final_grid = 512;
  int coarse_grid = 48;
  int max_rounds = 25;
  bool final_certify = true;
  int threads = 1;
  InfoSettings settings = InfoSettings::fast();
};

struct OptimizedDist {
  MagnitudeDistribution dist;
  KTReport report;
  double info_block = 0.0;  // I(F) in nats per block
};

/// Maximizes I(F) over magnitude distributions for a model.
OptimizedDist optimize_magnitude_dist(const PeakModel& model, const OptimizerOptions& opt = {});

/// Convenience overload for the pilot-assisted model.
OptimizedDist optimize_magnitude_dist(int m, double delta, double snr, double eps_kt,
                                      const OptimizerOptions& opt = {});

// ---------------------------------------------------------------- scenarios

/// I(F) for the pilot-assisted model, nats per block (divide by m for the
/// per-symbol rate). Throws DomainError when dist.peak_L disagrees with L.
double mutual_info_peak(int m, double delta, double snr, const MagnitudeDistribution& dist,
                        const InfoSettings& s = InfoSettings::accurate());

/// Single mass at sqrt(L), nats per block.
double single_mass_rate(int m, double delta, double snr, const InfoSettings& s = InfoSettings::accurate());

struct PeakCapacity {
  double delta_star = 0.0;
  MagnitudeDistribution dist;
  KTReport report;
  RateResult rate;
};

/// Outer search over delta in (1e-3, 0.5) of certified inner maxima.
PeakCapacity capacity_peak(int m, double snr, double delta_tol = 1e-4, const OptimizerOptions& opt = {});

struct InterleavedCapacity {
  int l_star = 0;
  MagnitudeDistribution dist;
  KTReport report;
  RateResult rate;
};

/// l pilots, each data symbol sees an independent channel: kernel dimension
/// 2, E{K} = l snr, L = snr / (l snr + 1), rate ((m-l)/m) I.
InterleavedCapacity interleaved_capacity(int m, double snr, const OptimizerOptions& opt = {});

/// Rate of the interleaved scheme with a fixed pilot count.
OptimizedDist interleaved_inner(int m, double snr, int l, const OptimizerOptions& opt = {});

/// Same scheme without pilots: K = 0, L = snr, rate I.
OptimizedDist noncoherent_interleaved(double snr, const OptimizerOptions& opt = {});

/// On-off keying magnitude: r0 with probability p0 = snr / nu, else 0.
struct OokConfig {
  double delta;
  double nu;

  double p0(double snr) const { return snr / nu; }
  double r0(int m, double snr) const;
};

/// OOK mutual information in nats per block of m symbols. delta = 0 means
/// no pilot (K = 0).
double ook_rate(int m, const OokConfig& cfg, double snr, const InfoSettings& s = InfoSettings::accurate());

/// Low-power limit of the OOK bit energy in dB.
double ook_limit_bit_energy(int m, double delta, double nu);

/// Noncoherent block: no pilot, m data symbols (kernel dimension m+1),
/// K = 0, L = m snr, per-symbol rate I/m.
struct NoncoherentCapacity {
  MagnitudeDistribution dist;
  KTReport report;
  RateResult rate;
};
NoncoherentCapacity noncoherent_capacity(int m, double snr, const OptimizerOptions& opt = {});

}  // namespace pilotcap
