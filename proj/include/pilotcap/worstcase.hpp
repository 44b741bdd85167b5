#pragma once

#include "pilotcap/core_model.hpp"

namespace pilotcap {

/// Rate together with its derived efficiency figures.
struct RateResult {
  double rate_nats = 0.0;          // nats per symbol
  double spectral_eff_bits = 0.0;  // bits/s/Hz
  double ebn0_db = 0.0;            // +inf when rate_nats == 0

  static RateResult from_rate(double snr, double rate_nats);
};

/// 10 log10(snr ln2 / rate). Returns +inf for a vanishing rate or snr < 1e-12.
double bit_energy_db(double snr, double rate_nats);

/// Quantities behind the worst-case bound at the optimal pilot fraction.
/// eta and xi are NaN for m = 2, where the closed form is singular.
struct WorstcaseParams {
  double eta;
  double xi;  // eta * m * snr (normalized units, P = snr)
  double delta_star;
  double phi;
  double psi;
  double f;  // effective SNR of the equivalent known channel
};

WorstcaseParams worstcase_params(int m, double snr);

/// Effective SNR for an arbitrary pilot fraction delta:
///   delta (1-delta) m^2 snr^2 / ((1 + (m-2) delta) m snr + m - 1)
double effective_snr(int m, double snr, double delta);

/// E log(1 + s |w|^2) with |w|^2 ~ Exp(1), by 96-point Gauss-Laguerre.
double expected_log1p(double s);

/// Same expectation through the closed form e^{1/s} E1(1/s).
double expected_log1p_closed(double s);

/// Worst-case rate C_L = ((m-1)/m) E log(1 + f |w|^2) in nats per symbol.
RateResult capacity_worstcase(int m, double snr);

double bit_energy_worstcase(int m, double snr);

struct MinBitEnergy {
  double snr_star;
  double ebn0_min_db;
  bool boundary;
};

/// Minimum of bit_energy_worstcase over snr in [1e-4, 1e2] (log scale).
MinBitEnergy min_bit_energy(int m);

/// Rate with l pilots capped at kappa*P each; data gets the remaining energy.
RateResult peak_pilot_rate(int m, double snr, double kappa, int l);

struct PilotCountResult {
  int l;
  RateResult rate;
};

/// Exhaustive scan over every feasible l (l kappa < m, l < m). Ties go to the
/// smaller l.
PilotCountResult optimize_pilot_count(int m, double snr, double kappa);

struct PilotMinBitEnergy {
  double snr_star;
  double ebn0_min_db;
  int l_star;
  bool boundary;
};

/// Minimum bit energy under the per-pilot cap. With snr_resolution > 0 the
/// continuous minimizer is snapped to the best point of the grid
/// {k * snr_resolution} and l is reported there.
PilotMinBitEnergy min_bit_energy_pilot(int m, double kappa, double snr_resolution = 0.0);

/// Duty-cycle rule nu(snr) for flash signaling.
class FlashPlan {
 public:
  enum class Kind { Linear, Category1, Category2, Constant };

  /// nu = min(1, snr / a_star)
  static FlashPlan linear(double a_star);
  /// nu = min(1, snr^e) with 0 < e < 1
  static FlashPlan category1(double exponent);
  /// nu = min(1, snr^e) with e > 1
  static FlashPlan category2(double exponent);
  /// nu = c, 0 < c <= 1
  static FlashPlan constant(double c);

  Kind kind() const noexcept { return kind_; }
  double param() const noexcept { return param_; }
  double duty(double snr) const;

 private:
  FlashPlan(Kind k, double p) : kind_(k), param_(p) {}
  Kind kind_;
  double param_;
};

/// nu C_L(snr / nu). Throws DomainError if the duty leaves (0, 1].
RateResult flash_rate(int m, double snr, const FlashPlan& plan);

/// E log(1 + snr |w|^2), the coherent capacity of the fading channel.
double perfect_csi_capacity(double snr);

}  // namespace pilotcap
