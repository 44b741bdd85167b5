#pragma once

#include <optional>
#include <variant>

namespace pilotcap {

/// Block-fading channel parameters.
///
/// The canonical form is (m, snr); every capacity expression depends only on
/// those two. Raw (gamma2, n0, p) values are kept when the config is built from
/// them so that simulations can reproduce the physical scaling.
class ChannelConfig {
 public:
  /// Normalized form with gamma2 = n0 = 1 and p = snr.
  ChannelConfig(int m, double snr);

  /// Raw form; snr = gamma2 * p / n0.
  static ChannelConfig from_raw(int m, double gamma2, double n0, double p);

  int m() const noexcept { return m_; }
  double snr() const noexcept { return snr_; }
  double gamma2() const noexcept { return gamma2_; }
  double n0() const noexcept { return n0_; }
  double p() const noexcept { return p_; }
  bool has_raw() const noexcept { return raw_; }

 private:
  ChannelConfig(int m, double snr, double gamma2, double n0, double p, bool raw);

  int m_;
  double snr_;
  double gamma2_;
  double n0_;
  double p_;
  bool raw_;
};

/// Single pilot carrying a fraction delta of the block energy m*P.
struct PowerFraction {
  double delta;
};

/// l pilots of fixed power kappa*P each.
struct PilotCount {
  int l;
  double kappa;
};

class TrainingPlan {
 public:
  using Mode = std::variant<PowerFraction, PilotCount>;

  static TrainingPlan power_fraction(double delta);
  static TrainingPlan pilot_count(int l, double kappa);

  const Mode& mode() const noexcept { return mode_; }

  /// Total pilot energy ||x_t||^2 for the given channel. Also validates
  /// 1 <= l < m for the pilot-count form.
  double training_energy(const ChannelConfig& cfg) const;

 private:
  explicit TrainingPlan(Mode mode) : mode_(mode) {}
  Mode mode_;
};

/// Variances of the MMSE channel estimate and of its error.
struct EstimationStats {
  double var_hhat;
  double var_htilde;
};

/// Closed-form MMSE statistics for a given training energy E_t = ||x_t||^2:
///   var(hhat)   = g^4 E_t / (g^2 E_t + N0)
///   var(htilde) = g^2 N0  / (g^2 E_t + N0)
/// Throws DomainError for negative or non-finite energy.
EstimationStats mmse_stats(const ChannelConfig& cfg, double training_energy);

/// Optimal single-pilot power |x_t|^2 = sqrt(xi (xi + mP)) - xi with
/// xi = (m g^2 P + (m-1) N0) / ((m-2) g^2). Requires m >= 3.
double pilot_power_unconstrained(const ChannelConfig& cfg);

}  // namespace pilotcap
