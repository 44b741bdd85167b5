#include "pilotcap/core_model.hpp"

#include <cmath>
#include <string>

#include "pilotcap/errors.hpp"

namespace pilotcap {

namespace {

void check_block(int m) {
  if (m < 2) throw DomainError("block length m must be >= 2, got " + std::to_string(m));
}

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(name) + " must be positive and finite");
}

}  // namespace

ChannelConfig::ChannelConfig(int m, double snr, double gamma2, double n0, double p, bool raw)
    : m_(m), snr_(snr), gamma2_(gamma2), n0_(n0), p_(p), raw_(raw) {
  check_block(m);
  check_positive(snr, "snr");
}

ChannelConfig::ChannelConfig(int m, double snr) : ChannelConfig(m, snr, 1.0, 1.0, snr, false) {}

ChannelConfig ChannelConfig::from_raw(int m, double gamma2, double n0, double p) {
  check_positive(gamma2, "gamma2");
  check_positive(n0, "n0");
  check_positive(p, "p");
  return ChannelConfig(m, gamma2 * p / n0, gamma2, n0, p, true);
}

TrainingPlan TrainingPlan::power_fraction(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("power fraction delta must lie in (0,1)");
  return TrainingPlan(PowerFraction{delta});
}

TrainingPlan TrainingPlan::pilot_count(int l, double kappa) {
  if (l < 1) throw DomainError("pilot count l must be >= 1");
  check_positive(kappa, "kappa");
  return TrainingPlan(PilotCount{l, kappa});
}

double TrainingPlan::training_energy(const ChannelConfig& cfg) const {
  if (const auto* pf = std::get_if<PowerFraction>(&mode_)) {
    return pf->delta * cfg.m() * cfg.p();
  }
  const auto& pc = std::get<PilotCount>(mode_);
  if (pc.l >= cfg.m()) throw InfeasibleError("pilot count must be smaller than the block length");
  return pc.l * pc.kappa * cfg.p();
}

EstimationStats mmse_stats(const ChannelConfig& cfg, double training_energy) {
  if (!(training_energy >= 0.0) || std::isinf(training_energy)) {
    throw DomainError("training energy must be finite and nonnegative");
  }
  const double g2 = cfg.gamma2();
  const double denom = g2 * training_energy + cfg.n0();
  // var_htilde is formed as the complement so the two always sum to gamma2.
  const double var_htilde = g2 * cfg.n0() / denom;
  return EstimationStats{g2 - var_htilde, var_htilde};
}

double pilot_power_unconstrained(const ChannelConfig& cfg) {
  const int m = cfg.m();
  if (m < 3) throw UnsupportedError("pilot power closed form is singular at m = 2");
  const double g2 = cfg.gamma2();
  const double mp = m * cfg.p();
  const double xi = (m * g2 * cfg.p() + (m - 1) * cfg.n0()) / ((m - 2) * g2);
  // sqrt(xi(xi+mP)) - xi rewritten without cancellation.
  return xi * mp / (std::sqrt(xi * (xi + mp)) + xi);
}

}  // namespace pilotcap
