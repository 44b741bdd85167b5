#include "pilotcap/worstcase.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "pilotcap/errors.hpp"
#include "pilotcap/numerics.hpp"

namespace pilotcap {

namespace {

constexpr int kExpNodes = 96;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_args(int m, double snr) {
  if (m < 2) throw DomainError("block length m must be >= 2");
  if (!(snr > 0.0) || !std::isfinite(snr)) throw DomainError("snr must be positive and finite");
}

}  // namespace

double bit_energy_db(double snr, double rate_nats) {
  if (snr < 1e-12 || !(rate_nats > 0.0)) return kInf;
  return 10.0 * std::log10(snr * std::numbers::ln2 / rate_nats);
}

RateResult RateResult::from_rate(double snr, double rate_nats) {
  return {rate_nats, rate_nats * std::numbers::log2e, bit_energy_db(snr, rate_nats)};
}

double effective_snr(int m, double snr, double delta) {
  const double num = delta * (1.0 - delta) * m * static_cast<double>(m) * snr * snr;
  return num / ((1.0 + (m - 2) * delta) * m * snr + (m - 1));
}

WorstcaseParams worstcase_params(int m, double snr) {
  check_args(m, snr);
  WorstcaseParams p{};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (m == 2) {
    p.eta = p.xi = nan;
    p.delta_star = 0.5;
    p.phi = 1.0;
    p.psi = 2.0;
    p.f = snr * snr / (2.0 * snr + 1.0);
    return p;
  }
  p.eta = (m * snr + (m - 1)) / (m * (m - 2.0) * snr);
  p.xi = p.eta * m * snr;
  p.delta_star = p.eta / (std::sqrt(p.eta * (p.eta + 1.0)) + p.eta);
  p.phi = p.delta_star * (1.0 - p.delta_star) * m * static_cast<double>(m);
  p.psi = (1.0 + (m - 2) * p.delta_star) * m;
  p.f = p.phi * snr * snr / (p.psi * snr + (m - 1));
  return p;
}

double expected_log1p(double s) {
  if (!(s >= 0.0)) throw DomainError("expected_log1p: s must be nonnegative");
  if (s == 0.0) return 0.0;
  const auto& rule = cached_gauss_laguerre(kExpNodes);
  if (s <= 1.0) return rule.apply([s](double w) { return std::log1p(s * w); });
  // The log singularity at w = -1/s creeps toward the origin for large s.
  // Split at w = 1: the head in u = log(1 + s w) is entire, the tail is a
  // shifted Laguerre integral with the singularity at distance ~1.
  const double top = std::log1p(s);
  const auto& gl = cached_gauss_legendre_unit(kExpNodes);
  const double head = top * gl.apply([&](double t) {
    const double u = top * t;
    const double w = std::expm1(u) / s;
    return u * std::exp(u - w) / s;
  });
  const double tail = rule.apply([s](double y) { return std::log1p(s * (1.0 + y)); });
  return head + std::exp(-1.0) * tail;
}

double expected_log1p_closed(double s) {
  if (!(s >= 0.0)) throw DomainError("expected_log1p_closed: s must be nonnegative");
  if (s == 0.0) return 0.0;
  return expint_e1_scaled(1.0 / s);
}

RateResult capacity_worstcase(int m, double snr) {
  const auto p = worstcase_params(m, snr);
  double rate = (m - 1.0) / m * expected_log1p(p.f);
  if (!std::isfinite(rate)) throw NumericalError("capacity_worstcase: non-finite rate", rate, kInf);
  return RateResult::from_rate(snr, rate);
}

double bit_energy_worstcase(int m, double snr) {
  check_args(m, snr);
  if (snr < 1e-12) return kInf;
  return capacity_worstcase(m, snr).ebn0_db;
}

MinBitEnergy min_bit_energy(int m) {
  if (m < 2) throw DomainError("block length m must be >= 2");
  auto g = golden_min([m](double x) { return bit_energy_worstcase(m, std::pow(10.0, x)); }, -4.0, 2.0, 1e-10, 61);
  return {std::pow(10.0, g.x), g.fx, g.boundary};
}

RateResult peak_pilot_rate(int m, double snr, double kappa, int l) {
  check_args(m, snr);
  if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
  if (l < 1 || l >= m) throw InfeasibleError("pilot count must satisfy 1 <= l < m");
  const double lk = l * kappa;
  if (lk >= m) throw InfeasibleError("pilots consume the whole block energy (l*kappa >= m)");
  const double g = lk * (m - lk) * snr * snr / ((m - lk + (m - l) * lk) * snr + (m - l));
  return RateResult::from_rate(snr, (m - l) / static_cast<double>(m) * expected_log1p(g));
}

PilotCountResult optimize_pilot_count(int m, double snr, double kappa) {
  check_args(m, snr);
  if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
  PilotCountResult best{0, {}};
  for (int l = 1; l < m && l * kappa < m; ++l) {
    auto r = peak_pilot_rate(m, snr, kappa, l);
    if (best.l == 0 || r.rate_nats > best.rate.rate_nats) best = {l, r};
  }
  if (best.l == 0) throw InfeasibleError("no feasible pilot count for this kappa");
  return best;
}

PilotMinBitEnergy min_bit_energy_pilot(int m, double kappa, double snr_resolution) {
  auto eb = [m, kappa](double snr) { return optimize_pilot_count(m, snr, kappa).rate.ebn0_db; };
  auto g = golden_min([&](double x) { return eb(std::pow(10.0, x)); }, -4.0, 2.0, 1e-10, 61);
  double snr = std::pow(10.0, g.x);
  if (snr_resolution > 0.0) {
    const long k0 = static_cast<long>(std::floor(snr / snr_resolution));
    double best_val = kInf, best_snr = snr;
    for (long k = std::max(1L, k0 - 2); k <= k0 + 3; ++k) {
      double s = k * snr_resolution;
      double v = eb(s);
      if (v < best_val) {
        best_val = v;
        best_snr = s;
      }
    }
    snr = best_snr;
  }
  auto pc = optimize_pilot_count(m, snr, kappa);
  return {snr, pc.rate.ebn0_db, pc.l, g.boundary};
}

FlashPlan FlashPlan::linear(double a_star) {
  if (!(a_star > 0.0)) throw DomainError("flash: a_star must be positive");
  return FlashPlan(Kind::Linear, a_star);
}

FlashPlan FlashPlan::category1(double exponent) {
  if (!(exponent > 0.0 && exponent < 1.0)) throw DomainError("flash: category 1 exponent must lie in (0,1)");
  return FlashPlan(Kind::Category1, exponent);
}

FlashPlan FlashPlan::category2(double exponent) {
  if (!(exponent > 1.0) || !std::isfinite(exponent)) throw DomainError("flash: category 2 exponent must exceed 1");
  return FlashPlan(Kind::Category2, exponent);
}

FlashPlan FlashPlan::constant(double c) { return FlashPlan(Kind::Constant, c); }

double FlashPlan::duty(double snr) const {
  switch (kind_) {
    case Kind::Linear:
      return std::min(1.0, snr / param_);
    case Kind::Category1:
    case Kind::Category2:
      return std::min(1.0, std::pow(snr, param_));
    case Kind::Constant:
      return param_;
  }
  return param_;
}

RateResult flash_rate(int m, double snr, const FlashPlan& plan) {
  check_args(m, snr);
  const double nu = plan.duty(snr);
  if (!(nu > 0.0 && nu <= 1.0)) throw DomainError("flash: duty cycle must lie in (0,1]");
  return RateResult::from_rate(snr, nu * capacity_worstcase(m, snr / nu).rate_nats);
}

double perfect_csi_capacity(double snr) {
  if (!(snr > 0.0)) throw DomainError("snr must be positive");
  return expected_log1p(snr);
}

}  // namespace pilotcap
