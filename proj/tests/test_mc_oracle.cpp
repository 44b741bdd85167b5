#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "pilotcap/core_model.hpp"
#include "pilotcap/errors.hpp"
#include "pilotcap/mc_oracle.hpp"
#include "pilotcap/peakcap.hpp"
#include "pilotcap/worstcase.hpp"

using namespace pilotcap;

TEST_CASE("philox4x32-10 known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and disjoint") {
  SimStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  std::vector<std::uint32_t> va, vc, vd;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u32();
    CHECK(x == b.next_u32());
    va.push_back(x);
    vc.push_back(c.next_u32());
    vd.push_back(d.next_u32());
  }
  CHECK(va != vc);
  CHECK(va != vd);
  std::set<std::uint32_t> uniq(va.begin(), va.end());
  CHECK(uniq.size() > 990);

  SimStream u(1, 0);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = u.uniform();
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    sum += x;
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(std::abs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("gaussian moments") {
  SimStream s(9, 1);
  const int n = 400000;
  double m1 = 0.0, m2 = 0.0, m4 = 0.0, cre = 0.0, cim = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = s.normal();
    m1 += x;
    m2 += x * x;
    m4 += x * x * x * x;
    const auto z = s.cnormal(2.0);
    cre += z.real() * z.real();
    cim += z.imag() * z.imag();
  }
  CHECK(std::abs(m1 / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(m2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(m4 / n - 3.0) < 4.0 * std::sqrt(96.0 / n));
  CHECK(std::abs(cre / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(cim / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("training simulation matches the estimation statistics") {
  const auto cfg = ChannelConfig::from_raw(8, 2.0, 0.5, 1.5);
  const auto plan = TrainingPlan::power_fraction(0.3);
  SimStream st(3, 0);
  const int n = 200000;
  auto samples = simulate_training_block(cfg, plan, n, st);
  const auto ref = mmse_stats(cfg, plan.training_energy(cfg));
  double vh = 0.0, vt = 0.0;
  std::complex<double> cross = 0.0;
  for (const auto& s : samples) {
    vh += std::norm(s.hhat);
    vt += std::norm(s.htilde);
    cross += s.hhat * std::conj(s.htilde);
  }
  CHECK(std::abs(vh / n / ref.var_hhat - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(vt / n / ref.var_htilde - 1.0) < 4.0 * std::sqrt(2.0 / n));
  // The MMSE error is uncorrelated with the estimate.
  CHECK(std::abs(cross) / n < 4.0 * std::sqrt(ref.var_hhat * ref.var_htilde / n));

  auto none = simulate_training_block(cfg, 0.0, 1000, st);
  for (const auto& s : none) CHECK(s.hhat == std::complex<double>(0.0, 0.0));
  CHECK_THROWS_AS(simulate_training_block(cfg, -1.0, 10, st), DomainError);
}

TEST_CASE("simulated output energy against the analytic density") {
  const int n = 20000;
  const double thr = 1.95 / std::sqrt(static_cast<double>(n));  // 0.1% level
  struct Cfg {
    int m;
    double r, K;
  };
  for (const auto& c : {Cfg{2, 1.0, 2.0}, Cfg{5, 0.0, 0.0}, Cfg{5, 1.0, 2.0}, Cfg{9, 2.0, 6.0}}) {
    SimStream st(11, static_cast<std::uint64_t>(c.m * 100 + c.K));
    INFO("m=" << c.m << " r=" << c.r << " K=" << c.K);
    CHECK(empirical_r_check(c.m, c.r, c.K, n, st) < thr);
  }
  // A wrong hypothesis is detected.
  SimStream st(11, 999);
  std::vector<double> samples;
  for (int i = 0; i < n; ++i) samples.push_back(st.exponential() + st.exponential());
  CHECK(ks_statistic(samples, AnalyticRCdf(4, 0.0, 0.0)) > 0.1);
  CHECK(ks_statistic(samples, AnalyticRCdf(3, 0.0, 0.0)) < thr);
}

TEST_CASE("monte carlo worst-case rate") {
  for (auto [m, snr] : {std::pair{2, 1.0}, std::pair{10, 0.3}, std::pair{200, 4.0}}) {
    SimStream st(5, static_cast<std::uint64_t>(m));
    auto e = mc_worstcase_capacity(m, snr, 200000, st);
    CHECK(e.stderr_ > 0.0);
    CHECK(std::abs(e.estimate - capacity_worstcase(m, snr).rate_nats) < 3.5 * e.stderr_);
  }
  SimStream st(5, 0);
  auto zero = mc_log1p_mean(0.0, 10, st);
  CHECK(zero.estimate == 0.0);
  CHECK(zero.stderr_ == 0.0);
}

TEST_CASE("monte carlo mutual information for two symbols") {
  const double delta = 0.3, snr = 1.0;
  const auto pm = peak_model(2, delta, snr);
  const double top = std::sqrt(pm.peak_L);
  MagnitudeDistribution dist{{0.4 * top, top}, {0.35, 0.65}, pm.peak_L};
  const double analytic = mutual_info_peak(2, delta, snr, dist);
  auto e1 = mc_mutual_info_m2(delta, snr, dist, 200000, 77, 1);
  auto e4 = mc_mutual_info_m2(delta, snr, dist, 200000, 77, 4);
  CHECK(e1.estimate == e4.estimate);
  CHECK(std::abs(e1.estimate - analytic) < 3.5 * e1.stderr_);
  CHECK_THROWS_AS(mc_mutual_info_m2(0.0, snr, dist, 10, 1), DomainError);
}
