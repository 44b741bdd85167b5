#include <cmath>
#include <functional>
#include <map>

#include "pilotcap/cli.hpp"
#include "pilotcap/core_model.hpp"
#include "pilotcap/errors.hpp"
#include "pilotcap/mc_oracle.hpp"
#include "pilotcap/parallel.hpp"
#include "pilotcap/peakcap.hpp"
#include "pilotcap/worstcase.hpp"

namespace pilotcap::cli {

namespace {

using Row = std::vector<Cell>;

std::vector<int> require_m(const Options& o) {
  if (o.m.empty()) throw ConfigError("--m is required");
  for (int m : o.m) {
    if (m < 2) throw DomainError("block lengths must be >= 2");
  }
  return o.m;
}

std::vector<double> snr_grid(const Options& o) {
  if (!o.snr.empty()) return o.snr;
  if (!o.snr_log.empty()) return parse_snr_log(o.snr_log);
  throw ConfigError("an SNR grid is required (--snr-log lo:hi:step or --snr list)");
}

struct Job {
  int m;
  double snr;
};

std::vector<Job> jobs(const Options& o) {
  std::vector<Job> out;
  for (int m : require_m(o)) {
    for (double s : snr_grid(o)) out.push_back({m, s});
  }
  return out;
}

// Evaluates fn for every job in parallel; rows keep job order.
Table tabulate(const Options& o, std::vector<std::string> cols, const std::vector<Job>& js,
               const std::function<Row(const Job&)>& fn) {
  Table t;
  t.columns = std::move(cols);
  t.rows.resize(js.size());
  parallel_for(static_cast<int>(js.size()), o.threads, [&](int i) { t.rows[i] = fn(js[i]); });
  return t;
}

OptimizerOptions optimizer_options(const Options& o) {
  OptimizerOptions opt;
  opt.eps_kt = o.tol_kt;
  opt.threads = 1;  // parallelism is spent across table rows
  return opt;
}

std::vector<double> probs_of(const MagnitudeDistribution& d) { return d.probs; }

void flag_uncertified(Table& t, std::size_t certified_col) {
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.rows[i][certified_col].text != "true") {
      t.failed = true;
      t.notes.push_back("row " + std::to_string(i + 1) + ": Kuhn-Tucker certification failed");
    }
  }
}

Table worstcase_curve(const Options& o) {
  return tabulate(o, {"m", "snr", "rate_nats", "ebn0_db"}, jobs(o), [](const Job& j) {
    auto r = capacity_worstcase(j.m, j.snr);
    return Row{Cell::integer(j.m), Cell::num(j.snr), Cell::num(r.rate_nats), Cell::db(r.ebn0_db)};
  });
}

Table min_bit_energy_cmd(const Options& o) {
  std::vector<Job> js;
  for (int m : require_m(o)) js.push_back({m, 0.0});
  return tabulate(o, {"m", "ebn0_min_db", "n_pilots", "snr_star"}, js, [&](const Job& j) {
    if (o.kappa > 0.0) {
      auto r = min_bit_energy_pilot(j.m, o.kappa, o.snr_step);
      return Row{Cell::integer(j.m), Cell::db(r.ebn0_min_db), Cell::integer(r.l_star), Cell::num(r.snr_star)};
    }
    auto r = min_bit_energy(j.m);
    return Row{Cell::integer(j.m), Cell::db(r.ebn0_min_db), Cell::integer(1), Cell::num(r.snr_star)};
  });
}

Table peak_pilot(const Options& o) {
  if (!(o.kappa > 0.0)) throw ConfigError("peak-pilot needs --kappa > 0");
  return tabulate(o, {"m", "snr", "kappa", "l_star", "rate_nats", "ebn0_db"}, jobs(o), [&](const Job& j) {
    auto r = optimize_pilot_count(j.m, j.snr, o.kappa);
    return Row{Cell::integer(j.m),     Cell::num(j.snr),          Cell::num(o.kappa),
               Cell::integer(r.l),     Cell::num(r.rate.rate_nats), Cell::db(r.rate.ebn0_db)};
  });
}

Table flash(const Options& o) {
  std::map<int, double> a_star;
  for (int m : require_m(o)) a_star[m] = o.a_star > 0.0 ? o.a_star : min_bit_energy(m).snr_star;
  auto plan_for = [&](int m) {
    if (o.plan == "linear") return FlashPlan::linear(a_star.at(m));
    if (o.plan == "category1") return FlashPlan::category1(o.exponent);
    if (o.plan == "category2") return FlashPlan::category2(o.exponent);
    if (o.plan == "constant") return FlashPlan::constant(o.exponent);
    throw ConfigError("unknown flash plan '" + o.plan + "'");
  };
  for (int m : o.m) plan_for(m);
  return tabulate(o, {"m", "snr", "duty", "rate_nats", "ebn0_db"}, jobs(o), [&](const Job& j) {
    auto plan = plan_for(j.m);
    auto r = flash_rate(j.m, j.snr, plan);
    return Row{Cell::integer(j.m), Cell::num(j.snr), Cell::num(plan.duty(j.snr)), Cell::num(r.rate_nats),
               Cell::db(r.ebn0_db)};
  });
}

Table peakcap_optimize(const Options& o) {
  const auto opt = optimizer_options(o);
  auto t = tabulate(o,
                    {"m", "snr", "delta_star", "n_masses", "mass_points", "mass_probs", "rate_nats", "ebn0_db",
                     "kt_min_gap", "certified"},
                    jobs(o), [&](const Job& j) {
                      double delta;
                      MagnitudeDistribution dist;
                      KTReport rep;
                      if (o.delta >= 0.0) {
                        auto res = optimize_magnitude_dist(j.m, o.delta, j.snr, o.tol_kt, opt);
                        delta = o.delta;
                        dist = res.dist;
                        rep = res.report;
                      } else {
                        auto res = capacity_peak(j.m, j.snr, 1e-4, opt);
                        delta = res.delta_star;
                        dist = res.dist;
                        rep = res.report;
                      }
                      auto rate = RateResult::from_rate(j.snr, rep.c_delta);
                      return Row{Cell::integer(j.m),
                                 Cell::num(j.snr),
                                 Cell::num(delta),
                                 Cell::integer(static_cast<long>(dist.points.size())),
                                 Cell::list(dist.points),
                                 Cell::list(probs_of(dist)),
                                 Cell::num(rate.rate_nats),
                                 Cell::db(rate.ebn0_db),
                                 Cell::num(rep.min_gap),
                                 Cell::boolean(rep.certified)};
                    });
  flag_uncertified(t, 9);
  return t;
}

Table interleaved(const Options& o) {
  const auto opt = optimizer_options(o);
  auto t = tabulate(o,
                    {"m", "snr", "l_star", "n_masses", "mass_points", "mass_probs", "rate_nats", "ebn0_db",
                     "kt_min_gap", "certified"},
                    jobs(o), [&](const Job& j) {
                      auto res = interleaved_capacity(j.m, j.snr, opt);
                      return Row{Cell::integer(j.m),
                                 Cell::num(j.snr),
                                 Cell::integer(res.l_star),
                                 Cell::integer(static_cast<long>(res.dist.points.size())),
                                 Cell::list(res.dist.points),
                                 Cell::list(res.dist.probs),
                                 Cell::num(res.rate.rate_nats),
                                 Cell::db(res.rate.ebn0_db),
                                 Cell::num(res.report.min_gap),
                                 Cell::boolean(res.report.certified)};
                    });
  flag_uncertified(t, 9);
  return t;
}

Table noncoherent(const Options& o) {
  const auto opt = optimizer_options(o);
  auto t = tabulate(o,
                    {"m", "snr", "n_masses", "mass_points", "mass_probs", "rate_nats", "ebn0_db", "kt_min_gap",
                     "certified"},
                    jobs(o), [&](const Job& j) {
                      auto res = noncoherent_capacity(j.m, j.snr, opt);
                      return Row{Cell::integer(j.m),
                                 Cell::num(j.snr),
                                 Cell::integer(static_cast<long>(res.dist.points.size())),
                                 Cell::list(res.dist.points),
                                 Cell::list(res.dist.probs),
                                 Cell::num(res.rate.rate_nats),
                                 Cell::db(res.rate.ebn0_db),
                                 Cell::num(res.report.min_gap),
                                 Cell::boolean(res.report.certified)};
                    });
  flag_uncertified(t, 8);
  return t;
}

Table ook(const Options& o) {
  const double delta = o.delta >= 0.0 ? o.delta : 0.0;
  const OokConfig cfg{delta, o.nu};
  return tabulate(o, {"m", "snr", "delta", "nu", "p0", "r0", "rate_nats", "ebn0_db", "limit_ebn0_db"}, jobs(o),
                  [&](const Job& j) {
                    const double info = ook_rate(j.m, cfg, j.snr);
                    auto rate = RateResult::from_rate(j.snr, info / j.m);
                    return Row{Cell::integer(j.m),         Cell::num(j.snr),
                               Cell::num(delta),           Cell::num(o.nu),
                               Cell::num(cfg.p0(j.snr)),   Cell::num(cfg.r0(j.m, j.snr)),
                               Cell::num(rate.rate_nats),  Cell::db(rate.ebn0_db),
                               Cell::db(ook_limit_bit_energy(j.m, delta, o.nu))};
                  });
}

Table oracle_validate(const Options& o) {
  const std::string s = o.suite;
  if (s != "all" && s != "density" && s != "training" && s != "worstcase" && s != "mutual-info") {
    throw ConfigError("unknown oracle suite '" + s + "'");
  }
  const long n = static_cast<long>(o.n);
  if (n < 1000) throw ConfigError("--n must be at least 1000");
  Table t;
  t.columns = {"suite", "check", "statistic", "threshold", "pass"};
  auto add = [&](const std::string& suite, const std::string& check, double stat, double thr, bool pass) {
    t.rows.push_back({Cell::str(suite), Cell::str(check), Cell::num(stat), Cell::num(thr), Cell::boolean(pass)});
    if (!pass) {
      t.failed = true;
      t.notes.push_back("oracle check failed: " + suite + " " + check);
    }
  };
  std::uint64_t stream = 0;
  if (s == "all" || s == "density") {
    struct Cfg {
      int m;
      double r, K;
    };
    const Cfg cfgs[] = {{2, 0.0, 0.0}, {2, 1.0, 2.0}, {3, 2.0, 1.0}, {5, 0.0, 0.0}, {5, 1.0, 2.0}, {10, 1.5, 3.0}};
    const double thr = 1.358 / std::sqrt(static_cast<double>(n));
    std::vector<double> ks(std::size(cfgs));
    parallel_for(static_cast<int>(std::size(cfgs)), o.threads, [&](int i) {
      SimStream st(o.seed, 100 + i);
      ks[i] = empirical_r_check(cfgs[i].m, cfgs[i].r, cfgs[i].K, static_cast<int>(n), st);
    });
    for (std::size_t i = 0; i < std::size(cfgs); ++i) {
      add("density", "ks m=" + std::to_string(cfgs[i].m) + " r=" + format_number(cfgs[i].r) +
                         " K=" + format_number(cfgs[i].K),
          ks[i], thr, ks[i] < thr);
    }
    stream += 1;
  }
  if (s == "all" || s == "training") {
    ChannelConfig cfg(10, 1.0);
    SimStream st(o.seed, 200);
    auto samples = simulate_training_block(cfg, 1.0, static_cast<int>(n), st);
    auto ref = mmse_stats(cfg, 1.0);
    double vh = 0.0, vt = 0.0;
    for (const auto& x : samples) {
      vh += std::norm(x.hhat);
      vt += std::norm(x.htilde);
    }
    vh /= n;
    vt /= n;
    const double thr = 4.0 / std::sqrt(static_cast<double>(n));
    add("training", "var_hhat", std::abs(vh / ref.var_hhat - 1.0), thr, std::abs(vh / ref.var_hhat - 1.0) < thr);
    add("training", "var_htilde", std::abs(vt / ref.var_htilde - 1.0), thr,
        std::abs(vt / ref.var_htilde - 1.0) < thr);
  }
  if (s == "all" || s == "worstcase") {
    const Job cases[] = {{2, 1.0}, {10, 0.1}, {50, 0.41}, {1000, 3.0}};
    for (std::size_t i = 0; i < std::size(cases); ++i) {
      SimStream st(o.seed, 300 + i);
      auto e = mc_worstcase_capacity(cases[i].m, cases[i].snr, static_cast<int>(n), st);
      const double z = std::abs(e.estimate - capacity_worstcase(cases[i].m, cases[i].snr).rate_nats) / e.stderr_;
      add("worstcase", "m=" + std::to_string(cases[i].m) + " snr=" + format_number(cases[i].snr), z, 3.0, z < 3.0);
    }
  }
  if (s == "all" || s == "mutual-info") {
    const double delta = 0.3, snr = 1.0;
    const auto model = peak_model(2, delta, snr);
    const double top = std::sqrt(model.peak_L);
    MagnitudeDistribution dist{{0.4 * top, top}, {0.35, 0.65}, model.peak_L};
    const double analytic = mutual_info_peak(2, delta, snr, dist);
    auto e = mc_mutual_info_m2(delta, snr, dist, n, o.seed, o.threads);
    const double z = std::abs(e.estimate - analytic) / e.stderr_;
    add("mutual-info", "m=2 two-mass", z, 3.0, z < 3.0);
  }
  (void)stream;
  return t;
}

}  // namespace

Table run_command(const Options& o) {
  if (o.command == "worstcase-curve") return worstcase_curve(o);
  if (o.command == "min-bit-energy") return min_bit_energy_cmd(o);
  if (o.command == "peak-pilot") return peak_pilot(o);
  if (o.command == "flash") return flash(o);
  if (o.command == "peakcap-optimize") return peakcap_optimize(o);
  if (o.command == "interleaved") return interleaved(o);
  if (o.command == "ook") return ook(o);
  if (o.command == "noncoherent") return noncoherent(o);
  if (o.command == "oracle-validate") return oracle_validate(o);
  throw ConfigError("unknown command '" + o.command + "'");
}

}  // namespace pilotcap::cli
