#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "pilotcap/cli.hpp"
#include "pilotcap/errors.hpp"

using namespace pilotcap::cli;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("pilotcap_test_" + name);
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333");
  CHECK(format_number(-2.5e-7) == "-2.5e-07");
  CHECK(format_number(1.0 / 0.0) == "inf");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_db(1.44141) == "1.4414");
  CHECK(format_db(-0.07971) == "-0.0797");
}

TEST_CASE("snr-log grid") {
  auto g = parse_snr_log("-3:1:0.5");
  REQUIRE(g.size() == 9);
  CHECK(g.front() == doctest::Approx(1e-3));
  CHECK(g.back() == doctest::Approx(10.0));
  CHECK(parse_snr_log("0:0:1").size() == 1);
  CHECK_THROWS_AS(parse_snr_log("1:0:0.1"), pilotcap::ConfigError);
  CHECK_THROWS_AS(parse_snr_log("0:1"), pilotcap::ConfigError);
  CHECK_THROWS_AS(parse_snr_log("0:1:0"), pilotcap::ConfigError);
}

TEST_CASE("worstcase-curve csv and json carry the same numbers") {
  auto csv = run_cli({"worstcase-curve", "--m", "3,10", "--snr-log", "-1:0:0.5"});
  REQUIRE(csv.code == kOk);
  auto ls = lines(csv.out);
  REQUIRE(ls.size() == 7);
  CHECK(ls[0] == "m,snr,rate_nats,ebn0_db");
  CHECK(ls[1].rfind("3,0.1,", 0) == 0);
  CHECK(ls[4].rfind("10,0.1,", 0) == 0);

  auto js = run_cli({"worstcase-curve", "--m", "3,10", "--snr-log", "-1:0:0.5", "--json"});
  REQUIRE(js.code == kOk);
  auto j = nlohmann::json::parse(js.out);
  REQUIRE(j.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    std::istringstream row(ls[i + 1]);
    std::string m, snr, rate, eb;
    std::getline(row, m, ',');
    std::getline(row, snr, ',');
    std::getline(row, rate, ',');
    std::getline(row, eb, ',');
    CHECK(j[i]["m"].get<int>() == std::stoi(m));
    CHECK(j[i]["rate_nats"].get<double>() == std::stod(rate));
    CHECK(j[i]["ebn0_db"].get<double>() == std::stod(eb));
  }

  // Byte-identical across runs and thread counts.
  auto again = run_cli({"worstcase-curve", "--m", "3,10", "--snr-log", "-1:0:0.5", "--threads", "3"});
  CHECK(again.out == csv.out);
}

TEST_CASE("min-bit-energy table row") {
  auto r = run_cli({"min-bit-energy", "--m", "50", "--kappa", "10"});
  REQUIRE(r.code == kOk);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 2);
  CHECK(ls[0] == "m,ebn0_min_db,n_pilots,snr_star");
  CHECK(ls[1] == "50,1.4414,1,0.41");

  auto u = run_cli({"min-bit-energy", "--m", "100"});
  REQUIRE(u.code == kOk);
  CHECK(lines(u.out)[1].rfind("100,0.8711,1,", 0) == 0);
}

TEST_CASE("argument errors exit with code 2") {
  CHECK(run_cli({}).code == kBadArgs);
  CHECK(run_cli({"no-such-command"}).code == kBadArgs);
  CHECK(run_cli({"worstcase-curve", "--snr-log", "-1:0:0.5"}).code == kBadArgs);
  CHECK(run_cli({"worstcase-curve", "--m", "10"}).code == kBadArgs);
  CHECK(run_cli({"worstcase-curve", "--m", "1", "--snr", "1"}).code == kBadArgs);
  CHECK(run_cli({"worstcase-curve", "--m", "x", "--snr", "1"}).code == kBadArgs);
  CHECK(run_cli({"worstcase-curve", "--m", "10", "--snr", "-1"}).code == kBadArgs);
  CHECK(run_cli({"peak-pilot", "--m", "10", "--snr", "1"}).code == kBadArgs);
  CHECK(run_cli({"flash", "--m", "10", "--snr", "0.1", "--plan", "bogus"}).code == kBadArgs);
  CHECK(run_cli({"oracle-validate", "--suite", "bogus"}).code == kBadArgs);
  CHECK(run_cli({"noncoherent", "--m", "2", "--snr", "1", "--tol-kt", "-1"}).code == kBadArgs);
  auto r = run_cli({"worstcase-curve", "--snr", "1"});
  CHECK(r.err.find("--m") != std::string::npos);
  CHECK(r.out.empty());
}

TEST_CASE("numerical failures exit with code 3") {
  // Rounding leaves gaps of order 1e-16, so a zero tolerance cannot be met.
  auto u = run_cli({"noncoherent", "--m", "2", "--snr", "30", "--tol-kt", "0"});
  CHECK(u.code == kNumerical);
  CHECK(u.err.find("certification") != std::string::npos);
  auto ls = lines(u.out);
  REQUIRE(ls.size() == 2);
  CHECK(ls[1].substr(ls[1].size() - 5) == "false");

  const auto out = temp_path("partial.csv");
  auto p = run_cli({"noncoherent", "--m", "2", "--snr", "30", "--tol-kt", "0", "--out", out.string()});
  CHECK(p.code == kNumerical);
  std::ifstream mf(out.string() + ".manifest.json");
  REQUIRE(mf.good());
  auto j = nlohmann::json::parse(mf);
  CHECK(j["status"] == "partial");
  CHECK(j["notes"].size() == 1);
  std::filesystem::remove(out);
  std::filesystem::remove(out.string() + ".manifest.json");

  // A flash duty above one is rejected as an invalid plan.
  CHECK(run_cli({"flash", "--m", "10", "--snr", "0.5", "--plan", "constant", "--exponent", "2"}).code == kBadArgs);
}

TEST_CASE("config file with flag override") {
  const auto cfg = temp_path("cfg.json");
  {
    std::ofstream f(cfg);
    f << R"({"m": [3, 5], "snr": [0.5], "json": true})";
  }
  auto r = run_cli({"worstcase-curve", "--config", cfg.string()});
  REQUIRE(r.code == kOk);
  auto j = nlohmann::json::parse(r.out);
  REQUIRE(j.size() == 2);
  CHECK(j[1]["m"] == 5);

  auto o = run_cli({"worstcase-curve", "--config", cfg.string(), "--m", "7"});
  REQUIRE(o.code == kOk);
  auto jo = nlohmann::json::parse(o.out);
  REQUIRE(jo.size() == 1);
  CHECK(jo[0]["m"] == 7);
  CHECK(jo[0]["snr"] == 0.5);

  {
    std::ofstream f(cfg);
    f << "{not json";
  }
  CHECK(run_cli({"worstcase-curve", "--config", cfg.string()}).code == kBadArgs);
  CHECK(run_cli({"worstcase-curve", "--config", temp_path("missing.json").string()}).code == kBadArgs);
  std::filesystem::remove(cfg);
}

TEST_CASE("output file and manifest") {
  const auto out = temp_path("curve.csv");
  auto r = run_cli({"worstcase-curve", "--m", "10", "--snr", "0.1,1", "--out", out.string(), "--seed", "7"});
  REQUIRE(r.code == kOk);
  CHECK(r.out.empty());
  std::ifstream f(out);
  std::stringstream body;
  body << f.rdbuf();
  CHECK(lines(body.str()).size() == 3);

  std::ifstream mf(out.string() + ".manifest.json");
  REQUIRE(mf.good());
  auto j = nlohmann::json::parse(mf);
  CHECK(j["command"] == "worstcase-curve");
  CHECK(j["version"] == kVersion);
  CHECK(j["seeds"][0] == 7);
  CHECK(j["status"] == "complete");
  CHECK(j["outputs"][0] == out.string());
  CHECK(j["parameters"]["snr"].size() == 2);
  CHECK(j.contains("timestamp"));

  // Replaying the recorded arguments reproduces the file.
  std::vector<std::string> args = j["arguments"];
  REQUIRE(run_cli(args).code == kOk);
  std::ifstream f2(out);
  std::stringstream body2;
  body2 << f2.rdbuf();
  CHECK(body2.str() == body.str());
  std::filesystem::remove(out);
  std::filesystem::remove(out.string() + ".manifest.json");
}

TEST_CASE("other subcommands produce their schemas") {
  auto pp = run_cli({"peak-pilot", "--m", "50", "--snr", "0.41", "--kappa", "10"});
  REQUIRE(pp.code == kOk);
  CHECK(lines(pp.out)[0] == "m,snr,kappa,l_star,rate_nats,ebn0_db");
  CHECK(lines(pp.out)[1].rfind("50,0.41,10,1,", 0) == 0);

  auto fl = run_cli({"flash", "--m", "10", "--snr", "0.1", "--plan", "category1", "--exponent", "0.5"});
  REQUIRE(fl.code == kOk);
  CHECK(lines(fl.out)[0] == "m,snr,duty,rate_nats,ebn0_db");

  auto ok = run_cli({"ook", "--m", "10", "--snr", "0.001"});
  REQUIRE(ok.code == kOk);
  CHECK(lines(ok.out)[0] == "m,snr,delta,nu,p0,r0,rate_nats,ebn0_db,limit_ebn0_db");
  CHECK(lines(ok.out)[1].find(",-0.4011") != std::string::npos);

  auto pc = run_cli({"peakcap-optimize", "--m", "4", "--snr", "0.5", "--delta", "0.2", "--json"});
  REQUIRE(pc.code == kOk);
  auto j = nlohmann::json::parse(pc.out);
  CHECK(j[0]["certified"] == true);
  CHECK(j[0]["n_masses"] == 1);
  CHECK(j[0]["mass_points"].is_array());
  CHECK(j[0]["delta_star"] == 0.2);

  auto nc = run_cli({"noncoherent", "--m", "3", "--snr", "0.5"});
  REQUIRE(nc.code == kOk);
  CHECK(lines(nc.out)[0] == "m,snr,n_masses,mass_points,mass_probs,rate_nats,ebn0_db,kt_min_gap,certified");
}

TEST_CASE("oracle-validate") {
  auto r = run_cli({"oracle-validate", "--suite", "worstcase", "--n", "20000", "--seed", "3"});
  REQUIRE(r.code == kOk);
  auto ls = lines(r.out);
  CHECK(ls[0] == "suite,check,statistic,threshold,pass");
  CHECK(ls.size() == 5);
  for (std::size_t i = 1; i < ls.size(); ++i) CHECK(ls[i].substr(ls[i].size() - 4) == "true");
  CHECK(run_cli({"oracle-validate", "--suite", "worstcase", "--n", "10"}).code == kBadArgs);
  auto again = run_cli({"oracle-validate", "--suite", "worstcase", "--n", "20000", "--seed", "3"});
  CHECK(again.out == r.out);
}

TEST_CASE("help and version") {
  CHECK(run_cli({"--version"}).out.find(kVersion) != std::string::npos);
  CHECK(run_cli({"--help"}).code == kOk);
}
